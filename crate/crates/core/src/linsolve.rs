//! Exact sparse linear algebra over ℚ.
//!
//! Rows are kept as sorted `(column, BigInt)` lists scaled to primitive
//! integer vectors; elimination is fraction-free (`a*r − b*p`, then divide by
//! the content), and only the final reduced form is brought back to ℚ.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{parse_rational, BigRat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinsolveError {
    #[error("bad CSV line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("column {col} out of range for {ncols} columns")]
    ColumnOutOfRange { col: usize, ncols: usize },
}

/// Sparse rational matrix, one column → value map per row.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatQ {
    pub ncols: usize,
    pub rows: Vec<BTreeMap<usize, BigRat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct KernelBasis {
    pub vectors: Vec<Vec<BigRat>>,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

impl SparseMatQ {
    pub fn new(ncols: usize) -> Self {
        SparseMatQ {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, row: impl IntoIterator<Item = (usize, BigRat)>) -> Result<(), LinsolveError> {
        let mut r = BTreeMap::new();
        for (c, v) in row {
            if c >= self.ncols {
                return Err(LinsolveError::ColumnOutOfRange { col: c, ncols: self.ncols });
            }
            if !v.is_zero() {
                *r.entry(c).or_insert_with(BigRat::zero) += v;
            }
        }
        r.retain(|_, v: &mut BigRat| !v.is_zero());
        self.rows.push(r);
        Ok(())
    }

    pub fn from_dense(rows: &[Vec<BigRat>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatQ::new(ncols);
        for r in rows {
            m.push_row(r.iter().cloned().enumerate()).unwrap();
        }
        m
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<BigRat>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigRat::from_integer(x.into())).collect())
            .collect();
        Self::from_dense(&dense)
    }

    pub fn get(&self, r: usize, c: usize) -> BigRat {
        self.rows[r].get(&c).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn mul_vec(&self, v: &[BigRat]) -> Vec<BigRat> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(BigRat::zero(), |acc, (&c, x)| acc + x * &v[c]))
            .collect()
    }

    /// `row,col,value` triples, one nonzero per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} {}", self.nrows(), self.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            for (c, v) in r {
                let _ = writeln!(s, "{i},{c},{v}");
            }
        }
        s
    }

    /// Reads triples; an optional `# nrows ncols` header fixes the shape,
    /// otherwise it is the bounding box of the entries.
    pub fn from_csv(text: &str) -> Result<Self, LinsolveError> {
        let mut shape: Option<(usize, usize)> = None;
        let mut entries = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| LinsolveError::Csv { line: ln + 1, msg: msg.to_string() };
            if let Some(h) = line.strip_prefix('#') {
                let nums: Vec<usize> = h.split_whitespace().filter_map(|t| t.parse().ok()).collect();
                if nums.len() == 2 {
                    shape = Some((nums[0], nums[1]));
                }
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(err("expected row,col,value"));
            }
            let r: usize = parts[0].parse().map_err(|_| err("bad row index"))?;
            let c: usize = parts[1].parse().map_err(|_| err("bad column index"))?;
            let v = parse_rational(parts[2]).map_err(|e| err(&e.to_string()))?;
            entries.push((r, c, v));
        }
        let (nr, nc) = shape.unwrap_or_else(|| {
            entries.iter().fold((0, 0), |(a, b), (r, c, _)| (a.max(r + 1), b.max(c + 1)))
        });
        let mut rows = vec![BTreeMap::new(); nr];
        for (r, c, v) in entries {
            if r >= nr || c >= nc {
                return Err(LinsolveError::ColumnOutOfRange { col: c, ncols: nc });
            }
            if !v.is_zero() {
                rows[r].insert(c, v);
            }
        }
        Ok(SparseMatQ { ncols: nc, rows })
    }
}

type RowZ = Vec<(usize, BigInt)>;

fn to_primitive_int(row: &BTreeMap<usize, BigRat>) -> RowZ {
    let l = row.values().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let r: RowZ = row
        .iter()
        .map(|(&c, v)| (c, (v * BigRat::from_integer(l.clone())).to_integer()))
        .collect();
    make_primitive(r)
}

fn make_primitive(mut r: RowZ) -> RowZ {
    let g = r.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in r.iter_mut() {
            *v /= &g;
        }
    }
    if r.first().is_some_and(|(_, v)| v.is_negative()) {
        for (_, v) in r.iter_mut() {
            *v = -&*v;
        }
    }
    r
}

fn coeff_at(r: &RowZ, c: usize) -> Option<&BigInt> {
    r.binary_search_by_key(&c, |(k, _)| *k).ok().map(|i| &r[i].1)
}

/// `a*r − b*p` where `a = p[c]`, `b = r[c]`, so column `c` cancels.
fn eliminate(r: &RowZ, p: &RowZ, c: usize) -> RowZ {
    let a = coeff_at(p, c).expect("pivot entry").clone();
    let b = match coeff_at(r, c) {
        Some(b) => b.clone(),
        None => return r.clone(),
    };
    let g = a.gcd(&b);
    let (a, b) = (&a / &g, &b / &g);
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take_r = j >= p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i >= r.len() || (j < p.len() && p[j].0 < r[i].0);
        let (col, v) = if take_r {
            i += 1;
            (r[i - 1].0, &a * &r[i - 1].1)
        } else if take_p {
            j += 1;
            (p[j - 1].0, -(&b * &p[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (r[i - 1].0, &a * &r[i - 1].1 - &b * &p[j - 1].1)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    make_primitive(out)
}

/// Incremental row-echelon form: rows are added one at a time and either
/// extend the row space or are found dependent.
#[derive(Clone, Debug, Default)]
pub struct EchelonBuilder {
    ncols: usize,
    pivots: BTreeMap<usize, RowZ>,
}

impl EchelonBuilder {
    pub fn new(ncols: usize) -> Self {
        EchelonBuilder {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Returns true if the row was independent of those seen so far.
    pub fn add_row(&mut self, row: &BTreeMap<usize, BigRat>) -> bool {
        if row.is_empty() {
            return false;
        }
        let mut r = to_primitive_int(row);
        while let Some(&(c, _)) = r.first() {
            match self.pivots.get(&c) {
                Some(p) => r = eliminate(&r, p, c),
                None => {
                    self.pivots.insert(c, r);
                    return true;
                }
            }
        }
        false
    }

    /// Whether `row` lies in the current row space.
    pub fn contains(&self, row: &BTreeMap<usize, BigRat>) -> bool {
        let mut r = to_primitive_int(row);
        while let Some(&(c, _)) = r.first() {
            match self.pivots.get(&c) {
                Some(p) => r = eliminate(&r, p, c),
                None => return false,
            }
        }
        true
    }

    /// Reduced row-echelon form with unit pivots, rows ordered by pivot.
    pub fn rref(&self) -> SparseMatQ {
        // Back-substitute from the last pivot upward so each row only needs
        // rows that are already reduced.
        let mut done: BTreeMap<usize, RowZ> = BTreeMap::new();
        for (&c, row) in self.pivots.iter().rev() {
            let mut r = row.clone();
            let cols: Vec<usize> = r.iter().map(|(k, _)| *k).filter(|k| *k != c).collect();
            for k in cols {
                if let Some(p) = done.get(&k) {
                    if coeff_at(&r, k).is_some() {
                        r = eliminate(&r, p, k);
                    }
                }
            }
            done.insert(c, r);
        }
        let mut m = SparseMatQ::new(self.ncols);
        for (&c, r) in &done {
            let lead = BigRat::from_integer(coeff_at(r, c).unwrap().clone());
            m.rows.push(
                r.iter()
                    .map(|(k, v)| (*k, BigRat::from_integer(v.clone()) / &lead))
                    .collect(),
            );
        }
        m
    }

    pub fn kernel(&self) -> KernelBasis {
        kernel_from_rref(&self.rref())
    }
}

fn kernel_from_rref(r: &SparseMatQ) -> KernelBasis {
    let pivot_cols: Vec<usize> = r.rows.iter().map(|row| *row.keys().next().unwrap()).collect();
    let is_pivot: std::collections::HashSet<usize> = pivot_cols.iter().copied().collect();
    let mut vectors = Vec::new();
    for f in (0..r.ncols).filter(|c| !is_pivot.contains(c)) {
        let mut v = vec![BigRat::zero(); r.ncols];
        v[f] = BigRat::one();
        for (row, &pc) in r.rows.iter().zip(&pivot_cols) {
            if let Some(x) = row.get(&f) {
                v[pc] = -x.clone();
            }
        }
        vectors.push(v);
    }
    KernelBasis { vectors }
}

/// Reduced row-echelon form and rank. Rows are fed shortest first so that
/// sparse rows become pivots before dense ones.
pub fn rref(m: &SparseMatQ) -> (SparseMatQ, usize) {
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by_key(|&i| (m.rows[i].len(), m.rows[i].keys().next().copied()));
    let mut b = EchelonBuilder::new(m.ncols);
    for i in order {
        b.add_row(&m.rows[i]);
    }
    let r = b.rref();
    let rank = r.nrows();
    (r, rank)
}

pub fn rank(m: &SparseMatQ) -> usize {
    rref(m).1
}

pub fn kernel(m: &SparseMatQ) -> KernelBasis {
    kernel_from_rref(&rref(m).0)
}

/// Clears denominators and divides by the content so the vector has
/// coprime integer entries, first nonzero positive.
pub fn primitive_vector(v: &[BigRat]) -> Vec<BigRat> {
    let row: BTreeMap<usize, BigRat> = v
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect();
    let mut out = vec![BigRat::zero(); v.len()];
    for (c, x) in to_primitive_int(&row) {
        out[c] = BigRat::from_integer(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRat {
        BigRat::from_integer(n.into())
    }

    #[test]
    fn small_examples() {
        let m = SparseMatQ::from_ints(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(rank(&m), 1);
        let k = kernel(&m);
        assert_eq!(k.vectors, vec![vec![q(-2), q(1)]]);
        let id = SparseMatQ::from_ints(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(rank(&id), 3);
        assert_eq!(kernel(&id).dim(), 0);
    }

    #[test]
    fn rref_has_unit_pivots() {
        let m = SparseMatQ::from_ints(&[vec![2, 4, 6], vec![1, 1, 1], vec![3, 5, 7]]);
        let (r, rk) = rref(&m);
        assert_eq!(rk, 2);
        assert_eq!(r.rows[0], BTreeMap::from([(0, q(1)), (2, q(-1))]));
        assert_eq!(r.rows[1], BTreeMap::from([(1, q(1)), (2, q(2))]));
    }

    #[test]
    fn csv_round_trip() {
        let m = SparseMatQ::from_dense(&[
            vec![BigRat::new(1.into(), 3.into()), q(0)],
            vec![q(0), q(-5)],
            vec![q(0), q(0)],
        ]);
        let back = SparseMatQ::from_csv(&m.to_csv()).unwrap();
        assert_eq!(back, m);
        assert!(SparseMatQ::from_csv("0,1").is_err());
    }

    #[test]
    fn incremental_matches_batch() {
        let rows = [vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![1, 2, 1, 0], vec![0, 0, 1, 1]];
        let m = SparseMatQ::from_ints(&rows);
        let mut b = EchelonBuilder::new(4);
        let indep: Vec<bool> = m.rows.iter().map(|r| b.add_row(r)).collect();
        assert_eq!(indep, vec![true, true, false, true]);
        assert_eq!(b.rref(), rref(&m).0);
        assert!(b.contains(&m.rows[2]));
    }
}
