//! Polygon combinatorics: even dissections of a convex 2N-gon, cyclic ratios,
//! decorated term templates and their (signed) cyclic orbits.
//!
//! Vertices are numbered 1..2N. A decorated cell is given by its vertex list
//! and an anchor; its argument is the cyclic ratio of the cell's vertices read
//! in polygon order starting from the anchor. Anchors two steps apart give the
//! same ratio and neighbouring anchors give reciprocals, so the anchor in
//! effect selects one of the two alternating vertex classes.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{parse_rational, BigRat, MultiPoly, RatFunc};
use crate::mpl::{Composition, Expression, FunctionTerm, Kind, MplError, MplFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("bad index list {0:?}: need an even number >= 4 of distinct indices in 1..={1}")]
    BadIndexList(Vec<usize>, usize),
    #[error("polygon size {0} must be even and at least 4")]
    BadSize(usize),
    #[error("a {0}-gon has no quadrangulation")]
    NoQuadrangulation(usize),
    #[error("cell sizes {sizes:?} cannot tile a {size}-gon")]
    InfeasibleMultiset { size: usize, sizes: Vec<usize> },
    #[error("template decoration mismatch: {0}")]
    DecorationMismatch(String),
    #[error(transparent)]
    Mpl(#[from] MplError),
}

/// `(−1)^m (x_{i1}−x_{i2})(x_{i3}−x_{i4})⋯ / ((x_{i2}−x_{i3})⋯(x_{i2m}−x_{i1}))`
pub fn cyclic_ratio(indices: &[usize], nvars: usize) -> Result<RatFunc, PolygonError> {
    let k = indices.len();
    let distinct: BTreeSet<usize> = indices.iter().copied().collect();
    if k < 4 || k % 2 == 1 || distinct.len() != k || indices.iter().any(|&i| i == 0 || i > nvars) {
        return Err(PolygonError::BadIndexList(indices.to_vec(), nvars));
    }
    let x = |i: usize| MultiPoly::var(nvars, indices[i % k] - 1);
    let mut num = MultiPoly::from_int(nvars, if (k / 2) % 2 == 0 { 1 } else { -1 });
    let mut den = MultiPoly::one(nvars);
    for i in (0..k).step_by(2) {
        num = num.mul(&x(i).sub(&x(i + 1)));
        den = den.mul(&x(i + 1).sub(&x(i + 2)));
    }
    Ok(RatFunc::new(num, den).expect("distinct indices give a nonzero denominator"))
}

/// A dissection of the convex `size`-gon by non-crossing diagonals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dissection {
    pub size: usize,
    pub diagonals: BTreeSet<(usize, usize)>,
}

impl Dissection {
    fn from_cells(size: usize, cells: &[Vec<usize>]) -> Self {
        let mut diagonals = BTreeSet::new();
        for c in cells {
            for i in 0..c.len() {
                let (a, b) = (c[i].min(c[(i + 1) % c.len()]), c[i].max(c[(i + 1) % c.len()]));
                if !is_polygon_edge(size, a, b) {
                    diagonals.insert((a, b));
                }
            }
        }
        Dissection { size, diagonals }
    }

    /// The cells as ascending vertex lists, sorted.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![(1..=self.size).collect::<Vec<usize>>()];
        for &(a, b) in &self.diagonals {
            let i = cells
                .iter()
                .position(|c| c.contains(&a) && c.contains(&b))
                .expect("diagonals of a dissection are non-crossing");
            let c = cells.swap_remove(i);
            let inner: Vec<usize> = c.iter().copied().filter(|&v| v >= a && v <= b).collect();
            let outer: Vec<usize> = c.iter().copied().filter(|&v| v <= a || v >= b).collect();
            cells.push(inner);
            cells.push(outer);
        }
        cells.sort();
        cells
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.cells().iter().map(|c| c.len()).collect();
        v.sort_unstable();
        v
    }
}

fn is_polygon_edge(size: usize, a: usize, b: usize) -> bool {
    let (a, b) = (a.min(b), a.max(b));
    b == a + 1 || (a == 1 && b == size)
}

/// Proper crossing of two chords of a convex polygon.
pub fn chords_cross(p: (usize, usize), q: (usize, usize)) -> bool {
    let (a, b) = (p.0.min(p.1), p.0.max(p.1));
    let (c, d) = (q.0.min(q.1), q.0.max(q.1));
    if a == c || a == d || b == c || b == d {
        return false;
    }
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

fn check_size(size: usize) -> Result<(), PolygonError> {
    if size < 4 || size % 2 == 1 {
        return Err(PolygonError::BadSize(size));
    }
    Ok(())
}

/// All dissections of the polygon on `verts` (convex, in order) into cells
/// whose sizes lie in `allowed`, as lists of cells.
fn dissect(verts: &[usize], allowed: &BTreeSet<usize>) -> Vec<Vec<Vec<usize>>> {
    let k = verts.len();
    if k < 2 {
        return vec![Vec::new()];
    }
    if k == 2 {
        return vec![Vec::new()];
    }
    // The cell containing the root edge (verts[0], verts[k−1]).
    let mut out = Vec::new();
    for &s in allowed {
        if s > k {
            continue;
        }
        // choose s−2 interior vertices among verts[1..k−1]
        let mut chosen = Vec::with_capacity(s);
        choose_cell(verts, allowed, s, 1, &mut chosen, &mut out);
    }
    out
}

fn choose_cell(
    verts: &[usize],
    allowed: &BTreeSet<usize>,
    s: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    let k = verts.len();
    if chosen.len() == s - 2 {
        let mut cell_idx = vec![0];
        cell_idx.extend_from_slice(chosen);
        cell_idx.push(k - 1);
        // Each gap between consecutive cell vertices spans a sub-polygon.
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![cell_idx.iter().map(|&i| verts[i]).collect()]];
        for w in cell_idx.windows(2) {
            if w[1] - w[0] == 1 {
                continue;
            }
            let sub = &verts[w[0]..=w[1]];
            let subs = dissect(sub, allowed);
            if subs.is_empty() {
                return;
            }
            let mut next = Vec::with_capacity(partial.len() * subs.len());
            for p in &partial {
                for q in &subs {
                    let mut r = p.clone();
                    r.extend(q.iter().cloned());
                    next.push(r);
                }
            }
            partial = next;
        }
        out.extend(partial);
        return;
    }
    for i in from..k - 1 {
        // Gaps must leave room for an even sub-polygon: a gap spanning j
        // steps gives a (j+1)-gon, which must be even or a single edge.
        let prev = *chosen.last().unwrap_or(&0);
        let span = i - prev;
        if span > 1 && (span + 1) % 2 == 1 {
            continue;
        }
        chosen.push(i);
        choose_cell(verts, allowed, s, i + 1, chosen, out);
        chosen.pop();
    }
}

pub fn enumerate_quadrangulations(size: usize) -> Result<Vec<Dissection>, PolygonError> {
    if size < 4 || size % 2 == 1 {
        return Err(PolygonError::NoQuadrangulation(size));
    }
    let m = (size - 2) / 2;
    enumerate_even_dissections(size, &vec![4; m])
}

/// Dissections realizing exactly the multiset of cell sizes.
pub fn enumerate_even_dissections(size: usize, cell_sizes: &[usize]) -> Result<Vec<Dissection>, PolygonError> {
    check_size(size)?;
    let infeasible = || PolygonError::InfeasibleMultiset {
        size,
        sizes: cell_sizes.to_vec(),
    };
    if cell_sizes.is_empty() || cell_sizes.iter().any(|&c| c < 4 || c % 2 == 1) {
        return Err(infeasible());
    }
    if cell_sizes.iter().map(|c| c - 2).sum::<usize>() != size - 2 {
        return Err(infeasible());
    }
    let mut want = cell_sizes.to_vec();
    want.sort_unstable();
    let allowed: BTreeSet<usize> = cell_sizes.iter().copied().collect();
    let verts: Vec<usize> = (1..=size).collect();
    let mut out: Vec<Dissection> = dissect(&verts, &allowed)
        .into_iter()
        .filter(|cells| {
            let mut s: Vec<usize> = cells.iter().map(|c| c.len()).collect();
            s.sort_unstable();
            s == want
        })
        .map(|cells| Dissection::from_cells(size, &cells))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Cell list of a dissection without face walking, for internal use.
fn dissect_cells(verts: &[usize], allowed: &BTreeSet<usize>, count: usize) -> Vec<Vec<Vec<usize>>> {
    dissect(verts, allowed).into_iter().filter(|c| c.len() == count).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Symmetrize {
    None,
    Cyclic,
    SignedCyclic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecoratedCell {
    /// Vertices of the cell, ascending.
    pub vertices: Vec<usize>,
    pub anchor: usize,
    /// 1-based position of this cell's argument.
    pub order: usize,
}

impl DecoratedCell {
    /// Cell vertices in polygon order starting at the anchor.
    pub fn reading(&self, size: usize) -> Vec<usize> {
        let mut v = self.vertices.clone();
        v.sort_by_key(|&x| (x + size - self.anchor) % size);
        v
    }

    fn canonical_anchor(&self, size: usize) -> usize {
        // smallest vertex in the anchor's alternating class
        let r = self.reading(size);
        r.iter().step_by(2).copied().min().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermTemplate {
    pub coeff: BigRat,
    pub kind: Kind,
    pub comp: Composition,
    pub cells: Vec<DecoratedCell>,
    pub symmetrize: Symmetrize,
    pub polygon: usize,
}

impl TermTemplate {
    pub fn validate(&self) -> Result<(), PolygonError> {
        let bad = |m: String| Err(PolygonError::DecorationMismatch(m));
        check_size(self.polygon)?;
        if self.cells.len() != self.comp.depth() {
            return bad(format!("{} cells for depth {}", self.cells.len(), self.comp.depth()));
        }
        let mut orders: Vec<usize> = self.cells.iter().map(|c| c.order).collect();
        orders.sort_unstable();
        if orders != (1..=self.cells.len()).collect::<Vec<_>>() {
            return bad(format!("orders {orders:?} are not 1..{}", self.cells.len()));
        }
        for c in &self.cells {
            let set: BTreeSet<usize> = c.vertices.iter().copied().collect();
            if c.vertices.len() < 4 || c.vertices.len() % 2 == 1 || set.len() != c.vertices.len() {
                return bad(format!("cell {:?} is not an even polygon", c.vertices));
            }
            if c.vertices.iter().any(|&v| v == 0 || v > self.polygon) {
                return bad(format!("cell {:?} leaves the {}-gon", c.vertices, self.polygon));
            }
            if !set.contains(&c.anchor) {
                return bad(format!("anchor {} not in cell {:?}", c.anchor, c.vertices));
            }
        }
        for (i, a) in self.cells.iter().enumerate() {
            for b in &self.cells[i + 1..] {
                if cells_overlap(a, b, self.polygon) {
                    return bad(format!("cells {:?} and {:?} overlap", a.vertices, b.vertices));
                }
            }
        }
        Ok(())
    }

    /// The single unsymmetrized term.
    pub fn base_function(&self) -> Result<MplFunction, PolygonError> {
        let mut cells = self.cells.clone();
        cells.sort_by_key(|c| c.order);
        let args = cells
            .iter()
            .map(|c| cyclic_ratio(&c.reading(self.polygon), self.polygon))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MplFunction::new(self.kind, self.comp.clone(), args)?)
    }

    /// The template moved by `j` steps around the polygon.
    pub fn shifted(&self, j: usize) -> TermTemplate {
        let n = self.polygon;
        let sh = |v: usize| (v - 1 + j) % n + 1;
        let mut t = self.clone();
        for c in t.cells.iter_mut() {
            c.vertices = c.vertices.iter().map(|&v| sh(v)).collect();
            c.vertices.sort_unstable();
            c.anchor = sh(c.anchor);
        }
        t
    }

    /// Key identifying the template up to anchors within a class.
    fn canonical_cells(&self) -> Vec<(usize, Vec<usize>, usize)> {
        let mut v: Vec<(usize, Vec<usize>, usize)> = self
            .cells
            .iter()
            .map(|c| (c.order, c.vertices.clone(), c.canonical_anchor(self.polygon)))
            .collect();
        v.sort();
        v
    }
}

fn cells_overlap(a: &DecoratedCell, b: &DecoratedCell, n: usize) -> bool {
    // Disjoint interiors iff b sits inside one arc cut off by a side of a.
    let r = a.reading(n);
    let pos = |v: usize| (v + n - r[0]) % n;
    let sa: BTreeSet<usize> = r.iter().copied().collect();
    let gap_of = |v: usize| r.iter().rposition(|&x| pos(x) < pos(v)).unwrap_or(r.len() - 1);
    let outside: Vec<usize> = b.vertices.iter().copied().filter(|v| !sa.contains(v)).collect();
    let Some(&first) = outside.first() else {
        return true;
    };
    let g = gap_of(first);
    if outside.iter().any(|&v| gap_of(v) != g) {
        return true;
    }
    let ends = [r[g], r[(g + 1) % r.len()]];
    b.vertices.iter().any(|v| sa.contains(v) && !ends.contains(v))
}

/// Orbit expansion per the template's symmetrization, merged.
pub fn instantiate(tpl: &TermTemplate) -> Result<Expression, PolygonError> {
    tpl.validate()?;
    let n = tpl.polygon;
    let mut e = Expression::new(n);
    match tpl.symmetrize {
        Symmetrize::None => e.push(FunctionTerm::new(tpl.coeff.clone(), tpl.base_function()?)),
        Symmetrize::Cyclic | Symmetrize::SignedCyclic => {
            for j in 1..=n {
                let f = tpl.shifted(j % n).base_function()?;
                let c = if tpl.symmetrize == Symmetrize::SignedCyclic && j % 2 == 1 {
                    -tpl.coeff.clone()
                } else {
                    tpl.coeff.clone()
                };
                e.push(FunctionTerm::new(c, f));
            }
        }
    }
    Ok(e.merged())
}

#[derive(Clone, Debug)]
pub struct AnsatzOptions {
    pub kind: Kind,
    pub cell_sizes: Vec<usize>,
    pub symmetrize: Symmetrize,
}

impl Default for AnsatzOptions {
    fn default() -> Self {
        AnsatzOptions {
            kind: Kind::IN,
            cell_sizes: vec![4],
            symmetrize: Symmetrize::Cyclic,
        }
    }
}

/// All decorated templates for the given compositions: cells forming a
/// complete even dissection of a subpolygon, both alternating classes per
/// cell, every ordering; deduplicated up to rotation (when symmetrized).
pub fn generate_ansatz(size: usize, comps: &[Composition], opts: &AnsatzOptions) -> Result<Vec<TermTemplate>, PolygonError> {
    check_size(size)?;
    let allowed: BTreeSet<usize> = opts.cell_sizes.iter().copied().collect();
    if allowed.is_empty() || allowed.iter().any(|&c| c < 4 || c % 2 == 1) {
        return Err(PolygonError::InfeasibleMultiset {
            size,
            sizes: opts.cell_sizes.clone(),
        });
    }
    let mut out = Vec::new();
    let mut seen: BTreeSet<(Composition, Vec<(usize, Vec<usize>, usize)>)> = BTreeSet::new();
    for comp in comps {
        let d = comp.depth();
        // Subpolygons with a dissection into d cells: sizes 2 + Σ(c−2).
        let mut sub_sizes = BTreeSet::new();
        cell_size_sums(&allowed, d, 2, &mut sub_sizes);
        for &k in &sub_sizes {
            if k > size {
                continue;
            }
            for verts in subsets(size, k) {
                for cells in dissect_cells(&verts, &allowed, d) {
                    for classes in 0..(1u32 << d) {
                        for perm in permutations(d) {
                            let dec: Vec<DecoratedCell> = cells
                                .iter()
                                .enumerate()
                                .map(|(i, c)| {
                                    let anchor = if classes >> i & 1 == 0 { c[0] } else { c[1] };
                                    let mut cell = DecoratedCell {
                                        vertices: c.clone(),
                                        anchor,
                                        order: perm[i] + 1,
                                    };
                                    cell.vertices.sort_unstable();
                                    cell.anchor = cell.canonical_anchor(size);
                                    cell
                                })
                                .collect();
                            let tpl = TermTemplate {
                                coeff: BigRat::one(),
                                kind: opts.kind,
                                comp: comp.clone(),
                                cells: dec,
                                symmetrize: opts.symmetrize,
                                polygon: size,
                            };
                            let key = if opts.symmetrize == Symmetrize::None {
                                tpl.canonical_cells()
                            } else {
                                (0..size).map(|j| tpl.shifted(j).canonical_cells()).min().unwrap()
                            };
                            if seen.insert((comp.clone(), key)) {
                                out.push(tpl);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn cell_size_sums(allowed: &BTreeSet<usize>, d: usize, acc: usize, out: &mut BTreeSet<usize>) {
    if d == 0 {
        out.insert(acc);
        return;
    }
    for &c in allowed {
        cell_size_sums(allowed, d - 1, acc + c - 2, out);
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            if n - v + 1 < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(1, n, k, &mut cur, &mut out);
    out
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..d {
        let mut next = Vec::new();
        for p in &out {
            for i in 0..=p.len() {
                let mut q: Vec<usize> = p.clone();
                q.insert(i, k);
                next.push(q);
            }
        }
        out = next;
    }
    out.sort();
    out
}

// ---- JSON ----

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellJson {
    pub pie: Vec<usize>,
    pub anchor: usize,
    pub order: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TemplateJson {
    pub coeff: serde_json::Value,
    pub kind: String,
    pub comp: Vec<u32>,
    pub cells: Vec<CellJson>,
    pub symmetrize: Symmetrize,
    pub polygon: usize,
}

impl TermTemplate {
    pub fn to_json(&self) -> TemplateJson {
        let mut cells = self.cells.clone();
        cells.sort_by_key(|c| c.order);
        TemplateJson {
            coeff: serde_json::Value::String(self.coeff.to_string()),
            kind: self.kind.as_str().to_string(),
            comp: self.comp.parts().to_vec(),
            cells: cells
                .iter()
                .map(|c| CellJson {
                    pie: c.vertices.clone(),
                    anchor: c.anchor,
                    order: c.order,
                })
                .collect(),
            symmetrize: self.symmetrize,
            polygon: self.polygon,
        }
    }

    pub fn from_json(j: &TemplateJson) -> Result<TermTemplate, PolygonError> {
        let coeff = match &j.coeff {
            serde_json::Value::String(s) => parse_rational(s).map_err(MplError::from)?,
            serde_json::Value::Number(n) => BigRat::from_integer(
                n.as_i64()
                    .ok_or_else(|| PolygonError::DecorationMismatch(format!("coefficient {n} is not an integer")))?
                    .into(),
            ),
            v => return Err(PolygonError::DecorationMismatch(format!("bad coefficient {v}"))),
        };
        let mut cells: Vec<DecoratedCell> = j
            .cells
            .iter()
            .map(|c| {
                let mut v = c.pie.clone();
                v.sort_unstable();
                DecoratedCell {
                    vertices: v,
                    anchor: c.anchor,
                    order: c.order,
                }
            })
            .collect();
        cells.sort_by_key(|c| c.order);
        let t = TermTemplate {
            coeff,
            kind: j.kind.parse()?,
            comp: Composition::new(j.comp.clone())?,
            cells,
            symmetrize: j.symmetrize,
            polygon: j.polygon,
        };
        t.validate()?;
        Ok(t)
    }
}

/// Number of distinct orbit terms, for diagnostics.
pub fn orbit_period(tpl: &TermTemplate) -> usize {
    let base = tpl.canonical_cells();
    (1..=tpl.polygon)
        .find(|&j| tpl.shifted(j % tpl.polygon).canonical_cells() == base)
        .unwrap_or(tpl.polygon)
}

/// Number of templates per composition.
pub fn count_by_comp(t: &[TermTemplate]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for x in t {
        *m.entry(x.comp.to_string()).or_insert(0) += 1;
    }
    m
}
