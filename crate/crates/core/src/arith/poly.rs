//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic with `x1 > x2 > ...`. The leading term is therefore the
//! last entry of the map. No zero coefficients are ever stored, so structural
//! equality is mathematical equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::BigRat;

/// Exponent vector, compared in graded lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Value substituted for a single variable by [`MultiPoly::substitute_var`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarValue {
    Var(usize),
    Const(BigRat),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRat>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRat::one())
    }

    pub fn constant(nvars: usize, c: BigRat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRat::from_integer(c.into()))
    }

    /// The variable `x_{v+1}` (indices are 0-based internally).
    pub fn var(nvars: usize, v: usize) -> Self {
        assert!(v < nvars, "variable index {v} out of range for {nvars} variables");
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, v), BigRat::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRat)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().unwrap().is_one(),
            _ => false,
        }
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_value().is_one()
    }

    /// Value of a constant polynomial (zero for the zero polynomial).
    pub fn constant_value(&self) -> BigRat {
        self.terms
            .get(&Monomial::one(self.nvars))
            .cloned()
            .unwrap_or_else(BigRat::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRat)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRat {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRat::zero)
    }

    /// Variables with a nonzero exponent in some term.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&v| self.terms.keys().any(|m| m.0[v] > 0))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: BigRat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRat) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn mul_term(&self, m: &Monomial, c: &BigRat) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).collect(),
        }
    }

    /// Quotient `self / divisor` when the division is exact, `None` otherwise.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if divisor.is_constant() {
            return Some(self.scale(&divisor.constant_value().recip()));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            rem = rem.sub(&divisor.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn divides(&self, other: &MultiPoly) -> bool {
        other.div_exact(self).is_some()
    }

    pub fn evaluate(&self, point: &[BigRat]) -> BigRat {
        assert!(point.len() >= self.nvars, "point has too few coordinates");
        let mut acc = BigRat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Replaces every variable `x_v` by `images[v]` (all images share one variable count).
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Self::zero(target);
        let mut cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut t = Self::constant(target, c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let pw = cache
                        .entry((v, e))
                        .or_insert_with(|| images[v].pow(e))
                        .clone();
                    t = t.mul(&pw);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Substitutes a single variable, keeping the variable count.
    pub fn substitute_var(&self, v: usize, value: &VarValue) -> MultiPoly {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[v];
            let mut mm = m.clone();
            mm.0[v] = 0;
            match value {
                VarValue::Var(w) => {
                    mm.0[*w] += e;
                    out.add_term(mm, c.clone());
                }
                VarValue::Const(k) => {
                    let f = num_traits::pow(k.clone(), e as usize);
                    out.add_term(mm, c * f);
                }
            }
        }
        out
    }

    /// Same polynomial viewed in a larger variable count.
    pub fn extend_vars(&self, nvars: usize) -> MultiPoly {
        assert!(nvars >= self.nvars);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = m.0.clone();
            e.resize(nvars, 0);
            (Monomial(e), c.clone())
        });
        MultiPoly::from_terms(nvars, terms)
    }

    /// Coefficients with respect to `x_v`: `self = sum_i coeffs[i] * x_v^i`.
    pub fn coeffs_in(&self, v: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Self::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let mut mm = m.clone();
            let e = mm.0[v] as usize;
            mm.0[v] = 0;
            out[e].add_term(mm, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(nvars: usize, v: usize, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut out = Self::zero(nvars);
        for (i, c) in coeffs.iter().enumerate() {
            for (m, x) in &c.terms {
                let mut mm = m.clone();
                mm.0[v] += i as u32;
                out.add_term(mm, x.clone());
            }
        }
        out
    }

    /// Splits `self = c * p` with `p` having coprime integer coefficients and a
    /// positive leading coefficient. The zero polynomial gives `(0, 0)`.
    pub fn primitive(&self) -> (BigRat, MultiPoly) {
        if self.is_zero() {
            return (BigRat::zero(), self.clone());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&n);
        }
        let mut content = BigRat::new(num_gcd, den_lcm);
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        let p = self.scale(&content.recip());
        (content, p)
    }

    pub fn normalized(&self) -> MultiPoly {
        self.primitive().1
    }

    fn is_linear(&self) -> bool {
        self.total_degree() == 1
    }

    /// Greatest common divisor, normalized to content 1 and positive leading
    /// coefficient. `gcd(p, 0)` is the normalized `p`.
    pub fn gcd(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        if self.is_zero() {
            return other.normalized();
        }
        if other.is_zero() {
            return self.normalized();
        }
        if self.is_constant() || other.is_constant() {
            return Self::one(self.nvars);
        }
        if self.is_linear() {
            return if self.divides(other) { self.normalized() } else { Self::one(self.nvars) };
        }
        if other.is_linear() {
            return if other.divides(self) { other.normalized() } else { Self::one(self.nvars) };
        }
        let va = self.variables();
        let vb = other.variables();
        let v = *va.iter().chain(vb.iter()).max().unwrap();
        if !va.contains(&v) {
            return self.gcd(&other.content_in(v));
        }
        if !vb.contains(&v) {
            return other.gcd(&self.content_in(v));
        }
        let ca = self.content_in(v);
        let cb = other.content_in(v);
        let gc = ca.gcd(&cb);
        let pa = self.div_exact(&ca).expect("content divides");
        let pb = other.div_exact(&cb).expect("content divides");
        let gp = subresultant_gcd(&pa, &pb, v);
        gc.mul(&gp).normalized()
    }

    /// Gcd of the coefficients of `self` viewed as a polynomial in `x_v`.
    pub fn content_in(&self, v: usize) -> MultiPoly {
        let mut g = Self::zero(self.nvars);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = g.gcd(&c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn to_string_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                factors.push(a.to_string());
            }
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names(v)),
                    _ => factors.push(format!("{}^{}", names(v), e)),
                }
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

/// Default variable naming `x1, x2, ...`.
pub fn var_name(v: usize) -> String {
    format!("x{}", v + 1)
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&var_name))
    }
}

fn univariate_deg(c: &[MultiPoly]) -> usize {
    c.len() - 1
}

fn trim(mut c: Vec<MultiPoly>) -> Vec<MultiPoly> {
    while c.len() > 1 && c.last().unwrap().is_zero() {
        c.pop();
    }
    c
}

/// Pseudo-remainder of `a` by `b` (coefficient lists in the main variable).
fn prem(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    let db = univariate_deg(b);
    let lb = b[db].clone();
    let mut r: Vec<MultiPoly> = a.to_vec();
    let mut k = univariate_deg(a) as i64 - db as i64 + 1;
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = univariate_deg(&r);
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<MultiPoly> = r.iter().map(|c| c.mul(&lb)).collect();
        for (i, bc) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].sub(&bc.mul(&lr));
        }
        next.pop();
        r = trim(next);
        k -= 1;
        if r.iter().all(MultiPoly::is_zero) {
            return vec![MultiPoly::zero(a[0].nvars)];
        }
    }
    if k > 0 {
        let f = lb.pow(k as u32);
        r = r.iter().map(|c| c.mul(&f)).collect();
    }
    r
}

/// Gcd of two polynomials that are primitive with respect to `x_v`, via the
/// subresultant polynomial remainder sequence.
fn subresultant_gcd(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let nvars = a.nvars;
    let mut p = trim(a.coeffs_in(v));
    let mut q = trim(b.coeffs_in(v));
    if univariate_deg(&p) < univariate_deg(&q) {
        std::mem::swap(&mut p, &mut q);
    }
    let mut g = MultiPoly::one(nvars);
    let mut h = MultiPoly::one(nvars);
    loop {
        let delta = (univariate_deg(&p) - univariate_deg(&q)) as u32;
        let r = prem(&p, &q);
        if r.iter().all(MultiPoly::is_zero) {
            break;
        }
        if univariate_deg(&r) == 0 {
            return MultiPoly::one(nvars);
        }
        let div = g.mul(&h.pow(delta));
        p = q;
        q = r
            .iter()
            .map(|c| c.div_exact(&div).expect("subresultant division is exact"))
            .collect();
        g = p[univariate_deg(&p)].clone();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant division is exact")
        };
    }
    let qp = MultiPoly::from_coeffs_in(nvars, v, &q);
    let c = qp.content_in(v);
    qp.div_exact(&c).expect("content divides").normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    #[test]
    fn ring_arithmetic_examples() {
        let (x1, x2, x3) = (x(3, 0), x(3, 1), x(3, 2));
        let lhs = x1.sub(&x2).mul(&x1.add(&x2));
        assert_eq!(lhs, x1.mul(&x1).sub(&x2.mul(&x2)));
        assert_eq!(lhs.add(&MultiPoly::zero(3)), lhs);
        let lhs = x1.sub(&x2).add(&x2.sub(&x3)).mul(&x3.sub(&x1));
        let d = x1.sub(&x3);
        assert_eq!(lhs, d.mul(&d).neg());
    }

    #[test]
    fn gcd_examples() {
        let (x1, x2, x3, x4) = (x(4, 0), x(4, 1), x(4, 2), x(4, 3));
        let a = x1.sub(&x2).mul(&x2.sub(&x3));
        let b = x1.sub(&x2).mul(&x3.sub(&x4));
        assert_eq!(a.gcd(&b), x1.sub(&x2));
        assert_eq!(a.scale(&BigRat::from_integer((-6).into())).gcd(&MultiPoly::zero(4)), a);
        // x^2 - 1 and x^2 - 2x + 1: Euclid gives x - 1.
        let y = x(1, 0);
        let one = MultiPoly::one(1);
        let p = y.mul(&y).sub(&one);
        let q = y.mul(&y).sub(&y.scale(&BigRat::from_integer(2.into()))).add(&one);
        assert_eq!(p.gcd(&q), y.sub(&one));
    }

    #[test]
    fn gcd_of_nonlinear_multivariate_factors() {
        let (x1, x2, x3) = (x(3, 0), x(3, 1), x(3, 2));
        let f = x1.mul(&x2).sub(&x3.mul(&x3)).add(&MultiPoly::one(3));
        let a = f.mul(&x1.add(&x3)).mul(&f);
        let b = f.mul(&x2.sub(&x1).pow(2));
        assert_eq!(a.gcd(&b), f.normalized());
        assert_eq!(b.gcd(&a), f.normalized());
    }

    #[test]
    fn div_exact_detects_non_divisibility() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let p = x1.mul(&x1).sub(&x2);
        assert!(p.div_exact(&x1.sub(&x2)).is_none());
        let q = p.mul(&x1.sub(&x2));
        assert_eq!(q.div_exact(&x1.sub(&x2)).unwrap(), p);
    }

    #[test]
    fn rendering_is_graded_lex() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let p = x2.sub(&x1.mul(&x1).scale(&BigRat::new(3.into(), 4.into()))).add(&MultiPoly::one(2));
        assert_eq!(p.to_string(), "-3/4*x1^2 + x2 + 1");
    }
}
