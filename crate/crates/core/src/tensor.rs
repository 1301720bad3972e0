//! Symbol tensors over the letter alphabet: multilinear expansion of factored
//! entries, the shuffle product, the Lie-coalgebra projector and reduction
//! modulo shuffle products.
//!
//! Pure tensors are stored as letter sequences. The quotient by products is
//! computed in the basis of Lyndon words: for a non-Lyndon word `w` with
//! Lyndon factorization `l1 >= l2 >= ... >= lk` the shuffle `l1 ⧢ ... ⧢ lk`
//! equals `c * w` plus strictly smaller words, so these shuffles form a
//! triangular generating set of the product span and elimination against
//! them leaves a unique representative supported on Lyndon words.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{parse_poly, parse_rational, BigRat, FactoredValue, Letter, LetterRegistry};

pub type PureTensor = Vec<Letter>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("symbol entry in slot {0} is the zero function")]
    ZeroEntry(usize),
    #[error("tensor is not homogeneous: found pure tensors of weights {0} and {1}")]
    NonHomogeneous(usize, usize),
    #[error("malformed tensor data: {0}")]
    Malformed(String),
}

/// A rational linear combination of pure tensors of one common weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolTensor {
    weight: usize,
    terms: BTreeMap<PureTensor, BigRat>,
}

impl SymbolTensor {
    pub fn zero(weight: usize) -> Self {
        SymbolTensor {
            weight,
            terms: BTreeMap::new(),
        }
    }

    /// The weight-0 unit.
    pub fn unit() -> Self {
        Self::pure(Vec::new(), BigRat::one())
    }

    pub fn pure(word: PureTensor, coeff: BigRat) -> Self {
        let mut t = Self::zero(word.len());
        t.add_term(word, coeff);
        t
    }

    pub fn letter(l: Letter) -> Self {
        Self::pure(vec![l], BigRat::one())
    }

    pub fn from_terms(
        terms: impl IntoIterator<Item = (PureTensor, BigRat)>,
    ) -> Result<Self, TensorError> {
        let mut out: Option<SymbolTensor> = None;
        for (w, c) in terms {
            let t = out.get_or_insert_with(|| SymbolTensor::zero(w.len()));
            if w.len() != t.weight {
                return Err(TensorError::NonHomogeneous(t.weight, w.len()));
            }
            t.add_term(w, c);
        }
        Ok(out.unwrap_or_else(|| SymbolTensor::zero(0)))
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PureTensor, &BigRat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[Letter]) -> BigRat {
        self.terms.get(w).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut v: Vec<Letter> = self.terms.keys().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn add_term(&mut self, w: PureTensor, c: BigRat) {
        debug_assert_eq!(w.len(), self.weight);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
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

    pub fn add_scaled(&mut self, other: &SymbolTensor, c: &BigRat) {
        if other.is_zero() || c.is_zero() {
            return;
        }
        if self.is_zero() {
            self.weight = other.weight;
        }
        assert_eq!(self.weight, other.weight, "adding tensors of different weight");
        for (w, x) in &other.terms {
            self.add_term(w.clone(), x * c);
        }
    }

    pub fn add(&self, other: &SymbolTensor) -> SymbolTensor {
        let mut out = self.clone();
        out.add_scaled(other, &BigRat::one());
        out
    }

    pub fn sub(&self, other: &SymbolTensor) -> SymbolTensor {
        let mut out = self.clone();
        out.add_scaled(other, &-BigRat::one());
        out
    }

    pub fn scale(&self, c: &BigRat) -> SymbolTensor {
        let mut out = SymbolTensor::zero(self.weight);
        out.add_scaled(self, c);
        out.weight = self.weight;
        out
    }

    /// Concatenation product `self ⊗ other`.
    pub fn tensor(&self, other: &SymbolTensor) -> SymbolTensor {
        let mut out = SymbolTensor::zero(self.weight + other.weight);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, ca * cb);
            }
        }
        out
    }

    /// `self ⊗ entry` where the entry is expanded as `sum exponent * letter`.
    pub fn append_entry(&self, entry: &FactoredValue) -> SymbolTensor {
        let mut out = SymbolTensor::zero(self.weight + 1);
        for (w, c) in &self.terms {
            for (&l, &e) in &entry.exponents {
                let mut w2 = w.clone();
                w2.push(l);
                out.add_term(w2, c * BigRat::from_integer(e.into()));
            }
        }
        out
    }

    /// Rewrites retired letters after registry refinement.
    pub fn resolve(&self, reg: &LetterRegistry) -> SymbolTensor {
        if self.letters().iter().all(|&l| reg.is_live(l)) {
            return self.clone();
        }
        self.map_letters(|l| {
            reg.resolve(&FactoredValue {
                exponents: BTreeMap::from([(l, 1)]),
                constant: BigRat::one(),
            })
        })
    }

    /// Applies a letter map `l -> entry` slot by slot.
    pub fn map_letters(
        &self,
        mut f: impl FnMut(Letter) -> FactoredValue,
    ) -> SymbolTensor {
        let mut cache: HashMap<Letter, FactoredValue> = HashMap::new();
        let mut acc = SymbolTensor::zero(self.weight);
        for (w, c) in &self.terms {
            let mut t = SymbolTensor::pure(Vec::new(), c.clone());
            for &l in w {
                let fv = cache.entry(l).or_insert_with(|| f(l)).clone();
                t = t.append_entry(&fv);
                if t.is_zero() {
                    break;
                }
            }
            if !t.is_zero() {
                acc.add_scaled(&t, &BigRat::one());
            }
        }
        acc
    }

    pub fn to_text(&self, reg: &LetterRegistry) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let name = |l: Letter| {
            let n = reg.name(l);
            if n.contains(' ') {
                format!("({n})")
            } else {
                n
            }
        };
        self.terms
            .iter()
            .map(|(w, c)| {
                let parts: Vec<String> = w.iter().map(|&l| name(l)).collect();
                format!("{} * {}", c, parts.join(" (x) "))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn to_json(&self, reg: &LetterRegistry) -> TensorJson {
        TensorJson {
            weight: self.weight,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TensorTermJson {
                    coeff: c.to_string(),
                    letters: w.iter().map(|&l| reg.poly(l).to_string()).collect(),
                })
                .collect(),
        }
    }

    /// Reads a tensor whose letters are polynomial strings. Every letter must
    /// register as a single live letter of `reg`.
    pub fn from_json(j: &TensorJson, reg: &mut LetterRegistry) -> Result<SymbolTensor, TensorError> {
        let mut out = SymbolTensor::zero(j.weight);
        for t in &j.terms {
            if t.letters.len() != j.weight {
                return Err(TensorError::NonHomogeneous(j.weight, t.letters.len()));
            }
            let c = parse_rational(&t.coeff).map_err(|e| TensorError::Malformed(e.to_string()))?;
            let mut acc = SymbolTensor::pure(Vec::new(), c);
            for l in &t.letters {
                let p = parse_poly(l, reg.nvars()).map_err(|e| TensorError::Malformed(e.to_string()))?;
                let fv = reg
                    .register_poly(&p)
                    .map_err(|e| TensorError::Malformed(e.to_string()))?;
                acc = acc.append_entry(&fv);
            }
            out.add_scaled(&acc, &BigRat::one());
        }
        Ok(out.resolve(reg))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TensorJson {
    pub weight: usize,
    pub terms: Vec<TensorTermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TensorTermJson {
    pub coeff: String,
    pub letters: Vec<String>,
}

impl fmt::Display for SymbolTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let parts: Vec<String> = w.iter().map(|l| format!("L{l}")).collect();
            write!(f, "{} * {}", c, parts.join(" (x) "))?;
        }
        Ok(())
    }
}

/// Expands a sequence of factored slots multilinearly. A slot without letters
/// (a pure constant) annihilates the tensor.
pub fn expand_multilinear(entries: &[FactoredValue]) -> Result<SymbolTensor, TensorError> {
    for (i, e) in entries.iter().enumerate() {
        if e.constant.is_zero() {
            return Err(TensorError::ZeroEntry(i));
        }
    }
    let mut acc = SymbolTensor::unit();
    for e in entries {
        acc = acc.append_entry(e);
    }
    Ok(acc)
}

/// All interleavings of two words, with multiplicity.
pub fn shuffle_words(u: &[Letter], v: &[Letter]) -> BTreeMap<PureTensor, BigRat> {
    let mut out: BTreeMap<PureTensor, BigRat> = BTreeMap::new();
    let mut buf = Vec::with_capacity(u.len() + v.len());
    fn rec(
        u: &[Letter],
        v: &[Letter],
        buf: &mut Vec<Letter>,
        out: &mut BTreeMap<PureTensor, BigRat>,
    ) {
        if u.is_empty() || v.is_empty() {
            let mut w = buf.clone();
            w.extend_from_slice(u);
            w.extend_from_slice(v);
            *out.entry(w).or_insert_with(BigRat::zero) += BigRat::one();
            return;
        }
        buf.push(u[0]);
        rec(&u[1..], v, buf, out);
        buf.pop();
        buf.push(v[0]);
        rec(u, &v[1..], buf, out);
        buf.pop();
    }
    rec(u, v, &mut buf, &mut out);
    out
}

/// Bilinear shuffle product.
pub fn shuffle(u: &SymbolTensor, v: &SymbolTensor) -> SymbolTensor {
    let mut out = SymbolTensor::zero(u.weight + v.weight);
    for (a, ca) in &u.terms {
        for (b, cb) in &v.terms {
            let c = ca * cb;
            for (w, m) in shuffle_words(a, b) {
                out.add_term(w, &c * m);
            }
        }
    }
    out
}

/// The projector `ρ(a) = a`,
/// `ρ(a1…an) = ρ(a1…a(n−1)) ⊗ an − ρ(a2…an) ⊗ a1`, extended linearly.
pub fn rho_project(s: &SymbolTensor) -> SymbolTensor {
    let mut memo: HashMap<PureTensor, BTreeMap<PureTensor, BigRat>> = HashMap::new();
    let mut out = SymbolTensor::zero(s.weight);
    for (w, c) in &s.terms {
        for (r, x) in rho_word(w, &mut memo).iter() {
            out.add_term(r.clone(), c * x);
        }
    }
    out
}

fn rho_word(
    w: &[Letter],
    memo: &mut HashMap<PureTensor, BTreeMap<PureTensor, BigRat>>,
) -> BTreeMap<PureTensor, BigRat> {
    if w.len() <= 1 {
        return BTreeMap::from([(w.to_vec(), BigRat::one())]);
    }
    if let Some(r) = memo.get(w) {
        return r.clone();
    }
    let n = w.len();
    let mut out: BTreeMap<PureTensor, BigRat> = BTreeMap::new();
    for (r, c) in rho_word(&w[..n - 1], memo) {
        let mut k = r;
        k.push(w[n - 1]);
        *out.entry(k).or_insert_with(BigRat::zero) += c;
    }
    for (r, c) in rho_word(&w[1..], memo) {
        let mut k = r;
        k.push(w[0]);
        *out.entry(k).or_insert_with(BigRat::zero) -= c;
    }
    out.retain(|_, c| !c.is_zero());
    memo.insert(w.to_vec(), out.clone());
    out
}

/// Chen–Fox–Lyndon factorization (Duval's algorithm) into a nonincreasing
/// sequence of Lyndon words.
pub fn lyndon_factorization(w: &[Letter]) -> Vec<&[Letter]> {
    let n = w.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        let mut k = i;
        while j < n && w[k] <= w[j] {
            if w[k] < w[j] {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        while i <= k {
            out.push(&w[i..i + j - k]);
            i += j - k;
        }
    }
    out
}

pub fn is_lyndon(w: &[Letter]) -> bool {
    !w.is_empty() && lyndon_factorization(w).len() == 1
}

/// Shuffle of the Lyndon factors of `w`: `c * w + (smaller words)`.
fn lyndon_product(w: &[Letter]) -> BTreeMap<PureTensor, BigRat> {
    let factors = lyndon_factorization(w);
    let mut acc: BTreeMap<PureTensor, BigRat> = BTreeMap::from([(factors[0].to_vec(), BigRat::one())]);
    for f in &factors[1..] {
        let mut next: BTreeMap<PureTensor, BigRat> = BTreeMap::new();
        for (a, ca) in &acc {
            for (b, m) in shuffle_words(a, f) {
                *next.entry(b).or_insert_with(BigRat::zero) += ca * m;
            }
        }
        acc = next;
    }
    acc
}

/// Canonical representative of `s` modulo the span of shuffle products of
/// nonempty tensors, supported on Lyndon words. Zero iff `s` is a sum of
/// products.
pub fn mod_products_reduce(s: &SymbolTensor) -> SymbolTensor {
    if s.weight <= 1 {
        return s.clone();
    }
    let mut cache: HashMap<PureTensor, BTreeMap<PureTensor, BigRat>> = HashMap::new();
    let mut pending = s.terms.clone();
    let mut out = SymbolTensor::zero(s.weight);
    while let Some((w, c)) = pending.pop_last() {
        if is_lyndon(&w) {
            out.add_term(w, c);
            continue;
        }
        let row = cache.entry(w.clone()).or_insert_with(|| lyndon_product(&w));
        let lead = row[&w].clone();
        let f = c / lead;
        for (u, x) in row.iter() {
            if *u == w {
                continue;
            }
            debug_assert!(*u < w, "shuffle of Lyndon factors must be triangular");
            let slot = pending.entry(u.clone()).or_insert_with(BigRat::zero);
            *slot -= &f * x;
            if slot.is_zero() {
                pending.remove(u);
            }
        }
    }
    out
}

/// True when `s` vanishes modulo products. The projector is tried first since
/// it is cheap; a nonzero projection already rules out a product.
pub fn is_zero_mod_products(s: &SymbolTensor) -> bool {
    if s.weight >= 2 && !rho_project(s).is_zero() {
        return false;
    }
    mod_products_reduce(s).is_zero()
}

/// Whether `a` and `b` are proportional, returning the factor with `a = f * b`.
pub fn proportionality(a: &SymbolTensor, b: &SymbolTensor) -> Option<BigRat> {
    if a.is_zero() || b.is_zero() || a.len() != b.len() {
        return None;
    }
    let (w0, c0) = b.terms.iter().next()?;
    let f = a.coeff(w0) / c0;
    if f.is_zero() {
        return None;
    }
    for (w, c) in &b.terms {
        if a.coeff(w) != c * &f {
            return None;
        }
    }
    Some(f)
}

/// Largest absolute coefficient, handy for diagnostics.
pub fn max_abs_coeff(s: &SymbolTensor) -> BigRat {
    s.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigRat::zero)
}
