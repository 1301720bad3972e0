//! Multiple polylogarithms as data: compositions, the three function kinds and
//! their conversions to iterated-integral words, the symbol recursion, and
//! shuffle/stuffle expansions.
//!
//! Conventions (fixed here and checked by tests):
//!
//! * `Li_{n1..nd}(z1..zd) = Σ_{0<k1<…<kd} z1^k1⋯zd^kd / (k1^n1⋯kd^nd)`
//!   `= (−1)^d I(0; y1, 0^{n1−1}, …, yd, 0^{nd−1}; 1)` with `yj = (zj⋯zd)^−1`.
//! * `I_{n1..nd}(x1..xd) = I(0; x1, 0^{n1−1}, …, xd, 0^{nd−1}; 1)`.
//! * `IN_{n1..nd}(a1..ad) = I_{n1..nd}(a1, (a2⋯ad)^−1, (a2⋯a(d−1))^−1, …, a2^−1)`.

pub mod json;
pub mod normalize;

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{ArithError, BigRat, FactoredValue, Letter, LetterRegistry, RatFunc};
use crate::tensor::{self, SymbolTensor};

pub use normalize::{check_recipe, depth_normalize, Recipe, RecipeStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MplError {
    #[error("argument {slot} of the term is degenerate (zero or undefined)")]
    DegenerateArgument { slot: usize },
    #[error("word is singular at slot {slot}: an endpoint coincides with its neighbouring letter")]
    SingularEntry { slot: usize },
    #[error("term {index}: {source}")]
    SingularTerm { index: usize, source: Box<MplError> },
    #[error("stuffle product needs two Li terms")]
    KindMismatch,
    #[error("words have different endpoints")]
    EndpointMismatch,
    #[error("composition {comp} not supported at step '{step}'")]
    UnsupportedComposition { comp: String, step: String },
    #[error("composition {comp} has depth {depth} but {args} arguments were given")]
    Arity { comp: String, depth: usize, args: usize },
    #[error("invalid composition: {0}")]
    BadComposition(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{0}")]
    Schema(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self, MplError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(MplError::BadComposition(format!("{parts:?}")));
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl std::str::FromStr for Composition {
    type Err = MplError;
    fn from_str(s: &str) -> Result<Self, MplError> {
        let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let parts: Result<Vec<u32>, _> = t.split(',').map(|p| p.trim().parse::<u32>()).collect();
        Composition::new(parts.map_err(|_| MplError::BadComposition(s.to_string()))?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    I,
    IN,
    Li,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::I => "I",
            Kind::IN => "IN",
            Kind::Li => "Li",
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = MplError;
    fn from_str(s: &str) -> Result<Self, MplError> {
        match s {
            "I" => Ok(Kind::I),
            "IN" => Ok(Kind::IN),
            "Li" => Ok(Kind::Li),
            _ => Err(MplError::Schema(format!("unknown function kind {s:?}"))),
        }
    }
}

/// One multiple polylogarithm evaluated at rational-function arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MplFunction {
    pub kind: Kind,
    pub comp: Composition,
    pub args: Vec<RatFunc>,
}

impl MplFunction {
    pub fn new(kind: Kind, comp: Composition, args: Vec<RatFunc>) -> Result<Self, MplError> {
        if args.len() != comp.depth() {
            return Err(MplError::Arity {
                comp: comp.to_string(),
                depth: comp.depth(),
                args: args.len(),
            });
        }
        if let Some(i) = args.iter().position(|a| a.is_zero()) {
            return Err(MplError::DegenerateArgument { slot: i + 1 });
        }
        Ok(MplFunction { kind, comp, args })
    }

    pub fn weight(&self) -> usize {
        self.comp.weight()
    }

    pub fn depth(&self) -> usize {
        self.comp.depth()
    }

    pub fn nvars(&self) -> usize {
        self.args.first().map_or(0, |a| a.nvars())
    }

    /// Same function written with kind `I`, with the sign it picks up.
    pub fn to_i(&self) -> Result<(BigRat, MplFunction), MplError> {
        let (s, w) = self.to_integral_word()?;
        let args = w.nonzero_letters();
        Ok((s, MplFunction { kind: Kind::I, comp: self.comp.clone(), args }))
    }

    /// Same function written with kind `Li`, with the sign it picks up.
    pub fn to_li(&self) -> Result<(BigRat, MplFunction), MplError> {
        if self.kind == Kind::Li {
            return Ok((BigRat::one(), self.clone()));
        }
        let (s, f) = self.to_i()?;
        let d = f.depth();
        // zd = 1/xd, zj = x(j+1)/xj
        let mut z = Vec::with_capacity(d);
        for j in 0..d {
            let zj = if j + 1 == d {
                f.args[j].inv()?
            } else {
                f.args[j + 1].div(&f.args[j])?
            };
            z.push(zj);
        }
        Ok((s * sign(d), MplFunction { kind: Kind::Li, comp: f.comp, args: z }))
    }

    /// Rewrites the function as `scalar × I(a0; letters; a_end)`.
    pub fn to_integral_word(&self) -> Result<(BigRat, IntegralWord), MplError> {
        let nv = self.nvars();
        let d = self.depth();
        let (scalar, xs) = match self.kind {
            Kind::I => (BigRat::one(), self.args.clone()),
            Kind::IN => {
                // a1, (a2⋯ad)^−1, (a2⋯a(d−1))^−1, …, a2^−1
                let mut xs = vec![self.args[0].clone()];
                for k in (1..d).rev() {
                    let mut p = RatFunc::from_int(nv, 1);
                    for a in &self.args[1..=k] {
                        p = p.mul(a);
                    }
                    xs.push(p.inv().map_err(|_| MplError::DegenerateArgument { slot: k + 1 })?);
                }
                (BigRat::one(), xs)
            }
            Kind::Li => {
                let mut xs = vec![RatFunc::from_int(nv, 1); d];
                let mut p = RatFunc::from_int(nv, 1);
                for j in (0..d).rev() {
                    p = p.mul(&self.args[j]);
                    xs[j] = p.inv().map_err(|_| MplError::DegenerateArgument { slot: j + 1 })?;
                }
                (sign(d), xs)
            }
        };
        for (i, x) in xs.iter().enumerate() {
            if x.is_zero() {
                return Err(MplError::DegenerateArgument { slot: i + 1 });
            }
        }
        let zero = RatFunc::from_int(nv, 0);
        let mut letters = Vec::with_capacity(self.weight());
        for (x, &n) in xs.into_iter().zip(self.comp.parts()) {
            letters.push(x);
            for _ in 1..n {
                letters.push(zero.clone());
            }
        }
        Ok((
            scalar,
            IntegralWord {
                a0: zero,
                letters,
                a_end: RatFunc::from_int(nv, 1),
            },
        ))
    }

    pub fn to_text(&self) -> String {
        let a: Vec<String> = self.args.iter().map(|x| x.to_string()).collect();
        let c: Vec<String> = self.comp.parts().iter().map(|p| p.to_string()).collect();
        format!("{}_{}({})", self.kind.as_str(), c.join(","), a.join(", "))
    }
}

impl fmt::Display for MplFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn sign(n: usize) -> BigRat {
    if n % 2 == 0 {
        BigRat::one()
    } else {
        -BigRat::one()
    }
}

/// `coeff × func × times[0] × times[1] × …`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionTerm {
    pub coeff: BigRat,
    pub func: MplFunction,
    pub times: Vec<MplFunction>,
}

impl FunctionTerm {
    pub fn new(coeff: BigRat, func: MplFunction) -> Self {
        FunctionTerm {
            coeff,
            func,
            times: Vec::new(),
        }
    }

    pub fn product(coeff: BigRat, factors: Vec<MplFunction>) -> Self {
        let mut it = factors.into_iter();
        let func = it.next().expect("at least one factor");
        FunctionTerm {
            coeff,
            func,
            times: it.collect(),
        }
    }

    pub fn is_product(&self) -> bool {
        !self.times.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.func.weight() + self.times.iter().map(|f| f.weight()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        self.func.depth()
    }

    pub fn factors(&self) -> impl Iterator<Item = &MplFunction> {
        std::iter::once(&self.func).chain(self.times.iter())
    }

    pub fn scaled(&self, c: &BigRat) -> FunctionTerm {
        FunctionTerm {
            coeff: &self.coeff * c,
            ..self.clone()
        }
    }

    pub fn symbol(&self, reg: &mut LetterRegistry) -> Result<SymbolTensor, MplError> {
        let mut acc: Option<SymbolTensor> = None;
        for f in self.factors() {
            let (s, w) = f.to_integral_word()?;
            let sym = symbol_of_word(&w, reg)?.scale(&s);
            acc = Some(match acc {
                None => sym,
                Some(a) => tensor::shuffle(&a.resolve(reg), &sym.resolve(reg)),
            });
        }
        Ok(acc.unwrap().scale(&self.coeff))
    }

    pub fn to_text(&self) -> String {
        let fs: Vec<String> = self.factors().map(|f| f.to_text()).collect();
        format!("{} * {}", self.coeff, fs.join(" * "))
    }
}

impl fmt::Display for FunctionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Expression {
    pub nvars: usize,
    pub terms: Vec<FunctionTerm>,
}

impl Expression {
    pub fn new(nvars: usize) -> Self {
        Expression {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, t: FunctionTerm) {
        debug_assert!(t.func.nvars() == self.nvars || t.func.args.is_empty());
        self.terms.push(t);
    }

    pub fn extend(&mut self, other: &Expression, c: &BigRat) {
        for t in &other.terms {
            self.terms.push(t.scaled(c));
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight(&self) -> Option<usize> {
        self.terms.first().map(|t| t.weight())
    }

    /// Adds coefficients of identical terms and drops zeros; order of first
    /// appearance is kept.
    pub fn merged(&self) -> Expression {
        let mut idx: HashMap<(MplFunction, Vec<MplFunction>), usize> = HashMap::new();
        let mut out: Vec<FunctionTerm> = Vec::new();
        for t in &self.terms {
            let key = (t.func.clone(), t.times.clone());
            match idx.get(&key) {
                Some(&i) => out[i].coeff += &t.coeff,
                None => {
                    idx.insert(key, out.len());
                    out.push(t.clone());
                }
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        Expression {
            nvars: self.nvars,
            terms: out,
        }
    }

    /// Σ coeff·symbol over all terms, resolved against the final registry.
    pub fn symbol(&self, reg: &mut LetterRegistry) -> Result<SymbolTensor, MplError> {
        let mut parts = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            let s = t.symbol(reg).map_err(|e| MplError::SingularTerm {
                index: i,
                source: Box::new(e),
            })?;
            parts.push(s);
        }
        let w = self.weight().unwrap_or(0);
        let mut acc = SymbolTensor::zero(w);
        for p in parts {
            acc.add_scaled(&p.resolve(reg), &BigRat::one());
        }
        Ok(acc)
    }

    pub fn to_text(&self) -> String {
        self.terms.iter().map(|t| t.to_text()).collect::<Vec<_>>().join("\n")
    }
}

/// The iterated integral `I(a0; a1, …, an; a_end)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegralWord {
    pub a0: RatFunc,
    pub letters: Vec<RatFunc>,
    pub a_end: RatFunc,
}

impl IntegralWord {
    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    fn nonzero_letters(&self) -> Vec<RatFunc> {
        self.letters.iter().filter(|l| !l.is_zero()).cloned().collect()
    }

    fn points(&self) -> Vec<&RatFunc> {
        std::iter::once(&self.a0)
            .chain(self.letters.iter())
            .chain(std::iter::once(&self.a_end))
            .collect()
    }

    /// Reads the word back as `I_n(x)` when it has the shape
    /// `I(0; x1, 0^{n1−1}, …; 1)` with nonzero `xj`.
    pub fn as_i_function(&self) -> Option<MplFunction> {
        if !self.a0.is_zero() || !self.a_end.is_one() {
            return None;
        }
        let mut parts: Vec<u32> = Vec::new();
        let mut args = Vec::new();
        for l in &self.letters {
            if l.is_zero() {
                *parts.last_mut()? += 1;
            } else {
                parts.push(1);
                args.push(l.clone());
            }
        }
        Some(MplFunction {
            kind: Kind::I,
            comp: Composition::new(parts).ok()?,
            args,
        })
    }

    /// Affine renormalization to `I(0; (ai − a0)/(a_end − a0); 1)`.
    pub fn normalized(&self) -> Result<IntegralWord, MplError> {
        let span = self.a_end.sub(&self.a0);
        let letters = self
            .letters
            .iter()
            .map(|l| l.sub(&self.a0).div(&span))
            .collect::<Result<Vec<_>, _>>()?;
        let nv = self.a0.nvars();
        Ok(IntegralWord {
            a0: RatFunc::from_int(nv, 0),
            letters,
            a_end: RatFunc::from_int(nv, 1),
        })
    }
}

/// `I(a0; a1..an; a_end) = (−1)^n I(a_end; an..a1; a0)`.
pub fn reverse_word(w: &IntegralWord) -> (BigRat, IntegralWord) {
    let mut letters = w.letters.clone();
    letters.reverse();
    (
        sign(w.weight()),
        IntegralWord {
            a0: w.a_end.clone(),
            letters,
            a_end: w.a0.clone(),
        },
    )
}

/// Symbol by the standard recursion over deleted letters. Differences that
/// vanish identically are omitted from the entries.
pub fn symbol_of_word(w: &IntegralWord, reg: &mut LetterRegistry) -> Result<SymbolTensor, MplError> {
    let n = w.weight();
    if n == 0 {
        return Ok(SymbolTensor::unit());
    }
    if w.a0 == w.a_end {
        return Ok(SymbolTensor::zero(n));
    }
    if w.letters[0] == w.a0 {
        return Err(MplError::SingularEntry { slot: 1 });
    }
    if w.letters[n - 1] == w.a_end {
        return Err(MplError::SingularEntry { slot: n });
    }
    let pts = w.points();
    let m = pts.len();
    // Register every pairwise difference first; letters issued early may be
    // split by later registrations, so everything is resolved afterwards.
    let mut diff: Vec<Vec<Option<FactoredValue>>> = vec![vec![None; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let d = pts[j].sub(pts[i]);
            if !d.is_zero() {
                diff[i][j] = Some(reg.refine_register(&d)?);
            }
        }
    }
    for row in diff.iter_mut() {
        for v in row.iter_mut().flatten() {
            *v = reg.resolve(v);
        }
    }
    let get = |i: usize, j: usize| -> Option<&FactoredValue> {
        if i < j {
            diff[i][j].as_ref()
        } else {
            diff[j][i].as_ref()
        }
    };
    let entry = |i: usize, prev: usize, next: usize| -> FactoredValue {
        let mut e = FactoredValue::constant(BigRat::one());
        if let Some(f) = get(i, next) {
            e = e.mul(f);
        }
        if let Some(f) = get(i, prev) {
            e = e.div(f);
        }
        e
    };
    // Machine-integer accumulation: coefficients are sums of products of
    // small exponents and stay far below i64 range at desk-scale weights.
    type Fast = HashMap<Vec<Letter>, i64>;
    let mut memo: Vec<Option<Fast>> = vec![None; 1usize << n];
    memo[0] = Some(HashMap::from([(Vec::new(), 1i64)]));
    let mut masks: Vec<usize> = (1..1usize << n).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let mut acc: Fast = HashMap::new();
        let bits: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
        for (t, &b) in bits.iter().enumerate() {
            let i = b + 1;
            let prev = if t == 0 { 0 } else { bits[t - 1] + 1 };
            let next = if t + 1 == bits.len() { n + 1 } else { bits[t + 1] + 1 };
            let e = entry(i, prev, next);
            if e.exponents.is_empty() {
                continue;
            }
            let sub = memo[mask & !(1 << b)].as_ref().unwrap();
            for (w, c) in sub {
                for (&l, &x) in &e.exponents {
                    let mut w2 = Vec::with_capacity(w.len() + 1);
                    w2.extend_from_slice(w);
                    w2.push(l);
                    let slot = acc.entry(w2).or_insert(0);
                    *slot = slot.checked_add(c.checked_mul(x).expect("symbol coefficient overflow")).expect("symbol coefficient overflow");
                }
            }
        }
        acc.retain(|_, c| *c != 0);
        memo[mask] = Some(acc);
    }
    let top = memo.pop().unwrap().unwrap();
    let mut out = SymbolTensor::zero(n);
    for (w, c) in top {
        out.add_term(w, BigRat::from_integer(c.into()));
    }
    Ok(out)
}

/// Formal shuffle of two words with common endpoints.
pub fn shuffle_words(u: &IntegralWord, v: &IntegralWord) -> Result<Vec<(BigRat, IntegralWord)>, MplError> {
    if u.a0 != v.a0 || u.a_end != v.a_end {
        return Err(MplError::EndpointMismatch);
    }
    let p = u.weight();
    let ui: Vec<usize> = (0..p).collect();
    let vi: Vec<usize> = (p..p + v.weight()).collect();
    let pool: Vec<&RatFunc> = u.letters.iter().chain(v.letters.iter()).collect();
    let mut merged: Vec<(BigRat, IntegralWord)> = Vec::new();
    let mut index: HashMap<Vec<RatFunc>, usize> = HashMap::new();
    for (w, c) in tensor::shuffle_words(&ui, &vi) {
        let letters: Vec<RatFunc> = w.iter().map(|&k| pool[k].clone()).collect();
        match index.get(&letters) {
            Some(&i) => merged[i].0 += c,
            None => {
                index.insert(letters.clone(), merged.len());
                merged.push((
                    c,
                    IntegralWord {
                        a0: u.a0.clone(),
                        letters,
                        a_end: u.a_end.clone(),
                    },
                ));
            }
        }
    }
    Ok(merged)
}

/// Quasi-shuffle (stuffle) product of two Li terms.
pub fn stuffle_product(a: &FunctionTerm, b: &FunctionTerm) -> Result<Expression, MplError> {
    if a.func.kind != Kind::Li || b.func.kind != Kind::Li || a.is_product() || b.is_product() {
        return Err(MplError::KindMismatch);
    }
    let u: Vec<(u32, RatFunc)> = a.func.comp.parts().iter().copied().zip(a.func.args.iter().cloned()).collect();
    let v: Vec<(u32, RatFunc)> = b.func.comp.parts().iter().copied().zip(b.func.args.iter().cloned()).collect();
    let mut words = Vec::new();
    quasi_shuffle(&u, &v, &mut Vec::new(), &mut words);
    let c = &a.coeff * &b.coeff;
    let mut e = Expression::new(a.func.nvars());
    for w in words {
        let (parts, args): (Vec<u32>, Vec<RatFunc>) = w.into_iter().unzip();
        let f = MplFunction::new(Kind::Li, Composition::new(parts)?, args)?;
        e.push(FunctionTerm::new(c.clone(), f));
    }
    Ok(e.merged())
}

fn quasi_shuffle(
    u: &[(u32, RatFunc)],
    v: &[(u32, RatFunc)],
    buf: &mut Vec<(u32, RatFunc)>,
    out: &mut Vec<Vec<(u32, RatFunc)>>,
) {
    if u.is_empty() || v.is_empty() {
        let mut w = buf.clone();
        w.extend_from_slice(u);
        w.extend_from_slice(v);
        out.push(w);
        return;
    }
    buf.push(u[0].clone());
    quasi_shuffle(&u[1..], v, buf, out);
    buf.pop();
    buf.push(v[0].clone());
    quasi_shuffle(u, &v[1..], buf, out);
    buf.pop();
    buf.push((u[0].0 + v[0].0, u[0].1.mul(&v[0].1)));
    quasi_shuffle(&u[1..], &v[1..], buf, out);
    buf.pop();
}

/// Convenience constructor used throughout tests and examples.
pub fn func(kind: Kind, parts: &[u32], args: Vec<RatFunc>) -> MplFunction {
    MplFunction::new(kind, Composition::new(parts.to_vec()).expect("composition"), args).expect("function")
}

#[cfg(test)]
mod tests;
