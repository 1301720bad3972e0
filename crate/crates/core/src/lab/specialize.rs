//! Degenerations: substituting variables into symbols and expressions, with
//! vanishing letters replaced by formal scale letters ε.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use super::{Identity, LabError, Status};
use crate::arith::{parse_rational, BigRat, FactoredValue, Letter, LetterRegistry, MultiPoly, RatFunc};
use crate::mpl::{Expression, FunctionTerm, MplFunction};
use crate::tensor::{mod_products_reduce, proportionality, SymbolTensor};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SubValue {
    Var(usize),
    Const(BigRat),
}

/// Map from variables (0-based) to variables or rationals, kept resolved so
/// that no image is itself substituted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<usize, SubValue>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn image(&self, v: usize) -> SubValue {
        match self.map.get(&v) {
            Some(x) => x.clone(),
            None => SubValue::Var(v),
        }
    }

    /// Adds `v ↦ value`; earlier images that mention `v` are updated.
    pub fn set(&mut self, v: usize, value: SubValue) -> Result<(), LabError> {
        let value = match value {
            SubValue::Var(w) => self.image(w),
            c => c,
        };
        if value == SubValue::Var(v) {
            return Err(LabError::UndefinedSubstitution(format!("x{} maps to itself", v + 1)));
        }
        if self.map.contains_key(&v) {
            return Err(LabError::UndefinedSubstitution(format!("x{} is assigned twice", v + 1)));
        }
        for img in self.map.values_mut() {
            if *img == SubValue::Var(v) {
                *img = value.clone();
            }
        }
        self.map.insert(v, value);
        Ok(())
    }

    /// Parses `x2=x1` or `x3=1/2`.
    pub fn parse_assignment(&mut self, s: &str) -> Result<(), LabError> {
        let bad = || LabError::UndefinedSubstitution(format!("cannot parse assignment {s:?}"));
        let (l, r) = s.split_once('=').ok_or_else(bad)?;
        let var = |t: &str| -> Option<usize> {
            t.trim().strip_prefix('x')?.parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1)
        };
        let v = var(l).ok_or_else(bad)?;
        let value = match var(r) {
            Some(w) => SubValue::Var(w),
            None => SubValue::Const(parse_rational(r.trim()).map_err(|_| bad())?),
        };
        self.set(v, value)
    }

    pub fn parse(items: &[&str]) -> Result<Self, LabError> {
        let mut s = Substitution::new();
        for it in items {
            s.parse_assignment(it)?;
        }
        Ok(s)
    }

    /// `self` followed by `then`, as one simultaneous substitution.
    pub fn then(&self, then: &Substitution) -> Substitution {
        let vars: BTreeSet<usize> = self.map.keys().chain(then.map.keys()).copied().collect();
        let mut map = BTreeMap::new();
        for v in vars {
            let img = match self.image(v) {
                SubValue::Var(w) => then.image(w),
                c => c,
            };
            if img != SubValue::Var(v) {
                map.insert(v, img);
            }
        }
        Substitution { map }
    }

    fn check(&self, nvars: usize) -> Result<(), LabError> {
        for (&v, img) in &self.map {
            let bad = matches!(img, SubValue::Var(w) if *w >= nvars);
            if v >= nvars || bad {
                return Err(LabError::UndefinedSubstitution(format!("variable out of range in {self}")));
            }
        }
        Ok(())
    }

    fn poly_images(&self, nvars: usize) -> Vec<MultiPoly> {
        (0..nvars)
            .map(|v| match self.image(v) {
                SubValue::Var(w) => MultiPoly::var(nvars, w),
                SubValue::Const(c) => MultiPoly::constant(nvars, c),
            })
            .collect()
    }

    pub fn apply_poly(&self, p: &MultiPoly) -> MultiPoly {
        p.compose(&self.poly_images(p.nvars()))
    }

    /// `None` when the denominator vanishes.
    pub fn apply(&self, f: &RatFunc) -> Option<RatFunc> {
        let num = self.apply_poly(f.num());
        let den = self.apply_poly(f.den());
        if den.is_zero() {
            return None;
        }
        RatFunc::new(num, den).ok()
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .map
            .iter()
            .map(|(v, img)| match img {
                SubValue::Var(w) => format!("x{}=x{}", v + 1, w + 1),
                SubValue::Const(c) => format!("x{}={}", v + 1, c),
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Symbol-level degeneration of an expression.
#[derive(Clone, Debug)]
pub struct Specialization {
    /// Registry over the original variables plus one extra variable per ε.
    pub registry: LetterRegistry,
    /// The ε letters with the polynomial locus each one stands for.
    pub eps: Vec<(Letter, MultiPoly)>,
    /// ε-free part: the regularized limit.
    pub regular: SymbolTensor,
    /// Terms containing at least one ε.
    pub divergent: SymbolTensor,
}

impl Specialization {
    pub fn regular_mod_products(&self) -> SymbolTensor {
        mod_products_reduce(&self.regular)
    }

    pub fn divergent_mod_products(&self) -> SymbolTensor {
        mod_products_reduce(&self.divergent)
    }
}

/// Maps symbols from a source registry into a target registry that carries
/// ε letters for vanishing loci.
struct Degenerator {
    nvars: usize,
    loci: Vec<MultiPoly>,
    target: LetterRegistry,
    eps: Vec<(Letter, MultiPoly)>,
}

impl Degenerator {
    fn new(nvars: usize, mut loci: Vec<MultiPoly>) -> Self {
        loci.sort_by_cached_key(|p| p.to_string_with(&crate::arith::poly::var_name));
        let total = nvars + loci.len();
        let mut target = LetterRegistry::new(total);
        let mut eps = Vec::new();
        for (i, p) in loci.iter().enumerate() {
            let label = format!("eps[{}]", p.to_string_with(&crate::arith::poly::var_name));
            let l = target.push_labeled(MultiPoly::var(total, nvars + i), label);
            eps.push((l, p.clone()));
        }
        Degenerator {
            nvars,
            loci,
            target,
            eps,
        }
    }

    fn letter_image(&mut self, p: &MultiPoly, s: &Substitution) -> FactoredValue {
        let q = s.apply_poly(p);
        if q.is_zero() {
            let i = self.loci.iter().position(|x| x == p).expect("locus registered in the pre-pass");
            let mut fv = FactoredValue::constant(BigRat::one());
            fv.exponents.insert(self.eps[i].0, 1);
            return fv;
        }
        let total = self.nvars + self.loci.len();
        self.target
            .register_poly(&q.extend_vars(total))
            .expect("nonzero polynomial registers")
    }

    /// Images of the letters of `sym` (registered in `src`) under `s`.
    fn map_symbol(&mut self, sym: &SymbolTensor, src: &LetterRegistry, s: &Substitution) -> SymbolTensor {
        let mut images: BTreeMap<Letter, FactoredValue> = BTreeMap::new();
        for l in sym.letters() {
            let fv = self.letter_image(src.poly(l), s);
            images.insert(l, fv);
        }
        let mut out = SymbolTensor::zero(sym.weight());
        for (w, c) in sym.terms() {
            let mut acc = SymbolTensor::unit();
            for l in w {
                acc = acc.append_entry(&self.target.resolve(&images[l]));
                if acc.is_zero() {
                    break;
                }
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    fn split(&self, t: &SymbolTensor) -> (SymbolTensor, SymbolTensor) {
        let eps: BTreeSet<Letter> = self.eps.iter().map(|(l, _)| *l).collect();
        let mut reg = SymbolTensor::zero(t.weight());
        let mut div = SymbolTensor::zero(t.weight());
        for (w, c) in t.resolve(&self.target).terms() {
            if w.iter().any(|l| eps.contains(l)) {
                div.add_term(w.clone(), c.clone());
            } else {
                reg.add_term(w.clone(), c.clone());
            }
        }
        (reg, div)
    }
}

fn vanishing_loci(sym: &SymbolTensor, src: &LetterRegistry, s: &Substitution, out: &mut Vec<MultiPoly>) {
    for l in sym.letters() {
        let p = src.poly(l);
        if s.apply_poly(p).is_zero() && !out.contains(p) {
            out.push(p.clone());
        }
    }
}

/// Substitutes at symbol level. Letters that vanish become ε letters, one
/// per vanishing polynomial; constant entries kill their tensor.
pub fn specialize(e: &Expression, s: &Substitution) -> Result<Specialization, LabError> {
    s.check(e.nvars)?;
    let mut src = LetterRegistry::new(e.nvars);
    let sym = e.symbol(&mut src)?.resolve(&src);
    let mut loci = Vec::new();
    vanishing_loci(&sym, &src, s, &mut loci);
    let mut d = Degenerator::new(e.nvars, loci);
    let img = d.map_symbol(&sym, &src, s);
    let (regular, divergent) = d.split(&img);
    Ok(Specialization {
        registry: d.target,
        eps: d.eps,
        regular,
        divergent,
    })
}

/// Outcome of substituting into one term's arguments.
#[derive(Clone, Debug, PartialEq)]
pub enum TermFate {
    /// Still a well-defined function term (possibly of lower depth).
    Generic(FunctionTerm),
    /// An argument leaves the domain (zero, pole, or a singular word).
    Degenerate,
}

fn specialize_function(f: &MplFunction, s: &Substitution) -> Result<Option<(BigRat, MplFunction)>, LabError> {
    let (sc, w) = f.to_integral_word()?;
    let mut letters = Vec::with_capacity(w.letters.len());
    for l in &w.letters {
        match s.apply(l) {
            Some(x) => letters.push(x),
            None => return Ok(None),
        }
    }
    let (Some(a0), Some(a1)) = (s.apply(&w.a0), s.apply(&w.a_end)) else {
        return Ok(None);
    };
    if letters[0] == a0 || letters[letters.len() - 1] == a1 {
        return Ok(None);
    }
    let w2 = crate::mpl::IntegralWord {
        a0,
        letters,
        a_end: a1,
    };
    Ok(w2.as_i_function().map(|g| (sc, g)))
}

/// Per-term classification under `s`.
pub fn classify_terms(e: &Expression, s: &Substitution) -> Result<Vec<TermFate>, LabError> {
    s.check(e.nvars)?;
    let mut out = Vec::with_capacity(e.len());
    for t in &e.terms {
        let mut coeff = t.coeff.clone();
        let mut fs = Vec::new();
        let mut ok = true;
        for f in t.factors() {
            match specialize_function(f, s)? {
                Some((c, g)) => {
                    coeff *= c;
                    fs.push(g);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        out.push(if ok {
            TermFate::Generic(FunctionTerm::product(coeff, fs))
        } else {
            TermFate::Degenerate
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlanStep {
    /// Start from the anchor specialized by the substitution.
    Collapse(Substitution),
    /// Subtract the anchor specialized by the substitution.
    Subtract(Substitution),
    /// Specialize everything accumulated so far.
    Then(Substitution),
}

impl PlanStep {
    /// `collapse:x5=x3,x3=x1`, `subtract:x2=x1`, `then:x7=x2`, or the
    /// shorthands `collapse-odd` (x3=x1, x5=x1) and `subtract` (x2=x1).
    pub fn parse(s: &str) -> Result<PlanStep, LabError> {
        let subst = |body: &str| -> Result<Substitution, LabError> {
            let items: Vec<&str> = body.split(',').filter(|x| !x.trim().is_empty()).collect();
            Substitution::parse(&items)
        };
        match s.split_once(':') {
            None => match s {
                "collapse-odd" => Ok(PlanStep::Collapse(Substitution::parse(&["x3=x1", "x5=x1"])?)),
                "subtract" => Ok(PlanStep::Subtract(Substitution::parse(&["x2=x1"])?)),
                _ => Err(LabError::Input(format!("unknown plan step {s:?}"))),
            },
            Some(("collapse", b)) => Ok(PlanStep::Collapse(subst(b)?)),
            Some(("subtract", b)) => Ok(PlanStep::Subtract(subst(b)?)),
            Some(("then", b)) => Ok(PlanStep::Then(subst(b)?)),
            Some((k, _)) => Err(LabError::Input(format!("unknown plan step kind {k:?}"))),
        }
    }

    /// Plan strings separated by `;`; a step without a kind prefix after a
    /// kinded one continues its substitution list.
    pub fn parse_plan(s: &str) -> Result<Vec<PlanStep>, LabError> {
        let mut out = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            if part.contains(':') || !part.contains('=') {
                out.push(PlanStep::parse(part)?);
            } else {
                return Err(LabError::Input(format!("plan step {part:?} needs a kind")));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct DepthReduction {
    /// The isolated top-depth term, with coefficient 1.
    pub target: FunctionTerm,
    /// Function terms equal to the target modulo products (plus `remainder`).
    pub rhs: Expression,
    /// Regularized contribution of the degenerate terms, already divided by
    /// the target's coefficient; registered in `registry`.
    pub remainder: SymbolTensor,
    /// ε part of the degenerate terms (should vanish modulo products).
    pub divergent: SymbolTensor,
    pub registry: LetterRegistry,
    /// Whether target − rhs − remainder vanishes modulo products.
    pub consistent: bool,
    pub degenerate_terms: usize,
}

impl DepthReduction {
    pub fn counts_by_composition(&self) -> Vec<(String, usize)> {
        let mut m: BTreeMap<String, usize> = BTreeMap::new();
        for t in &self.rhs.terms {
            let key = if t.is_product() {
                "products".to_string()
            } else {
                format!("{}_{}", t.func.kind.as_str(), t.func.comp)
            };
            *m.entry(key).or_insert(0) += 1;
        }
        m.into_iter().collect()
    }

    pub fn divergent_vanishes(&self) -> bool {
        mod_products_reduce(&self.divergent).is_zero()
    }
}

/// Folds the plan into signed, composed substitutions of the anchor.
fn expand_plan(plan: &[PlanStep]) -> Result<Vec<(BigRat, Substitution)>, LabError> {
    let mut acc: Vec<(BigRat, Substitution)> = Vec::new();
    for step in plan {
        match step {
            PlanStep::Collapse(s) => {
                if !acc.is_empty() {
                    return Err(LabError::Input("collapse must be the first plan step".into()));
                }
                acc.push((BigRat::one(), s.clone()));
            }
            PlanStep::Subtract(s) => acc.push((-BigRat::one(), s.clone())),
            PlanStep::Then(s) => {
                for (_, t) in acc.iter_mut() {
                    *t = t.then(s);
                }
            }
        }
    }
    if acc.is_empty() {
        return Err(LabError::Input("empty plan".into()));
    }
    Ok(acc)
}

/// Isolates a single generic top-depth term from specializations of a
/// verified identity. Composite steps are applied as one substitution.
pub fn depth_reduce(anchor: &Identity, plan: &[PlanStep]) -> Result<DepthReduction, LabError> {
    if anchor.status != Status::Verified {
        return Err(LabError::Input(format!("anchor {} is not verified", anchor.name)));
    }
    let n = anchor.expr.nvars;
    let top = anchor
        .expr
        .terms
        .iter()
        .filter(|t| !t.is_product())
        .map(|t| t.depth())
        .max()
        .unwrap_or(0);
    if top < 2 {
        return Err(LabError::IsolationFailed("anchor has no term of depth two or more".into()));
    }
    let steps = expand_plan(plan)?;
    let mut funcs = Expression::new(n);
    let mut degenerate: Vec<(BigRat, Substitution, Expression)> = Vec::new();
    let mut ndeg = 0;
    for (c, s) in &steps {
        let fates = classify_terms(&anchor.expr, s)?;
        let mut deg = Expression::new(n);
        for (t, fate) in anchor.expr.terms.iter().zip(fates) {
            match fate {
                TermFate::Generic(g) => funcs.push(g.scaled(c)),
                TermFate::Degenerate => {
                    deg.push(t.clone());
                    ndeg += 1;
                }
            }
        }
        if !deg.is_empty() {
            degenerate.push((c.clone(), s.clone(), deg));
        }
    }
    let funcs = funcs.merged();

    // Degenerate terms at symbol level, all in one target registry.
    let mut src = LetterRegistry::new(n);
    let mut syms = Vec::new();
    for (_, _, d) in &degenerate {
        syms.push(d.symbol(&mut src)?);
    }
    let syms: Vec<SymbolTensor> = syms.iter().map(|x| x.resolve(&src)).collect();
    let mut loci = Vec::new();
    for ((_, s, _), sym) in degenerate.iter().zip(&syms) {
        vanishing_loci(sym, &src, s, &mut loci);
    }
    let mut dg = Degenerator::new(n, loci);
    let w = anchor.expr.weight().unwrap_or(0);
    let mut rem = SymbolTensor::zero(w);
    for ((c, s, _), sym) in degenerate.iter().zip(&syms) {
        rem.add_scaled(&dg.map_symbol(sym, &src, s), c);
    }
    let (regular, divergent) = dg.split(&rem);
    let total = n + dg.loci.len();

    // Top-depth generic terms, grouped by proportionality modulo products.
    let lift = |e: &Expression| -> Expression {
        let mut out = Expression::new(total);
        for t in &e.terms {
            let lift_f = |f: &MplFunction| MplFunction {
                kind: f.kind,
                comp: f.comp.clone(),
                args: f.args.iter().map(|a| a.extend_vars(total)).collect(),
            };
            out.push(FunctionTerm {
                coeff: t.coeff.clone(),
                func: lift_f(&t.func),
                times: t.times.iter().map(lift_f).collect(),
            });
        }
        out
    };
    let tops: Vec<usize> = (0..funcs.len())
        .filter(|&i| !funcs.terms[i].is_product() && funcs.terms[i].depth() == top)
        .collect();
    if tops.is_empty() {
        return Err(LabError::IsolationFailed(format!("no depth-{top} term survives the plan")));
    }
    let mut reg = dg.target;
    let mut top_syms = Vec::new();
    for &i in &tops {
        let mut one = Expression::new(n);
        let mut t = funcs.terms[i].clone();
        t.coeff = BigRat::one();
        one.push(t);
        top_syms.push(lift(&one).symbol(&mut reg)?);
    }
    let top_syms: Vec<SymbolTensor> = top_syms.iter().map(|x| mod_products_reduce(&x.resolve(&reg))).collect();
    let lead = tops
        .iter()
        .zip(&top_syms)
        .find(|(_, s)| !s.is_zero())
        .map(|(&i, s)| (i, s.clone()))
        .ok_or_else(|| LabError::IsolationFailed("surviving top-depth terms vanish modulo products".into()))?;
    let mut coeff = BigRat::zero();
    let mut grouped = BTreeSet::new();
    for (&i, s) in tops.iter().zip(&top_syms) {
        if s.is_zero() {
            grouped.insert(i);
            continue;
        }
        match proportionality(s, &lead.1) {
            Some(f) => {
                coeff += &funcs.terms[i].coeff * f;
                grouped.insert(i);
            }
            None => {
                return Err(LabError::IsolationFailed(format!(
                    "several independent depth-{top} terms remain, e.g. {} and {}",
                    funcs.terms[lead.0], funcs.terms[i]
                )))
            }
        }
    }
    if coeff.is_zero() {
        return Err(LabError::IsolationFailed("the generic term cancels".into()));
    }
    let mut target = funcs.terms[lead.0].clone();
    target.coeff = BigRat::one();
    let scale = -BigRat::one() / &coeff;
    let mut rhs = Expression::new(n);
    for (i, t) in funcs.terms.iter().enumerate() {
        if !grouped.contains(&i) {
            rhs.push(t.scaled(&scale));
        }
    }
    let remainder = regular.scale(&scale);
    let divergent = divergent.scale(&scale);

    // target − rhs − remainder ≡ 0
    let mut check = Expression::new(n);
    check.push(target.clone());
    check.extend(&rhs, &-BigRat::one());
    let mut s = lift(&check).symbol(&mut reg)?.resolve(&reg);
    s.add_scaled(&remainder.resolve(&reg), &-BigRat::one());
    let consistent = mod_products_reduce(&s).is_zero();
    Ok(DepthReduction {
        target,
        rhs,
        remainder: remainder.resolve(&reg),
        divergent: divergent.resolve(&reg),
        registry: reg,
        consistent,
        degenerate_terms: ndeg,
    })
}
