//! Coprime letter alphabet.
//!
//! Every rational function that enters a symbol slot is written as a constant
//! times a product of registry entries. The entries stay pairwise coprime: when
//! a new polynomial shares a factor with an existing entry, that entry is split
//! and retired, and a rewrite table records how its id maps onto the pieces.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::parse::parse_poly;
use super::poly::{var_name, MultiPoly, VarValue};
use super::ratfunc::RatFunc;
use super::{ArithError, BigRat};

pub type Letter = usize;

/// `constant * prod entry^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredValue {
    pub exponents: BTreeMap<Letter, i64>,
    pub constant: BigRat,
}

impl FactoredValue {
    pub fn constant(c: BigRat) -> Self {
        FactoredValue {
            exponents: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn mul(&self, o: &FactoredValue) -> FactoredValue {
        let mut exponents = self.exponents.clone();
        for (&l, &e) in &o.exponents {
            add_exp(&mut exponents, l, e);
        }
        FactoredValue {
            exponents,
            constant: &self.constant * &o.constant,
        }
    }

    pub fn inv(&self) -> FactoredValue {
        FactoredValue {
            exponents: self.exponents.iter().map(|(&l, &e)| (l, -e)).collect(),
            constant: self.constant.recip(),
        }
    }

    pub fn div(&self, o: &FactoredValue) -> FactoredValue {
        self.mul(&o.inv())
    }
}

fn add_exp(map: &mut BTreeMap<Letter, i64>, l: Letter, e: i64) {
    if e == 0 {
        return;
    }
    let slot = map.entry(l).or_insert(0);
    *slot += e;
    if *slot == 0 {
        map.remove(&l);
    }
}

#[derive(Clone, Debug)]
struct Entry {
    poly: MultiPoly,
    label: Option<String>,
    rewrite: Option<BTreeMap<Letter, i64>>,
}

#[derive(Clone, Debug)]
pub struct LetterRegistry {
    nvars: usize,
    entries: Vec<Entry>,
    index: HashMap<MultiPoly, Letter>,
    hints: Vec<Hint>,
}

#[derive(Clone, Debug)]
enum Hint {
    Var(usize),
    Shift(usize, BigRat),
    Diff(usize, usize),
}

impl Hint {
    fn poly(&self, nvars: usize) -> MultiPoly {
        match self {
            Hint::Var(v) => MultiPoly::var(nvars, *v),
            Hint::Shift(v, c) => MultiPoly::var(nvars, *v).sub(&MultiPoly::constant(nvars, c.clone())),
            Hint::Diff(a, b) => MultiPoly::var(nvars, *a).sub(&MultiPoly::var(nvars, *b)),
        }
    }

    fn vanishes_on(&self, p: &MultiPoly) -> bool {
        match self {
            Hint::Var(v) => p.terms().all(|(m, _)| m.0[*v] > 0),
            Hint::Shift(v, c) => p.substitute_var(*v, &VarValue::Const(c.clone())).is_zero(),
            Hint::Diff(a, b) => p.substitute_var(*a, &VarValue::Var(*b)).is_zero(),
        }
    }

    fn vars(&self) -> Vec<usize> {
        match self {
            Hint::Var(v) | Hint::Shift(v, _) => vec![*v],
            Hint::Diff(a, b) => vec![*a, *b],
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RegistryDump {
    nvars: usize,
    letters: Vec<String>,
}

impl LetterRegistry {
    pub fn new(nvars: usize) -> Self {
        let mut hints = Vec::new();
        for v in 0..nvars {
            hints.push(Hint::Var(v));
            hints.push(Hint::Shift(v, BigRat::one()));
            hints.push(Hint::Shift(v, -BigRat::one()));
        }
        for a in 0..nvars {
            for b in a + 1..nvars {
                hints.push(Hint::Diff(a, b));
            }
        }
        LetterRegistry {
            nvars,
            entries: Vec::new(),
            index: HashMap::new(),
            hints,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Total number of ids ever issued, retired ones included.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn live_letters(&self) -> Vec<Letter> {
        (0..self.entries.len())
            .filter(|&i| self.entries[i].rewrite.is_none())
            .collect()
    }

    pub fn is_live(&self, l: Letter) -> bool {
        l < self.entries.len() && self.entries[l].rewrite.is_none()
    }

    pub fn poly(&self, l: Letter) -> &MultiPoly {
        &self.entries[l].poly
    }

    pub fn name(&self, l: Letter) -> String {
        match &self.entries[l].label {
            Some(s) => s.clone(),
            None => self.entries[l].poly.to_string_with(&var_name),
        }
    }

    /// Adds a letter with a display label (used for formal letters such as
    /// regularization parameters). The polynomial must be coprime to all
    /// live entries.
    pub fn push_labeled(&mut self, poly: MultiPoly, label: String) -> Letter {
        let id = self.entries.len();
        self.index.insert(poly.clone(), id);
        self.entries.push(Entry {
            poly,
            label: Some(label),
            rewrite: None,
        });
        id
    }

    /// Rewrites retired ids in `fv` into live letters.
    pub fn resolve(&self, fv: &FactoredValue) -> FactoredValue {
        let mut out = BTreeMap::new();
        for (&l, &e) in &fv.exponents {
            self.resolve_into(l, e, &mut out);
        }
        FactoredValue {
            exponents: out,
            constant: fv.constant.clone(),
        }
    }

    fn resolve_into(&self, l: Letter, e: i64, out: &mut BTreeMap<Letter, i64>) {
        match &self.entries[l].rewrite {
            None => add_exp(out, l, e),
            Some(rw) => {
                for (&m, &f) in rw {
                    self.resolve_into(m, e * f, out);
                }
            }
        }
    }

    /// Factors `f` over the registry, refining the registry as needed.
    pub fn refine_register(&mut self, f: &RatFunc) -> Result<FactoredValue, ArithError> {
        if f.is_zero() {
            return Err(ArithError::ZeroInput);
        }
        let n = self.register_poly(f.num())?;
        let d = self.register_poly(f.den())?;
        Ok(self.resolve(&n.div(&d)))
    }

    /// Factors a nonzero polynomial over the registry.
    pub fn register_poly(&mut self, p: &MultiPoly) -> Result<FactoredValue, ArithError> {
        if p.is_zero() {
            return Err(ArithError::ZeroInput);
        }
        assert_eq!(p.nvars(), self.nvars, "variable count mismatch");
        let (c, mut rest) = p.primitive();
        let mut exps = BTreeMap::new();
        if !rest.is_constant() {
            if let Some(&id) = self.index.get(&rest) {
                add_exp(&mut exps, id, 1);
                return Ok(FactoredValue {
                    exponents: exps,
                    constant: c,
                });
            }
            let vars = rest.variables();
            let hints: Vec<Hint> = self
                .hints
                .iter()
                .filter(|h| h.vars().iter().all(|v| vars.contains(v)))
                .cloned()
                .collect();
            let mut factors = Vec::new();
            for h in hints {
                while !rest.is_constant() && h.vanishes_on(&rest) {
                    let hp = h.poly(self.nvars);
                    rest = rest.div_exact(&hp).expect("hint factor divides");
                    factors.push(hp);
                }
            }
            let (c2, rest) = rest.primitive();
            debug_assert!(c2.is_one() || rest.is_constant());
            if !rest.is_constant() {
                factors.push(rest);
            }
            for f in factors {
                for (l, e) in self.insert(f.normalized()) {
                    add_exp(&mut exps, l, e);
                }
            }
            // Constants are recomputed so that the factorization is exact.
            let rebuilt = self.rebuild(&exps);
            let ratio = p.div_exact(&rebuilt).expect("factorization divides input");
            debug_assert!(ratio.is_constant());
            let resolved = self.resolve(&FactoredValue {
                exponents: exps,
                constant: BigRat::one(),
            });
            return Ok(FactoredValue {
                exponents: resolved.exponents,
                constant: ratio.constant_value(),
            });
        }
        Ok(FactoredValue {
            exponents: exps,
            constant: c,
        })
    }

    fn rebuild(&self, exps: &BTreeMap<Letter, i64>) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars);
        for (&l, &e) in exps {
            assert!(e >= 0, "polynomial factorization has negative exponent");
            acc = acc.mul(&self.entries[l].poly.pow(e as u32));
        }
        acc
    }

    /// Product of the live letters in `fv` times its constant.
    pub fn reconstruct(&self, fv: &FactoredValue) -> Result<RatFunc, ArithError> {
        let fv = self.resolve(fv);
        let mut num = MultiPoly::constant(self.nvars, fv.constant.clone());
        let mut den = MultiPoly::one(self.nvars);
        for (&l, &e) in &fv.exponents {
            let p = self.entries[l].poly.pow(e.unsigned_abs() as u32);
            if e > 0 {
                num = num.mul(&p);
            } else {
                den = den.mul(&p);
            }
        }
        RatFunc::new(num, den)
    }

    /// Inserts a primitive non-constant polynomial, returning its exponents
    /// over live letters at the time of return.
    fn insert(&mut self, p: MultiPoly) -> BTreeMap<Letter, i64> {
        let mut out = BTreeMap::new();
        let mut pending = vec![(p, 1i64)];
        'outer: while let Some((p, e)) = pending.pop() {
            if p.is_constant() {
                continue;
            }
            if let Some(&id) = self.index.get(&p) {
                add_exp(&mut out, id, e);
                continue;
            }
            for k in 0..self.entries.len() {
                if self.entries[k].rewrite.is_some() || self.entries[k].label.is_some() {
                    continue;
                }
                let ek = self.entries[k].poly.clone();
                let g = p.gcd(&ek);
                if g.is_constant() {
                    continue;
                }
                if g == ek {
                    add_exp(&mut out, k, e);
                    let q = p.div_exact(&ek).unwrap().normalized();
                    pending.push((q, e));
                    continue 'outer;
                }
                let h = ek.div_exact(&g).unwrap().normalized();
                self.index.remove(&ek);
                self.entries[k].rewrite = Some(BTreeMap::new());
                let mut rw = self.insert(g);
                for (l, f) in self.insert(h) {
                    add_exp(&mut rw, l, f);
                }
                self.entries[k].rewrite = Some(rw);
                pending.push((p, e));
                continue 'outer;
            }
            let id = self.entries.len();
            self.index.insert(p.clone(), id);
            self.entries.push(Entry {
                poly: p,
                label: None,
                rewrite: None,
            });
            add_exp(&mut out, id, e);
        }
        // Earlier pieces may have been split while later ones were inserted.
        let fv = self.resolve(&FactoredValue {
            exponents: out,
            constant: BigRat::one(),
        });
        fv.exponents
    }

    /// JSON list of the live letters as polynomial strings.
    pub fn dump_json(&self) -> String {
        let dump = RegistryDump {
            nvars: self.nvars,
            letters: self
                .live_letters()
                .into_iter()
                .map(|l| self.entries[l].poly.to_string())
                .collect(),
        };
        serde_json::to_string_pretty(&dump).expect("registry serializes")
    }

    pub fn load_json(s: &str) -> Result<Self, ArithError> {
        let dump: RegistryDump =
            serde_json::from_str(s).map_err(|e| ArithError::Parse(e.to_string()))?;
        let mut reg = LetterRegistry::new(dump.nvars);
        for l in &dump.letters {
            let p = parse_poly(l, dump.nvars)?;
            reg.register_poly(&p)?;
        }
        Ok(reg)
    }
}
