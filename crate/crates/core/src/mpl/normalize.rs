//! Reduction of a depth-`d`, weight-`d+2` iterated integral to the normal form
//! `I_{3,1,…,1}` plus lower depth and products.
//!
//! Every step used is an exact functional identity: stuffle products of `Li`
//! terms and shuffle products of integral words. Starting from the target,
//! relations containing each non-normal top-depth term are generated
//! breadth-first (removing leading ones, shrinking the ones between two 2's,
//! the shuffle with `I_1`, then general splittings) until the target is a
//! linear consequence. The result is therefore an identity at symbol level
//! with explicit product and lower-depth terms, checkable without quotienting.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::{Composition, Expression, FunctionTerm, IntegralWord, Kind, MplError, MplFunction};
use crate::arith::{BigRat, RatFunc};
use crate::linsolve::{rref, SparseMatQ};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecipeStep {
    pub rule: String,
    pub multiplier: BigRat,
}

/// `target = rhs` as an exact identity in formal arguments `x1..xd`.
#[derive(Clone, Debug)]
pub struct Recipe {
    pub target: FunctionTerm,
    pub rhs: Expression,
    pub steps: Vec<RecipeStep>,
    /// Always false for the rules used here: every word that occurs is
    /// convergent, so no regularized value enters.
    pub needs_regularization: bool,
}

impl Recipe {
    /// `target − rhs`, which vanishes identically.
    pub fn identity(&self) -> Expression {
        let mut e = Expression::new(self.rhs.nvars);
        e.push(self.target.clone());
        e.extend(&self.rhs, &-BigRat::one());
        e
    }

    pub fn counts_by_composition(&self) -> Vec<(String, usize)> {
        let mut m: std::collections::BTreeMap<String, usize> = Default::default();
        for t in &self.rhs.terms {
            let key = if t.is_product() {
                "product".to_string()
            } else {
                format!("{}{}", t.func.kind.as_str(), t.func.comp)
            };
            *m.entry(key).or_default() += 1;
        }
        m.into_iter().collect()
    }
}

type Key = (Composition, Vec<RatFunc>);

struct Relation {
    rule: String,
    unknown: Vec<(usize, BigRat)>,
    known: Vec<FunctionTerm>,
}

struct Solver {
    d: usize,
    normal: Composition,
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
    relations: Vec<Relation>,
    seen_rules: std::collections::HashSet<String>,
}

const MAX_UNKNOWNS: usize = 4000;
const MAX_ROUNDS: usize = 12;

pub fn depth_normalize(c: &Composition) -> Result<Recipe, MplError> {
    let d = c.depth();
    let w = c.weight();
    let unsupported = |step: &str| MplError::UnsupportedComposition {
        comp: c.to_string(),
        step: step.to_string(),
    };
    if w > 8 {
        return Err(unsupported("weight above 8"));
    }
    if w != d + 2 {
        return Err(unsupported("normal form I_{3,1,...,1} needs weight = depth + 2"));
    }
    let args: Vec<RatFunc> = (0..d).map(|i| RatFunc::var(d, i)).collect();
    let target_fn = MplFunction::new(Kind::I, c.clone(), args.clone())?;
    let target = FunctionTerm::new(BigRat::one(), target_fn.clone());
    let normal = Composition::new(std::iter::once(3).chain(std::iter::repeat(1).take(d - 1)).collect())?;
    if *c == normal {
        let mut rhs = Expression::new(d);
        rhs.push(target.clone());
        return Ok(Recipe {
            target,
            rhs,
            steps: Vec::new(),
            needs_regularization: false,
        });
    }
    let mut s = Solver {
        d,
        normal,
        keys: Vec::new(),
        index: HashMap::new(),
        relations: Vec::new(),
        seen_rules: Default::default(),
    };
    s.intern((c.clone(), args));
    // Targeted rules first, run to closure; general splittings only if
    // those leave the target undetermined.
    let mut targeted = 0;
    let mut general = 0;
    for round in 0..MAX_ROUNDS {
        while targeted < s.keys.len() && s.keys.len() <= MAX_UNKNOWNS {
            s.expand(targeted, false)?;
            targeted += 1;
        }
        if let Some(lambda) = s.solve() {
            return Ok(s.recipe(target, lambda));
        }
        if s.keys.len() > MAX_UNKNOWNS {
            return Err(unsupported("relation search exceeded its budget"));
        }
        let end = s.keys.len();
        if round > 0 && general == end {
            break;
        }
        while general < end {
            s.expand(general, true)?;
            general += 1;
        }
    }
    Err(unsupported("stuffle/shuffle relations do not isolate the term"))
}

impl Solver {
    fn intern(&mut self, k: Key) -> usize {
        if let Some(&i) = self.index.get(&k) {
            return i;
        }
        self.index.insert(k.clone(), self.keys.len());
        self.keys.push(k);
        self.keys.len() - 1
    }

    /// Splits the terms of `Σ terms = 0` into unknowns and known terms.
    fn add_relation(&mut self, rule: String, terms: Vec<FunctionTerm>) -> Result<(), MplError> {
        if !self.seen_rules.insert(rule.clone()) {
            return Ok(());
        }
        let mut unknown: HashMap<usize, BigRat> = HashMap::new();
        let mut known = Vec::new();
        for t in terms {
            if t.is_product() || t.depth() < self.d {
                known.push(t);
                continue;
            }
            let (s, f) = t.func.to_i()?;
            if f.comp == self.normal {
                known.push(t);
                continue;
            }
            let i = self.intern((f.comp, f.args));
            *unknown.entry(i).or_insert_with(BigRat::zero) += &t.coeff * s;
        }
        let mut unknown: Vec<(usize, BigRat)> = unknown.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        unknown.sort_by_key(|(i, _)| *i);
        self.relations.push(Relation { rule, unknown, known });
        Ok(())
    }

    fn expand(&mut self, k: usize, general: bool) -> Result<(), MplError> {
        let (comp, args) = self.keys[k].clone();
        let f = MplFunction { kind: Kind::I, comp: comp.clone(), args };
        let (_, li) = f.to_li()?;
        let parts = comp.parts().to_vec();
        let d = parts.len();
        let all: Vec<usize> = (0..d).collect();
        if !general {
            let lead = parts.iter().take_while(|&&p| p == 1).count();
            if lead > 0 {
                // Li_{1^p} · Li_{rest}: the only term with p leading ones is the target.
                self.stuffle_split(&li, &all[..lead])?;
            } else if parts[0] == 2 {
                let m = parts[1..].iter().take_while(|&&p| p == 1).count();
                if m > 0 && parts.get(m + 1) == Some(&2) {
                    // Li_{2,2,1^t} · Li_{1^m}: the ones between the 2's drop below m
                    // everywhere except in the target.
                    self.stuffle_split(&li, &all[1..=m])?;
                } else if m == 0 && parts.get(1) == Some(&2) {
                    // I_{3,1^t}(x1, x3, …) ⧢ I_1(x2)
                    self.shuffle_split(&f, 2, 0)?;
                }
            }
            return Ok(());
        }
        for mask in 1..(1u32 << d) - 1 {
            if mask & 1 == 0 {
                continue;
            }
            let sub: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
            self.stuffle_split(&li, &sub)?;
        }
        // Shuffles against a single letter block.
        let (_, word) = f.to_integral_word()?;
        let n = word.weight();
        for i in 1..n {
            if word.letters[i].is_zero() {
                continue;
            }
            let run = word.letters[i + 1..].iter().take_while(|l| l.is_zero()).count();
            for z in 0..=run {
                self.shuffle_split(&f, i, z)?;
            }
        }
        Ok(())
    }

    /// Relation `Li_u · Li_v − Σ stuffles = 0`, `u` the slots in `sub`.
    fn stuffle_split(&mut self, li: &MplFunction, sub: &[usize]) -> Result<(), MplError> {
        let d = li.depth();
        let pick = |take: bool| -> Result<MplFunction, MplError> {
            let idx: Vec<usize> = (0..d).filter(|i| sub.contains(i) == take).collect();
            MplFunction::new(
                Kind::Li,
                Composition::new(idx.iter().map(|&i| li.comp.parts()[i]).collect())?,
                idx.iter().map(|&i| li.args[i].clone()).collect(),
            )
        };
        let (u, v) = (pick(true)?, pick(false)?);
        let rule = format!("stuffle {} * {}", u.to_text(), v.to_text());
        if self.seen_rules.contains(&rule) {
            return Ok(());
        }
        let expansion = super::stuffle_product(
            &FunctionTerm::new(BigRat::one(), u.clone()),
            &FunctionTerm::new(BigRat::one(), v.clone()),
        )?;
        let mut terms = vec![FunctionTerm::product(BigRat::one(), vec![u, v])];
        terms.extend(expansion.terms.into_iter().map(|t| t.scaled(&-BigRat::one())));
        self.add_relation(rule, terms)
    }

    /// Relation `I(w1) · I(w2) − Σ I(w1 ⧢ w2) = 0` where `w2` consists of
    /// the letter at `pos` followed by `zeros` of the zeros after it.
    fn shuffle_split(&mut self, f: &MplFunction, pos: usize, zeros: usize) -> Result<(), MplError> {
        let (_, word) = f.to_integral_word()?;
        let n = word.weight();
        let mut take = vec![false; n];
        take[pos] = true;
        for t in take.iter_mut().skip(pos + 1).take(zeros) {
            *t = true;
        }
        let split = |flag: bool| IntegralWord {
            a0: word.a0.clone(),
            letters: (0..n).filter(|&i| take[i] == flag).map(|i| word.letters[i].clone()).collect(),
            a_end: word.a_end.clone(),
        };
        let (w1, w2) = (split(false), split(true));
        if w1.letters.is_empty() || w1.letters[0].is_zero() || w2.letters[0].is_zero() {
            return Ok(());
        }
        let (f1, f2) = match (w1.as_i_function(), w2.as_i_function()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(()),
        };
        let rule = format!("shuffle {} * {}", f1.to_text(), f2.to_text());
        if self.seen_rules.contains(&rule) {
            return Ok(());
        }
        let mut terms = vec![FunctionTerm::product(BigRat::one(), vec![f1, f2])];
        for (c, w) in super::shuffle_words(&w1, &w2)? {
            let g = w.as_i_function().expect("shuffle of convergent words");
            terms.push(FunctionTerm::new(-c, g));
        }
        self.add_relation(rule, terms)
    }

    /// Finds λ with `Σ λ_r · unknowns_r = e_target`, if one exists.
    fn solve(&self) -> Option<Vec<BigRat>> {
        let nrel = self.relations.len();
        let mut m = SparseMatQ::new(nrel + 1);
        let mut rows: Vec<Vec<(usize, BigRat)>> = vec![Vec::new(); self.keys.len()];
        for (r, rel) in self.relations.iter().enumerate() {
            for (k, c) in &rel.unknown {
                rows[*k].push((r, c.clone()));
            }
        }
        rows[0].push((nrel, -BigRat::one()));
        for row in rows {
            m.push_row(row).ok()?;
        }
        let (red, _) = rref(&m);
        // Consistent iff the last column is not a pivot.
        let mut lambda = vec![BigRat::zero(); nrel];
        for row in &red.rows {
            let (&pc, _) = row.iter().next()?;
            if pc == nrel {
                return None;
            }
            // Free variables set to 0 except the last column (set to 1).
            if let Some(x) = row.get(&nrel) {
                lambda[pc] = -x.clone();
            }
        }
        Some(lambda)
    }

    fn recipe(&self, target: FunctionTerm, lambda: Vec<BigRat>) -> Recipe {
        let mut rhs = Expression::new(self.d);
        let mut steps = Vec::new();
        for (rel, l) in self.relations.iter().zip(&lambda) {
            if l.is_zero() {
                continue;
            }
            steps.push(RecipeStep {
                rule: rel.rule.clone(),
                multiplier: l.clone(),
            });
            for t in &rel.known {
                rhs.push(t.scaled(&-l.clone()));
            }
        }
        Recipe {
            target,
            rhs: canonical_rhs(&rhs),
            steps,
            needs_regularization: false,
        }
    }
}

/// Rewrites single-function terms in kind `I` and merges like terms.
fn canonical_rhs(e: &Expression) -> Expression {
    let mut out = Expression::new(e.nvars);
    for t in &e.terms {
        if t.is_product() {
            out.push(t.clone());
            continue;
        }
        match t.func.to_i() {
            Ok((s, f)) => out.push(FunctionTerm::new(&t.coeff * s, f)),
            Err(_) => out.push(t.clone()),
        }
    }
    out.merged()
}

/// Symbol-level check of a recipe: `target − rhs` has zero symbol.
pub fn check_recipe(r: &Recipe) -> Result<bool, MplError> {
    let mut reg = crate::arith::LetterRegistry::new(r.rhs.nvars);
    let s = r.identity().symbol(&mut reg)?;
    Ok(s.is_zero())
}
