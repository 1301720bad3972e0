//! Linear relations among generators, modulo products.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{verify, Identity, LabError, Status};
use crate::arith::{parse_rational, BigRat, LetterRegistry, Letter};
use crate::linsolve::{kernel, primitive_vector, SparseMatQ};
use crate::mpl::json::{ExpressionJson, TermJson, SCHEMA};
use crate::mpl::Expression;
use crate::polygon::{instantiate, TemplateJson, TermTemplate};
use crate::tensor::{mod_products_reduce, SymbolTensor};

#[derive(Clone, Debug)]
pub struct SearchLimits {
    pub max_unknowns: usize,
    pub max_weight: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_unknowns: 2000,
            max_weight: 5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchProblem {
    pub nvars: usize,
    /// Named generators; each is a whole expression (e.g. a cyclic orbit).
    pub generators: Vec<(String, Expression)>,
    pub frozen: BTreeMap<String, BigRat>,
    pub polygon: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Solutions honouring the frozen coefficients first (at most one),
    /// then a basis of the homogeneous relations among the free generators.
    pub identities: Vec<Identity>,
    /// Coefficient vectors matching `identities`, indexed like `names`.
    pub vectors: Vec<Vec<BigRat>>,
    pub names: Vec<String>,
    pub rank: usize,
    pub rows: usize,
}

impl SearchProblem {
    pub fn new(nvars: usize) -> Self {
        SearchProblem {
            nvars,
            generators: Vec::new(),
            frozen: BTreeMap::new(),
            polygon: None,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, e: Expression) {
        self.generators.push((name.into(), e));
    }

    pub fn from_templates(templates: &[TermTemplate]) -> Result<Self, LabError> {
        let n = templates.first().map(|t| t.polygon).unwrap_or(4);
        let mut p = SearchProblem::new(n);
        p.polygon = Some(n);
        for (i, t) in templates.iter().enumerate() {
            if t.polygon != n {
                return Err(LabError::Input("templates mix polygon sizes".into()));
            }
            let mut t = t.clone();
            t.coeff = BigRat::one();
            p.push(format!("t{}", i + 1), instantiate(&t)?);
        }
        Ok(p)
    }

    fn weight(&self) -> usize {
        self.generators.iter().filter_map(|(_, e)| e.weight()).max().unwrap_or(0)
    }
}

fn reduced_symbols(gens: &[(String, Expression)], nvars: usize) -> Result<Vec<SymbolTensor>, LabError> {
    let mut reg = LetterRegistry::new(nvars);
    let mut raw = Vec::with_capacity(gens.len());
    for (_, e) in gens {
        raw.push(e.symbol(&mut reg)?);
    }
    Ok(raw.iter().map(|s| mod_products_reduce(&s.resolve(&reg))).collect())
}

fn combine(gens: &[(String, Expression)], c: &[BigRat], nvars: usize) -> Expression {
    let mut e = Expression::new(nvars);
    for ((_, g), x) in gens.iter().zip(c) {
        if !x.is_zero() {
            e.extend(g, x);
        }
    }
    e.merged()
}

/// Kernel of the reduced-symbol matrix, with frozen coefficients imposed as
/// an inhomogeneous column. Every returned identity is re-verified from
/// scratch with a fresh registry.
pub fn search(p: &SearchProblem, limits: &SearchLimits) -> Result<SearchOutcome, LabError> {
    let mut gens = p.generators.clone();
    gens.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.to_text().cmp(&b.1.to_text())));
    for name in p.frozen.keys() {
        if !gens.iter().any(|(n, _)| n == name) {
            return Err(LabError::Input(format!("frozen generator {name:?} does not exist")));
        }
    }
    let weight = p.weight();
    let unknowns = gens.len() - p.frozen.len();
    if unknowns > limits.max_unknowns || weight > limits.max_weight {
        return Err(LabError::ScaleExceeded {
            unknowns,
            weight,
            max_unknowns: limits.max_unknowns,
            max_weight: limits.max_weight,
        });
    }
    let syms = reduced_symbols(&gens, p.nvars)?;
    let free: Vec<usize> = (0..gens.len()).filter(|&i| !p.frozen.contains_key(&gens[i].0)).collect();
    let frozen: Vec<(usize, BigRat)> = (0..gens.len())
        .filter_map(|i| p.frozen.get(&gens[i].0).map(|c| (i, c.clone())))
        .collect();
    let has_rhs = !frozen.is_empty();
    let ncols = free.len() + usize::from(has_rhs);
    let mut rows: BTreeMap<Vec<Letter>, BTreeMap<usize, BigRat>> = BTreeMap::new();
    for (col, &g) in free.iter().enumerate() {
        for (w, c) in syms[g].terms() {
            rows.entry(w.clone()).or_default().insert(col, c.clone());
        }
    }
    if has_rhs {
        let mut b = SymbolTensor::zero(weight);
        for (g, c) in &frozen {
            b.add_scaled(&syms[*g], c);
        }
        for (w, c) in b.terms() {
            rows.entry(w.clone()).or_default().insert(free.len(), c.clone());
        }
    }
    let mut m = SparseMatQ::new(ncols);
    let nrows = rows.len();
    for (_, r) in rows {
        m.push_row(r.into_iter().filter(|(_, c)| !c.is_zero()))
            .expect("columns in range");
    }
    let k = kernel(&m);
    let rank = ncols - k.dim();
    let mut vectors = Vec::new();
    for v in &k.vectors {
        let mut full = vec![BigRat::zero(); gens.len()];
        if has_rhs && !v[free.len()].is_zero() {
            let t = v[free.len()].clone();
            for (col, &g) in free.iter().enumerate() {
                full[g] = &v[col] / &t;
            }
            for (g, c) in &frozen {
                full[*g] = c.clone();
            }
            vectors.insert(0, full);
        } else {
            for (col, &g) in free.iter().enumerate() {
                full[g] = v[col].clone();
            }
            vectors.push(primitive_vector(&full));
        }
    }
    let mut identities = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let e = combine(&gens, v, p.nvars);
        let status = if verify(&e)?.is_verified() {
            Status::Verified
        } else {
            Status::Conjectured
        };
        let mut id = Identity::new(format!("relation{}", i + 1), e, status);
        id.polygon = p.polygon;
        identities.push(id);
    }
    Ok(SearchOutcome {
        identities,
        vectors,
        names: gens.iter().map(|(n, _)| n.clone()).collect(),
        rank,
        rows: nrows,
    })
}

// ---- problem files ----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<TemplateJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemJson {
    #[serde(default)]
    pub schema: Option<String>,
    pub nvars: usize,
    pub generators: Vec<GeneratorJson>,
    #[serde(default)]
    pub freeze: BTreeMap<String, String>,
}

impl ProblemJson {
    pub fn to_problem(&self) -> Result<SearchProblem, LabError> {
        if let Some(s) = &self.schema {
            if s != SCHEMA {
                return Err(LabError::Input(format!("unknown schema {s:?}")));
            }
        }
        let mut p = SearchProblem::new(self.nvars);
        for g in &self.generators {
            let e = match &g.template {
                Some(t) => {
                    let t = TermTemplate::from_json(t)?;
                    p.polygon = Some(t.polygon);
                    instantiate(&t)?
                }
                None => ExpressionJson {
                    schema: None,
                    nvars: Some(self.nvars),
                    terms: g.terms.clone(),
                }
                .to_expression()?,
            };
            if e.nvars != self.nvars {
                return Err(LabError::Input(format!("generator {} uses {} variables", g.name, e.nvars)));
            }
            p.push(g.name.clone(), e);
        }
        for (k, v) in &self.freeze {
            p.frozen.insert(k.clone(), parse_rational(v)?);
        }
        Ok(p)
    }
}
