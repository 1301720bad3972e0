//! Identity verification, search, degeneration and bookkeeping.

pub mod catalog;
pub mod dims;
pub mod search;
pub mod specialize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ArithError, LetterRegistry};
use crate::mpl::json::ExpressionJson;
use crate::mpl::{Expression, MplError};
use crate::polygon::PolygonError;
use crate::tensor::{mod_products_reduce, SymbolTensor};

pub use catalog::{catalog, catalog_entry, CatalogEntry};
pub use dims::dims;
pub use search::{search, SearchLimits, SearchProblem};
pub use specialize::{depth_reduce, specialize, DepthReduction, PlanStep, Specialization, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error(transparent)]
    Mpl(#[from] MplError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error("problem too large: {unknowns} unknowns at weight {weight} (limits {max_unknowns} unknowns, weight {max_weight})")]
    ScaleExceeded {
        unknowns: usize,
        weight: usize,
        max_unknowns: usize,
        max_weight: usize,
    },
    #[error("substitution is undefined: {0}")]
    UndefinedSubstitution(String),
    #[error("isolation failed: {0}")]
    IsolationFailed(String),
    #[error("bad input: {0}")]
    Input(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Conjectured,
    Verified,
    Refuted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Identity {
    pub name: String,
    pub expr: Expression,
    pub status: Status,
    pub polygon: Option<usize>,
    pub orbits: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityJson {
    #[serde(default)]
    pub name: String,
    #[serde(default = "conjectured")]
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbits: Option<usize>,
    #[serde(flatten)]
    pub expr: ExpressionJson,
}

fn conjectured() -> Status {
    Status::Conjectured
}

impl Identity {
    pub fn new(name: impl Into<String>, expr: Expression, status: Status) -> Self {
        Identity {
            name: name.into(),
            expr,
            status,
            polygon: None,
            orbits: None,
        }
    }

    pub fn to_json_string(&self) -> String {
        let j = IdentityJson {
            name: self.name.clone(),
            status: self.status,
            polygon: self.polygon,
            orbits: self.orbits,
            expr: ExpressionJson::from_expression(&self.expr),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Identity, LabError> {
        let j: IdentityJson = serde_json::from_str(s).map_err(|e| LabError::Input(e.to_string()))?;
        Ok(Identity {
            name: j.name,
            status: j.status,
            polygon: j.polygon,
            orbits: j.orbits,
            expr: j.expr.to_expression()?,
        })
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Verified,
    Refuted { residue: SymbolTensor },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

/// Symbol of `e` and its reduction modulo products, over a fresh registry.
pub fn symbol_and_residue(e: &Expression) -> Result<(LetterRegistry, SymbolTensor, SymbolTensor), LabError> {
    let mut reg = LetterRegistry::new(e.nvars);
    let s = e.symbol(&mut reg)?;
    let r = mod_products_reduce(&s);
    Ok((reg, s, r))
}

/// Checks that `e` vanishes modulo products, with formal variables.
pub fn verify(e: &Expression) -> Result<Verdict, LabError> {
    let (_, _, r) = symbol_and_residue(e)?;
    Ok(if r.is_zero() {
        Verdict::Verified
    } else {
        Verdict::Refuted { residue: r }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, parse_ratfunc};
    use crate::mpl::{func, FunctionTerm, Kind};

    fn li2(s: &str) -> FunctionTerm {
        FunctionTerm::new(int(1), func(Kind::Li, &[2], vec![parse_ratfunc(s, 1).unwrap()]))
    }

    #[test]
    fn reflection_and_single_term() {
        let mut e = Expression::new(1);
        e.push(li2("x1"));
        e.push(li2("1 - x1"));
        assert!(verify(&e).unwrap().is_verified());
        let mut e = Expression::new(1);
        e.push(li2("x1"));
        match verify(&e).unwrap() {
            Verdict::Refuted { residue } => assert!(!residue.is_zero()),
            Verdict::Verified => panic!("single dilogarithm is not a product"),
        }
    }

    #[test]
    fn singular_term_is_reported() {
        let mut e = Expression::new(1);
        e.push(li2("x1"));
        e.push(FunctionTerm::new(int(1), func(Kind::Li, &[1], vec![parse_ratfunc("1", 1).unwrap()])));
        assert!(matches!(verify(&e), Err(LabError::Mpl(MplError::SingularTerm { index: 1, .. }))));
    }

    #[test]
    fn identity_json_round_trip() {
        let mut e = Expression::new(1);
        e.push(li2("x1"));
        let mut id = Identity::new("one", e, Status::Refuted);
        id.orbits = Some(3);
        let back = Identity::from_json_str(&id.to_json_string()).unwrap();
        assert_eq!(back, id);
    }
}
