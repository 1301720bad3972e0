//! JSON form of expressions.
//!
//! ```json
//! {"schema": "polygonal-mpl/1", "nvars": 8,
//!  "terms": [{"coeff": "-4", "kind": "IN", "comp": [3,1,1],
//!             "args": ["x1", {"cyclic": [1,2,3,4]}, "(x2-x3)/x4"],
//!             "times": [{"kind": "Li", "comp": [1], "args": ["x5"]}]}]}
//! ```
//!
//! `nvars` may be omitted and is then the largest variable index used.

use serde::{Deserialize, Serialize};

use super::{Composition, Expression, FunctionTerm, Kind, MplError, MplFunction};
use crate::arith::poly::var_name;
use crate::arith::{parse::max_var_index, parse_ratfunc, parse_rational, BigRat, RatFunc};
use crate::polygon::cyclic_ratio;

pub const SCHEMA: &str = "polygonal-mpl/1";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ArgJson {
    Text(String),
    Cyclic { cyclic: Vec<usize> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CoeffJson {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FactorJson {
    pub kind: String,
    pub comp: Vec<u32>,
    pub args: Vec<ArgJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub coeff: CoeffJson,
    pub kind: String,
    pub comp: Vec<u32>,
    pub args: Vec<ArgJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<FactorJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExpressionJson {
    #[serde(default)]
    pub schema: Option<String>,
    #[serde(default)]
    pub nvars: Option<usize>,
    pub terms: Vec<TermJson>,
}

fn schema_err(m: impl Into<String>) -> MplError {
    MplError::Schema(m.into())
}

fn arg_vars(a: &ArgJson) -> usize {
    match a {
        ArgJson::Text(s) => max_var_index(s),
        ArgJson::Cyclic { cyclic } => cyclic.iter().copied().max().unwrap_or(0),
    }
}

fn parse_arg(a: &ArgJson, nvars: usize) -> Result<RatFunc, MplError> {
    match a {
        ArgJson::Text(s) => Ok(parse_ratfunc(s, nvars)?),
        ArgJson::Cyclic { cyclic } => cyclic_ratio(cyclic, nvars).map_err(|e| schema_err(e.to_string())),
    }
}

fn parse_factor(kind: &str, comp: &[u32], args: &[ArgJson], nvars: usize) -> Result<MplFunction, MplError> {
    let kind: Kind = kind.parse()?;
    let comp = Composition::new(comp.to_vec())?;
    let args = args.iter().map(|a| parse_arg(a, nvars)).collect::<Result<Vec<_>, _>>()?;
    MplFunction::new(kind, comp, args)
}

fn factor_json(f: &MplFunction) -> FactorJson {
    FactorJson {
        kind: f.kind.as_str().to_string(),
        comp: f.comp.parts().to_vec(),
        args: f.args.iter().map(|a| ArgJson::Text(a.to_string_with(&var_name))).collect(),
    }
}

impl ExpressionJson {
    pub fn to_expression(&self) -> Result<Expression, MplError> {
        if let Some(s) = &self.schema {
            if s != SCHEMA {
                return Err(schema_err(format!("unknown schema {s:?}")));
            }
        }
        let used = self
            .terms
            .iter()
            .flat_map(|t| t.args.iter().chain(t.times.iter().flat_map(|f| f.args.iter())))
            .map(arg_vars)
            .max()
            .unwrap_or(0);
        let nvars = self.nvars.unwrap_or(used);
        if used > nvars {
            return Err(schema_err(format!("variable x{used} exceeds nvars = {nvars}")));
        }
        let mut e = Expression::new(nvars);
        for t in &self.terms {
            let coeff = match &t.coeff {
                CoeffJson::Int(n) => BigRat::from_integer((*n).into()),
                CoeffJson::Text(s) => parse_rational(s)?,
            };
            let mut fs = vec![parse_factor(&t.kind, &t.comp, &t.args, nvars)?];
            for f in &t.times {
                fs.push(parse_factor(&f.kind, &f.comp, &f.args, nvars)?);
            }
            e.push(FunctionTerm::product(coeff, fs));
        }
        Ok(e)
    }

    pub fn from_expression(e: &Expression) -> Self {
        ExpressionJson {
            schema: Some(SCHEMA.to_string()),
            nvars: Some(e.nvars),
            terms: e
                .terms
                .iter()
                .map(|t| {
                    let f = factor_json(&t.func);
                    TermJson {
                        coeff: CoeffJson::Text(t.coeff.to_string()),
                        kind: f.kind,
                        comp: f.comp,
                        args: f.args,
                        times: t.times.iter().map(factor_json).collect(),
                    }
                })
                .collect(),
        }
    }
}

impl Expression {
    pub fn from_json_str(s: &str) -> Result<Expression, MplError> {
        let j: ExpressionJson = serde_json::from_str(s).map_err(|e| schema_err(e.to_string()))?;
        j.to_expression()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ExpressionJson::from_expression(self)).expect("serializable")
    }
}
