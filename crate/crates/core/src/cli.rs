//! The `polympl` command line.
//!
//! Exit codes: 0 success or verified, 1 refuted or nonzero result, 2 usage or
//! data error, 3 scale limit exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::arith::{parse_rational, LetterRegistry};
use crate::lab::dims::dims_big;
use crate::lab::search::{GeneratorJson, ProblemJson};
use crate::lab::specialize::PlanStep;
use crate::lab::{
    catalog, catalog_entry, depth_reduce, search, specialize, symbol_and_residue, Identity, LabError, SearchLimits,
    Substitution,
};
use crate::mpl::json::{ExpressionJson, SCHEMA};
use crate::mpl::{Composition, Kind};
use crate::numeric::{check_numeric, SeriesParams};
use crate::polygon::{enumerate_even_dissections, generate_ansatz, AnsatzOptions, Symmetrize};
use crate::tensor::TensorJson;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONZERO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SCALE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "polympl", version, about = "Symbol calculus for polygonal polylogarithm identities")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the symbol of an expression and its residue modulo products.
    Symbol {
        file: PathBuf,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Check that an expression vanishes modulo products.
    Verify { file: PathBuf },
    /// Find linear relations among generators.
    Search {
        file: PathBuf,
        /// Fix a generator coefficient, e.g. `t1=-4`.
        #[arg(long = "freeze", value_name = "NAME=VALUE")]
        freeze: Vec<String>,
        #[arg(long, default_value_t = 2000)]
        max_unknowns: usize,
        #[arg(long, default_value_t = 5)]
        max_weight: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// List even dissections of a polygon.
    Polygons {
        #[arg(long)]
        size: usize,
        /// Multiset of cell sizes; quadrangulations by default.
        #[arg(long, value_delimiter = ',')]
        cells: Vec<usize>,
        #[arg(long)]
        count_only: bool,
    },
    /// Generate decorated templates as a search problem.
    Ansatz {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        weight: usize,
        /// Compositions separated by `;`, parts by `,`.
        #[arg(long)]
        comps: String,
        #[arg(long, value_enum, default_value_t = SymArg::Cyclic)]
        symmetrize: SymArg,
        #[arg(long, default_value = "IN")]
        kind: String,
        /// Allowed cell sizes.
        #[arg(long, value_delimiter = ',', default_value = "4")]
        cells: Vec<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Degenerate an expression under a substitution.
    Specialize {
        file: PathBuf,
        #[arg(long = "set", value_name = "xI=VALUE", required = true)]
        set: Vec<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Isolate a top-depth term from specializations of an identity.
    Reduce {
        file: PathBuf,
        /// Plan steps, e.g. `collapse-odd,subtract` or
        /// `collapse:x3=x1,x5=x1;subtract:x2=x1`.
        #[arg(long)]
        plan: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Dimension of the weight-k part on n points.
    Dims {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        points: u32,
    },
    /// Evaluate an expression numerically at a rational point.
    Eval {
        file: PathBuf,
        /// Coordinates, e.g. `1/3,1/4`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Vec<String>,
        #[arg(long, default_value_t = 256)]
        prec: u32,
        #[arg(long, default_value_t = 1e-30)]
        target: f64,
    },
    /// Named identities.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    List,
    Show { name: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SymArg {
    None,
    Cyclic,
    #[value(alias = "signedCyclic")]
    Signed,
}

impl From<SymArg> for Symmetrize {
    fn from(s: SymArg) -> Self {
        match s {
            SymArg::None => Symmetrize::None,
            SymArg::Cyclic => Symmetrize::Cyclic,
            SymArg::Signed => Symmetrize::SignedCyclic,
        }
    }
}

/// Failure of a subcommand with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(m: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: m.into(),
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        let code = match e {
            LabError::ScaleExceeded { .. } => EXIT_SCALE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

macro_rules! from_usage {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::usage(e.to_string())
            }
        }
    )*};
}
from_usage!(
    crate::mpl::MplError,
    crate::arith::ArithError,
    crate::polygon::PolygonError,
    crate::numeric::NumericError,
    serde_json::Error,
    std::io::Error
);

type Out<'a> = &'a mut dyn Write;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_identity(path: &Path) -> Result<Identity, Failure> {
    Ok(Identity::from_json_str(&read(path)?)?)
}

fn emit(out: Out, path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => writeln!(out, "{text}").map_err(Failure::from),
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I, out: Out, err: Out) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Cmd, out: Out) -> Result<i32, Failure> {
    match cmd {
        Cmd::Symbol { file, json } => cmd_symbol(&file, json, out),
        Cmd::Verify { file } => cmd_verify(&file, out),
        Cmd::Search {
            file,
            freeze,
            max_unknowns,
            max_weight,
            out: dest,
        } => cmd_search(&file, &freeze, SearchLimits { max_unknowns, max_weight }, &dest, out),
        Cmd::Polygons { size, cells, count_only } => cmd_polygons(size, &cells, count_only, out),
        Cmd::Ansatz {
            size,
            weight,
            comps,
            symmetrize,
            kind,
            cells,
            out: dest,
        } => cmd_ansatz(size, weight, &comps, symmetrize.into(), &kind, cells, &dest, out),
        Cmd::Specialize { file, set, out: dest } => cmd_specialize(&file, &set, &dest, out),
        Cmd::Reduce { file, plan, out: dest } => cmd_reduce(&file, &plan, &dest, out),
        Cmd::Dims { weight, points } => {
            if weight == 0 || points < 4 {
                return Err(Failure::usage("need weight >= 1 and at least 4 points"));
            }
            writeln!(out, "{}", dims_big(weight, points))?;
            Ok(EXIT_OK)
        }
        Cmd::Eval { file, at, prec, target } => cmd_eval(&file, &at, prec, target, out),
        Cmd::Catalog { action } => cmd_catalog(action, out),
    }
}

#[derive(Serialize, Deserialize)]
pub struct SymbolReport {
    pub schema: String,
    pub registry: serde_json::Value,
    pub symbol: TensorJson,
    pub residue: TensorJson,
}

fn registry_list(reg: &LetterRegistry) -> Result<serde_json::Value, Failure> {
    Ok(serde_json::from_str(&reg.dump_json())?)
}

fn cmd_symbol(file: &Path, json: bool, out: Out) -> Result<i32, Failure> {
    let id = read_identity(file)?;
    let (reg, s, r) = symbol_and_residue(&id.expr)?;
    if json {
        let rep = SymbolReport {
            schema: SCHEMA.into(),
            registry: registry_list(&reg)?,
            symbol: s.to_json(&reg),
            residue: r.to_json(&reg),
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&rep)?)?;
    } else {
        writeln!(out, "symbol ({} terms):\n{}", s.len(), s.to_text(&reg))?;
        writeln!(out, "residue mod products ({} terms):\n{}", r.len(), r.to_text(&reg))?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(file: &Path, out: Out) -> Result<i32, Failure> {
    let id = read_identity(file)?;
    let (reg, _, r) = symbol_and_residue(&id.expr)?;
    if r.is_zero() {
        writeln!(out, "verified")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "refuted: residue has {} terms", r.len())?;
        writeln!(out, "{}", r.to_text(&reg))?;
        Ok(EXIT_NONZERO)
    }
}

#[derive(Serialize, Deserialize)]
pub struct SearchReport {
    pub schema: String,
    pub generators: Vec<String>,
    pub rows: usize,
    pub rank: usize,
    pub vectors: Vec<Vec<String>>,
    pub identities: Vec<serde_json::Value>,
}

fn cmd_search(file: &Path, freeze: &[String], limits: SearchLimits, dest: &Option<PathBuf>, out: Out) -> Result<i32, Failure> {
    let pj: ProblemJson = serde_json::from_str(&read(file)?)?;
    let mut p = pj.to_problem()?;
    for f in freeze {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--freeze expects NAME=VALUE, got {f:?}")))?;
        p.frozen.insert(k.trim().to_string(), parse_rational(v.trim())?);
    }
    let res = search(&p, &limits)?;
    let rep = SearchReport {
        schema: SCHEMA.into(),
        generators: res.names.clone(),
        rows: res.rows,
        rank: res.rank,
        vectors: res
            .vectors
            .iter()
            .map(|v| v.iter().map(|c| c.to_string()).collect())
            .collect(),
        identities: res
            .identities
            .iter()
            .map(|i| serde_json::from_str(&i.to_json_string()))
            .collect::<Result<_, _>>()?,
    };
    emit(out, dest, &serde_json::to_string_pretty(&rep)?)?;
    if dest.is_some() {
        writeln!(out, "kernel dimension {}", res.vectors.len())?;
    }
    Ok(EXIT_OK)
}

fn cmd_polygons(size: usize, cells: &[usize], count_only: bool, out: Out) -> Result<i32, Failure> {
    let sizes = if cells.is_empty() {
        if size < 4 || size % 2 == 1 {
            return Err(Failure::usage(format!("polygon size {size} must be even and at least 4")));
        }
        vec![4; (size - 2) / 2]
    } else {
        cells.to_vec()
    };
    let ds = enumerate_even_dissections(size, &sizes)?;
    if !count_only {
        for d in &ds {
            let cs: Vec<String> = d
                .cells()
                .iter()
                .map(|c| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
                .map(|s| format!("[{s}]"))
                .collect();
            writeln!(out, "{}", cs.join(" "))?;
        }
    }
    writeln!(out, "{} dissections", ds.len())?;
    Ok(EXIT_OK)
}

fn parse_comps(s: &str) -> Result<Vec<Composition>, Failure> {
    s.split(';')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(|c| {
            let parts = c
                .split(',')
                .map(|p| p.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::usage(format!("composition {c:?}: {e}")))?;
            Ok(Composition::new(parts)?)
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_ansatz(
    size: usize,
    weight: usize,
    comps: &str,
    sym: Symmetrize,
    kind: &str,
    cells: Vec<usize>,
    dest: &Option<PathBuf>,
    out: Out,
) -> Result<i32, Failure> {
    let comps = parse_comps(comps)?;
    if comps.is_empty() {
        return Err(Failure::usage("no compositions given"));
    }
    if let Some(c) = comps.iter().find(|c| c.weight() != weight) {
        return Err(Failure::usage(format!("composition {c} does not have weight {weight}")));
    }
    let kind: Kind = kind.parse()?;
    let opts = AnsatzOptions {
        kind,
        cell_sizes: cells,
        symmetrize: sym,
    };
    let ts = generate_ansatz(size, &comps, &opts)?;
    let problem = ProblemJson {
        schema: Some(SCHEMA.into()),
        nvars: size,
        generators: ts
            .iter()
            .enumerate()
            .map(|(i, t)| GeneratorJson {
                name: format!("t{:04}", i + 1),
                template: Some(t.to_json()),
                terms: Vec::new(),
            })
            .collect(),
        freeze: Default::default(),
    };
    emit(out, dest, &serde_json::to_string_pretty(&problem)?)?;
    if dest.is_some() {
        writeln!(out, "{} templates", ts.len())?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize, Deserialize)]
pub struct EpsJson {
    pub name: String,
    pub locus: String,
}

#[derive(Serialize, Deserialize)]
pub struct SpecializeReport {
    pub schema: String,
    pub substitution: String,
    pub registry: serde_json::Value,
    pub eps: Vec<EpsJson>,
    pub regular: TensorJson,
    pub divergent: TensorJson,
    pub regular_mod_products: TensorJson,
    pub divergent_mod_products: TensorJson,
}

fn cmd_specialize(file: &Path, set: &[String], dest: &Option<PathBuf>, out: Out) -> Result<i32, Failure> {
    let id = read_identity(file)?;
    let items: Vec<&str> = set.iter().flat_map(|s| s.split(',')).collect();
    let s = Substitution::parse(&items)?;
    let sp = specialize(&id.expr, &s)?;
    let reg = &sp.registry;
    let rep = SpecializeReport {
        schema: SCHEMA.into(),
        substitution: s.to_string(),
        registry: registry_list(reg)?,
        eps: sp
            .eps
            .iter()
            .map(|(l, p)| EpsJson {
                name: reg.name(*l),
                locus: p.to_string(),
            })
            .collect(),
        regular: sp.regular.to_json(reg),
        divergent: sp.divergent.to_json(reg),
        regular_mod_products: sp.regular_mod_products().to_json(reg),
        divergent_mod_products: sp.divergent_mod_products().to_json(reg),
    };
    emit(out, dest, &serde_json::to_string_pretty(&rep)?)?;
    Ok(EXIT_OK)
}

/// Splits a plan string. Steps are separated by `;`, or by `,` when no step
/// carries an explicit substitution.
pub fn parse_plan_arg(s: &str) -> Result<Vec<PlanStep>, LabError> {
    if s.contains(':') || s.contains(';') {
        PlanStep::parse_plan(s)
    } else {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(PlanStep::parse)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
pub struct ReduceReport {
    pub schema: String,
    pub target: ExpressionJson,
    pub rhs: ExpressionJson,
    pub remainder: TensorJson,
    pub registry: serde_json::Value,
    pub consistent: bool,
    pub divergent_vanishes: bool,
    pub degenerate_terms: usize,
    pub counts: Vec<(String, usize)>,
}

fn cmd_reduce(file: &Path, plan: &str, dest: &Option<PathBuf>, out: Out) -> Result<i32, Failure> {
    let id = read_identity(file)?;
    let steps = parse_plan_arg(plan)?;
    let r = depth_reduce(&id, &steps)?;
    let mut target = crate::mpl::Expression::new(id.expr.nvars);
    target.push(r.target.clone());
    let rep = ReduceReport {
        schema: SCHEMA.into(),
        target: ExpressionJson::from_expression(&target),
        rhs: ExpressionJson::from_expression(&r.rhs),
        remainder: r.remainder.to_json(&r.registry),
        registry: registry_list(&r.registry)?,
        consistent: r.consistent,
        divergent_vanishes: r.divergent_vanishes(),
        degenerate_terms: r.degenerate_terms,
        counts: r.counts_by_composition(),
    };
    emit(out, dest, &serde_json::to_string_pretty(&rep)?)?;
    if dest.is_some() {
        writeln!(out, "target {}", r.target.to_text())?;
        for (k, n) in &rep.counts {
            writeln!(out, "  {k}: {n}")?;
        }
        writeln!(out, "consistent: {}", r.consistent)?;
    }
    Ok(if r.consistent { EXIT_OK } else { EXIT_NONZERO })
}

fn cmd_eval(file: &Path, at: &[String], prec: u32, target: f64, out: Out) -> Result<i32, Failure> {
    let id = read_identity(file)?;
    let point = at
        .iter()
        .map(|s| parse_rational(s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if !(target > 0.0) {
        return Err(Failure::usage("--target must be positive"));
    }
    let p = SeriesParams::with_target(target, prec);
    let r = check_numeric(&id.expr, &point, &p)?;
    let digits = (-target.log10()).ceil().max(1.0) as usize + 2;
    writeln!(out, "{} +- {:.3e}", r.value.to_decimal(digits), r.error)?;
    Ok(if r.pass { EXIT_OK } else { EXIT_NONZERO })
}

fn cmd_catalog(action: CatalogCmd, out: Out) -> Result<i32, Failure> {
    match action {
        CatalogCmd::List => {
            for e in catalog() {
                let status = e
                    .identity
                    .as_ref()
                    .map(|i| format!("{:?}", i.status).to_lowercase())
                    .unwrap_or_else(|| "metadata".into());
                writeln!(out, "{:<10} w{} {:<11} {}", e.name, e.weight, status, e.description)?;
            }
            Ok(EXIT_OK)
        }
        CatalogCmd::Show { name } => {
            let e = catalog_entry(&name).ok_or_else(|| Failure::usage(format!("no catalog entry {name:?}")))?;
            match &e.identity {
                Some(id) => writeln!(out, "{}", id.to_json_string())?,
                None => {
                    let v = serde_json::json!({
                        "name": e.name,
                        "weight": e.weight,
                        "description": e.description,
                        "polygon": e.polygon,
                        "orbits": e.orbits,
                        "functions": e.functions,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}
