//! Specializing identities: divergent parts and depth reduction.

use polygonal_mpl::arith::{int, parse_ratfunc};
use polygonal_mpl::lab::specialize::{depth_reduce, specialize, PlanStep, Substitution};
use polygonal_mpl::lab::{Identity, Status};
use polygonal_mpl::mpl::{depth_normalize, func, Expression, FunctionTerm, Kind};

fn main() {
    let mut e = Expression::new(1);
    e.push(FunctionTerm::new(int(1), func(Kind::Li, &[1], vec![parse_ratfunc("x1", 1).unwrap()])));
    let sp = specialize(&e, &Substitution::parse(&["x1=1"]).unwrap()).unwrap();
    println!("Li1(x1) at x1=1: regular {}, divergent {}", sp.regular.to_text(&sp.registry), sp.divergent.to_text(&sp.registry));

    let r = depth_normalize(&"(2,2)".parse().unwrap()).unwrap();
    let anchor = Identity::new("norm22", r.identity(), Status::Verified);
    let d = depth_reduce(&anchor, &PlanStep::parse_plan("collapse:x2=x1").unwrap()).unwrap();
    println!("isolated {}", d.target.to_text());
    for (k, n) in d.counts_by_composition() {
        println!("    {k}: {n}");
    }
    println!("consistent {}, divergent part vanishes {}", d.consistent, d.divergent_vanishes());
}
