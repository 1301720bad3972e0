//! Certified series evaluation and a numeric stuffle check.

use polygonal_mpl::arith::{int, parse_ratfunc, rat};
use polygonal_mpl::mpl::{func, stuffle_product, Composition, Expression, FunctionTerm, Kind};
use polygonal_mpl::numeric::{check_numeric, li_eval, APComplex, SeriesParams};

fn main() {
    let p = SeriesParams::with_target(1e-40, 256);
    let z = [APComplex::from_rat(&rat(1, 2), 256)];
    for n in 1..=4 {
        let v = li_eval(&Composition::new(vec![n]).unwrap(), &z, &p).unwrap();
        println!("Li_{n}(1/2) = {} +- {:.1e} ({} terms)", v.value.to_decimal(40), v.error, v.truncation);
    }

    let x = |s: &str| parse_ratfunc(s, 2).unwrap();
    let a = FunctionTerm::new(int(1), func(Kind::Li, &[2], vec![x("x1")]));
    let b = FunctionTerm::new(int(1), func(Kind::Li, &[1, 1], vec![x("x2"), x("x1")]));
    let mut e = stuffle_product(&a, &b).unwrap();
    let mut prod = Expression::new(2);
    prod.push(FunctionTerm::product(int(-1), vec![a.func.clone(), b.func.clone()]));
    e.extend(&prod, &int(1));
    let r = check_numeric(&e, &[rat(1, 3), rat(-2, 5)], &SeriesParams::default()).unwrap();
    println!("stuffle residual {:.2e} (bound {:.1e}): {}", r.residual(), r.error, if r.pass { "pass" } else { "fail" });
}
