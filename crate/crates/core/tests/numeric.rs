mod common;

use num_rational::BigRational;
use polygonal_mpl::arith::{int, parse_ratfunc};
use polygonal_mpl::mpl::{func, stuffle_product, Composition, Expression, FunctionTerm, Kind};
use polygonal_mpl::numeric::{check_numeric, li_eval, tail_bound, APComplex, NumericError, SeriesParams};
use proptest::prelude::*;

fn eval(parts: &[u32], z: &[BigRational]) -> APComplex {
    let c = Composition::new(parts.to_vec()).unwrap();
    let a: Vec<APComplex> = z.iter().map(|x| APComplex::from_rat(x, 256)).collect();
    li_eval(&c, &a, &SeriesParams::default()).unwrap().value
}

#[test]
fn reference_constants() {
    let half = [common::q(1, 2)];
    // 45 digits, computed independently
    for (parts, want) in [
        (vec![1], "0.693147180559945309417232121458176568075500134"),
        (vec![2], "0.582240526465012505902656320159680108744198474"),
        (vec![3], "0.537213193608040200940623225594965826670402499"),
    ] {
        let digits = &want[2..];
        let exact = BigRational::new(digits.parse().unwrap(), num_bigint::BigInt::from(10u32).pow(digits.len() as u32));
        let diff = eval(&parts, &half).sub(&APComplex::from_rat(&exact, 256)).abs_f64();
        assert!(diff < 1e-30, "Li_{parts:?}(1/2): off by {diff:e}");
    }
}

#[test]
fn matches_exact_nested_sums() {
    let mut r = common::rng(7);
    for _ in 0..12 {
        let z1 = common::small_coord(&mut r) * common::q(2, 3);
        let z2 = common::small_coord(&mut r) * common::q(2, 3);
        // |z| < 1/3: 80 terms leave a tail far below 1e-30
        for parts in [vec![1u32], vec![3], vec![1, 1], vec![2, 1], vec![1, 3]] {
            let z = if parts.len() == 1 { vec![z1.clone()] } else { vec![z1.clone(), z2.clone()] };
            let exact = common::nested_sum(&parts, &z, 80);
            let got = eval(&parts, &z);
            let diff = got.sub(&APComplex::from_rat(&exact, 256)).abs_f64();
            assert!(diff < 1e-30, "Li_{parts:?}({z:?}): off by {diff:e}");
        }
    }
}

#[test]
fn outside_domain_is_rejected() {
    let c = Composition::new(vec![2, 1]).unwrap();
    let a = vec![APComplex::from_rat(&common::q(1, 2), 128), APComplex::from_rat(&common::q(-99, 100), 128)];
    assert!(matches!(
        li_eval(&c, &a, &SeriesParams::default()),
        Err(NumericError::OutsideDomain { slot: 2, .. })
    ));
}

fn li(parts: &[u32], args: &[&str], n: usize) -> FunctionTerm {
    let a = args.iter().map(|s| parse_ratfunc(s, n).unwrap()).collect();
    FunctionTerm::new(int(1), func(Kind::Li, parts, a))
}

#[test]
fn stuffle_expansions_at_twenty_points() {
    let n = 3;
    let cases = [
        (li(&[1], &["x1"], n), li(&[2], &["x2"], n)),
        (li(&[1, 1], &["x1", "x3"], n), li(&[2], &["x2"], n)),
        (li(&[2], &["x1*x2"], n), li(&[1], &["-x3"], n)),
    ];
    let mut r = common::rng(11);
    let p = SeriesParams::with_target(1e-30, 256);
    for (a, b) in &cases {
        let mut e = stuffle_product(a, b).unwrap();
        e.extend(
            &{
                let mut x = Expression::new(n);
                x.push(FunctionTerm::product(int(-1), vec![a.func.clone(), b.func.clone()]));
                x
            },
            &int(1),
        );
        for _ in 0..20 {
            let pt: Vec<BigRational> = (0..n).map(|_| common::small_coord(&mut r)).collect();
            let res = check_numeric(&e, &pt, &p).unwrap();
            assert!(res.pass, "residual {:e}", res.residual());
        }
    }
}

proptest! {
    #[test]
    fn doubling_truncation_never_loosens(d in 1usize..4, nd in 1u32..4, rho in 0.05f64..0.95, k in 1usize..400) {
        prop_assert!(tail_bound(2 * k, d, nd, rho) <= tail_bound(k, d, nd, rho));
    }
}
