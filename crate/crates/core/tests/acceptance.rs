//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use polygonal_mpl::arith::{int, parse_ratfunc, LetterRegistry, RatFunc};
use polygonal_mpl::cli;
use polygonal_mpl::lab::catalog::{five_term, q5_first_template};
use polygonal_mpl::lab::dims::dims_big;
use polygonal_mpl::lab::specialize::{specialize, Substitution};
use polygonal_mpl::lab::{catalog_entry, search, symbol_and_residue, verify, SearchLimits, SearchProblem};
use polygonal_mpl::mpl::{
    func, shuffle_words, stuffle_product, symbol_of_word, Expression, FunctionTerm, IntegralWord, Kind,
};
use polygonal_mpl::numeric::{check_numeric, SeriesParams};
use polygonal_mpl::polygon::{cyclic_ratio, enumerate_quadrangulations, instantiate};
use polygonal_mpl::tensor::{mod_products_reduce, rho_project, shuffle, SymbolTensor};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---- Brown dimension ----

fn dims_criterion() -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(["polympl", "dims", "--weight", "7", "--points", "8"], &mut out, &mut err);
    let text = String::from_utf8(out).unwrap();
    if code != 0 || text != "53820\n" {
        return Err(format!("cli printed {text:?} with exit {code}"));
    }
    // integrality, from the raw Möbius sum
    let mu = |n: u32| -> i64 {
        let f: Vec<u32> = (2..=n).filter(|p| n % p == 0 && (2..*p).all(|q| p % q != 0)).collect();
        if f.iter().any(|p| n % (p * p) == 0) {
            0
        } else if f.len() % 2 == 0 {
            1
        } else {
            -1
        }
    };
    let mut cases = 0;
    for k in 1..=8u32 {
        for n in 4..=10u32 {
            let mut total = BigInt::zero();
            for d in (1..=k).filter(|d| k % d == 0) {
                let s: BigInt = (2..=n - 2).map(|i| BigInt::from(i).pow(d)).sum();
                total += s * mu(k / d);
            }
            let (q, r) = total.div_rem(&BigInt::from(k));
            if !r.is_zero() || q != dims_big(k, n) {
                return Err(format!("k={k}, n={n} not integral or mismatched"));
            }
            cases += 1;
        }
    }
    Ok(format!("53820 printed; {cases} (k, n) pairs integral"))
}

// ---- quadrangulations ----

fn quadrangulation_criterion() -> Outcome {
    let mut counts = Vec::new();
    for (n, want) in [(6usize, 3usize), (8, 12), (10, 55), (12, 273)] {
        let mine = enumerate_quadrangulations(n).map_err(|e| e.to_string())?;
        let brute = common::brute_dissections(n, &vec![4; (n - 2) / 2]);
        let set: std::collections::BTreeSet<_> = mine.iter().map(|d| d.diagonals.clone()).collect();
        if mine.len() != want || brute.len() != want || set != brute {
            return Err(format!("{n}-gon: {} enumerated, {} by brute force, want {want}", mine.len(), brute.len()));
        }
        counts.push(mine.len());
    }
    check(
        counts[3] as u64 == common::binomial(15, 5) / 11,
        format!("counts {counts:?} equal brute force and (1/11)C(15,5)"),
    )
}

// ---- Q5 leading orbit ----

fn cross(ix: [usize; 4]) -> RatFunc {
    let [a, b, c, d] = ix;
    let s = format!("(x{a} - x{b})*(x{c} - x{d})/((x{b} - x{c})*(x{d} - x{a}))");
    parse_ratfunc(&s, 8).unwrap()
}

fn canon(e: &Expression) -> Vec<String> {
    let mut v: Vec<String> = e.merged().to_text().lines().map(String::from).collect();
    v.sort();
    v
}

fn q5_criterion() -> Outcome {
    let got = instantiate(&q5_first_template()).map_err(|e| e.to_string())?;
    let x = |j: usize, k: usize| (j + k - 1) % 8 + 1;
    let mut want = Expression::new(8);
    for j in 1..=8 {
        let args = vec![
            cross([x(j, 1), x(j, 2), x(j, 3), x(j, 4)]),
            cross([x(j, 1), x(j, 4), x(j, 5), x(j, 6)]),
            cross([x(j, 1), x(j, 6), x(j, 7), x(j, 8)]),
        ];
        want.push(FunctionTerm::new(int(-4), func(Kind::IN, &[3, 1, 1], args)));
    }
    let (a, b) = (canon(&got), canon(&want));
    check(
        a == b && a.len() == 8,
        format!("{} terms, coefficient -4, IN_(3,1,1), arguments match term for term", a.len()),
    )
}

// ---- five-term relation ----

fn five_term_criterion() -> Outcome {
    let fixture = catalog_entry("fiveterm").and_then(|e| e.identity).ok_or("no fixture")?;
    if !verify(&fixture.expr).map_err(|e| e.to_string())?.is_verified() {
        return Err("catalog fixture does not verify".into());
    }
    // every cross-ratio of 5 points, one generator per {x, 1/x}
    let mut values: BTreeMap<String, RatFunc> = BTreeMap::new();
    let pts: Vec<usize> = (1..=5).collect();
    for a in &pts {
        for b in &pts {
            for c in &pts {
                for d in &pts {
                    let ix = [*a, *b, *c, *d];
                    let mut s = ix.to_vec();
                    s.sort_unstable();
                    s.dedup();
                    if s.len() == 4 {
                        let f = cyclic_ratio(&ix, 5).unwrap();
                        values.insert(f.to_string(), f);
                    }
                }
            }
        }
    }
    let mut reps: Vec<RatFunc> = Vec::new();
    for f in values.values() {
        let inv = f.inv().unwrap();
        if !reps.iter().any(|r| *r == inv) {
            reps.push(f.clone());
        }
    }
    if values.len() != 30 || reps.len() != 15 {
        return Err(format!("{} cross-ratio values, {} pairs", values.len(), reps.len()));
    }
    let mut p = SearchProblem::new(5);
    for (i, r) in reps.iter().enumerate() {
        let mut e = Expression::new(5);
        e.push(FunctionTerm::new(int(1), func(Kind::Li, &[2], vec![r.clone()])));
        p.push(format!("g{i:02}"), e);
    }
    let out = search(&p, &SearchLimits::default()).map_err(|e| e.to_string())?;
    // fixture as a vector over the generators; Li2(1/x) = -Li2(x) mod products
    let mut w = vec![BigRational::zero(); reps.len()];
    for t in &five_term().terms {
        let arg = &t.func.args[0];
        let (i, s) = reps
            .iter()
            .enumerate()
            .find_map(|(i, r)| {
                if r == arg {
                    Some((i, 1))
                } else if r.inv().ok().as_ref() == Some(arg) {
                    Some((i, -1))
                } else {
                    None
                }
            })
            .ok_or("fixture argument is not a cross-ratio")?;
        let idx = out.names.iter().position(|n| *n == format!("g{i:02}")).unwrap();
        w[idx] += &t.coeff * BigRational::from_integer(s.into());
    }
    let r0 = common::rank_q(&out.vectors);
    let mut with = out.vectors.clone();
    with.push(w);
    let r1 = common::rank_q(&with);
    check(
        !out.vectors.is_empty() && r0 == out.vectors.len() && r1 == r0,
        format!("30 values / 15 generators; kernel dimension {}; fixture lies in the kernel", out.vectors.len()),
    )
}

// ---- mod products ----

fn tensor_of(words: &BTreeMap<Vec<usize>, i64>, c: i64) -> SymbolTensor {
    SymbolTensor::from_terms(words.iter().map(|(w, k)| (w.clone(), BigRational::from_integer((k * c).into())))).unwrap()
}

fn mod_products_criterion() -> Outcome {
    let mut r = common::rng(2024);
    for i in 0..200 {
        let total = r.gen_range(2..=5);
        let lu = r.gen_range(1..total);
        let u: Vec<usize> = (0..lu).map(|_| r.gen_range(0..6)).collect();
        let v: Vec<usize> = (0..total - lu).map(|_| r.gen_range(0..6)).collect();
        let c = [-3i64, -1, 1, 2, 5][r.gen_range(0..5)];
        let t = tensor_of(&common::shuffle(&u, &v), c);
        if !rho_project(&t).is_zero() || !mod_products_reduce(&t).is_zero() {
            return Err(format!("shuffle #{i} {u:?} x {v:?} survives"));
        }
    }
    let mut oracle: BTreeMap<usize, bool> = BTreeMap::new();
    for i in 0..200 {
        let m = r.gen_range(1..=5);
        let mut letters: Vec<usize> = (0..6).collect();
        letters.shuffle(&mut r);
        letters.truncate(m);
        let t = SymbolTensor::pure(letters.clone(), BigRational::from_integer(r.gen_range(1..5).into()));
        let independent = *oracle.entry(m).or_insert_with(|| common::distinct_word_is_not_a_product(m));
        if mod_products_reduce(&t).is_zero() || !independent {
            return Err(format!("pure tensor #{i} {letters:?} reduced to zero"));
        }
    }
    Ok("200 shuffles vanish under both projections; 200 distinct-letter words survive (rank oracle agrees)".into())
}

// ---- symbol of shuffles ----

fn homomorphism_criterion() -> Outcome {
    let pool = ["x1", "x2", "1 - x1", "x1*x2", "x1 - x2", "0", "1", "1/x2"];
    let rf = |s: &str| parse_ratfunc(s, 2).unwrap();
    let mut r = common::rng(99);
    let word = |len: usize, r: &mut rand_chacha::ChaCha8Rng| -> IntegralWord {
        loop {
            let l: Vec<&str> = (0..len).map(|_| pool[r.gen_range(0..pool.len())]).collect();
            if l[0] != "0" && l[len - 1] != "1" {
                return IntegralWord {
                    a0: rf("0"),
                    letters: l.iter().map(|s| rf(s)).collect(),
                    a_end: rf("1"),
                };
            }
        }
    };
    for i in 0..50 {
        let total = r.gen_range(2..=5);
        let lu = r.gen_range(1..total);
        let u = word(lu, &mut r);
        let v = word(total - lu, &mut r);
        let mut reg = LetterRegistry::new(2);
        let mut lhs = SymbolTensor::zero(total);
        for (c, w) in shuffle_words(&u, &v).map_err(|e| e.to_string())? {
            lhs.add_scaled(&symbol_of_word(&w, &mut reg).map_err(|e| e.to_string())?, &c);
        }
        let su = symbol_of_word(&u, &mut reg).map_err(|e| e.to_string())?;
        let sv = symbol_of_word(&v, &mut reg).map_err(|e| e.to_string())?;
        let (lhs, su, sv) = (lhs.resolve(&reg), su.resolve(&reg), sv.resolve(&reg));
        let rhs = shuffle(&su, &sv);
        // the same product through the reference word shuffle
        let mut oracle = SymbolTensor::zero(total);
        for (a, ca) in su.terms() {
            for (b, cb) in sv.terms() {
                for (w, k) in common::shuffle(a, b) {
                    oracle.add_term(w, ca * cb * BigRational::from_integer(k.into()));
                }
            }
        }
        if lhs != rhs || rhs != oracle {
            return Err(format!("pair #{i} of weights {lu}+{}", total - lu));
        }
    }
    Ok("50 random word pairs: symbol of shuffle equals shuffle of symbols exactly".into())
}

// ---- stuffle ----

fn stuffle_criterion() -> Outcome {
    let comps: [&[u32]; 7] = [&[1], &[2], &[3], &[1, 1], &[2, 1], &[1, 2], &[1, 1, 1]];
    let pool = ["x1", "x2", "x3", "-x1", "x2*x3", "x1/2"];
    let n = 3;
    let mut r = common::rng(5);
    let p = SeriesParams::with_target(1e-30, 256);
    let mut made = 0;
    let mut worst = 0f64;
    while made < 20 {
        let a = comps[r.gen_range(0..comps.len())];
        let b = comps[r.gen_range(0..comps.len())];
        let w: u32 = a.iter().chain(b.iter()).sum();
        if w > 4 {
            continue;
        }
        let mk = |c: &[u32], r: &mut rand_chacha::ChaCha8Rng| {
            let args = c.iter().map(|_| parse_ratfunc(pool[r.gen_range(0..pool.len())], n).unwrap()).collect();
            FunctionTerm::new(int(1), func(Kind::Li, c, args))
        };
        let (fa, fb) = (mk(a, &mut r), mk(b, &mut r));
        let mut e = stuffle_product(&fa, &fb).map_err(|e| e.to_string())?;
        let mut prod = Expression::new(n);
        prod.push(FunctionTerm::product(int(-1), vec![fa.func.clone(), fb.func.clone()]));
        e.extend(&prod, &int(1));
        let (_, sym, res) = symbol_and_residue(&e).map_err(|e| e.to_string())?;
        if !sym.is_zero() || !res.is_zero() {
            return Err(format!("{} * {} fails at symbol level", fa.to_text(), fb.to_text()));
        }
        for _ in 0..5 {
            let pt: Vec<BigRational> = (0..n).map(|_| common::small_coord(&mut r)).collect();
            let c = check_numeric(&e, &pt, &p).map_err(|e| e.to_string())?;
            worst = worst.max(c.residual());
            if !c.pass {
                return Err(format!("{} * {}: residual {:e}", fa.to_text(), fb.to_text(), c.residual()));
            }
        }
        made += 1;
    }
    Ok(format!("20 identities, symbol exact and 100 numeric checks at 256 bits (max residual {worst:.1e} <= 1e-29)"))
}

// ---- degeneration ----

fn degeneration_criterion() -> Outcome {
    let one = |parts: &[u32], arg: &str| {
        let mut e = Expression::new(1);
        e.push(FunctionTerm::new(int(1), func(Kind::Li, parts, vec![parse_ratfunc(arg, 1).unwrap()])));
        e
    };
    let s = Substitution::parse(&["x1=1"]).map_err(|e| e.to_string())?;
    let li2 = specialize(&one(&[2], "x1"), &s).map_err(|e| e.to_string())?;
    if !li2.divergent.is_zero() || !li2.regular.is_zero() {
        return Err("Li2 at 1 leaves a nonzero part".into());
    }
    let li1 = specialize(&one(&[1], "x1"), &s).map_err(|e| e.to_string())?;
    if li1.eps.len() != 1 || li1.divergent != SymbolTensor::letter(li1.eps[0].0).scale(&-BigRational::one()) {
        return Err(format!("Li1 at 1: divergent part {:?}", li1.divergent));
    }
    let mut refl = one(&[2], "x1");
    refl.extend(&one(&[2], "1 - x1"), &int(1));
    let log = |a: &str| func(Kind::Li, &[1], vec![parse_ratfunc(a, 1).unwrap()]);
    refl.push(FunctionTerm::product(int(1), vec![log("x1"), log("1 - x1")]));
    if !verify(&refl).map_err(|e| e.to_string())?.is_verified() {
        return Err("reflection identity does not verify".into());
    }
    let sp = specialize(&refl, &s).map_err(|e| e.to_string())?;
    check(
        sp.regular_mod_products().is_zero() && sp.divergent_mod_products().is_zero(),
        "Li2 -> 0 divergence; Li1 -> -eps; reflection at x=1 leaves zero residue".into(),
    )
}

fn main() {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("brown-dimension", Duration::from_secs(1), dims_criterion),
        ("quadrangulation-counts", Duration::from_secs(10), quadrangulation_criterion),
        ("q5-first-term", Duration::from_secs(1), q5_criterion),
        ("five-term-relation", Duration::from_secs(60), five_term_criterion),
        ("mod-products-engine", Duration::from_secs(300), mod_products_criterion),
        ("symbol-shuffle-homomorphism", Duration::from_secs(300), homomorphism_criterion),
        ("stuffle-cross-validation", Duration::from_secs(600), stuffle_criterion),
        ("degeneration-engine", Duration::from_secs(10), degeneration_criterion),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let t = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        let (ok, detail) = match res {
            Ok(d) if dt <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {name}: {detail} ({:.2}s)", if ok { "PASS" } else { "FAIL" }, dt.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
