//! `(1/k) Σ_{d|k} μ(k/d) Σ_{i=2}^{n−2} i^d`: the number of Lyndon words of
//! length k over alphabets of sizes 2..n−2, summed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

fn mobius(mut n: u64) -> i64 {
    let mut m = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            m = -m;
        }
        p += 1;
    }
    if n > 1 {
        m = -m;
    }
    m
}

/// Exact value; panics only if the division is inexact, which would be a bug.
pub fn dims_big(k: u32, n: u32) -> BigInt {
    assert!(k >= 1 && n >= 4, "dims needs k >= 1 and n >= 4");
    let mut total = BigInt::zero();
    for d in (1..=k).filter(|d| k % d == 0) {
        let mu = mobius((k / d) as u64);
        if mu == 0 {
            continue;
        }
        let s: BigInt = (2..=n - 2).map(|i| BigInt::from(i).pow(d)).sum();
        total += s * mu;
    }
    let (q, r) = total.div_rem(&BigInt::from(k));
    assert!(r.is_zero(), "non-integral dimension for k={k}, n={n}");
    q
}

pub fn dims(k: u32, n: u32) -> u64 {
    dims_big(k, n).to_u64().expect("dimension fits in u64")
}
