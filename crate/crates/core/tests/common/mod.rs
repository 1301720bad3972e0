//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

// ---- dissections by geometry ----

/// Vertex `i` of a convex polygon: points on the parabola y = x².
fn point(i: usize) -> (i64, i64) {
    (i as i64, (i * i) as i64)
}

fn orient(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Proper crossing of two chords; sharing an endpoint is not a crossing.
pub fn segments_cross(p: (usize, usize), r: (usize, usize)) -> bool {
    if p.0 == r.0 || p.0 == r.1 || p.1 == r.0 || p.1 == r.1 {
        return false;
    }
    let (a, b, c, d) = (point(p.0), point(p.1), point(r.0), point(r.1));
    orient(a, b, c).signum() * orient(a, b, d).signum() < 0 && orient(c, d, a).signum() * orient(c, d, b).signum() < 0
}

/// Bounded faces of the polygon on vertices 0..n plus `diags`, as sizes.
pub fn face_sizes(n: usize, diags: &[(usize, usize)]) -> Vec<usize> {
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut add = |a: usize, b: usize| {
        nbrs[a].push(b);
        nbrs[b].push(a);
    };
    for i in 0..n {
        add(i, (i + 1) % n);
    }
    for &(a, b) in diags {
        add(a, b);
    }
    for (v, ns) in nbrs.iter_mut().enumerate() {
        let c = point(v);
        ns.sort_by(|&x, &y| {
            let (px, py) = (point(x), point(y));
            let ax = ((px.1 - c.1) as f64).atan2((px.0 - c.0) as f64);
            let ay = ((py.1 - c.1) as f64).atan2((py.0 - c.0) as f64);
            ax.partial_cmp(&ay).unwrap()
        });
    }
    let mut used = BTreeSet::new();
    let mut faces: Vec<(i64, usize)> = Vec::new();
    for u in 0..n {
        for &v in &nbrs[u] {
            if used.contains(&(u, v)) {
                continue;
            }
            let (mut a, mut b) = (u, v);
            let mut area2 = 0i64;
            let mut len = 0;
            while used.insert((a, b)) {
                let (pa, pb) = (point(a), point(b));
                area2 += pa.0 * pb.1 - pb.0 * pa.1;
                len += 1;
                // next edge: neighbour of b just before a in angular order
                let ns = &nbrs[b];
                let i = ns.iter().position(|&x| x == a).unwrap();
                let w = ns[(i + ns.len() - 1) % ns.len()];
                a = b;
                b = w;
            }
            faces.push((area2, len));
        }
    }
    let pos = faces.iter().filter(|f| f.0 > 0).count();
    let neg = faces.len() - pos;
    // the unbounded face is the one whose orientation is alone
    let outer_positive = pos == 1 && neg != 1;
    let mut dropped = false;
    let mut out = Vec::new();
    for (a, l) in faces {
        if !dropped && ((a > 0) == outer_positive) {
            dropped = true;
            continue;
        }
        out.push(l);
    }
    out.sort_unstable();
    out
}

/// Every set of non-crossing diagonals of the n-gon whose bounded faces have
/// exactly the sizes in `cells`. Vertices are reported 1-based.
pub fn brute_dissections(n: usize, cells: &[usize]) -> BTreeSet<BTreeSet<(usize, usize)>> {
    let mut want = cells.to_vec();
    want.sort_unstable();
    let k = want.len() - 1;
    let mut diags = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if !(i == 0 && j == n - 1) {
                diags.push((i, j));
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut chosen = Vec::new();
    fn rec(
        start: usize,
        k: usize,
        n: usize,
        diags: &[(usize, usize)],
        chosen: &mut Vec<(usize, usize)>,
        want: &[usize],
        out: &mut BTreeSet<BTreeSet<(usize, usize)>>,
    ) {
        if chosen.len() == k {
            if face_sizes(n, chosen) == want {
                out.insert(chosen.iter().map(|&(a, b)| (a + 1, b + 1)).collect());
            }
            return;
        }
        for i in start..diags.len() {
            let d = diags[i];
            if chosen.iter().all(|&c| !segments_cross(c, d)) {
                chosen.push(d);
                rec(i + 1, k, n, diags, chosen, want, out);
                chosen.pop();
            }
        }
    }
    rec(0, k, n, &diags, &mut chosen, &want, &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

// ---- linear algebra ----

/// Rank over Q by plain Gaussian elimination.
pub fn rank_q(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &pivot;
                for c in col..ncols {
                    let v = &m[rank][c] * &f;
                    m[r][c] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub const PRIME: u64 = 2_147_483_647;

/// Rank modulo a prime; a lower bound for the rank over Q.
pub fn rank_mod_p(rows: &[Vec<i64>]) -> usize {
    let p = PRIME as i128;
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| (x as i128).rem_euclid(p)).collect())
        .collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let inv = |a: i128| {
        let (mut r, mut e, mut b) = (1i128, p - 2, a);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let iv = inv(m[rank][col]);
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col] * iv % p;
                for c in col..ncols {
                    m[r][c] = (m[r][c] - f * m[rank][c]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---- words ----

/// Shuffle product of two words, with multiplicities.
pub fn shuffle(u: &[usize], v: &[usize]) -> BTreeMap<Vec<usize>, i64> {
    let mut out = BTreeMap::new();
    if u.is_empty() || v.is_empty() {
        out.insert([u, v].concat(), 1);
        return out;
    }
    for (w, c) in shuffle(&u[..u.len() - 1], v) {
        let mut w = w;
        w.push(u[u.len() - 1]);
        *out.entry(w).or_insert(0) += c;
    }
    for (w, c) in shuffle(u, &v[..v.len() - 1]) {
        let mut w = w;
        w.push(v[v.len() - 1]);
        *out.entry(w).or_insert(0) += c;
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Whether the word 0,1,…,m−1 (distinct letters) lies outside the span of
/// all proper shuffle products of words in those letters. The span has
/// dimension m! − (m−1)! over Q; a modular rank that reaches this dimension
/// and goes up by one when the word is added settles it.
pub fn distinct_word_is_not_a_product(m: usize) -> bool {
    let letters: Vec<usize> = (0..m).collect();
    let words = permutations(&letters);
    let index: BTreeMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut rows = Vec::new();
    for mask in 1..(1u32 << m) - 1 {
        let left: Vec<usize> = letters.iter().copied().filter(|&l| mask & (1 << l) != 0).collect();
        let right: Vec<usize> = letters.iter().copied().filter(|&l| mask & (1 << l) == 0).collect();
        if !left.contains(&0) {
            continue; // u ш v = v ш u
        }
        for u in permutations(&left) {
            for v in permutations(&right) {
                let mut row = vec![0i64; words.len()];
                for (w, c) in shuffle(&u, &v) {
                    row[index[&w]] += c;
                }
                rows.push(row);
            }
        }
    }
    let fact = |k: usize| (1..=k).product::<usize>();
    let expected = fact(m) - fact(m - 1);
    let r = rank_mod_p(&rows);
    let mut ident = vec![0i64; words.len()];
    ident[index[&letters]] = 1;
    rows.push(ident);
    r == expected && rank_mod_p(&rows) == expected + 1
}

// ---- series ----

/// Direct nested sum Σ_{0<k1<k2≤K} z1^k1 z2^k2 / (k1^n1 k2^n2) (or depth one),
/// exact over Q.
pub fn nested_sum(parts: &[u32], z: &[BigRational], k: usize) -> BigRational {
    let pow = |x: &BigRational, e: usize| -> BigRational {
        let mut r = BigRational::one();
        for _ in 0..e {
            r *= x;
        }
        r
    };
    let kpow = |i: usize, n: u32| BigRational::from_integer(BigInt::from(i).pow(n));
    match parts.len() {
        1 => (1..=k).map(|i| pow(&z[0], i) / kpow(i, parts[0])).sum(),
        2 => {
            let mut total = BigRational::zero();
            let mut inner = BigRational::zero(); // Σ_{k1<k2} z1^k1/k1^n1
            let mut p1 = BigRational::one();
            let mut p2 = BigRational::one();
            for i in 1..=k {
                p2 *= &z[1];
                total += &inner * &p2 / kpow(i, parts[1]);
                p1 *= &z[0];
                inner += &p1 / kpow(i, parts[0]);
            }
            total
        }
        _ => panic!("oracle handles depth one and two"),
    }
}

/// Random nonzero rational with |x| < 1/2 and a small denominator.
pub fn small_coord(r: &mut ChaCha8Rng) -> BigRational {
    loop {
        let d: i64 = r.gen_range(3..=12);
        let n: i64 = r.gen_range(-(d - 1) / 2..=(d - 1) / 2);
        if n != 0 {
            return q(n, d);
        }
    }
}
