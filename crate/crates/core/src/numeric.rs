//! Truncated nested-series evaluation of `Li` at arbitrary precision, with a
//! certified bound on the neglected tail, and numeric identity checks.
//!
//! With `w_j = z_j⋯z_d` the summand of `Li_n(z)` is
//! `w_1^{k1} w_2^{k2−k1} ⋯ w_d^{kd−k(d−1)} / (k1^{n1}⋯kd^{nd})`, so every
//! partial sum stays bounded when all `|w_j| < 1`. That is the supported
//! domain; nothing is analytically continued.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::BigRat;
use crate::mpl::{Composition, Expression, MplError, MplFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("argument outside the convergence domain: |z_{slot}⋯z_d| = {modulus:.6} exceeds 1 - margin")]
    OutsideDomain { slot: usize, modulus: f64 },
    #[error("term {term}: {source}")]
    TermOutsideDomain { term: usize, source: Box<NumericError> },
    #[error("target error {target:e} unreachable (best certified bound {bound:e})")]
    PrecisionUnreachable { target: f64, bound: f64 },
    #[error("argument count {args} does not match depth {depth}")]
    Arity { args: usize, depth: usize },
    #[error("evaluation point has {got} coordinates, need {need}")]
    Point { got: usize, need: usize },
    #[error("pole of an argument at the evaluation point (term {term})")]
    Pole { term: usize },
    #[error(transparent)]
    Mpl(#[from] MplError),
}

/// Complex number in binary fixed point: value = (re + i·im) / 2^bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APComplex {
    pub re: BigInt,
    pub im: BigInt,
    pub bits: u32,
}

fn shr_round(x: BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x;
    }
    let half = BigInt::one() << (s - 1);
    (x + half) >> s
}

fn fixed_to_f64(x: &BigInt, bits: u32) -> f64 {
    let a = x.abs();
    let n = a.bits();
    let shift = n.saturating_sub(64);
    let m = (a >> shift).to_f64().unwrap_or(f64::INFINITY);
    let v = m * 2f64.powi(shift as i32 - bits as i32);
    if x.is_negative() {
        -v
    } else {
        v
    }
}

impl APComplex {
    pub fn zero(bits: u32) -> Self {
        APComplex {
            re: BigInt::zero(),
            im: BigInt::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Self {
        APComplex {
            re: BigInt::one() << bits,
            im: BigInt::zero(),
            bits,
        }
    }

    pub fn from_rat(q: &BigRat, bits: u32) -> Self {
        Self::from_parts(q, &BigRat::zero(), bits)
    }

    pub fn from_parts(re: &BigRat, im: &BigRat, bits: u32) -> Self {
        let conv = |q: &BigRat| -> BigInt {
            let n: BigInt = q.numer() << bits;
            let (d, r) = n.div_rem(q.denom());
            // round half away from zero
            if (r.abs() << 1) >= *q.denom() {
                d + n.signum()
            } else {
                d
            }
        };
        APComplex {
            re: conv(re),
            im: conv(im),
            bits,
        }
    }

    pub fn add(&self, o: &APComplex) -> APComplex {
        debug_assert_eq!(self.bits, o.bits);
        APComplex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &APComplex) -> APComplex {
        APComplex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &APComplex) -> APComplex {
        let b = self.bits;
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        APComplex {
            re: shr_round(re, b),
            im: shr_round(im, b),
            bits: b,
        }
    }

    pub fn scale_rat(&self, q: &BigRat) -> APComplex {
        let d = q.denom();
        let n = q.numer();
        APComplex {
            re: (&self.re * n).div_floor(d),
            im: (&self.im * n).div_floor(d),
            bits: self.bits,
        }
    }

    pub fn div_int(&self, k: &BigInt) -> APComplex {
        APComplex {
            re: self.re.div_floor(k),
            im: self.im.div_floor(k),
            bits: self.bits,
        }
    }

    /// Same value at another precision.
    pub fn with_bits(&self, bits: u32) -> APComplex {
        let f = |x: &BigInt| {
            if bits >= self.bits {
                x << (bits - self.bits)
            } else {
                shr_round(x.clone(), self.bits - bits)
            }
        };
        APComplex {
            re: f(&self.re),
            im: f(&self.im),
            bits,
        }
    }

    pub fn re_f64(&self) -> f64 {
        fixed_to_f64(&self.re, self.bits)
    }

    pub fn im_f64(&self) -> f64 {
        fixed_to_f64(&self.im, self.bits)
    }

    pub fn abs_f64(&self) -> f64 {
        self.re_f64().hypot(self.im_f64())
    }

    fn part_decimal(x: &BigInt, bits: u32, digits: usize) -> String {
        let neg = x.is_negative();
        let a = x.abs();
        let scale = BigInt::from(10u32).pow(digits as u32);
        let v = shr_round(a * &scale, bits);
        let (ip, fp) = v.div_rem(&scale);
        let mut s = format!("{ip}.{:0>width$}", fp.to_string(), width = digits);
        if neg && !v.is_zero() {
            s.insert(0, '-');
        }
        s
    }

    /// Decimal rendering with `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let re = Self::part_decimal(&self.re, self.bits, digits);
        if self.im.is_zero() {
            return re;
        }
        let im = Self::part_decimal(&self.im, self.bits, digits);
        if im.starts_with('-') {
            format!("{re} - {}i", &im[1..])
        } else {
            format!("{re} + {im}i")
        }
    }
}

impl fmt::Display for APComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.bits as f64) * std::f64::consts::LOG10_2).floor() as usize;
        f.write_str(&self.to_decimal(digits.min(80)))
    }
}

#[derive(Clone, Debug)]
pub struct SeriesParams {
    /// Fixed truncation order; chosen automatically when `None`.
    pub truncation: Option<usize>,
    pub target_error: f64,
    /// Required gap δ between the partial products and the unit circle.
    pub margin: f64,
    /// Working precision in bits (at least 64).
    pub precision: u32,
    pub max_truncation: usize,
}

impl Default for SeriesParams {
    fn default() -> Self {
        SeriesParams {
            truncation: None,
            target_error: 1e-30,
            margin: 0.05,
            precision: 256,
            max_truncation: 200_000,
        }
    }
}

impl SeriesParams {
    pub fn with_target(target_error: f64, precision: u32) -> Self {
        SeriesParams {
            target_error,
            precision: precision.max(64),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: APComplex,
    /// Certified bound on |value − true value|.
    pub error: f64,
    pub truncation: usize,
}

/// ln of the tail bound `Σ_{k>K} C(k−1,d−1) ρ^k / k^{nd}`, or +∞ when the
/// ratio estimate does not apply yet.
fn ln_tail_bound(k: usize, d: usize, nd: u32, rho: f64) -> f64 {
    if rho == 0.0 {
        return f64::NEG_INFINITY;
    }
    if k + 2 <= d {
        return f64::INFINITY;
    }
    let q = rho * (k as f64 + 1.0) / ((k + 2 - d) as f64);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let mut ln_binom = 0.0;
    for i in 0..d.saturating_sub(1) {
        ln_binom += ((k - i) as f64 / (i + 1) as f64).ln();
    }
    ln_binom + (k as f64 + 1.0) * rho.ln() - (1.0 - q).ln() - nd as f64 * (k as f64 + 1.0).ln()
}

/// Certified tail bound for truncation `k`: the best bound over all
/// truncations up to `k`, since the true tail only shrinks.
pub fn tail_bound(k: usize, d: usize, nd: u32, rho: f64) -> f64 {
    let mut best = f64::INFINITY;
    for j in 0..=k {
        best = best.min(ln_tail_bound(j, d, nd, rho));
    }
    // 1% slack for floating-point evaluation of the bound itself
    best.exp() * 1.01
}

fn rounding_bound(k: usize, d: usize, bits: u32) -> f64 {
    let kf = k.max(1) as f64;
    (8.0 * kf * d as f64 + 8.0) * kf.powi(d as i32) * 2f64.powi(-(bits as i32))
}

/// Truncated series for `Li_comp(args)` (increasing summation indices).
pub fn li_eval(comp: &Composition, args: &[APComplex], p: &SeriesParams) -> Result<Evaluation, NumericError> {
    let d = comp.depth();
    if args.len() != d {
        return Err(NumericError::Arity { args: args.len(), depth: d });
    }
    let out_bits = p.precision.max(64);
    let bits = out_bits + 64;
    let args: Vec<APComplex> = args.iter().map(|a| a.with_bits(bits)).collect();
    // partial products from the right
    let mut w = vec![APComplex::one(bits); d];
    let mut acc = APComplex::one(bits);
    for j in (0..d).rev() {
        acc = acc.mul(&args[j]);
        w[j] = acc.clone();
    }
    let mut rho: f64 = 0.0;
    for (j, wj) in w.iter().enumerate() {
        let m = wj.abs_f64();
        if m > 1.0 - p.margin {
            return Err(NumericError::OutsideDomain { slot: j + 1, modulus: m });
        }
        rho = rho.max(m * (1.0 + 1e-12));
    }
    let nd = comp.parts()[d - 1];
    let floor = 2f64.powi(-(out_bits as i32));
    let total_bound = |k: usize| tail_bound(k, d, nd, rho) + rounding_bound(k, d, bits) + floor;
    let k = match p.truncation {
        Some(k) => {
            let b = total_bound(k);
            if b > p.target_error {
                return Err(NumericError::PrecisionUnreachable {
                    target: p.target_error,
                    bound: b,
                });
            }
            k
        }
        None => {
            let mut best = f64::INFINITY;
            let mut found = None;
            // Incremental search; the bound at k is min over j ≤ k.
            let mut ln_best = f64::INFINITY;
            for k in d..=p.max_truncation {
                ln_best = ln_best.min(ln_tail_bound(k, d, nd, rho));
                let b = ln_best.exp() * 1.01 + rounding_bound(k, d, bits) + floor;
                best = best.min(b);
                if b <= p.target_error {
                    found = Some(k);
                    break;
                }
            }
            found.ok_or(NumericError::PrecisionUnreachable {
                target: p.target_error,
                bound: best,
            })?
        }
    };
    let parts = comp.parts();
    let pow_k = |k: usize, n: u32| BigInt::from(k).pow(n);
    let mut power = APComplex::one(bits); // w_1^k
    let mut carry: Vec<APComplex> = vec![APComplex::zero(bits); d]; // C_j(k)
    let mut sum = APComplex::zero(bits);
    for kk in 1..=k {
        power = power.mul(&w[0]);
        let mut b_prev = power.div_int(&pow_k(kk, parts[0]));
        for j in 1..d {
            let b_j = carry[j].div_int(&pow_k(kk, parts[j]));
            carry[j] = w[j].mul(&carry[j].add(&b_prev));
            b_prev = b_j;
        }
        sum = sum.add(&b_prev);
    }
    Ok(Evaluation {
        value: sum.with_bits(out_bits),
        error: total_bound(k),
        truncation: k,
    })
}

/// Value of one `Li`-convertible function at a rational point.
pub fn eval_function(f: &MplFunction, point: &[BigRat], p: &SeriesParams) -> Result<Evaluation, NumericError> {
    let (s, g) = f.to_li()?;
    let args = g
        .args
        .iter()
        .map(|a| a.evaluate(point).map(|q| APComplex::from_rat(&q, p.precision + 64)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| NumericError::Pole { term: 0 })?;
    let mut ev = li_eval(&g.comp, &args, p)?;
    ev.value = ev.value.scale_rat(&s);
    ev.error *= s.abs().to_f64().unwrap_or(1.0);
    Ok(ev)
}

#[derive(Clone, Debug)]
pub struct NumericCheck {
    pub value: APComplex,
    /// Certified bound on the evaluation error of `value`.
    pub error: f64,
    pub pass: bool,
}

impl NumericCheck {
    pub fn residual(&self) -> f64 {
        self.value.abs_f64()
    }
}

/// Evaluates `e` at `point` and compares the result with zero at ten times
/// the target error. Per-factor targets are tightened until the propagated
/// error bound is below the target.
pub fn eval_expression(e: &Expression, point: &[BigRat], p: &SeriesParams) -> Result<NumericCheck, NumericError> {
    if point.len() != e.nvars {
        return Err(NumericError::Point {
            got: point.len(),
            need: e.nvars,
        });
    }
    let bits = p.precision.max(64);
    let nfactors: usize = e.terms.iter().map(|t| 1 + t.times.len()).sum();
    let mut local = p.clone();
    local.target_error = p.target_error / (4.0 * nfactors.max(1) as f64);
    for _ in 0..6 {
        let mut total = APComplex::zero(bits);
        let mut err = 0.0f64;
        for (i, t) in e.terms.iter().enumerate() {
            let mut val = APComplex::one(bits);
            let mut verr = 0.0f64;
            for f in t.factors() {
                let ev = eval_function(f, point, &local).map_err(|err| match err {
                    NumericError::Pole { .. } => NumericError::Pole { term: i },
                    other => NumericError::TermOutsideDomain {
                        term: i,
                        source: Box::new(other),
                    },
                })?;
                let (a, b) = (val.abs_f64(), ev.value.abs_f64());
                verr = a * ev.error + b * verr + verr * ev.error;
                val = val.mul(&ev.value.with_bits(bits));
            }
            let c = t.coeff.abs().to_f64().unwrap_or(f64::INFINITY);
            err += c * verr + 2f64.powi(-(bits as i32) + 4);
            total = total.add(&val.scale_rat(&t.coeff));
        }
        if err <= p.target_error {
            let pass = total.abs_f64() <= 10.0 * p.target_error;
            return Ok(NumericCheck {
                value: total,
                error: err,
                pass,
            });
        }
        let ratio = err / p.target_error;
        local.target_error /= 2.0 * ratio;
        if local.target_error < 2f64.powi(-(bits as i32)) {
            return Err(NumericError::PrecisionUnreachable {
                target: p.target_error,
                bound: err,
            });
        }
    }
    Err(NumericError::PrecisionUnreachable {
        target: p.target_error,
        bound: f64::NAN,
    })
}

pub fn check_numeric(e: &Expression, point: &[BigRat], p: &SeriesParams) -> Result<NumericCheck, NumericError> {
    eval_expression(e, point, p)
}
