use std::fmt;

use num_traits::Zero;

use super::poly::{var_name, MultiPoly, VarValue};
use super::{ArithError, BigRat};

/// Reduced quotient of two polynomials. The denominator is primitive with a
/// positive leading coefficient and shares no factor with the numerator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: MultiPoly, den: MultiPoly) -> Self {
        let nvars = num.nvars();
        if num.is_zero() {
            return RatFunc {
                num,
                den: MultiPoly::one(nvars),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let (c, den) = den.primitive();
        RatFunc {
            num: num.scale(&c.recip()),
            den,
        }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let nvars = p.nvars();
        RatFunc {
            num: p,
            den: MultiPoly::one(nvars),
        }
    }

    pub fn constant(nvars: usize, c: BigRat) -> Self {
        Self::from_poly(MultiPoly::constant(nvars, c))
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::from_poly(MultiPoly::from_int(nvars, c))
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        Self::from_poly(MultiPoly::var(nvars, v))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRat> {
        self.is_constant()
            .then(|| self.num.constant_value() / self.den.constant_value())
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        Self::reduce(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        Self::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Result<RatFunc, ArithError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc, ArithError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc, ArithError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RatFunc {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    pub fn scale(&self, c: &BigRat) -> RatFunc {
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Exact value at a rational point.
    pub fn evaluate(&self, point: &[BigRat]) -> Result<BigRat, ArithError> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            return Err(ArithError::PoleAtPoint);
        }
        Ok(self.num.evaluate(point) / d)
    }

    /// Numerator and denominator after substituting one variable, without
    /// requiring the denominator to stay nonzero.
    pub fn substitute_var_raw(&self, v: usize, value: &VarValue) -> (MultiPoly, MultiPoly) {
        (self.num.substitute_var(v, value), self.den.substitute_var(v, value))
    }

    pub fn substitute_var(&self, v: usize, value: &VarValue) -> Result<RatFunc, ArithError> {
        let (n, d) = self.substitute_var_raw(v, value);
        RatFunc::new(n, d)
    }

    pub fn compose(&self, images: &[RatFunc]) -> Result<RatFunc, ArithError> {
        // Evaluate numerator and denominator as polynomials in the images by
        // clearing a common denominator per term.
        let eval = |p: &MultiPoly| -> RatFunc {
            let target = images[0].nvars();
            let mut acc = RatFunc::constant(target, BigRat::zero());
            for (m, c) in p.terms() {
                let mut t = RatFunc::constant(target, c.clone());
                for (v, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        t = t.mul(&images[v].pow(e as i64).expect("nonnegative power"));
                    }
                }
                acc = acc.add(&t);
            }
            acc
        };
        eval(&self.num).div(&eval(&self.den))
    }

    pub fn extend_vars(&self, nvars: usize) -> RatFunc {
        RatFunc {
            num: self.num.extend_vars(nvars),
            den: self.den.extend_vars(nvars),
        }
    }

    pub fn to_string_with(&self, names: &dyn Fn(usize) -> String) -> String {
        let n = self.num.to_string_with(names);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.to_string_with(names);
        let wrap = |s: String, p: &MultiPoly, den: bool| {
            if p.num_terms() > 1 || s.contains('/') || s.starts_with('-') || (den && s.contains('*')) {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(n, &self.num, false), wrap(d, &self.den, true))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&var_name))
    }
}

impl From<MultiPoly> for RatFunc {
    fn from(p: MultiPoly) -> Self {
        RatFunc::from_poly(p)
    }
}
