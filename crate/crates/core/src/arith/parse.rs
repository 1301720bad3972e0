//! Parser for polynomial and rational-function text such as
//! `(x1 - x2)*(x3 - x4)/((x2 - x3)*(x4 - x1))` or `-3/4*x1^2 + x2`.

use num_bigint::BigInt;

use super::poly::MultiPoly;
use super::ratfunc::RatFunc;
use super::{ArithError, BigRat};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ArithError {
        ArithError::Parse(format!(
            "{msg} at offset {} in {:?}",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn expr(&mut self) -> Result<RatFunc, ArithError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ArithError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.div(&d).map_err(|_| self.err("division by zero"))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, ArithError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc, ArithError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e: i64 = self
                .digits()
                .ok_or_else(|| self.err("expected exponent"))?
                .parse()
                .map_err(|_| self.err("exponent too large"))?;
            let e = if neg { -e } else { e };
            return base.pow(e).map_err(|_| self.err("negative power of zero"));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, ArithError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                let idx: usize = self
                    .digits()
                    .ok_or_else(|| self.err("expected variable index"))?
                    .parse()
                    .map_err(|_| self.err("bad variable index"))?;
                if idx == 0 || idx > self.nvars {
                    return Err(self.err(&format!("variable x{idx} outside x1..x{}", self.nvars)));
                }
                Ok(RatFunc::var(self.nvars, idx - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().unwrap();
                let n: BigInt = d.parse().map_err(|_| self.err("bad integer"))?;
                Ok(RatFunc::constant(self.nvars, BigRat::from_integer(n)))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

pub fn parse_ratfunc(s: &str, nvars: usize) -> Result<RatFunc, ArithError> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
        nvars,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

pub fn parse_poly(s: &str, nvars: usize) -> Result<MultiPoly, ArithError> {
    let f = parse_ratfunc(s, nvars)?;
    if !f.den().is_one() {
        return Err(ArithError::Parse(format!("{s:?} is not a polynomial")));
    }
    Ok(f.num().clone())
}

pub fn parse_rational(s: &str) -> Result<BigRat, ArithError> {
    parse_ratfunc(s, 0)?
        .constant_value()
        .ok_or_else(|| ArithError::Parse(format!("{s:?} is not a rational number")))
}

/// Largest variable index mentioned in `s` (0 if none).
pub fn max_var_index(s: &str) -> usize {
    let b = s.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'x' {
            let start = i + 1;
            let mut j = start;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if let Ok(v) = s[start..j].parse::<usize>() {
                best = best.max(v);
            }
            i = j;
        } else {
            i += 1;
        }
    }
    best
}
