//! Exact scalars `a + b√2` with rational `a, b`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct QuadScalar {
    pub a: Rational,
    pub b: Rational,
}

impl QuadScalar {
    pub fn new(a: Rational, b: Rational) -> Self {
        QuadScalar { a, b }
    }

    pub fn zero() -> Self {
        QuadScalar::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i128) -> Self {
        QuadScalar::new(Rational::from_integer(n), Rational::zero())
    }

    pub fn from_ratio(num: i128, den: i128) -> Self {
        QuadScalar::new(Rational::new(num, den), Rational::zero())
    }

    pub fn sqrt2() -> Self {
        QuadScalar::new(Rational::zero(), Rational::one())
    }

    /// `2^{e/2}`, exact for every integer `e`.
    pub fn sqrt_pow2(e: i32) -> Self {
        let half = e.div_euclid(2);
        let p = if half >= 0 {
            Rational::from_integer(1i128 << half)
        } else {
            Rational::new(1, 1i128 << -half)
        };
        if e.rem_euclid(2) == 0 {
            QuadScalar::new(p, Rational::zero())
        } else {
            QuadScalar::new(Rational::zero(), p)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn scale(self, r: Rational) -> Self {
        if r.is_zero() || self.is_zero() {
            return Self::zero();
        }
        QuadScalar::new(self.a * r, self.b * r)
    }

    /// Exact inverse; `None` for zero. `(a + b√2)^{-1} = (a - b√2)/(a² - 2b²)`,
    /// and the norm never vanishes since √2 is irrational.
    pub fn inverse(self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = self.a * self.a - self.b * self.b * Rational::from_integer(2);
        Some(QuadScalar::new(self.a / norm, -self.b / norm))
    }

    pub fn to_f64(self) -> f64 {
        let f = |r: Rational| *r.numer() as f64 / *r.denom() as f64;
        f(self.a) + f(self.b) * std::f64::consts::SQRT_2
    }
}

impl Add for QuadScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if o.is_zero() {
            return self;
        }
        if self.is_zero() {
            return o;
        }
        QuadScalar::new(self.a + o.a, self.b + o.b)
    }
}

impl AddAssign for QuadScalar {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Neg for QuadScalar {
    type Output = Self;
    fn neg(self) -> Self {
        QuadScalar::new(-self.a, -self.b)
    }
}

impl Sub for QuadScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for QuadScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.is_rational() && o.is_rational() {
            return QuadScalar::new(self.a * o.a, Rational::zero());
        }
        let two = Rational::from_integer(2);
        QuadScalar::new(
            self.a * o.a + two * self.b * o.b,
            self.a * o.b + self.b * o.a,
        )
    }
}

impl fmt::Display for QuadScalar {
    /// `a+b√2` with both components always present, e.g. `1/2+0√2`, `0-1√2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b < Rational::zero() {
            write!(f, "{}-{}√2", self.a, -self.b)
        } else {
            write!(f, "{}+{}√2", self.a, self.b)
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: i128 = num.trim().parse().map_err(|_| bad())?;
    let den: i128 = den.trim().parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

impl FromStr for QuadScalar {
    type Err = Error;

    /// Accepts `a+b√2`, `a-b√2`, a bare rational `a`, or `b√2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix("√2") else {
            return Ok(QuadScalar::new(parse_rational(s)?, Rational::zero()));
        };
        // the separating sign is the last +/- not at the start and not after '/'
        let split = body
            .char_indices()
            .filter(|&(i, c)| (c == '+' || c == '-') && i > 0 && !body[..i].ends_with('/'))
            .map(|(i, _)| i)
            .last();
        match split {
            Some(i) => {
                let a = parse_rational(&body[..i])?;
                let b = parse_rational(&body[i + 1..])?;
                let b = if body[i..].starts_with('-') { -b } else { b };
                Ok(QuadScalar::new(a, b))
            }
            None => Ok(QuadScalar::new(Rational::zero(), parse_rational(body)?)),
        }
    }
}

impl Serialize for QuadScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
