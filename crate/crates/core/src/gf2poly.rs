//! Polynomials over GF(2), read as polynomials in the shift: the
//! coefficient of `t^i` weighs `σ^i`.
//!
//! Coefficients live in a `u128`, bit `i` holding the coefficient of `t^i`.
//! Degrees beyond 127 are out of range for this crate and multiplication
//! panics if a product would overflow.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{PeriodicSeq, Word};

pub const MAX_DEGREE: u32 = 127;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf2Poly(u128);

impl Gf2Poly {
    pub const ZERO: Gf2Poly = Gf2Poly(0);
    pub const ONE: Gf2Poly = Gf2Poly(1);
    /// The indeterminate, i.e. the shift `σ`.
    pub const T: Gf2Poly = Gf2Poly(2);

    pub const fn from_bits(bits: u128) -> Self {
        Gf2Poly(bits)
    }

    pub const fn bits(self) -> u128 {
        self.0
    }

    pub fn monomial(degree: u32) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} out of range");
        Gf2Poly(1 << degree)
    }

    pub fn from_coefficients(coeffs: &[bool]) -> Self {
        assert!(coeffs.len() <= MAX_DEGREE as usize + 1);
        Gf2Poly(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c)
                .fold(0, |acc, (i, _)| acc | 1 << i),
        )
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `None` for the zero polynomial.
    pub fn degree(self) -> Option<u32> {
        (self.0 != 0).then(|| 127 - self.0.leading_zeros())
    }

    pub fn coeff(self, i: u32) -> bool {
        i <= MAX_DEGREE && (self.0 >> i) & 1 == 1
    }

    /// Value at `t = 0`, i.e. whether the constant term is present.
    pub fn constant_term(self) -> bool {
        self.coeff(0)
    }

    pub fn pow(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Gf2Poly::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(self, divisor: Gf2Poly) -> (Gf2Poly, Gf2Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let mut q = 0u128;
        let mut r = self.0;
        while let Some(dr) = Gf2Poly(r).degree() {
            if dr < dd {
                break;
            }
            let s = dr - dd;
            q |= 1 << s;
            r ^= divisor.0 << s;
        }
        (Gf2Poly(q), Gf2Poly(r))
    }

    pub fn divides(self, other: Gf2Poly) -> bool {
        !self.is_zero() && other.div_rem(self).1.is_zero()
    }

    /// All polynomials of exactly the given degree, ascending.
    pub fn all_of_degree(degree: u32) -> impl Iterator<Item = Gf2Poly> {
        let lead = 1u128 << degree;
        (0..lead).map(move |low| Gf2Poly(lead | low))
    }

    pub fn is_irreducible(self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(d) => (1..=d / 2).all(|k| Gf2Poly::all_of_degree(k).all(|q| !q.divides(self))),
        }
    }
}

impl Add for Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: Gf2Poly) -> Gf2Poly {
        Gf2Poly(self.0 ^ rhs.0)
    }
}

impl Mul for Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: Gf2Poly) -> Gf2Poly {
        if let (Some(a), Some(b)) = (self.degree(), rhs.degree()) {
            assert!(a + b <= MAX_DEGREE, "product degree {} out of range", a + b);
        }
        let mut acc = 0u128;
        let mut b = rhs.0;
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= self.0 << shift;
            }
            b >>= 1;
            shift += 1;
        }
        Gf2Poly(acc)
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = (0..=MAX_DEGREE)
            .filter(|&i| self.coeff(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

impl FromStr for Gf2Poly {
    type Err = Error;

    /// Accepts sums of monomials (`1+t+t^2`) and products of parenthesised
    /// factors (`t(1+t)`, `(1+t)^2*t`). Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let src: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = PolyParser { src: &src, pos: 0 };
        let poly = p.sum()?;
        if p.pos != src.len() {
            return Err(Error::Parse(format!(
                "unexpected {:?} at offset {} in {s:?}",
                src[p.pos], p.pos
            )));
        }
        Ok(poly)
    }
}

struct PolyParser<'a> {
    src: &'a [char],
    pos: usize,
}

impl PolyParser<'_> {
    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Gf2Poly> {
        let mut acc = self.product()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            acc = acc + self.product()?;
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Gf2Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                Some('(') | Some('t') | Some('x') => acc = acc * self.factor()?,
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Gf2Poly> {
        let base = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse("unbalanced parenthesis".into()));
                }
                self.pos += 1;
                inner
            }
            Some('t') | Some('x') => {
                self.pos += 1;
                Gf2Poly::T
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                if n % 2 == 0 {
                    Gf2Poly::ZERO
                } else {
                    Gf2Poly::ONE
                }
            }
            other => {
                return Err(Error::Parse(format!(
                    "expected a term at offset {}, found {other:?}",
                    self.pos
                )))
            }
        };
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.number()?;
            if base.degree().unwrap_or(0) as u64 * e > MAX_DEGREE as u64 {
                return Err(Error::Parse(format!("exponent {e} out of range")));
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.src[start..self.pos].iter().collect();
        digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad number at offset {start}")))
    }
}

impl Serialize for Gf2Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Gf2Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Monic greatest common divisor. `gcd(0, 0) = 0`.
pub fn poly_gcd(a: Gf2Poly, b: Gf2Poly) -> Gf2Poly {
    let (mut a, mut b) = (a, b);
    while !b.is_zero() {
        let r = a.div_rem(b).1;
        a = b;
        b = r;
    }
    a
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    /// Irreducible factors with multiplicities, ascending by degree then bits.
    pub factors: Vec<(Gf2Poly, u32)>,
}

impl Factorization {
    pub fn product(&self) -> Gf2Poly {
        self.factors
            .iter()
            .fold(Gf2Poly::ONE, |acc, &(f, m)| acc * f.pow(m))
    }

    pub fn multiplicity(&self, factor: Gf2Poly) -> u32 {
        self.factors
            .iter()
            .find(|(f, _)| *f == factor)
            .map_or(0, |&(_, m)| m)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, m)| if *m == 1 { format!("({p})") } else { format!("({p})^{m}") })
            .collect();
        f.write_str(&parts.join(""))
    }
}

/// Factors `a` into irreducibles by trial division with divisors of degree
/// at most `deg(a)/2`.
pub fn poly_factor(a: Gf2Poly) -> Result<Factorization> {
    let deg = a.degree().ok_or(Error::ZeroPolynomial)?;
    let mut rest = a;
    let mut factors = Vec::new();
    'degrees: for k in 1..=deg / 2 {
        for q in Gf2Poly::all_of_degree(k) {
            if rest.degree().unwrap() < 2 * k {
                break 'degrees;
            }
            let mut m = 0;
            while q.divides(rest) {
                rest = rest.div_rem(q).0;
                m += 1;
            }
            // Any divisor found here has no factor of smaller degree left,
            // so it is irreducible.
            if m > 0 {
                factors.push((q, m));
            }
        }
    }
    if rest.degree().unwrap() > 0 {
        match factors.iter_mut().find(|(f, _)| *f == rest) {
            Some(entry) => entry.1 += 1,
            None => factors.push((rest, 1)),
        }
    }
    factors.sort_by_key(|(f, _)| (f.degree(), f.bits()));
    Ok(Factorization { factors })
}

/// All one-sided sequences `x` with `a(σ)x = 0`, in normal form, sorted.
///
/// A solution is fixed by its first `deg a` symbols; later symbols follow
/// from `x_{k+d} = Σ_{i<d} a_i x_{k+i}`. The sequence of `d`-symbol states
/// must repeat within `2^d + 1` steps, which bounds the generated prefix.
pub fn recurrence_kernel(a: Gf2Poly) -> Result<Vec<PeriodicSeq>> {
    let d = a.degree().ok_or(Error::ZeroPolynomial)? as usize;
    assert!(d < usize::BITS as usize - 1, "kernel of degree {d} is too large to list");
    let mut out: Vec<PeriodicSeq> = (0..1usize << d)
        .map(|init| solve_from(a, d, Word::from_index(init, d)))
        .collect();
    out.sort();
    Ok(out)
}

fn solve_from(a: Gf2Poly, d: usize, init: Word) -> PeriodicSeq {
    let mut seq: Vec<bool> = init.bits().to_vec();
    let state_at = |seq: &[bool], k: usize| -> Vec<bool> { seq[k..k + d].to_vec() };
    let mut seen: std::collections::HashMap<Vec<bool>, usize> = Default::default();
    let mut k = 0;
    loop {
        let state = state_at(&seq, k);
        if let Some(&first) = seen.get(&state) {
            let pre = Word::new(seq[..first].to_vec());
            let per = Word::new(seq[first..k].to_vec());
            return PeriodicSeq::new(pre, per).expect("period is nonempty");
        }
        seen.insert(state, k);
        let next = (0..d).fold(false, |acc, i| acc ^ (a.coeff(i as u32) && seq[k + i]));
        seq.push(next);
        k += 1;
    }
}

/// Applies `a(σ) = Σ a_i σ^i` to an eventually periodic sequence.
pub fn apply_poly(a: Gf2Poly, x: &PeriodicSeq) -> PeriodicSeq {
    (0..=MAX_DEGREE)
        .filter(|&i| a.coeff(i))
        .fold(PeriodicSeq::zero(), |acc, i| acc.add(&x.shift(i as usize)))
}
