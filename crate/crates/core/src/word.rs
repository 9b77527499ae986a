//! Finite binary words and eventually periodic one-sided sequences.
//!
//! Words are indexed from the left: `x_1` is the first symbol. When a word
//! of length `m` is packed into an integer, `x_1` is the most significant
//! bit, so ascending integers enumerate `X_m` in lexicographic order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    bits: Vec<bool>,
}

impl Word {
    pub fn new(bits: Vec<bool>) -> Self {
        Word { bits }
    }

    pub fn empty() -> Self {
        Word { bits: Vec::new() }
    }

    pub fn zeros(len: usize) -> Self {
        Word { bits: vec![false; len] }
    }

    /// Unpacks `index` into a word of length `len`, `x_1` taken from the
    /// most significant of the `len` bits.
    pub fn from_index(index: usize, len: usize) -> Self {
        let bits = (0..len).map(|i| (index >> (len - 1 - i)) & 1 == 1).collect();
        Word { bits }
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Symbol at 0-based position `i`.
    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word::new(self.bits[..len].to_vec())
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word::new(self.bits[from..to].to_vec())
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Word { bits }
    }

    /// Pointwise sum over Z/2 of two words of equal length.
    pub fn xor(&self, other: &Word) -> Word {
        assert_eq!(self.len(), other.len(), "xor of words of unequal length");
        Word::new(
            self.bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    /// Iterates `X_len` in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = Word> {
        (0..1usize << len).map(move |i| Word::from_index(i, len))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid symbol {other:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word::new)
    }
}

/// An eventually periodic one-sided binary sequence
/// `pre_1 … pre_a (per_1 … per_b)^∞` kept in normal form: the period is
/// primitive and the preperiod is as short as possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicSeq {
    preperiod: Word,
    period: Word,
}

impl PeriodicSeq {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("period must be nonempty".into()));
        }
        Ok(Self::normalized(preperiod.bits, period.bits))
    }

    pub fn zero() -> Self {
        PeriodicSeq {
            preperiod: Word::empty(),
            period: Word::new(vec![false]),
        }
    }

    pub fn periodic(period: Word) -> Result<Self> {
        Self::new(Word::empty(), period)
    }

    fn normalized(mut pre: Vec<bool>, mut per: Vec<bool>) -> Self {
        let n = per.len();
        let primitive = (1..=n)
            .find(|&d| n % d == 0 && (0..n).all(|i| per[i] == per[i % d]))
            .unwrap_or(n);
        per.truncate(primitive);
        while let Some(&last) = pre.last() {
            if last != *per.last().unwrap() {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        PeriodicSeq {
            preperiod: Word::new(pre),
            period: Word::new(per),
        }
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    /// Symbol at 0-based position `i`.
    pub fn bit(&self, i: usize) -> bool {
        let a = self.preperiod.len();
        if i < a {
            self.preperiod.get(i)
        } else {
            self.period.get((i - a) % self.period.len())
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word::new((0..len).map(|i| self.bit(i)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.preperiod.is_empty() && self.period.is_zero()
    }

    /// The shift `σ^k`: drops the first `k` symbols.
    pub fn shift(&self, k: usize) -> PeriodicSeq {
        let a = self.preperiod.len();
        if k <= a {
            PeriodicSeq {
                preperiod: self.preperiod.slice(k, a),
                period: self.period.clone(),
            }
        } else {
            let mut per = self.period.bits.clone();
            let r = (k - a) % per.len();
            per.rotate_left(r);
            Self::normalized(Vec::new(), per)
        }
    }

    pub fn add(&self, other: &PeriodicSeq) -> PeriodicSeq {
        let pre_len = self.preperiod.len().max(other.preperiod.len());
        let per_len = lcm(self.period.len(), other.period.len());
        let bit = |i: usize| self.bit(i) ^ other.bit(i);
        let pre = (0..pre_len).map(bit).collect();
        let per = (pre_len..pre_len + per_len).map(bit).collect();
        Self::normalized(pre, per)
    }

    fn sort_key(&self) -> (usize, usize, &[bool], &[bool]) {
        (
            self.preperiod.len(),
            self.period.len(),
            self.preperiod.bits(),
            self.period.bits(),
        )
    }
}

impl Ord for PeriodicSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for PeriodicSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PeriodicSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.preperiod, self.period)
    }
}

impl FromStr for PeriodicSeq {
    type Err = Error;

    /// Parses the `pre:period` form, e.g. `1:0` or `:01`.
    fn from_str(s: &str) -> Result<Self> {
        let (pre, per) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected pre:period, got {s:?}")))?;
        PeriodicSeq::new(pre.parse()?, per.parse()?)
    }
}

impl Serialize for PeriodicSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> PeriodicSeq {
        s.parse().unwrap()
    }

    #[test]
    fn word_index_round_trip() {
        let w: Word = "1101".parse().unwrap();
        assert_eq!(w.index(), 0b1101);
        assert_eq!(Word::from_index(0b1101, 4), w);
        assert_eq!(Word::from_index(1, 3).to_string(), "001");
    }

    #[test]
    fn normal_form_shortens_period_and_preperiod() {
        assert_eq!(seq(":0101").to_string(), ":01");
        assert_eq!(seq("0:10").to_string(), ":01");
        assert_eq!(seq("11:1").to_string(), ":1");
        assert_eq!(seq("01:0").to_string(), "01:0");
        assert_eq!(seq("101:101").to_string(), ":101");
        assert!(seq("000:00").is_zero());
    }

    #[test]
    fn shift_and_add() {
        let x = seq("1:0");
        assert!(x.shift(1).is_zero());
        assert_eq!(seq(":011").shift(1).to_string(), ":110");
        assert_eq!(seq(":01").add(&seq(":10")).to_string(), ":1");
        assert_eq!(seq(":01").add(&seq(":011")).to_string(), ":001110");
    }

    #[test]
    fn ordering_is_by_lengths_then_bits() {
        let mut v = vec![seq("1:0"), seq(":1"), seq(":0"), seq(":01")];
        v.sort();
        let s: Vec<_> = v.iter().map(ToString::to_string).collect();
        assert_eq!(s, [":0", ":1", ":01", "1:0"]);
    }

    #[test]
    fn rejects_empty_period() {
        assert!("1:".parse::<PeriodicSeq>().is_err());
        assert!("12".parse::<Word>().is_err());
    }
}
