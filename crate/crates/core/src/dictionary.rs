//! Dictionaries and the sliding-window maps they induce on one-sided
//! binary sequences.
//!
//! A dictionary `D ⊂ X_n` yields `θ_D` with
//! `θ_D(x)_k = χ_D(x_k, …, x_{k+n-1})`. On finite words the same rule maps
//! `X_m` onto `X_{m-n+1}`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2poly::Gf2Poly;
use crate::starcomm;
use crate::word::{PeriodicSeq, Word};

/// Largest window a [`Dictionary`] can hold; members are a `u64` bitmask.
pub const MAX_DICTIONARY_WINDOW: usize = 6;
/// Default upper bound for [`enumerate_dictionaries`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 5;

/// Sliding-window transformation with a local rule `X_n → {0,1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowMap {
    window: usize,
    rule: Vec<bool>,
    linear_poly: Option<Gf2Poly>,
}

impl WindowMap {
    /// Builds a map from its truth table, indexed by packed words of
    /// length `window` (`x_1` most significant).
    pub fn from_rule(window: usize, rule: Vec<bool>) -> Self {
        assert!(window >= 1, "window must be positive");
        assert_eq!(rule.len(), 1 << window, "rule table has the wrong size");
        let linear_poly = detect_linear(window, &rule);
        WindowMap {
            window,
            rule,
            linear_poly,
        }
    }

    /// The linear map `f(σ)` with window `deg f + 1`.
    pub fn from_poly(poly: Gf2Poly) -> Result<Self> {
        let deg = poly.degree().ok_or(Error::ZeroPolynomial)? as usize;
        Self::from_poly_with_window(poly, deg + 1)
    }

    /// The linear map `f(σ)` read through a window of the given length.
    pub fn from_poly_with_window(poly: Gf2Poly, window: usize) -> Result<Self> {
        if let Some(d) = poly.degree() {
            if d as usize >= window {
                return Err(Error::WordTooShort {
                    need: d as usize + 1,
                    got: window,
                });
            }
        }
        let rule = (0..1usize << window)
            .map(|idx| {
                (0..window).fold(false, |acc, i| {
                    acc ^ (poly.coeff(i as u32) && (idx >> (window - 1 - i)) & 1 == 1)
                })
            })
            .collect();
        Ok(WindowMap {
            window,
            rule,
            linear_poly: Some(poly),
        })
    }

    /// The unilateral shift `σ`.
    pub fn shift() -> Self {
        Self::from_poly(Gf2Poly::T).expect("t is nonzero")
    }

    pub fn identity() -> Self {
        Self::from_poly(Gf2Poly::ONE).expect("1 is nonzero")
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn rule(&self) -> &[bool] {
        &self.rule
    }

    pub fn linear_poly(&self) -> Option<Gf2Poly> {
        self.linear_poly
    }

    /// Each `(n-1)`-prefix has exactly one completion on which the rule is 1.
    pub fn is_progressive(&self) -> bool {
        (0..1usize << (self.window - 1)).all(|p| self.rule[2 * p] != self.rule[2 * p + 1])
    }

    /// Number of preimages of every point, `2^{n-1}`, for progressive maps.
    pub fn fiber_count(&self) -> Option<usize> {
        self.is_progressive().then(|| 1 << (self.window - 1))
    }

    pub fn eval_window(&self, index: usize) -> bool {
        self.rule[index]
    }

    /// Word-level application on packed words: `X_len → X_{len-n+1}`.
    /// Requires `len >= window - 1`.
    pub fn apply_index(&self, index: usize, len: usize) -> usize {
        debug_assert!(len + 1 >= self.window);
        let out_len = len + 1 - self.window;
        let mask = (1usize << self.window) - 1;
        (0..out_len).fold(0usize, |acc, k| {
            let win = (index >> (out_len - 1 - k)) & mask;
            (acc << 1) | usize::from(self.rule[win])
        })
    }

    /// All packed words of length `len + n - 1` mapped onto `index` (a word
    /// of length `len`), ascending. A progressive rule forces every symbol
    /// after the first `n - 1`, so there are exactly `2^{n-1}` of them.
    pub fn preimages_index(&self, index: usize, len: usize) -> Vec<usize> {
        let total = len + self.window - 1;
        if !self.is_progressive() {
            return (0..1usize << total)
                .filter(|&y| self.apply_index(y, total) == index)
                .collect();
        }
        let state_mask = (1usize << (self.window - 1)) - 1;
        (0..1usize << (self.window - 1))
            .map(|prefix| {
                (0..len).fold(prefix, |y, j| {
                    let want = (index >> (len - 1 - j)) & 1 == 1;
                    let state = (y & state_mask) << 1;
                    (y << 1) | usize::from(self.rule[state] != want)
                })
            })
            .collect()
    }

    /// The map "first `self`, then `next`", with window `n_1 + n_2 - 1`.
    pub fn then(&self, next: &WindowMap) -> WindowMap {
        let window = self.window + next.window - 1;
        let rule = (0..1usize << window)
            .map(|idx| next.rule[self.apply_index(idx, window)])
            .collect();
        let linear_poly = match (self.linear_poly, next.linear_poly) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        WindowMap {
            window,
            rule,
            linear_poly,
        }
    }

    /// Word-level preimage table: for every word `y` of length
    /// `target_len + n - 1`, its image index.
    #[cfg(test)]
    pub(crate) fn image_table(&self, target_len: usize) -> Vec<usize> {
        let len = target_len + self.window - 1;
        (0..1usize << len)
            .map(|y| self.apply_index(y, len))
            .collect()
    }
}

fn detect_linear(window: usize, rule: &[bool]) -> Option<Gf2Poly> {
    let size = 1usize << window;
    let additive = (0..size).all(|x| (0..size).all(|y| rule[x ^ y] == (rule[x] ^ rule[y])));
    if !additive {
        return None;
    }
    // coefficient of t^i is the rule evaluated on the unit word e_{i+1}
    let coeffs: Vec<bool> = (0..window)
        .map(|i| rule[1usize << (window - 1 - i)])
        .collect();
    Some(Gf2Poly::from_coefficients(&coeffs))
}

/// Applies a window map to a finite word.
pub fn apply_window_map(m: &WindowMap, w: &Word) -> Result<Word> {
    if w.len() < m.window {
        return Err(Error::WordTooShort {
            need: m.window,
            got: w.len(),
        });
    }
    let out = (0..=w.len() - m.window)
        .map(|k| m.rule[w.slice(k, k + m.window).index()])
        .collect();
    Ok(Word::new(out))
}

/// A set of binary words of a common length `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dictionary {
    window: usize,
    members: u64,
}

impl Dictionary {
    pub fn new(window: usize, members: u64) -> Result<Self> {
        if window > MAX_DICTIONARY_WINDOW {
            return Err(Error::WindowTooLarge {
                window,
                limit: MAX_DICTIONARY_WINDOW,
            });
        }
        if window < 2 {
            return Err(Error::Parse(format!(
                "dictionary words need length >= 2, got {window}"
            )));
        }
        let size = 1u32 << window;
        if size < 64 && members >> size != 0 {
            return Err(Error::Parse("member mask exceeds X_n".into()));
        }
        Ok(Dictionary { window, members })
    }

    pub fn from_words(words: &[Word]) -> Result<Self> {
        let window = words
            .first()
            .map(Word::len)
            .ok_or_else(|| Error::Parse("empty dictionary".into()))?;
        if let Some(w) = words.iter().find(|w| w.len() != window) {
            return Err(Error::Parse(format!(
                "word {w} has length {} but the dictionary uses {window}",
                w.len()
            )));
        }
        if window > MAX_DICTIONARY_WINDOW {
            return Err(Error::WindowTooLarge {
                window,
                limit: MAX_DICTIONARY_WINDOW,
            });
        }
        let members = words.iter().fold(0u64, |acc, w| acc | 1 << w.index());
        Dictionary::new(window, members)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn members(&self) -> u64 {
        self.members
    }

    pub fn contains_index(&self, index: usize) -> bool {
        (self.members >> index) & 1 == 1
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.len() == self.window && self.contains_index(w.index())
    }

    pub fn len(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    /// Members in lexicographic order.
    pub fn words(&self) -> Vec<Word> {
        (0..1usize << self.window)
            .filter(|&i| self.contains_index(i))
            .map(|i| Word::from_index(i, self.window))
            .collect()
    }

    /// `θ_D`, whose rule is the membership indicator `χ_D`.
    pub fn window_map(&self) -> WindowMap {
        let rule = (0..1usize << self.window)
            .map(|i| self.contains_index(i))
            .collect();
        WindowMap::from_rule(self.window, rule)
    }

    pub fn is_progressive(&self) -> bool {
        (0..1usize << (self.window - 1))
            .all(|p| self.contains_index(2 * p) != self.contains_index(2 * p + 1))
    }

    /// Progressive, and `x + y = z ∈ D` forces `x ∈ D` or `y ∈ D`.
    pub fn is_admissible(&self) -> bool {
        let size = 1usize << self.window;
        self.is_progressive()
            && (0..size).filter(|&z| self.contains_index(z)).all(|z| {
                (0..size).all(|x| self.contains_index(x) || self.contains_index(x ^ z))
            })
    }
}

impl fmt::Display for Dictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.words().iter().map(ToString::to_string).collect();
        f.write_str(&words.join(","))
    }
}

impl FromStr for Dictionary {
    type Err = Error;

    /// Comma-separated bit words, e.g. `001,100,011,110`.
    fn from_str(s: &str) -> Result<Self> {
        let words = s
            .split(',')
            .map(|w| {
                let w = w.trim();
                if w.is_empty() {
                    Err(Error::Parse(format!("empty word in dictionary {s:?}")))
                } else {
                    w.parse::<Word>()
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Dictionary::from_words(&words)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationRecord {
    pub window: usize,
    pub members: String,
    pub progressive: bool,
    pub admissible: bool,
    pub linear: bool,
    pub polynomial: Option<Gf2Poly>,
    pub fiber_count: Option<usize>,
}

pub fn classify_dictionary(d: &Dictionary) -> ClassificationRecord {
    let map = d.window_map();
    let progressive = d.is_progressive();
    ClassificationRecord {
        window: d.window,
        members: d.to_string(),
        progressive,
        admissible: d.is_admissible(),
        linear: map.linear_poly.is_some(),
        polynomial: map.linear_poly,
        fiber_count: progressive.then(|| 1 << (d.window - 1)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictionaryFilter {
    Progressive,
    Admissible,
    AdmissibleStarCommutingWithShift,
}

impl DictionaryFilter {
    pub fn accepts(self, d: &Dictionary) -> bool {
        match self {
            DictionaryFilter::Progressive => d.is_progressive(),
            DictionaryFilter::Admissible => d.is_admissible(),
            DictionaryFilter::AdmissibleStarCommutingWithShift => {
                d.is_admissible()
                    && d.window_map().linear_poly().is_some_and(|p| {
                        starcomm::star_commute_via_kernel(p, Gf2Poly::T)
                            .expect("admissible polynomials are nonzero")
                    })
            }
        }
    }
}

/// Progressive dictionaries of window `n`, ascending by member bitmask.
///
/// A progressive dictionary picks one completion bit `b_p` per prefix `p`,
/// contributing member `2p + b_p`. Reading the choices as the integer
/// `Σ b_p 2^p` orders the masks ascending, so counting through the choices
/// enumerates them in order. `shard` restricts to choice integers in
/// `[start, end)`.
pub fn progressive_dictionaries(
    n: usize,
    shard: std::ops::Range<u64>,
) -> impl Iterator<Item = Dictionary> {
    let prefixes = 1usize << (n - 1);
    shard.map(move |choice| {
        let members = (0..prefixes).fold(0u64, |acc, p| {
            acc | 1 << (2 * p + ((choice >> p) & 1) as usize)
        });
        Dictionary { window: n, members }
    })
}

/// Number of progressive dictionaries of window `n`, `2^{2^{n-1}}`.
pub fn progressive_count(n: usize) -> u64 {
    1u64 << (1usize << (n - 1))
}

pub fn enumerate_dictionaries(
    n: usize,
    filter: DictionaryFilter,
) -> Result<impl Iterator<Item = Dictionary>> {
    enumerate_dictionaries_with_limit(n, filter, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_dictionaries_with_limit(
    n: usize,
    filter: DictionaryFilter,
    limit: usize,
) -> Result<impl Iterator<Item = Dictionary>> {
    let limit = limit.min(MAX_DICTIONARY_WINDOW);
    if n > limit {
        return Err(Error::WindowTooLarge { window: n, limit });
    }
    if n < 2 {
        return Err(Error::Parse(format!("window must be at least 2, got {n}")));
    }
    Ok(progressive_dictionaries(n, 0..progressive_count(n)).filter(move |d| filter.accepts(d)))
}

/// `ker θ_D` for progressive `D`.
///
/// Each kernel element is fixed by its first `n-1` symbols: the next symbol
/// is the unique completion of the current `(n-1)`-window that lies outside
/// `D`. Periodicity is read off the first repeated window state, which
/// occurs within `2^{n-1} + 1` steps.
pub fn kernel_elements(d: &Dictionary) -> Result<Vec<PeriodicSeq>> {
    if !d.is_progressive() {
        return Err(Error::NotProgressive);
    }
    let k = d.window - 1;
    let state_mask = (1usize << k) - 1;
    let horizon = (1usize << k) + d.window;
    let mut out: Vec<PeriodicSeq> = (0..1usize << k)
        .map(|init| {
            let mut seq: Vec<bool> = Word::from_index(init, k).bits().to_vec();
            let mut seen: HashMap<usize, usize> = HashMap::new();
            let mut state = init;
            for step in 0..=horizon {
                if let Some(&first) = seen.get(&state) {
                    return PeriodicSeq::new(
                        Word::new(seq[..first].to_vec()),
                        Word::new(seq[first..step].to_vec()),
                    )
                    .expect("nonempty period");
                }
                seen.insert(state, step);
                let next = usize::from(d.contains_index(2 * state));
                seq.push(next == 1);
                state = ((state << 1) | next) & state_mask;
            }
            unreachable!("window states must repeat within the horizon")
        })
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2poly::recurrence_kernel;

    fn dict(s: &str) -> Dictionary {
        s.parse().unwrap()
    }

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    const D1: &str = "001,011,100,110";
    const D2: &str = "001,010,100,111";
    const D3: &str = "001,010,101,110";
    const D4: &str = "001,011,101,111";
    const D_ER: &str = "000,010,100,111";
    const D_LED: &str = "01,10";

    #[test]
    fn apply_examples() {
        let led = dict(D_LED).window_map();
        assert_eq!(apply_window_map(&led, &word("1101")).unwrap(), word("011"));
        let d4 = dict(D4).window_map();
        assert_eq!(apply_window_map(&d4, &word("10110")).unwrap(), word("110"));
        let d1 = dict(D1);
        for w in Word::all(3) {
            let out = apply_window_map(&d1.window_map(), &w).unwrap();
            assert_eq!(out.len(), 1);
            assert_eq!(out.get(0), d1.contains(&w));
        }
        assert_eq!(
            apply_window_map(&led, &word("1")),
            Err(Error::WordTooShort { need: 2, got: 1 })
        );
    }

    #[test]
    fn apply_index_matches_word_application() {
        let m = dict(D2).window_map();
        for len in 3..=9 {
            for w in Word::all(len) {
                let direct = apply_window_map(&m, &w).unwrap();
                assert_eq!(m.apply_index(w.index(), len), direct.index());
            }
        }
    }

    #[test]
    fn classify_examples() {
        let r = classify_dictionary(&dict(D1));
        assert!(r.progressive && r.admissible && r.linear);
        assert_eq!(r.polynomial, Some("1+t^2".parse().unwrap()));
        assert_eq!(r.fiber_count, Some(4));

        let r = classify_dictionary(&dict(D_ER));
        assert!(r.progressive && !r.admissible && !r.linear);
        assert_eq!(r.polynomial, None);

        let r = classify_dictionary(&dict(D_LED));
        assert!(r.admissible && r.linear);
        assert_eq!(r.polynomial, Some("1+t".parse().unwrap()));

        let r = classify_dictionary(&dict("00,01"));
        assert!(!r.progressive && !r.admissible);
        assert_eq!(r.fiber_count, None);
    }

    #[test]
    fn window_three_polynomials() {
        for (d, p) in [(D1, "1+t^2"), (D2, "1+t+t^2"), (D3, "t+t^2"), (D4, "t^2")] {
            assert_eq!(
                dict(d).window_map().linear_poly(),
                Some(p.parse().unwrap()),
                "{d}"
            );
        }
    }

    #[test]
    fn dictionary_text_is_canonical() {
        assert_eq!(dict("110, 001,100,011").to_string(), D1);
        assert!("01,100".parse::<Dictionary>().is_err());
        assert!("".parse::<Dictionary>().is_err());
        assert!("0".parse::<Dictionary>().is_err());
        assert!("0000000".parse::<Dictionary>().is_err());
        assert!("01,,10".parse::<Dictionary>().is_err());
    }

    #[test]
    fn enumerate_window_three() {
        let adm: Vec<String> = enumerate_dictionaries(3, DictionaryFilter::Admissible)
            .unwrap()
            .map(|d| d.to_string())
            .collect();
        let mut expected = vec![D1, D2, D3, D4];
        expected.sort_by_key(|s| dict(s).members());
        assert_eq!(adm, expected);

        // brute force over all 256 subsets of X_3
        let brute: Vec<Dictionary> = (0u64..256)
            .map(|m| Dictionary::new(3, m).unwrap())
            .filter(Dictionary::is_progressive)
            .collect();
        assert_eq!(brute.len(), 16);
        let streamed: Vec<Dictionary> = enumerate_dictionaries(3, DictionaryFilter::Progressive)
            .unwrap()
            .collect();
        assert_eq!(streamed, brute);

        let star: Vec<String> =
            enumerate_dictionaries(3, DictionaryFilter::AdmissibleStarCommutingWithShift)
                .unwrap()
                .map(|d| d.to_string())
                .collect();
        let mut expected = vec![D1, D2];
        expected.sort_by_key(|s| dict(s).members());
        assert_eq!(star, expected);
    }

    #[test]
    fn enumerate_window_two_star_commuting() {
        let v: Vec<String> =
            enumerate_dictionaries(2, DictionaryFilter::AdmissibleStarCommutingWithShift)
                .unwrap()
                .map(|d| d.to_string())
                .collect();
        assert_eq!(v, [D_LED]);
        assert!(matches!(
            enumerate_dictionaries(6, DictionaryFilter::Progressive).err(),
            Some(Error::WindowTooLarge { window: 6, limit: 5 })
        ));
        assert!(enumerate_dictionaries_with_limit(6, DictionaryFilter::Admissible, 6).is_ok());
    }

    #[test]
    fn kernel_examples() {
        let s = |d: &str| -> Vec<String> {
            kernel_elements(&dict(d))
                .unwrap()
                .iter()
                .map(ToString::to_string)
                .collect()
        };
        assert_eq!(s(D1), [":0", ":1", ":01", ":10"]);
        assert_eq!(s(D2), [":0", ":011", ":101", ":110"]);
        assert_eq!(s(D4), [":0", "1:0", "01:0", "11:0"]);
        assert_eq!(kernel_elements(&dict("00,01")), Err(Error::NotProgressive));
    }

    #[test]
    fn admissible_kernels_match_recurrence_kernels() {
        for n in 2..=5 {
            for d in enumerate_dictionaries(n, DictionaryFilter::Admissible).unwrap() {
                let r = classify_dictionary(&d);
                assert!(r.linear, "{d}");
                assert!(r.progressive);
                assert_eq!(d.len(), 1 << (n - 1));
                let k = kernel_elements(&d).unwrap();
                assert_eq!(k.len(), 1 << (n - 1));
                assert_eq!(k, recurrence_kernel(r.polynomial.unwrap()).unwrap(), "{d}");
            }
        }
    }

    #[test]
    fn admissible_means_linear_progressive() {
        for n in 2..=4 {
            for m in 0u64..(1u64 << (1 << n)) {
                let d = Dictionary::new(n, m).unwrap();
                let map = d.window_map();
                let linear_progressive = map.is_progressive() && map.linear_poly().is_some();
                assert_eq!(d.is_admissible(), linear_progressive, "{d}");
            }
        }
    }

    #[test]
    fn progressive_maps_are_regular_on_words() {
        for n in 2..=4 {
            for d in enumerate_dictionaries(n, DictionaryFilter::Progressive).unwrap() {
                let m = d.window_map();
                for k in 0..=10 {
                    let mut counts = vec![0usize; 1 << k];
                    for y in m.image_table(k) {
                        counts[y] += 1;
                    }
                    assert!(counts.iter().all(|&c| c == 1 << (n - 1)), "{d} at {k}");
                }
            }
        }
    }

    #[test]
    fn composition_windows_and_application() {
        let maps: Vec<WindowMap> = [D_LED, D1, D_ER, "01,11", "0,1"]
            .iter()
            .filter_map(|s| s.parse::<Dictionary>().ok())
            .map(|d| d.window_map())
            .chain([WindowMap::identity(), WindowMap::shift()])
            .collect();
        for a in &maps {
            for b in &maps {
                let ab = a.then(b);
                assert_eq!(ab.window(), a.window() + b.window() - 1);
                for len in ab.window()..=12 {
                    for idx in (0..1usize << len).step_by(7) {
                        let w = Word::from_index(idx, len);
                        let two_step =
                            apply_window_map(b, &apply_window_map(a, &w).unwrap()).unwrap();
                        assert_eq!(apply_window_map(&ab, &w).unwrap(), two_step);
                    }
                }
            }
        }
    }

    #[test]
    fn linear_detection_from_polynomials() {
        for d in 0..=4u32 {
            for p in Gf2Poly::all_of_degree(d) {
                let m = WindowMap::from_poly(p).unwrap();
                let round = WindowMap::from_rule(m.window(), m.rule().to_vec());
                assert_eq!(round.linear_poly(), Some(p));
                assert!(m.is_progressive());
            }
        }
        let wide = WindowMap::from_poly_with_window(Gf2Poly::ONE, 3).unwrap();
        assert!(!wide.is_progressive());
        assert_eq!(wide.linear_poly(), Some(Gf2Poly::ONE));
    }
}
