//! Ledrappier's shift: configurations `y` on the quadrant with
//! `y_n + y_{n+e_1} + y_{n+e_2} = 0`. The base row determines everything,
//! and moving up one row is `x ↦ x + σ(x)`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::dictionary::{apply_window_map, Dictionary, WindowMap};
use crate::error::{Error, Result};
use crate::word::Word;

/// Rows of lengths `m, m-1, …, 1` with
/// `rows[i+1][j] = rows[i][j] + rows[i][j+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrianglePatch {
    rows: Vec<Word>,
}

impl TrianglePatch {
    /// Validates shape and the defining relation.
    pub fn new(rows: Vec<Word>) -> Result<Self> {
        let m = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(i, r)| r.len() != m - i) {
            return Err(Error::Parse(format!(
                "row {i} has length {}, expected {}",
                r.len(),
                m - i
            )));
        }
        let patch = TrianglePatch { rows };
        if let Some((i, j)) = patch.first_violation() {
            return Err(Error::Parse(format!("relation fails at row {i}, column {j}")));
        }
        Ok(patch)
    }

    pub fn rows(&self) -> &[Word] {
        &self.rows
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn top(&self) -> bool {
        self.rows.last().is_some_and(|r| r.get(0))
    }

    /// Interior cell `(i, j)` where the relation fails, if any.
    pub fn first_violation(&self) -> Option<(usize, usize)> {
        self.rows.windows(2).enumerate().find_map(|(i, pair)| {
            (0..pair[1].len())
                .find(|&j| pair[1].get(j) != (pair[0].get(j) ^ pair[0].get(j + 1)))
                .map(|j| (i, j))
        })
    }

    /// The blocks `(y_{i,j}, y_{i,j+1}; y_{i+1,j})` as 3-bit words
    /// `base left, base right, top`.
    pub fn blocks(&self) -> Vec<Word> {
        self.rows
            .windows(2)
            .flat_map(|pair| {
                (0..pair[1].len()).map(move |j| {
                    Word::new(vec![pair[0].get(j), pair[0].get(j + 1), pair[1].get(j)])
                })
            })
            .collect()
    }
}

/// The four admissible blocks: bases `00`, `01`, `10`, `11` with tops
/// `0`, `1`, `1`, `0`.
pub fn basic_blocks() -> [Word; 4] {
    ["000", "011", "101", "110"].map(|s| s.parse().expect("valid block"))
}

impl fmt::Display for TrianglePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(ToString::to_string).collect();
        f.write_str(&rows.join("\n"))
    }
}

impl FromStr for TrianglePatch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Word>>>()?;
        TrianglePatch::new(rows)
    }
}

impl Serialize for TrianglePatch {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn pairwise_sum(row: &Word) -> Word {
    Word::new((1..row.len()).map(|j| row.get(j - 1) ^ row.get(j)).collect())
}

/// The unique patch with the given base row.
pub fn complete_patch(base: &Word) -> Result<TrianglePatch> {
    if base.is_empty() {
        return Err(Error::WordTooShort { need: 1, got: 0 });
    }
    let mut rows = vec![base.clone()];
    while rows.last().unwrap().len() > 1 {
        let next = pairwise_sum(rows.last().unwrap());
        rows.push(next);
    }
    Ok(TrianglePatch { rows })
}

/// `θ_{D_Led} = 1 + σ`.
pub fn ledrappier_map() -> WindowMap {
    "01,10"
        .parse::<Dictionary>()
        .expect("valid dictionary")
        .window_map()
}

/// Row 2 of the patch over `base`, cross-checked against `θ_{D_Led}` and
/// against `x + σ(x)`.
pub fn conjugate_vertical(base: &Word) -> Result<Word> {
    if base.len() < 2 {
        return Err(Error::WordTooShort {
            need: 2,
            got: base.len(),
        });
    }
    let patch = complete_patch(base)?;
    let row = patch.rows()[1].clone();
    let via_dictionary = apply_window_map(&ledrappier_map(), base)?;
    let shifted = base.slice(1, base.len());
    let direct = base.prefix(base.len() - 1).xor(&shifted);
    if row != via_dictionary || row != direct {
        return Err(Error::CriteriaDisagreement(format!(
            "vertical step of {base}: patch {row}, dictionary {via_dictionary}, x+σx {direct}"
        )));
    }
    Ok(row)
}

/// `base, θ_D(base), …, θ_D^m(base)`.
pub fn stack_orbit(d: &Dictionary, base: &Word, m: usize) -> Result<Vec<Word>> {
    if !d.is_progressive() {
        return Err(Error::NotProgressive);
    }
    let map = d.window_map();
    let need = m * (map.window() - 1) + 1;
    if base.len() < need {
        return Err(Error::WordTooShort {
            need,
            got: base.len(),
        });
    }
    let mut rows = vec![base.clone()];
    for _ in 0..m {
        let next = apply_window_map(&map, rows.last().unwrap())?;
        rows.push(next);
    }
    Ok(rows)
}
