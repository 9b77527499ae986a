//! Report records shared by the command-line front end and the tests.

use std::ops::Range;

use serde::Serialize;

use crate::dictionary::{
    classify_dictionary, kernel_elements, progressive_count, progressive_dictionaries,
    ClassificationRecord, Dictionary, WindowMap, DEFAULT_ENUMERATION_LIMIT, MAX_DICTIONARY_WINDOW,
};
use crate::error::{Error, Result};
use crate::gf2poly::Gf2Poly;
use crate::starcomm::{
    certify_system, default_search_depth, independence_profile, star_commute_diagram_search,
    star_commute_via_kernel, DiagramSearch, DynamicalSystem, IndependenceProfile,
    SystemCertificate,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub input: String,
    pub classification: ClassificationRecord,
    /// `ker θ_D` in `pre:period` normal form; present for progressive `D`.
    pub kernel: Option<Vec<String>>,
    /// Word-level diagram search against `σ`; a semi-decision for nonlinear maps.
    pub diagram_search_with_shift: Option<DiagramSearch>,
    /// Independence criteria of `(θ_D, σ)`, each computed two ways; linear `D` only.
    pub independence_with_shift: Option<IndependenceProfile>,
    /// Certificate for the system `(σ, θ_D)`; linear `D` only.
    pub certificate: Option<SystemCertificate>,
}

impl AnalysisReport {
    /// Cross-field consistency: admissible dictionaries have `2^{n-1}`
    /// kernel elements, and all star-commutation verdicts agree.
    pub fn is_consistent(&self) -> bool {
        let c = &self.classification;
        let kernel_ok = !c.admissible
            || self
                .kernel
                .as_ref()
                .is_some_and(|k| k.len() == 1 << (c.window - 1));
        let star_ok = match (&self.independence_with_shift, &self.diagram_search_with_shift) {
            (Some(p), Some(d)) => p.all_agree() && p.star_commute.value() == d.star_commute,
            _ => true,
        };
        kernel_ok && star_ok && (c.admissible == (c.progressive && c.linear))
    }
}

pub fn analyze(text: &str) -> Result<AnalysisReport> {
    let d: Dictionary = text.parse()?;
    let classification = classify_dictionary(&d);
    let map = d.window_map();
    let kernel = if classification.progressive {
        Some(kernel_elements(&d)?.iter().map(ToString::to_string).collect())
    } else {
        None
    };
    let shift = WindowMap::shift();
    let diagram_search_with_shift = if classification.progressive {
        Some(star_commute_diagram_search(&map, &shift, default_search_depth(&map, &shift))?)
    } else {
        None
    };
    let linear = map.linear_poly().filter(|p| p.degree().unwrap_or(0) >= 1);
    let independence_with_shift = linear
        .map(|p| independence_profile(p, Gf2Poly::T))
        .transpose()?;
    let certificate = linear
        .map(|p| {
            DynamicalSystem::with_names(vec![Gf2Poly::T, p], vec!["σ".into(), d.to_string()])
                .map(|sys| certify_system(&sys))
        })
        .transpose()?;
    Ok(AnalysisReport {
        input: text.to_string(),
        classification,
        kernel,
        diagram_search_with_shift,
        independence_with_shift,
        certificate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassificationCounts {
    /// All subsets of `X_n`, `2^{2^n}`.
    pub total: u128,
    pub progressive: u64,
    pub admissible: u64,
    pub star_commuting_with_shift: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleEntry {
    pub dictionary: String,
    pub polynomial: Gf2Poly,
    pub star_commutes_with_shift: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationSummary {
    pub window: usize,
    pub counts: ClassificationCounts,
    /// Ascending by member bitmask.
    pub admissible: Vec<AdmissibleEntry>,
}

impl ClassificationSummary {
    fn empty(n: usize) -> Self {
        ClassificationSummary {
            window: n,
            counts: ClassificationCounts {
                total: 1u128 << (1u32 << n),
                ..Default::default()
            },
            admissible: Vec::new(),
        }
    }

    /// Folds shard summaries, which must be supplied in shard order.
    pub fn merge(mut self, other: ClassificationSummary) -> Self {
        assert_eq!(self.window, other.window);
        self.counts.progressive += other.counts.progressive;
        self.counts.admissible += other.counts.admissible;
        self.counts.star_commuting_with_shift += other.counts.star_commuting_with_shift;
        self.admissible.extend(other.admissible);
        self
    }

    pub fn star_commuting(&self) -> impl Iterator<Item = &AdmissibleEntry> {
        self.admissible.iter().filter(|e| e.star_commutes_with_shift)
    }
}

/// Rejects windows below 2 or above `limit` (capped at the hard maximum).
pub fn check_classification_window(n: usize, limit: usize) -> Result<()> {
    let limit = limit.min(MAX_DICTIONARY_WINDOW);
    if n > limit {
        return Err(Error::WindowTooLarge { window: n, limit });
    }
    if n < 2 {
        return Err(Error::Parse(format!("window must be at least 2, got {n}")));
    }
    Ok(())
}

/// Splits the progressive choices of window `n` into at most `parts`
/// contiguous ranges, in order.
pub fn shards(n: usize, parts: usize) -> Vec<Range<u64>> {
    let total = progressive_count(n);
    let parts = (parts.max(1) as u64).min(total);
    (0..parts)
        .map(|i| total * i / parts..total * (i + 1) / parts)
        .collect()
}

/// Summary of the progressive dictionaries whose choice integers lie in
/// `shard`.
pub fn classify_shard(n: usize, shard: Range<u64>) -> ClassificationSummary {
    let mut s = ClassificationSummary::empty(n);
    for d in progressive_dictionaries(n, shard) {
        s.counts.progressive += 1;
        let Some(p) = d.window_map().linear_poly() else {
            continue;
        };
        let star = star_commute_via_kernel(p, Gf2Poly::T).expect("admissible polynomials are nonzero");
        s.counts.admissible += 1;
        s.counts.star_commuting_with_shift += u64::from(star);
        s.admissible.push(AdmissibleEntry {
            dictionary: d.to_string(),
            polynomial: p,
            star_commutes_with_shift: star,
        });
    }
    s
}

pub fn classify(n: usize) -> Result<ClassificationSummary> {
    classify_with_limit(n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn classify_with_limit(n: usize, limit: usize) -> Result<ClassificationSummary> {
    check_classification_window(n, limit)?;
    Ok(classify_shard(n, 0..progressive_count(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_examples() {
        let r = analyze("001,100,011,110").unwrap();
        assert!(r.classification.admissible);
        assert_eq!(r.classification.polynomial, Some("1+t^2".parse().unwrap()));
        assert_eq!(r.kernel.as_ref().unwrap().len(), 4);
        assert!(r.independence_with_shift.as_ref().unwrap().star_commute.value());
        assert!(r.certificate.as_ref().unwrap().valid);
        assert!(r.is_consistent());

        let r = analyze("000,100,010,111").unwrap();
        assert!(r.classification.progressive && !r.classification.admissible);
        assert!(!r.classification.linear);
        assert!(r.independence_with_shift.is_none() && r.certificate.is_none());
        assert!(r.is_consistent());

        let r = analyze("01,10").unwrap();
        assert_eq!(r.classification.polynomial, Some("1+t".parse().unwrap()));
        assert_eq!(r.kernel.unwrap(), [":0", ":1"]);

        let r = analyze("00,01").unwrap();
        assert!(r.kernel.is_none() && r.diagram_search_with_shift.is_none());
        assert!(analyze("01,1").is_err());
    }

    #[test]
    fn classification_counts() {
        let s = classify(3).unwrap();
        assert_eq!(
            s.counts,
            ClassificationCounts {
                total: 256,
                progressive: 16,
                admissible: 4,
                star_commuting_with_shift: 2
            }
        );
        let s2 = classify(2).unwrap();
        let star: Vec<&str> = s2.star_commuting().map(|e| e.dictionary.as_str()).collect();
        assert_eq!(star, ["01,10"]);
        let s4 = classify(4).unwrap();
        assert_eq!(s4.counts.progressive, 256);
        assert_eq!(s4.counts.admissible, 8);
        assert_eq!(s4.counts.star_commuting_with_shift, 4);
        assert!(s4.admissible.iter().all(|e| e.polynomial.degree() == Some(3)));
        assert!(matches!(classify(6), Err(Error::WindowTooLarge { .. })));
        assert!(classify(1).is_err());
    }

    #[test]
    fn sharded_classification_matches() {
        for n in 2..=5 {
            let whole = classify(n).unwrap();
            for parts in [1, 3, 7, 64] {
                let merged = shards(n, parts)
                    .into_iter()
                    .map(|r| classify_shard(n, r))
                    .reduce(ClassificationSummary::merge)
                    .unwrap();
                assert_eq!(merged, whole, "n = {n}, {parts} parts");
            }
        }
    }

    #[test]
    fn counts_are_monotone() {
        for n in 2..=5 {
            let c = classify(n).unwrap().counts;
            assert!(c.star_commuting_with_shift <= c.admissible);
            assert!(c.admissible <= c.progressive);
            assert!(c.progressive as u128 <= c.total);
            assert_eq!(c.admissible, 1 << (n - 1));
        }
    }
}
