use serde::{Deserialize, Serialize};

use super::series::population_by_year;
use super::TemporalError;
use crate::corpus::{CollectionRegistry, Corpus};
use crate::graph::{CitationGraph, EdgeKind};

pub const DEFAULT_MAX_LAG: usize = 25;

/// Percentile of `values` by linear interpolation between order statistics
/// (`h = (n - 1) p`). `values` need not be sorted.
pub fn percentile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    P25,
    P50,
    P75,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::P25, Band::P50, Band::P75];

    pub fn quantile(self) -> f64 {
        match self {
            Band::P25 => 0.25,
            Band::P50 => 0.5,
            Band::P75 => 0.75,
        }
    }
}

/// Share of a collection's references by age, `lag = citing year - cited year`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationProfile {
    pub collection: String,
    pub max_lag: usize,
    /// Publications with at least one dated, non-negative-lag reference.
    pub n_pubs: usize,
    pub p25: Vec<f64>,
    pub p50: Vec<f64>,
    pub p75: Vec<f64>,
    /// References dated after the citing publication; excluded.
    pub negative_lags: usize,
    /// References older than `max_lag`; kept in each publication's
    /// denominator but not reported.
    pub beyond_max_lag: usize,
    /// References whose target year is unknown.
    pub undated_refs: usize,
}

impl CitationProfile {
    pub fn band(&self, band: Band) -> &[f64] {
        match band {
            Band::P25 => &self.p25,
            Band::P50 => &self.p50,
            Band::P75 => &self.p75,
        }
    }

    /// Profile from explicit per-publication lag lists; shared by
    /// [`citation_profile`] and tests.
    pub fn from_lags(collection: &str, lags: &[Vec<i64>], max_lag: usize) -> Self {
        let mut per_pub: Vec<Vec<f64>> = Vec::new();
        let mut negative = 0;
        let mut beyond = 0;
        for pub_lags in lags {
            let valid: Vec<usize> = pub_lags
                .iter()
                .filter_map(|&l| {
                    if l < 0 {
                        negative += 1;
                        None
                    } else {
                        Some(l as usize)
                    }
                })
                .collect();
            if valid.is_empty() {
                continue;
            }
            let mut hist = vec![0.0; max_lag + 1];
            for &l in &valid {
                if l <= max_lag {
                    hist[l] += 1.0;
                } else {
                    beyond += 1;
                }
            }
            let n = valid.len() as f64;
            per_pub.push(hist.into_iter().map(|c| c / n).collect());
        }
        let band = |p: f64| -> Vec<f64> {
            (0..=max_lag)
                .map(|t| {
                    let col: Vec<f64> = per_pub.iter().map(|v| v[t]).collect();
                    percentile(&col, p).unwrap_or(0.0)
                })
                .collect()
        };
        CitationProfile {
            collection: collection.to_string(),
            max_lag,
            n_pubs: per_pub.len(),
            p25: band(0.25),
            p50: band(0.5),
            p75: band(0.75),
            negative_lags: negative,
            beyond_max_lag: beyond,
            undated_refs: 0,
        }
    }
}

/// Reference-age profile of a collection over its same-kind references whose
/// target year is known.
pub fn citation_profile(
    graph: &CitationGraph,
    corpus: &Corpus,
    registry: &CollectionRegistry,
    collection: &str,
    max_lag: usize,
) -> Result<CitationProfile, TemporalError> {
    let kind = registry
        .get(collection)
        .ok_or_else(|| TemporalError::UnknownCollection(collection.to_string()))?
        .side
        .id_kind();
    let same = EdgeKind::within(kind);
    let mut undated = 0;
    let mut lags = Vec::new();
    for (&y, pubs) in &population_by_year(corpus, registry, collection)? {
        for id in pubs {
            let mut l = Vec::new();
            for e in graph.out_edges(id).filter(|e| e.kind == same) {
                match corpus.year_of(&e.dst) {
                    Some(cy) => l.push(i64::from(y) - i64::from(cy)),
                    None => undated += 1,
                }
            }
            lags.push(l);
        }
    }
    let mut profile = CitationProfile::from_lags(collection, &lags, max_lag);
    profile.undated_refs = undated;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        assert_eq!(percentile(&[], 0.5), None);
        assert_eq!(percentile(&[3.0], 0.25), Some(3.0));
        assert_eq!(percentile(&[4.0, 1.0, 2.0, 3.0], 0.5), Some(2.5));
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), Some(2.0));
        assert_eq!(percentile(&[0.0, 1.0], 0.75), Some(0.75));
    }

    #[test]
    fn same_year_only() {
        let p = CitationProfile::from_lags("X", &[vec![0, 0, 0]], 25);
        assert_eq!(p.p50[0], 1.0);
        assert!(p.p50[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn negative_and_old_lags() {
        let p = CitationProfile::from_lags("X", &[vec![-1, 1, 30, 30]], 25);
        assert_eq!(p.negative_lags, 1);
        assert_eq!(p.beyond_max_lag, 2);
        assert!((p.p50[1] - 1.0 / 3.0).abs() < 1e-15);
        let mass: f64 = p.p50.iter().sum();
        assert!(mass <= 1.0);
    }
}
