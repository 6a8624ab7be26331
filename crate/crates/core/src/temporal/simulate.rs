//! Expected citations from publication counts, reference mixes and citation
//! profiles, and the actual/expected interest ratio.
//!
//! A publication of collection `C` published in year `y` makes `r(C)`
//! references, a share `q(C→T)` of which go to collection `T`, spread over
//! earlier years by `C`'s citation profile. Cohort `p` of `T` therefore
//! expects `Σ_C Σ_y N_C(y) r(C) q(C→T) prof_C(y − p) / N_T(p)` citations per
//! publication.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::growth::Forecast;
use super::profile::{Band, CitationProfile};
use super::series::{population_by_year, SeriesPoint, Window, YearlySeries};
use super::TemporalError;
use crate::corpus::{CollectionRegistry, Corpus, Side};
use crate::graph::{CitationGraph, EdgeKind};

/// Publications per collection per year.
pub type CountTable = BTreeMap<String, BTreeMap<i32, f64>>;

/// Yearly publication counts of every collection on one side, all years.
pub fn publication_counts(
    corpus: &Corpus,
    registry: &CollectionRegistry,
    side: Side,
) -> Result<CountTable, TemporalError> {
    let mut table = CountTable::new();
    for c in registry.collections(side) {
        let by_year = population_by_year(corpus, registry, &c.name)?;
        table.insert(
            c.name.clone(),
            by_year.into_iter().map(|(y, v)| (y, v.len() as f64)).collect(),
        );
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixRow {
    pub n_pubs: usize,
    pub n_refs: u64,
    /// r(C): references per publication over the window.
    pub refs_per_pub: f64,
    /// q(C→X) per target label; sums to 1 when `n_refs > 0`.
    pub shares: BTreeMap<String, f64>,
    pub refs_per_pub_by_year: BTreeMap<i32, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceMix {
    pub side: Side,
    pub window: Window,
    pub labels: Vec<String>,
    pub rows: BTreeMap<String, MixRow>,
}

impl ReferenceMix {
    pub fn share(&self, citing: &str, target: &str) -> f64 {
        self.rows
            .get(citing)
            .and_then(|r| r.shares.get(target))
            .copied()
            .unwrap_or(0.0)
    }
}

/// Same-kind reference shares of each collection on `side`, over
/// publications inside `window`.
pub fn reference_mix(
    graph: &CitationGraph,
    corpus: &Corpus,
    registry: &CollectionRegistry,
    side: Side,
    window: Window,
) -> Result<ReferenceMix, TemporalError> {
    let window = Window::new(window.start, window.end)?;
    let kind = EdgeKind::within(side.id_kind());
    let labels = registry.labels(side);
    let mut rows = BTreeMap::new();
    for c in registry.collections(side) {
        let by_year = population_by_year(corpus, registry, &c.name)?;
        let mut counts: BTreeMap<String, u64> = labels.iter().map(|l| (l.clone(), 0)).collect();
        let mut n_pubs = 0;
        let mut by_year_r = BTreeMap::new();
        for (&y, pubs) in by_year.range(window.start..=window.end) {
            let mut year_refs = 0u64;
            for id in pubs {
                for e in graph.out_edges(id).filter(|e| e.kind == kind) {
                    *counts.entry(registry.classify(&e.dst).to_string()).or_default() += 1;
                    year_refs += 1;
                }
            }
            n_pubs += pubs.len();
            by_year_r.insert(y, year_refs as f64 / pubs.len() as f64);
        }
        let n_refs: u64 = counts.values().sum();
        let shares = counts
            .iter()
            .map(|(l, &k)| (l.clone(), if n_refs == 0 { 0.0 } else { k as f64 / n_refs as f64 }))
            .collect();
        rows.insert(
            c.name.clone(),
            MixRow {
                n_pubs,
                n_refs,
                refs_per_pub: if n_pubs == 0 {
                    0.0
                } else {
                    n_refs as f64 / n_pubs as f64
                },
                shares,
                refs_per_pub_by_year: by_year_r,
            },
        );
    }
    Ok(ReferenceMix {
        side,
        window,
        labels,
        rows,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectedOptions {
    /// Only citing years inside this range contribute.
    pub citing_from: Option<i32>,
    pub citing_to: Option<i32>,
    /// Use r(C) of the citing year where available instead of the
    /// window-constant value.
    pub per_year_refs: bool,
}

/// Median-profile lag vectors keyed by collection.
pub fn profile_band(profiles: &[CitationProfile], band: Band) -> BTreeMap<String, Vec<f64>> {
    profiles
        .iter()
        .map(|p| (p.collection.clone(), p.band(band).to_vec()))
        .collect()
}

/// Expected citations per publication for each cohort year of `target` in
/// `window`. Cohorts without publications are absent.
pub fn expected_citations(
    counts: &CountTable,
    mix: &ReferenceMix,
    profiles: &BTreeMap<String, Vec<f64>>,
    target: &str,
    window: Window,
    opts: &ExpectedOptions,
) -> Result<YearlySeries, TemporalError> {
    let window = Window::new(window.start, window.end)?;
    let mut contributing = Vec::new();
    for (c, row) in &mix.rows {
        let q = mix.share(c, target);
        if q > 0.0 && row.refs_per_pub > 0.0 {
            let prof = profiles
                .get(c)
                .ok_or_else(|| TemporalError::MissingProfile(c.clone()))?;
            contributing.push((c, row, q, prof));
        }
    }
    let target_counts = counts.get(target);
    Ok(YearlySeries::from_fn(target, "expected_avg_cites", window, |p| {
        let n_target = target_counts.and_then(|t| t.get(&p)).copied().unwrap_or(0.0);
        if n_target <= 0.0 {
            return None;
        }
        let mut total = 0.0;
        for &(c, row, q, prof) in &contributing {
            let Some(years) = counts.get(c) else { continue };
            let lo = opts.citing_from.map_or(p, |f| f.max(p));
            let hi = opts.citing_to.unwrap_or(i32::MAX);
            if lo > hi {
                continue;
            }
            for (&y, &n) in years.range(lo..=hi) {
                let lag = (y - p) as usize;
                let Some(&w) = prof.get(lag) else { continue };
                let r = if opts.per_year_refs {
                    row.refs_per_pub_by_year.get(&y).copied().unwrap_or(row.refs_per_pub)
                } else {
                    row.refs_per_pub
                };
                total += n * r * q * w;
            }
        }
        Some(total / n_target)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterestPoint {
    pub year: i32,
    pub actual: Option<f64>,
    pub expected: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterestSeries {
    pub collection: String,
    pub points: Vec<InterestPoint>,
}

impl InterestSeries {
    pub fn ratio(&self, year: i32) -> Option<f64> {
        self.points.iter().find(|p| p.year == year)?.ratio
    }
}

/// Actual over expected average citations, year by year.
pub fn interest_ratio(actual: &YearlySeries, expected: &YearlySeries) -> Result<InterestSeries, TemporalError> {
    let (wa, we) = (actual.window(), expected.window());
    if wa != we {
        return Err(TemporalError::WindowMismatch);
    }
    let points = actual
        .points
        .iter()
        .zip(&expected.points)
        .map(|(a, e)| InterestPoint {
            year: a.year,
            actual: a.value,
            expected: e.value,
            ratio: match (a.value, e.value) {
                (Some(a), Some(e)) if e > 0.0 => Some(a / e),
                _ => None,
            },
        })
        .collect();
    Ok(InterestSeries {
        collection: actual.collection.clone(),
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountVariant {
    Low,
    Point,
    High,
}

impl CountVariant {
    pub const ALL: [CountVariant; 3] = [CountVariant::Low, CountVariant::Point, CountVariant::High];

    fn pick(self, f: &Forecast) -> f64 {
        match self {
            CountVariant::Low => f.low,
            CountVariant::Point => f.point,
            CountVariant::High => f.high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCombination {
    pub counts: CountVariant,
    pub profile: Band,
    /// Expected future citations per publication, by cohort.
    pub future: YearlySeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FutureBands {
    /// Observed average citations plus simulated future citations; the point
    /// value uses point forecasts and median profiles.
    pub series: YearlySeries,
    pub combinations: Vec<BandCombination>,
}

pub struct BandInputs<'a> {
    /// Observed counts; only years up to the window end are used.
    pub observed_counts: &'a CountTable,
    pub forecasts: &'a BTreeMap<String, Vec<Forecast>>,
    pub profiles: &'a [CitationProfile],
    pub mix: &'a ReferenceMix,
    pub observed_avg_cites: &'a YearlySeries,
    pub target: &'a str,
    pub window: Window,
}

/// Possible average citations once the forecast years have cited each
/// cohort, as the envelope over {low, point, high} counts × {p25, p50, p75}
/// profiles.
pub fn future_citation_bands(inputs: &BandInputs<'_>) -> Result<FutureBands, TemporalError> {
    let window = inputs.window;
    let horizon_end = inputs
        .forecasts
        .values()
        .flat_map(|f| f.iter().map(|x| x.year))
        .max()
        .unwrap_or(window.end);
    for (c, row) in &inputs.mix.rows {
        if inputs.mix.share(c, inputs.target) > 0.0 && row.refs_per_pub > 0.0 && !inputs.forecasts.contains_key(c) {
            return Err(TemporalError::MissingForecast(c.clone()));
        }
    }
    let opts = ExpectedOptions {
        citing_from: Some(window.end + 1),
        citing_to: Some(horizon_end),
        per_year_refs: false,
    };
    let mut combinations = Vec::new();
    for variant in CountVariant::ALL {
        let mut table = CountTable::new();
        for (c, years) in inputs.observed_counts {
            table.insert(c.clone(), years.range(..=window.end).map(|(&y, &n)| (y, n)).collect());
        }
        for (c, fs) in inputs.forecasts {
            let entry = table.entry(c.clone()).or_default();
            for f in fs.iter().filter(|f| f.year > window.end) {
                entry.insert(f.year, variant.pick(f));
            }
        }
        for band in Band::ALL {
            let profiles = profile_band(inputs.profiles, band);
            let future = expected_citations(&table, inputs.mix, &profiles, inputs.target, window, &opts)?;
            combinations.push(BandCombination {
                counts: variant,
                profile: band,
                future,
            });
        }
    }
    let points = window
        .years()
        .map(|y| {
            let observed = inputs.observed_avg_cites.get(y);
            let vals: Vec<f64> = combinations.iter().filter_map(|c| c.future.get(y)).collect();
            let point = combinations
                .iter()
                .find(|c| c.counts == CountVariant::Point && c.profile == Band::P50)
                .and_then(|c| c.future.get(y));
            match (observed, point) {
                (Some(o), Some(pt)) => SeriesPoint {
                    year: y,
                    value: Some(o + pt),
                    band_low: vals.iter().copied().reduce(f64::min).map(|v| o + v),
                    band_high: vals.iter().copied().reduce(f64::max).map(|v| o + v),
                },
                _ => SeriesPoint::new(y, None),
            }
        })
        .collect();
    Ok(FutureBands {
        series: YearlySeries {
            collection: inputs.target.to_string(),
            metric: "possible_avg_cites".into(),
            label: None,
            points,
        },
        combinations,
    })
}
