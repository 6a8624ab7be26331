//! Regional credit, citation flows, rank tables and the patent language
//! table.

mod credit;
mod flows;
pub mod gazetteer;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use credit::{author_credit, credits_for, region_credit, CreditVector};
pub use flows::{journal_flow, patent_flow, FlowMatrix};

use crate::corpus::{CollectionRegistry, Corpus, PublicationId, RegionCode};
use crate::graph::{focal_population, ReportError};

pub const DEFAULT_TOP_K: usize = 10;

/// Language columns in display order; other codes follow alphabetically.
pub const LANGUAGE_ORDER: [&str; 10] = ["ZH", "EN", "KO", "JA", "DE", "FR", "ES", "PT", "RU", "XX"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeoError {
    #[error("{0} has no authors")]
    NoAuthors(PublicationId),
}

/// Region → year → value.
pub type RegionYearTable = BTreeMap<String, BTreeMap<i32, f64>>;

/// The `k` largest entries, descending, ties by region code. The `??`
/// bucket is never a region.
pub fn top_regions(sizes: &BTreeMap<String, f64>, k: usize) -> Vec<String> {
    let mut v: Vec<(&String, f64)> = sizes
        .iter()
        .filter(|(r, _)| r.as_str() != RegionCode::UNKNOWN.as_str())
        .map(|(r, &s)| (r, s))
        .collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    v.into_iter().take(k).map(|(r, _)| r.clone()).collect()
}

/// Focal patents per office per year.
pub fn patent_counts_by_region(
    corpus: &Corpus,
    registry: &CollectionRegistry,
    focal: &str,
) -> Result<RegionYearTable, ReportError> {
    let mut t = RegionYearTable::new();
    for id in focal_population(corpus, registry, focal)? {
        if let Some(p) = corpus.patent(id) {
            *t.entry(p.region.as_str().to_string())
                .or_default()
                .entry(p.year)
                .or_default() += 1.0;
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub rank: usize,
    pub region: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub k: usize,
    pub years: BTreeMap<i32, Vec<RankEntry>>,
}

/// Top `k` regions per year by score, descending; ties by region code.
pub fn rank_table(scores: &RegionYearTable, k: usize) -> RankTable {
    let mut per_year: BTreeMap<i32, BTreeMap<String, f64>> = BTreeMap::new();
    for (region, years) in scores {
        for (&y, &s) in years {
            per_year.entry(y).or_default().insert(region.clone(), s);
        }
    }
    let years = per_year
        .into_iter()
        .map(|(y, sizes)| {
            let ranked = top_regions(&sizes, k)
                .into_iter()
                .enumerate()
                .map(|(i, region)| RankEntry {
                    rank: i + 1,
                    score: sizes[&region],
                    region,
                })
                .collect();
            (y, ranked)
        })
        .collect();
    RankTable { k, years }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageTable {
    pub regions: Vec<String>,
    pub languages: Vec<String>,
    /// `counts[region][language]`.
    pub counts: Vec<Vec<u64>>,
}

impl LanguageTable {
    pub fn get(&self, region: &str, language: &str) -> u64 {
        let i = self.regions.iter().position(|r| r == region);
        let j = self.languages.iter().position(|l| l == language);
        match (i, j) {
            (Some(i), Some(j)) => self.counts[i][j],
            _ => 0,
        }
    }

    /// Fixed-width text rendering with `-` for empty cells.
    pub fn render_text(&self) -> String {
        let mut out = format!("{:<6}", "");
        for l in &self.languages {
            out.push_str(&format!("{l:>9}"));
        }
        out.push('\n');
        for (r, row) in self.regions.iter().zip(&self.counts) {
            out.push_str(&format!("{r:<6}"));
            for &c in row {
                let cell = if c == 0 { "-".to_string() } else { c.to_string() };
                out.push_str(&format!("{cell:>9}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Patent counts per office and language for the focal collection. With no
/// `regions` given, every office appears, largest first.
pub fn language_table(
    corpus: &Corpus,
    registry: &CollectionRegistry,
    focal: &str,
    regions: Option<&[String]>,
) -> Result<LanguageTable, ReportError> {
    let mut cells: BTreeMap<(String, String), u64> = BTreeMap::new();
    let mut sizes: BTreeMap<String, f64> = BTreeMap::new();
    for id in focal_population(corpus, registry, focal)? {
        if let Some(p) = corpus.patent(id) {
            let region = p.region.as_str().to_string();
            *sizes.entry(region.clone()).or_default() += 1.0;
            *cells.entry((region, p.language.clone())).or_default() += 1;
        }
    }
    let regions = match regions {
        Some(r) => r.to_vec(),
        None => top_regions(&sizes, usize::MAX),
    };
    let mut languages: Vec<String> = LANGUAGE_ORDER.iter().map(|s| s.to_string()).collect();
    let mut extra: Vec<String> = cells
        .keys()
        .map(|(_, l)| l.clone())
        .filter(|l| !LANGUAGE_ORDER.contains(&l.as_str()))
        .collect();
    extra.sort();
    extra.dedup();
    languages.extend(extra);
    let counts = regions
        .iter()
        .map(|r| {
            languages
                .iter()
                .map(|l| cells.get(&(r.clone(), l.clone())).copied().unwrap_or(0))
                .collect()
        })
        .collect();
    Ok(LanguageTable {
        regions,
        languages,
        counts,
    })
}
