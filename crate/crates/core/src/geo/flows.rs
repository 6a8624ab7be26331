//! Region-to-region citation flows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::top_regions;
use crate::corpus::{CollectionRegistry, Corpus, JournalRecord, RegionCode, OTHERS};
use crate::graph::{focal_population, CitationGraph, EdgeKind, ReportError};

/// Citation weights between regions. Row `i` is the citing region;
/// `counts[i][j]` is the weight of references from region `i` to region `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowMatrix {
    pub regions: Vec<String>,
    pub counts: Vec<Vec<f64>>,
    /// `counts[i][j] / Σ_j counts[i][j]`; zero rows stay zero.
    pub fractions: Vec<Vec<f64>>,
    /// Total weight of references received by each region.
    pub node_sizes: Vec<f64>,
    /// Weight whose citing or cited region is outside `regions`.
    pub outside_regions: f64,
    /// References without an attributable region on either end.
    pub unattributable: u64,
}

impl FlowMatrix {
    pub fn from_pairs(regions: Vec<String>, pairs: &BTreeMap<(String, String), f64>) -> Self {
        let n = regions.len();
        let index: BTreeMap<&str, usize> = regions.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect();
        let mut counts = vec![vec![0.0; n]; n];
        let mut outside = 0.0;
        for ((from, to), &w) in pairs {
            match (index.get(from.as_str()), index.get(to.as_str())) {
                (Some(&i), Some(&j)) => counts[i][j] += w,
                _ => outside += w,
            }
        }
        let fractions = counts
            .iter()
            .map(|row| {
                let s: f64 = row.iter().sum();
                row.iter().map(|&c| if s > 0.0 { c / s } else { 0.0 }).collect()
            })
            .collect();
        let node_sizes = (0..n).map(|j| counts.iter().map(|row| row[j]).sum()).collect();
        FlowMatrix {
            regions,
            counts,
            fractions,
            node_sizes,
            outside_regions: outside,
            unattributable: 0,
        }
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().flatten().sum()
    }

    pub fn count(&self, from: &str, to: &str) -> Option<f64> {
        let i = self.regions.iter().position(|r| r == from)?;
        let j = self.regions.iter().position(|r| r == to)?;
        Some(self.counts[i][j])
    }

    pub fn fraction(&self, from: &str, to: &str) -> Option<f64> {
        let i = self.regions.iter().position(|r| r == from)?;
        let j = self.regions.iter().position(|r| r == to)?;
        Some(self.fractions[i][j])
    }
}

/// Patent-to-patent flows over every patent reference of the focal
/// collection, whether or not the cited patent belongs to any collection.
/// Regions are the `k` offices with most focal patents.
pub fn patent_flow(
    corpus: &Corpus,
    registry: &CollectionRegistry,
    focal: &str,
    k: usize,
) -> Result<FlowMatrix, ReportError> {
    let pop = focal_population(corpus, registry, focal)?;
    let mut sizes: BTreeMap<String, f64> = BTreeMap::new();
    let mut pairs: BTreeMap<(String, String), f64> = BTreeMap::new();
    for id in pop {
        let Some(p) = corpus.patent(id) else { continue };
        *sizes.entry(p.region.as_str().to_string()).or_default() += 1.0;
        for r in &p.patent_refs {
            if let Some(to) = r.region() {
                *pairs
                    .entry((p.region.as_str().to_string(), to.as_str().to_string()))
                    .or_default() += 1.0;
            }
        }
    }
    Ok(FlowMatrix::from_pairs(top_regions(&sizes, k), &pairs))
}

/// Regions of a paper's first author, one entry per resolvable affiliation.
fn first_author_regions(record: &JournalRecord) -> Vec<RegionCode> {
    record
        .first_author()
        .map(|a| {
            a.affiliations
                .iter()
                .map(|f| f.region)
                .filter(|r| !r.is_unknown())
                .collect()
        })
        .unwrap_or_default()
}

/// Paper-to-paper flows between in-collection papers, attributed by first
/// author. A reference from a paper with `a` first-author regions to one with
/// `b` puts weight `1 / (a b)` on each region pair. Regions are the `k` with
/// the largest first-author paper share.
pub fn journal_flow(corpus: &Corpus, graph: &CitationGraph, registry: &CollectionRegistry, k: usize) -> FlowMatrix {
    let in_collections = |r: &JournalRecord| registry.classify(&r.id) != OTHERS;
    let mut sizes: BTreeMap<String, f64> = BTreeMap::new();
    let mut pairs: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut unattributable = 0;
    for citing in corpus.journals().filter(|r| in_collections(r)) {
        let from = first_author_regions(citing);
        for r in &from {
            *sizes.entry(r.as_str().to_string()).or_default() += 1.0 / from.len() as f64;
        }
        for e in graph
            .out_edges(&citing.id)
            .filter(|e| e.kind == EdgeKind::PaperCitesPaper)
        {
            let Some(cited) = corpus.journal(&e.dst).filter(|r| in_collections(r)) else {
                continue;
            };
            let to = first_author_regions(cited);
            if from.is_empty() || to.is_empty() {
                unattributable += 1;
                continue;
            }
            let w = 1.0 / (from.len() * to.len()) as f64;
            for a in &from {
                for b in &to {
                    *pairs
                        .entry((a.as_str().to_string(), b.as_str().to_string()))
                        .or_default() += w;
                }
            }
        }
    }
    let mut m = FlowMatrix::from_pairs(top_regions(&sizes, k), &pairs);
    m.unattributable = unattributable;
    m
}
