//! Collective credit allocation among co-authors, and its regional totals.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GeoError, RegionYearTable};
use crate::corpus::{Corpus, JournalRecord, PublicationId, RegionCode};
use crate::graph::{CitationGraph, EdgeKind};
use crate::temporal::Window;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreditVector {
    pub publication: PublicationId,
    pub year: i32,
    /// Normalized author name to credit share.
    pub shares: BTreeMap<String, f64>,
}

impl CreditVector {
    pub fn total(&self) -> f64 {
        self.shares.values().sum()
    }
}

fn author_set(record: &JournalRecord) -> BTreeSet<&str> {
    record.authors.iter().map(|a| a.name.as_str()).collect()
}

/// Splits a paper's credit among its authors by how often the papers they
/// wrote are co-cited with it.
///
/// The co-cited set is the target plus every paper referenced by a paper
/// citing the target; each member is weighted by how many citers reference
/// it. A co-cited paper's weight goes in equal parts to the target authors
/// who wrote it, or to all target authors when none did. An uncited paper
/// splits credit equally.
pub fn author_credit(paper: &JournalRecord, graph: &CitationGraph, corpus: &Corpus) -> Result<CreditVector, GeoError> {
    let authors = author_set(paper);
    if authors.is_empty() {
        return Err(GeoError::NoAuthors(paper.id.clone()));
    }
    let uniform = 1.0 / authors.len() as f64;
    let citers: BTreeSet<&PublicationId> = graph
        .in_edges(&paper.id)
        .filter(|e| e.kind == EdgeKind::PaperCitesPaper)
        .map(|e| &e.src)
        .collect();
    let mut raw: BTreeMap<&str, f64> = authors.iter().map(|&a| (a, 0.0)).collect();
    if citers.is_empty() {
        raw.values_mut().for_each(|v| *v = uniform);
    } else {
        let mut strength: BTreeMap<&PublicationId, f64> = BTreeMap::new();
        strength.insert(&paper.id, citers.len() as f64);
        for c in &citers {
            for e in graph.out_edges(c).filter(|e| e.kind == EdgeKind::PaperCitesPaper) {
                if e.dst != paper.id {
                    *strength.entry(&e.dst).or_default() += 1.0;
                }
            }
        }
        for (d, c_d) in strength {
            let wrote: Vec<&str> = if *d == paper.id {
                authors.iter().copied().collect()
            } else {
                corpus
                    .journal(d)
                    .map(|r| author_set(r).intersection(&authors).copied().collect())
                    .unwrap_or_default()
            };
            if wrote.is_empty() {
                raw.values_mut().for_each(|v| *v += uniform * c_d);
            } else {
                let part = c_d / wrote.len() as f64;
                for a in wrote {
                    *raw.get_mut(a).expect("co-author is a target author") += part;
                }
            }
        }
    }
    let total: f64 = raw.values().sum();
    Ok(CreditVector {
        publication: paper.id.clone(),
        year: paper.year,
        shares: raw.into_iter().map(|(a, v)| (a.to_string(), v / total)).collect(),
    })
}

/// Credit vectors for the given papers, in input order. Papers without
/// authors are skipped.
pub fn credits_for(papers: &[&JournalRecord], graph: &CitationGraph, corpus: &Corpus) -> Vec<CreditVector> {
    papers
        .par_iter()
        .filter_map(|p| author_credit(p, graph, corpus).ok())
        .collect()
}

/// Regional credit per year. Each author's share is split evenly over their
/// affiliations; authors without any affiliation (or with unresolvable
/// ones) credit the `??` region.
pub fn region_credit(corpus: &Corpus, credits: &[CreditVector], window: Window) -> RegionYearTable {
    let mut table = RegionYearTable::new();
    for cv in credits.iter().filter(|c| window.contains(c.year)) {
        let Some(record) = corpus.journal(&cv.publication) else {
            continue;
        };
        for (name, share) in &cv.shares {
            let regions: Vec<RegionCode> = record
                .authors
                .iter()
                .filter(|a| &a.name == name)
                .flat_map(|a| a.affiliations.iter().map(|f| f.region))
                .collect();
            if regions.is_empty() {
                *table
                    .entry(RegionCode::UNKNOWN.as_str().to_string())
                    .or_default()
                    .entry(cv.year)
                    .or_default() += share;
                continue;
            }
            let part = share / regions.len() as f64;
            for r in regions {
                *table
                    .entry(r.as_str().to_string())
                    .or_default()
                    .entry(cv.year)
                    .or_default() += part;
            }
        }
    }
    table
}
