//! Consolidating versus disrupting patents.
//!
//! A sampled patent that cites patents of a neighbouring family and also
//! cites that family's papers is consolidating when some of those papers are
//! already cited by the patents it references, disrupting otherwise.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::build::{CitationGraph, EdgeKind};
use super::reports::{focal_population, ReportError};
use crate::corpus::{CollectionRegistry, Corpus, PublicationId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapAuditOptions {
    pub focal: String,
    pub neighbour_technology: String,
    pub neighbour_science: String,
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for OverlapAuditOptions {
    fn default() -> Self {
        OverlapAuditOptions {
            focal: "G-T".into(),
            neighbour_technology: "NT-T".into(),
            neighbour_science: "NT-S".into(),
            sample_size: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatentOverlap {
    pub patent: PublicationId,
    pub science_refs: usize,
    pub shared: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapAuditReport {
    pub focal: String,
    pub seed: u64,
    pub requested_sample_size: usize,
    pub sample_size: usize,
    pub n_citing_neighbour: usize,
    pub n_with_journal_refs: usize,
    pub n_with_neighbour_science_refs: usize,
    /// Disrupting patents.
    pub n_no_overlap: usize,
    /// Consolidating patents.
    pub n_with_overlap: usize,
    /// Mean and population standard deviation of the positive fractions.
    pub overlap_mean: Option<f64>,
    pub overlap_stddev: Option<f64>,
    pub patents: Vec<PatentOverlap>,
}

/// Uniform sample without replacement, returned in id order.
pub fn seeded_sample<T: Clone + Ord>(population: &[T], size: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amount = size.min(population.len());
    let mut picked: Vec<T> = rand::seq::index::sample(&mut rng, population.len(), amount)
        .into_iter()
        .map(|i| population[i].clone())
        .collect();
    picked.sort();
    picked
}

pub fn overlap_audit(
    graph: &CitationGraph,
    corpus: &Corpus,
    registry: &CollectionRegistry,
    opts: &OverlapAuditOptions,
) -> Result<OverlapAuditReport, ReportError> {
    for name in [&opts.focal, &opts.neighbour_technology, &opts.neighbour_science] {
        if registry.get(name).is_none() {
            return Err(ReportError::UnknownCollection(name.clone()));
        }
    }
    let population: Vec<PublicationId> = focal_population(corpus, registry, &opts.focal)?
        .into_iter()
        .cloned()
        .collect();
    let sample = seeded_sample(&population, opts.sample_size, opts.seed);

    let science_refs = |id: &PublicationId| -> BTreeSet<PublicationId> {
        graph
            .out_edges(id)
            .filter(|e| e.kind == EdgeKind::PatentCitesPaper && registry.classify(&e.dst) == opts.neighbour_science)
            .map(|e| e.dst.clone())
            .collect()
    };

    let mut report = OverlapAuditReport {
        focal: opts.focal.clone(),
        seed: opts.seed,
        requested_sample_size: opts.sample_size,
        sample_size: sample.len(),
        n_citing_neighbour: 0,
        n_with_journal_refs: 0,
        n_with_neighbour_science_refs: 0,
        n_no_overlap: 0,
        n_with_overlap: 0,
        overlap_mean: None,
        overlap_stddev: None,
        patents: Vec::new(),
    };
    for p in &sample {
        let cited_patents: Vec<&PublicationId> = graph
            .out_edges(p)
            .filter(|e| e.kind == EdgeKind::PatentCitesPatent && registry.classify(&e.dst) == opts.neighbour_technology)
            .map(|e| &e.dst)
            .collect();
        if cited_patents.is_empty() {
            continue;
        }
        report.n_citing_neighbour += 1;
        if graph.out_edges(p).any(|e| e.kind == EdgeKind::PatentCitesPaper) {
            report.n_with_journal_refs += 1;
        }
        let own = science_refs(p);
        if own.is_empty() {
            continue;
        }
        report.n_with_neighbour_science_refs += 1;
        let inherited: BTreeSet<PublicationId> = cited_patents.iter().flat_map(|q| science_refs(q)).collect();
        let shared = own.intersection(&inherited).count();
        if shared == 0 {
            report.n_no_overlap += 1;
        } else {
            report.n_with_overlap += 1;
        }
        report.patents.push(PatentOverlap {
            patent: p.clone(),
            science_refs: own.len(),
            shared,
            fraction: shared as f64 / own.len() as f64,
        });
    }
    let positive: Vec<f64> = report
        .patents
        .iter()
        .filter(|o| o.shared > 0)
        .map(|o| o.fraction)
        .collect();
    if !positive.is_empty() {
        let n = positive.len() as f64;
        let mean = positive.iter().sum::<f64>() / n;
        let var = positive.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
        report.overlap_mean = Some(mean);
        report.overlap_stddev = Some(var.sqrt());
    }
    Ok(report)
}
