use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::build::{CitationEdge, CitationGraph, EdgeKind};
use crate::corpus::{CollectionRegistry, Corpus, IdKind, PublicationId, Side};

/// How reference totals are counted in every report of this module.
pub const COUNTING: &str = "distinct (citing, cited) pairs per citing record";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReportError {
    #[error("unknown collection {0:?}")]
    UnknownCollection(String),
    #[error("collections {0:?} and {1:?} are on different sides")]
    SideMismatch(String, String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelCount {
    pub label: String,
    pub count: u64,
    pub percent: f64,
}

/// Per-label counts in registry order with percentages of their sum.
pub fn breakdown(labels: &[String], counts: &BTreeMap<String, u64>) -> Vec<LabelCount> {
    let total: u64 = counts.values().sum();
    labels
        .iter()
        .map(|l| {
            let count = counts.get(l).copied().unwrap_or(0);
            LabelCount {
                label: l.clone(),
                count,
                percent: if total == 0 {
                    0.0
                } else {
                    100.0 * count as f64 / total as f64
                },
            }
        })
        .collect()
}

/// Publications in the corpus whose label is `name`, in id order.
pub fn focal_population<'a>(
    corpus: &'a Corpus,
    registry: &CollectionRegistry,
    name: &str,
) -> Result<Vec<&'a PublicationId>, ReportError> {
    let c = registry
        .get(name)
        .ok_or_else(|| ReportError::UnknownCollection(name.to_string()))?;
    Ok(corpus
        .ids(c.side.id_kind())
        .into_iter()
        .filter(|id| registry.classify(id) == name)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BowtieReport {
    pub focal: String,
    pub n_pubs: u64,
    pub refs_total: u64,
    pub cites_total: u64,
    pub avg_refs: f64,
    pub avg_cites: f64,
    /// `avg_cites / avg_refs`; absent when nothing is referenced.
    pub value_added: Option<f64>,
    pub refs_breakdown: Vec<LabelCount>,
    pub cites_breakdown: Vec<LabelCount>,
    pub counting: String,
}

impl BowtieReport {
    /// Report arithmetic from totals alone. Averages are zero for an empty
    /// population.
    pub fn from_totals(focal: &str, n_pubs: u64, refs_total: u64, cites_total: u64) -> Self {
        let avg = |t: u64| if n_pubs == 0 { 0.0 } else { t as f64 / n_pubs as f64 };
        let avg_refs = avg(refs_total);
        let avg_cites = avg(cites_total);
        BowtieReport {
            focal: focal.to_string(),
            n_pubs,
            refs_total,
            cites_total,
            avg_refs,
            avg_cites,
            value_added: (avg_refs > 0.0).then(|| avg_cites / avg_refs),
            refs_breakdown: Vec::new(),
            cites_breakdown: Vec::new(),
            counting: COUNTING.to_string(),
        }
    }
}

/// Same-kind references and citations of a collection, broken down by the
/// label of the other endpoint.
pub fn bowtie(
    graph: &CitationGraph,
    corpus: &Corpus,
    registry: &CollectionRegistry,
    focal: &str,
) -> Result<BowtieReport, ReportError> {
    let pop = focal_population(corpus, registry, focal)?;
    let side = registry.get(focal).map(|c| c.side).unwrap_or(Side::Science);
    let kind = EdgeKind::within(side.id_kind());
    let mut refs: BTreeMap<String, u64> = BTreeMap::new();
    let mut cites: BTreeMap<String, u64> = BTreeMap::new();
    for id in &pop {
        for e in graph.out_edges(id).filter(|e| e.kind == kind) {
            *refs.entry(registry.classify(&e.dst).to_string()).or_default() += 1;
        }
        for e in graph.in_edges(id).filter(|e| e.kind == kind) {
            *cites.entry(registry.classify(&e.src).to_string()).or_default() += 1;
        }
    }
    let labels = registry.labels(side);
    let mut report = BowtieReport::from_totals(focal, pop.len() as u64, refs.values().sum(), cites.values().sum());
    report.refs_breakdown = breakdown(&labels, &refs);
    report.cites_breakdown = breakdown(&labels, &cites);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossBreakdown {
    pub edge_kind: EdgeKind,
    pub edges: Vec<LabelCount>,
    /// Distinct publications at the far end, per label.
    pub distinct: Vec<LabelCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossDomainReport {
    pub focal: String,
    /// Other-kind publications referenced by focal members.
    pub referenced: CrossBreakdown,
    /// Other-kind publications citing focal members.
    pub citing: CrossBreakdown,
}

/// Citations crossing between papers and patents for one collection. For a
/// Technology collection `referenced` counts papers cited by its patents;
/// for a Science collection it counts patents cited by its papers.
pub fn cross_domain(
    graph: &CitationGraph,
    corpus: &Corpus,
    registry: &CollectionRegistry,
    focal: &str,
) -> Result<CrossDomainReport, ReportError> {
    let pop = focal_population(corpus, registry, focal)?;
    let side = registry.get(focal).map(|c| c.side).unwrap_or(Side::Science);
    let own = side.id_kind();
    let other = match own {
        IdKind::Journal => IdKind::Patent,
        IdKind::Patent => IdKind::Journal,
    };
    let other_labels = registry.labels(Side::of(other));
    let tally = |edges: Vec<&CitationEdge>, far: fn(&CitationEdge) -> &PublicationId, kind: EdgeKind| {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut distinct: BTreeMap<String, BTreeSet<&PublicationId>> = BTreeMap::new();
        for e in edges {
            let label = registry.classify(far(e)).to_string();
            *counts.entry(label.clone()).or_default() += 1;
            distinct.entry(label).or_default().insert(far(e));
        }
        let distinct_counts = distinct.into_iter().map(|(k, v)| (k, v.len() as u64)).collect();
        CrossBreakdown {
            edge_kind: kind,
            edges: breakdown(&other_labels, &counts),
            distinct: breakdown(&other_labels, &distinct_counts),
        }
    };
    let out_kind = EdgeKind::between(own, other);
    let in_kind = EdgeKind::between(other, own);
    let outgoing = pop
        .iter()
        .flat_map(|id| graph.out_edges(id).filter(move |e| e.kind == out_kind))
        .collect();
    let incoming = pop
        .iter()
        .flat_map(|id| graph.in_edges(id).filter(move |e| e.kind == in_kind))
        .collect();
    Ok(CrossDomainReport {
        focal: focal.to_string(),
        referenced: tally(outgoing, |e| &e.dst, out_kind),
        citing: tally(incoming, |e| &e.src, in_kind),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalRatio {
    pub a: String,
    pub b: String,
    /// Citations A receives from B.
    pub citations_from_b: u64,
    /// References A makes into B.
    pub references_into_b: u64,
    pub ratio: Option<f64>,
}

impl DirectionalRatio {
    pub fn from_counts(a: &str, b: &str, citations_from_b: u64, references_into_b: u64) -> Self {
        DirectionalRatio {
            a: a.to_string(),
            b: b.to_string(),
            citations_from_b,
            references_into_b,
            ratio: (references_into_b > 0).then(|| citations_from_b as f64 / references_into_b as f64),
        }
    }
}

/// What A gives to B relative to what it takes from B. `b` may be
/// [`OTHERS`](crate::corpus::OTHERS).
pub fn directional_ratio(
    graph: &CitationGraph,
    corpus: &Corpus,
    registry: &CollectionRegistry,
    a: &str,
    b: &str,
) -> Result<DirectionalRatio, ReportError> {
    let pop = focal_population(corpus, registry, a)?;
    let side = registry.get(a).map(|c| c.side).unwrap_or(Side::Science);
    if b != crate::corpus::OTHERS {
        let other = registry
            .get(b)
            .ok_or_else(|| ReportError::UnknownCollection(b.to_string()))?;
        if other.side != side {
            return Err(ReportError::SideMismatch(a.to_string(), b.to_string()));
        }
    }
    let kind = EdgeKind::within(side.id_kind());
    let mut cites = 0;
    let mut refs = 0;
    for id in &pop {
        refs += graph
            .out_edges(id)
            .filter(|e| e.kind == kind && registry.classify(&e.dst) == b)
            .count() as u64;
        cites += graph
            .in_edges(id)
            .filter(|e| e.kind == kind && registry.classify(&e.src) == b)
            .count() as u64;
    }
    Ok(DirectionalRatio::from_counts(a, b, cites, refs))
}
