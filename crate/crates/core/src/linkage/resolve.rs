//! Reference resolution against a metadata source.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::client::MetadataSource;
use super::score::{score_text, Aggregation};
use crate::corpus::{Corpus, PublicationId, RawReference};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionStatus {
    Accepted,
    Rejected,
    TransportError,
}

/// One line of the resolution output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub citing: Option<PublicationId>,
    pub ref_text: String,
    pub doi: Option<String>,
    /// Figure of merit of the best candidate; absent when nothing was scored.
    pub score: Option<f64>,
    pub status: ResolutionStatus,
}

impl Resolution {
    pub fn is_accepted(&self) -> bool {
        self.status == ResolutionStatus::Accepted
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolveOptions {
    pub threshold: f64,
    pub aggregation: Aggregation,
    /// Candidates scored per query; the best-scoring one is kept.
    pub top_k: usize,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions {
            threshold: super::DEFAULT_THRESHOLD,
            aggregation: Aggregation::Min,
            top_k: 1,
        }
    }
}

/// Resolves one reference. Embedded DOIs are taken as-is without a query.
pub fn resolve_reference(reference: &RawReference, source: &dyn MetadataSource, threshold: f64) -> Resolution {
    resolve_with(
        reference,
        source,
        &ResolveOptions {
            threshold,
            ..ResolveOptions::default()
        },
    )
}

pub fn resolve_with(reference: &RawReference, source: &dyn MetadataSource, opts: &ResolveOptions) -> Resolution {
    let ref_text = reference.text.clone();
    if let Some(doi) = &reference.embedded_doi {
        return Resolution {
            citing: None,
            ref_text,
            doi: Some(doi.clone()),
            score: Some(0.0),
            status: ResolutionStatus::Accepted,
        };
    }
    let candidates = match source.query(reference.text.trim(), opts.top_k.max(1)) {
        Ok(c) => c,
        Err(e) => {
            log::debug!("query failed for {:?}: {e}", reference.text);
            return Resolution {
                citing: None,
                ref_text,
                doi: None,
                score: None,
                status: ResolutionStatus::TransportError,
            };
        }
    };
    let best = candidates
        .iter()
        .take(opts.top_k.max(1))
        .map(|c| (c, score_text(&reference.text, c, opts.aggregation).figure_of_merit))
        .fold(None::<(&_, f64)>, |acc, (c, s)| match acc {
            Some((_, bs)) if bs <= s => acc,
            _ => Some((c, s)),
        });
    match best {
        Some((cand, score)) if score < opts.threshold => Resolution {
            citing: None,
            ref_text,
            doi: Some(cand.doi.clone()),
            score: Some(score),
            status: ResolutionStatus::Accepted,
        },
        Some((_, score)) => Resolution {
            citing: None,
            ref_text,
            doi: None,
            score: Some(score),
            status: ResolutionStatus::Rejected,
        },
        None => Resolution {
            citing: None,
            ref_text,
            doi: None,
            score: None,
            status: ResolutionStatus::Rejected,
        },
    }
}

/// Journal references that are not patent numbers, plus all patent NPL
/// references, in id order. Identical strings within one citing record
/// appear once.
pub fn pending_references(corpus: &Corpus) -> Vec<(PublicationId, RawReference)> {
    let mut out = Vec::new();
    for j in corpus.journals() {
        let mut seen = HashSet::new();
        for r in &j.raw_refs {
            if r.embedded_patent.is_some() {
                continue;
            }
            if seen.insert(r.text.as_str()) {
                out.push((j.id.clone(), r.clone()));
            }
        }
    }
    for p in corpus.patents() {
        let mut seen = HashSet::new();
        for r in &p.npl_refs {
            if seen.insert(r.text.as_str()) {
                out.push((p.id.clone(), r.clone()));
            }
        }
    }
    out
}

/// Resolves all pending references of a corpus. Output order follows
/// [`pending_references`] regardless of how the work is scheduled.
pub fn resolve_corpus(corpus: &Corpus, source: &dyn MetadataSource, opts: &ResolveOptions) -> Vec<Resolution> {
    pending_references(corpus)
        .into_par_iter()
        .map(|(citing, r)| Resolution {
            citing: Some(citing),
            ..resolve_with(&r, source, opts)
        })
        .collect()
}

/// Tally of resolution outcomes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ResolutionSummary {
    pub total: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub transport_error: usize,
}

pub fn summarize(resolutions: &[Resolution]) -> ResolutionSummary {
    let mut s = ResolutionSummary {
        total: resolutions.len(),
        ..ResolutionSummary::default()
    };
    for r in resolutions {
        match r.status {
            ResolutionStatus::Accepted => s.accepted += 1,
            ResolutionStatus::Rejected => s.rejected += 1,
            ResolutionStatus::TransportError => s.transport_error += 1,
        }
    }
    s
}
