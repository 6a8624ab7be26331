use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::records::JournalRecord;

/// Counts of funded and unfunded authors.
///
/// An author is funded when at least one of their papers acknowledges
/// funding. Authors are identified by normalized name only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundingReport {
    pub papers: usize,
    pub papers_without_funding_info: usize,
    pub funded_authors: usize,
    pub unfunded_authors: usize,
    /// Papers none of whose authors is funded.
    pub papers_by_unfunded_authors: usize,
}

pub fn funding_audit<'a>(records: impl IntoIterator<Item = &'a JournalRecord>) -> FundingReport {
    let records: Vec<&JournalRecord> = records.into_iter().collect();
    let mut funded: BTreeSet<&str> = BTreeSet::new();
    let mut all: BTreeSet<&str> = BTreeSet::new();
    for r in &records {
        for a in &r.authors {
            all.insert(&a.name);
            if r.funding_acknowledged {
                funded.insert(&a.name);
            }
        }
    }
    let papers_by_unfunded_authors = records
        .iter()
        .filter(|r| !r.authors.is_empty() && r.authors.iter().all(|a| !funded.contains(a.name.as_str())))
        .count();
    FundingReport {
        papers: records.len(),
        papers_without_funding_info: records.iter().filter(|r| !r.funding_acknowledged).count(),
        funded_authors: funded.len(),
        unfunded_authors: all.len() - funded.len(),
        papers_by_unfunded_authors,
    }
}
