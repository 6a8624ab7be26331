//! Journal and patent records, the collection registry, and corpus-level audits.

mod audit;
mod ids;
mod load;
mod records;
mod registry;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use audit::{funding_audit, FundingReport};
pub use ids::{normalize_doi, IdKind, PatentNumber, PublicationId, RegionCode};
pub use load::{load_journal_records, load_patent_records, Rejection, RejectionReport, MAX_YEAR, MIN_YEAR};
pub use records::{
    find_embedded_doi, normalize_author_name, Affiliation, Author, JournalRecord, PatentRecord, RawReference,
};
pub use registry::{Collection, CollectionRegistry, OverlapMatrix, Side, DEFAULT_FAMILY_ORDER, OTHERS};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid DOI {0:?}")]
    InvalidDoi(String),
    #[error("invalid patent number {0:?}")]
    InvalidPatentNumber(String),
    #[error("invalid region code {0:?}")]
    InvalidRegion(String),
    #[error("collection registry: {0}")]
    Registry(String),
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Immutable store of journal and patent records keyed by id.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Corpus {
    journals: BTreeMap<PublicationId, JournalRecord>,
    patents: BTreeMap<PublicationId, PatentRecord>,
}

impl Corpus {
    /// Builds a corpus; on repeated ids the first record wins.
    pub fn new(
        journals: impl IntoIterator<Item = JournalRecord>,
        patents: impl IntoIterator<Item = PatentRecord>,
    ) -> Self {
        let mut c = Corpus::default();
        for j in journals {
            c.journals.entry(j.id.clone()).or_insert(j);
        }
        for p in patents {
            c.patents.entry(p.id.clone()).or_insert(p);
        }
        c
    }

    pub fn journals(&self) -> impl Iterator<Item = &JournalRecord> {
        self.journals.values()
    }

    pub fn patents(&self) -> impl Iterator<Item = &PatentRecord> {
        self.patents.values()
    }

    pub fn journal(&self, id: &PublicationId) -> Option<&JournalRecord> {
        self.journals.get(id)
    }

    pub fn patent(&self, id: &PublicationId) -> Option<&PatentRecord> {
        self.patents.get(id)
    }

    pub fn contains(&self, id: &PublicationId) -> bool {
        match id.kind {
            IdKind::Journal => self.journals.contains_key(id),
            IdKind::Patent => self.patents.contains_key(id),
        }
    }

    /// Publication year of any loaded record.
    pub fn year_of(&self, id: &PublicationId) -> Option<i32> {
        match id.kind {
            IdKind::Journal => self.journals.get(id).map(|r| r.year),
            IdKind::Patent => self.patents.get(id).map(|r| r.year),
        }
    }

    /// All loaded ids of one kind, in sorted order.
    pub fn ids(&self, kind: IdKind) -> Vec<&PublicationId> {
        match kind {
            IdKind::Journal => self.journals.keys().collect(),
            IdKind::Patent => self.patents.keys().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.journals.len() + self.patents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn journal_count(&self) -> usize {
        self.journals.len()
    }

    pub fn patent_count(&self) -> usize {
        self.patents.len()
    }
}
