use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::ids::{normalize_doi, PatentNumber, PublicationId, RegionCode};

static EMBEDDED_DOI: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"(?i)\b10\.\d{4,9}/[^\s"<>]+"#).unwrap());

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Affiliation {
    pub raw: String,
    pub region: RegionCode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Author {
    /// Normalized "surname, initials", lower-cased.
    pub name: String,
    pub affiliations: Vec<Affiliation>,
}

/// Lower-cases, trims and collapses internal whitespace.
pub fn normalize_author_name(name: &str) -> String {
    name.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// A reference exactly as it appears in a citing record.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawReference {
    pub text: String,
    pub embedded_doi: Option<String>,
    pub embedded_patent: Option<String>,
}

impl RawReference {
    /// Builds a reference from free text, picking up any DOI written inside it.
    pub fn from_text(text: &str) -> Option<Self> {
        let text = text.trim();
        if text.is_empty() {
            return None;
        }
        Some(RawReference {
            text: text.to_string(),
            embedded_doi: find_embedded_doi(text),
            embedded_patent: None,
        })
    }
}

/// First DOI-looking token inside a reference string, normalized.
pub fn find_embedded_doi(text: &str) -> Option<String> {
    let m = EMBEDDED_DOI.find(text)?;
    let trimmed = m.as_str().trim_end_matches(['.', ',', ';', ')', ']', '\'']);
    normalize_doi(trimmed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub id: PublicationId,
    pub year: i32,
    pub title: String,
    pub authors: Vec<Author>,
    pub raw_refs: Vec<RawReference>,
    pub funding_acknowledged: bool,
}

impl JournalRecord {
    pub fn first_author(&self) -> Option<&Author> {
        self.authors.first()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatentRecord {
    pub id: PublicationId,
    pub region: RegionCode,
    pub kind_code: Option<String>,
    pub year: i32,
    pub language: String,
    pub patent_refs: Vec<PublicationId>,
    pub npl_refs: Vec<RawReference>,
    /// DOIs already attached to non-patent references in the source export.
    pub resolved_npl: Vec<PublicationId>,
}

/// Parses a patent reference as listed in a patent record. Unlike journal
/// references these always carry their region code.
pub(crate) fn parse_patent_ref(raw: &str) -> Option<PublicationId> {
    PatentNumber::parse(raw)?.into_id().ok()
}
