//! Publication identifiers and region codes.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::CorpusError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IdKind {
    Journal,
    Patent,
}

/// Two-letter upper-case patent office or country code.
///
/// `??` is reserved for affiliations whose region could not be determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionCode([u8; 2]);

impl RegionCode {
    pub const UNKNOWN: RegionCode = RegionCode(*b"??");

    pub fn new(code: &str) -> Result<Self, CorpusError> {
        let bytes = code.trim().as_bytes();
        if bytes.len() != 2 || !bytes.iter().all(u8::is_ascii_alphabetic) {
            return Err(CorpusError::InvalidRegion(code.to_string()));
        }
        Ok(RegionCode([
            bytes[0].to_ascii_uppercase(),
            bytes[1].to_ascii_uppercase(),
        ]))
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII bytes are ever stored.
        std::str::from_utf8(&self.0).unwrap_or("??")
    }

    pub fn is_unknown(&self) -> bool {
        *self == Self::UNKNOWN
    }
}

impl fmt::Display for RegionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for RegionCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RegionCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "??" {
            return Ok(RegionCode::UNKNOWN);
        }
        RegionCode::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Key of a publication: lower-cased DOI for journal papers, region code plus
/// serial number for patents (kind code kept elsewhere).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PublicationId {
    pub kind: IdKind,
    pub value: String,
}

impl PublicationId {
    pub fn journal(doi: &str) -> Result<Self, CorpusError> {
        let value = normalize_doi(doi).ok_or_else(|| CorpusError::InvalidDoi(doi.to_string()))?;
        Ok(PublicationId {
            kind: IdKind::Journal,
            value,
        })
    }

    /// Parses a patent publication number, discarding any kind code.
    pub fn patent(number: &str) -> Result<Self, CorpusError> {
        let parsed = PatentNumber::parse(number).ok_or_else(|| CorpusError::InvalidPatentNumber(number.to_string()))?;
        parsed.into_id()
    }

    pub fn is_journal(&self) -> bool {
        self.kind == IdKind::Journal
    }

    pub fn is_patent(&self) -> bool {
        self.kind == IdKind::Patent
    }

    /// Region of a patent id; `None` for journal ids.
    pub fn region(&self) -> Option<RegionCode> {
        match self.kind {
            IdKind::Patent => RegionCode::new(&self.value[..2]).ok(),
            IdKind::Journal => None,
        }
    }
}

impl fmt::Display for PublicationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

/// Lower-cases a DOI and strips resolver prefixes and whitespace.
///
/// Returns `None` unless the result looks like `prefix/suffix`.
pub fn normalize_doi(raw: &str) -> Option<String> {
    let mut s = raw.trim().to_lowercase();
    for prefix in [
        "https://doi.org/",
        "http://doi.org/",
        "https://dx.doi.org/",
        "http://dx.doi.org/",
        "doi.org/",
        "doi:",
    ] {
        if let Some(rest) = s.strip_prefix(prefix) {
            s = rest.trim().to_string();
            break;
        }
    }
    let (prefix, suffix) = s.split_once('/')?;
    if prefix.is_empty() || suffix.is_empty() || s.chars().any(char::is_whitespace) {
        return None;
    }
    Some(s)
}

/// A patent number split into its parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatentNumber {
    pub region: Option<String>,
    pub digits: String,
    pub kind_code: Option<String>,
}

impl PatentNumber {
    /// Splits `US7409759B2`, `us 7,409,759`, `2008-169255` and similar forms.
    ///
    /// Separators (space, comma, hyphen, slash, dot) are dropped. A trailing
    /// `[A-Z][0-9]?` after the digit block is treated as the kind code.
    pub fn parse(raw: &str) -> Option<Self> {
        let compact: String = raw
            .trim()
            .chars()
            .filter(|c| !matches!(c, ' ' | ',' | '-' | '/' | '.'))
            .map(|c| c.to_ascii_uppercase())
            .collect();
        let bytes = compact.as_bytes();
        if bytes.is_empty() || !bytes.is_ascii() {
            return None;
        }

        let mut pos = 0;
        let region = if bytes.len() >= 2 && bytes[0].is_ascii_alphabetic() && bytes[1].is_ascii_alphabetic() {
            pos = 2;
            Some(compact[..2].to_string())
        } else if bytes[0].is_ascii_alphabetic() {
            return None;
        } else {
            None
        };

        let digit_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let digits = compact[digit_start..pos].to_string();
        if digits.is_empty() {
            return None;
        }

        let rest = &compact[pos..];
        let kind_code = match rest.as_bytes() {
            [] => None,
            [l] if l.is_ascii_alphabetic() => Some(rest.to_string()),
            [l, d] if l.is_ascii_alphabetic() && d.is_ascii_digit() => Some(rest.to_string()),
            _ => return None,
        };

        Some(PatentNumber {
            region,
            digits,
            kind_code,
        })
    }

    /// Key used for matching when the kind code is ignored.
    pub fn key(&self) -> String {
        format!("{}{}", self.region.as_deref().unwrap_or(""), self.digits)
    }

    pub fn into_id(self) -> Result<PublicationId, CorpusError> {
        let region = self
            .region
            .as_deref()
            .ok_or_else(|| CorpusError::InvalidPatentNumber(self.digits.clone()))?;
        if self.digits.len() < 4 {
            return Err(CorpusError::InvalidPatentNumber(self.key()));
        }
        Ok(PublicationId {
            kind: IdKind::Patent,
            value: format!("{region}{}", self.digits),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doi_normalization() {
        assert_eq!(
            normalize_doi("  https://doi.org/10.1038/NMAT1849 ").as_deref(),
            Some("10.1038/nmat1849")
        );
        assert_eq!(normalize_doi("doi:10.1/X").as_deref(), Some("10.1/x"));
        assert_eq!(normalize_doi("10.1038"), None);
        assert_eq!(normalize_doi(""), None);
        assert_eq!(normalize_doi("10.1/a b"), None);
    }

    #[test]
    fn patent_number_forms() {
        let p = PatentNumber::parse("US7409759B2").unwrap();
        assert_eq!(p.region.as_deref(), Some("US"));
        assert_eq!(p.digits, "7409759");
        assert_eq!(p.kind_code.as_deref(), Some("B2"));

        let p = PatentNumber::parse("jp 2008-169255 A").unwrap();
        assert_eq!(p.key(), "JP2008169255");
        assert_eq!(p.kind_code.as_deref(), Some("A"));

        let p = PatentNumber::parse("3330697").unwrap();
        assert_eq!(p.region, None);
        assert!(p.into_id().is_err());

        assert!(PatentNumber::parse("USABC").is_none());
        assert!(PatentNumber::parse("US123X45").is_none());
    }

    #[test]
    fn patent_id_invariants() {
        let id = PublicationId::patent("cn101234567a").unwrap();
        assert_eq!(id.value, "CN101234567");
        assert_eq!(id.region().unwrap().as_str(), "CN");
        assert!(PublicationId::patent("US123").is_err());
    }

    #[test]
    fn region_code() {
        assert_eq!(RegionCode::new("us").unwrap().as_str(), "US");
        assert!(RegionCode::new("USA").is_err());
        assert!(RegionCode::new("1A").is_err());
        let json = serde_json::to_string(&RegionCode::UNKNOWN).unwrap();
        assert_eq!(json, "\"??\"");
        let back: RegionCode = serde_json::from_str(&json).unwrap();
        assert!(back.is_unknown());
    }
}
