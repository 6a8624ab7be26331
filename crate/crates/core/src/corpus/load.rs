//! JSONL ingestion for journal and patent exports.
//!
//! Lines that fail validation are rejected individually and reported with
//! their 1-based line number; only an unreadable file is fatal.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ids::{normalize_doi, PatentNumber, PublicationId, RegionCode};
use super::records::{
    normalize_author_name, parse_patent_ref, Affiliation, Author, JournalRecord, PatentRecord, RawReference,
};
use super::CorpusError;
use crate::geo::gazetteer;

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub rejections: Vec<Rejection>,
    /// Individual references dropped from otherwise valid records.
    pub dropped_refs: usize,
}

impl RejectionReport {
    pub fn is_empty(&self) -> bool {
        self.rejections.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rejections.len()
    }

    pub fn duplicates(&self) -> usize {
        self.rejections
            .iter()
            .filter(|r| r.reason.starts_with("duplicate"))
            .count()
    }

    fn reject(&mut self, line: usize, reason: impl Into<String>) {
        self.rejections.push(Rejection {
            line,
            reason: reason.into(),
        });
    }
}

#[derive(Debug, Deserialize)]
struct JournalLine {
    doi: Option<String>,
    year: Option<i64>,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    authors: Vec<AuthorLine>,
    #[serde(default)]
    refs: Vec<RefLine>,
    #[serde(default)]
    funded: Option<bool>,
}

#[derive(Debug, Deserialize)]
struct AuthorLine {
    name: Option<String>,
    #[serde(default)]
    affiliations: Vec<AffiliationLine>,
}

#[derive(Debug, Deserialize)]
struct AffiliationLine {
    #[serde(default)]
    raw: Option<String>,
    #[serde(default)]
    region: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RefLine {
    #[serde(default)]
    raw: Option<String>,
    #[serde(default)]
    doi: Option<String>,
    #[serde(default)]
    patent: Option<String>,
}

#[derive(Debug, Deserialize)]
struct PatentLine {
    pub_number: Option<String>,
    #[serde(default)]
    kind: Option<String>,
    year: Option<i64>,
    #[serde(default)]
    language: Option<String>,
    #[serde(default)]
    patent_refs: Vec<String>,
    #[serde(default)]
    npl_refs: Vec<String>,
    #[serde(default)]
    resolved_npl: Vec<String>,
}

fn check_year(year: Option<i64>) -> Result<i32, &'static str> {
    let year = year.ok_or("missing year")?;
    if !(MIN_YEAR as i64..=MAX_YEAR as i64).contains(&year) {
        return Err("year out of range");
    }
    Ok(year as i32)
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, line));
    }
    Ok(out)
}

fn convert_affiliation(a: AffiliationLine) -> Affiliation {
    let raw = a.raw.unwrap_or_default();
    let region = a
        .region
        .as_deref()
        .and_then(|r| RegionCode::new(r).ok())
        .or_else(|| gazetteer::region_from_affiliation(&raw))
        .unwrap_or(RegionCode::UNKNOWN);
    Affiliation { raw, region }
}

fn convert_ref(r: RefLine) -> Option<RawReference> {
    let embedded_doi = r.doi.as_deref().and_then(normalize_doi);
    let embedded_patent = r.patent.map(|p| p.trim().to_string()).filter(|p| !p.is_empty());
    let text = r
        .raw
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .or_else(|| embedded_doi.clone())
        .or_else(|| embedded_patent.clone())?;
    Some(RawReference {
        text,
        embedded_doi,
        embedded_patent,
    })
}

fn convert_journal(line: JournalLine, report: &mut RejectionReport) -> Result<JournalRecord, String> {
    let doi = line.doi.filter(|d| !d.trim().is_empty()).ok_or("missing doi")?;
    let id = PublicationId::journal(&doi).map_err(|_| "invalid doi".to_string())?;
    let year = check_year(line.year)?;

    let mut authors: Vec<Author> = Vec::with_capacity(line.authors.len());
    for a in line.authors {
        let name = normalize_author_name(a.name.as_deref().unwrap_or(""));
        if name.is_empty() {
            continue;
        }
        // Repeated names within one paper are the same author.
        if authors.iter().any(|x| x.name == name) {
            continue;
        }
        authors.push(Author {
            name,
            affiliations: a.affiliations.into_iter().map(convert_affiliation).collect(),
        });
    }

    let mut raw_refs = Vec::with_capacity(line.refs.len());
    for r in line.refs {
        match convert_ref(r) {
            Some(r) if !raw_refs.contains(&r) => raw_refs.push(r),
            Some(_) => {}
            None => report.dropped_refs += 1,
        }
    }

    Ok(JournalRecord {
        id,
        year,
        title: line.title.unwrap_or_default(),
        authors,
        raw_refs,
        funding_acknowledged: line.funded.unwrap_or(false),
    })
}

fn convert_patent(line: PatentLine, report: &mut RejectionReport) -> Result<PatentRecord, String> {
    let number = line
        .pub_number
        .filter(|n| !n.trim().is_empty())
        .ok_or("missing publication number")?;
    let parsed = PatentNumber::parse(&number).ok_or("invalid publication number")?;
    let kind_code = line
        .kind
        .map(|k| k.trim().to_uppercase())
        .filter(|k| !k.is_empty())
        .or_else(|| parsed.kind_code.clone());
    let id = parsed.into_id().map_err(|_| "invalid publication number".to_string())?;
    let year = check_year(line.year)?;
    let region = id.region().ok_or("invalid publication number")?;

    let language = line
        .language
        .map(|l| l.trim().to_uppercase())
        .filter(|l| l.len() == 2 && l.bytes().all(|b| b.is_ascii_alphabetic()))
        .unwrap_or_else(|| "XX".to_string());

    let mut patent_refs = Vec::with_capacity(line.patent_refs.len());
    for r in &line.patent_refs {
        match parse_patent_ref(r) {
            Some(pid) if pid != id && !patent_refs.contains(&pid) => patent_refs.push(pid),
            Some(_) => {}
            None => report.dropped_refs += 1,
        }
    }

    let mut npl_refs: Vec<RawReference> = Vec::with_capacity(line.npl_refs.len());
    for r in &line.npl_refs {
        match RawReference::from_text(r) {
            Some(r) if !npl_refs.contains(&r) => npl_refs.push(r),
            Some(_) => {}
            None => report.dropped_refs += 1,
        }
    }

    let mut resolved_npl = Vec::new();
    for d in &line.resolved_npl {
        match PublicationId::journal(d) {
            Ok(pid) if !resolved_npl.contains(&pid) => resolved_npl.push(pid),
            Ok(_) => {}
            Err(_) => report.dropped_refs += 1,
        }
    }

    Ok(PatentRecord {
        id,
        region,
        kind_code,
        year,
        language,
        patent_refs,
        npl_refs,
        resolved_npl,
    })
}

fn load_with<L, R>(
    path: &Path,
    convert: impl Fn(L, &mut RejectionReport) -> Result<R, String>,
    id_of: impl Fn(&R) -> &PublicationId,
) -> Result<(Vec<R>, RejectionReport), CorpusError>
where
    L: for<'de> Deserialize<'de>,
{
    let mut report = RejectionReport::default();
    let mut records = Vec::new();
    let mut seen: HashMap<PublicationId, usize> = HashMap::new();

    for (lineno, text) in read_lines(path)? {
        let parsed: L = match serde_json::from_str(&text) {
            Ok(p) => p,
            Err(e) => {
                report.reject(lineno, format!("malformed: {e}"));
                continue;
            }
        };
        // Reference drops only count for records that are kept.
        let mut scratch = RejectionReport::default();
        match convert(parsed, &mut scratch) {
            Ok(rec) => {
                let id = id_of(&rec).clone();
                if let Some(first) = seen.get(&id) {
                    log::warn!("{}:{lineno}: duplicate of line {first}", path.display());
                    report.reject(lineno, format!("duplicate of line {first}"));
                    continue;
                }
                seen.insert(id, lineno);
                report.dropped_refs += scratch.dropped_refs;
                records.push(rec);
            }
            Err(reason) => report.reject(lineno, reason),
        }
    }
    Ok((records, report))
}

/// Loads a journal JSONL export.
pub fn load_journal_records(path: impl AsRef<Path>) -> Result<(Vec<JournalRecord>, RejectionReport), CorpusError> {
    load_with::<JournalLine, _>(path.as_ref(), convert_journal, |r| &r.id)
}

/// Loads a patent JSONL export.
pub fn load_patent_records(path: impl AsRef<Path>) -> Result<(Vec<PatentRecord>, RejectionReport), CorpusError> {
    load_with::<PatentLine, _>(path.as_ref(), convert_patent, |r| &r.id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    fn journal_line(doi: &str, year: Option<i32>) -> String {
        let year = year.map(|y| y.to_string()).unwrap_or_else(|| "null".into());
        format!(
            r#"{{"doi": "{doi}", "year": {year}, "title": "t", "authors": [{{"name": "Geim, A.", "affiliations": [{{"raw": "Univ Manchester, Manchester, England", "region": "GB"}}]}}], "refs": [{{"raw": "x", "doi": "10.1/A", "patent": null}}], "funded": true}}"#
        )
    }

    #[test]
    fn empty_file() {
        let f = write_tmp(&[]);
        let (recs, rep) = load_journal_records(f.path()).unwrap();
        assert!(recs.is_empty());
        assert!(rep.is_empty());
    }

    #[test]
    fn ten_lines_two_missing_year() {
        let lines: Vec<String> = (0..10)
            .map(|i| {
                journal_line(
                    &format!("10.1000/p{i}"),
                    if i == 3 || i == 7 { None } else { Some(2010) },
                )
            })
            .collect();
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let f = write_tmp(&refs);
        let (recs, rep) = load_journal_records(f.path()).unwrap();
        assert_eq!(recs.len(), 8);
        assert_eq!(rep.len(), 2);
        assert_eq!(
            rep.rejections[0],
            Rejection {
                line: 4,
                reason: "missing year".into()
            }
        );
        assert_eq!(rep.rejections[1].line, 8);
        assert!(rep.rejections.iter().all(|r| r.reason == "missing year"));
        assert_eq!(recs[0].raw_refs[0].embedded_doi.as_deref(), Some("10.1/a"));
    }

    #[test]
    fn malformed_and_missing_doi_are_record_level() {
        let good = journal_line("10.1000/ok", Some(2011));
        let f = write_tmp(&[
            "{not json",
            r#"{"year": 2010}"#,
            &good,
            r#"{"doi": "nodoi", "year": 2010}"#,
        ]);
        let (recs, rep) = load_journal_records(f.path()).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(rep.rejections[0].reason.starts_with("malformed"));
        assert_eq!(rep.rejections[1].reason, "missing doi");
        assert_eq!(rep.rejections[2].reason, "invalid doi");
    }

    #[test]
    fn unreadable_file_is_fatal() {
        assert!(matches!(
            load_journal_records("/nonexistent/definitely/missing.jsonl"),
            Err(CorpusError::Io { .. })
        ));
    }

    #[test]
    fn patent_without_year_rejected() {
        let f = write_tmp(&[
            r#"{"pub_number": "US1234567", "kind": null, "language": "EN", "patent_refs": [], "npl_refs": [], "resolved_npl": []}"#,
        ]);
        let (recs, rep) = load_patent_records(f.path()).unwrap();
        assert!(recs.is_empty());
        assert_eq!(rep.rejections[0].reason, "missing year");
    }

    #[test]
    fn patent_duplicates_collapse() {
        let a = r#"{"pub_number": "US1234567B2", "kind": null, "year": 2010, "language": "en", "patent_refs": ["CN1000001A", "bad"], "npl_refs": ["Geim A, \"Rise\" 2007"], "resolved_npl": ["10.1/x"]}"#;
        let b = r#"{"pub_number": "US1234567A1", "kind": "A1", "year": 2011, "language": "EN", "patent_refs": [], "npl_refs": [], "resolved_npl": []}"#;
        let f = write_tmp(&[a, b, a]);
        let (recs, rep) = load_patent_records(f.path()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(rep.duplicates(), 2);
        assert_eq!(rep.rejections[0].reason, "duplicate of line 1");
        let p = &recs[0];
        assert_eq!(p.id.value, "US1234567");
        assert_eq!(p.kind_code.as_deref(), Some("B2"));
        assert_eq!(p.region.as_str(), "US");
        assert_eq!(p.language, "EN");
        assert_eq!(p.year, 2010);
        assert_eq!(p.patent_refs.len(), 1);
        assert_eq!(rep.dropped_refs, 1);
    }

    #[test]
    fn affiliation_region_falls_back_to_gazetteer() {
        let line = r#"{"doi": "10.1/a", "year": 2012, "title": "t", "authors": [{"name": "Li, X.", "affiliations": [{"raw": "Tsinghua Univ, Beijing, Peoples R China", "region": null}, {"raw": "Nowhere Inst", "region": ""}]}], "refs": [], "funded": false}"#;
        let f = write_tmp(&[line]);
        let (recs, _) = load_journal_records(f.path()).unwrap();
        let affs = &recs[0].authors[0].affiliations;
        assert_eq!(affs[0].region.as_str(), "CN");
        assert!(affs[1].region.is_unknown());
    }
}
