//! Four-way comparison of a reference string against a metadata candidate.

use serde::{Deserialize, Serialize};

use super::levenshtein::levenshtein_ratio;
use crate::corpus::RawReference;

const QUOTES: [char; 3] = ['"', '\u{201C}', '\u{201D}'];

/// Cuts `text` right after its last double quotation mark (straight or
/// curly). Text without quotes is returned unchanged.
pub fn truncate_at_last_quote(text: &str) -> &str {
    match text.rfind(QUOTES) {
        Some(pos) => {
            let q = text[pos..].chars().next().map_or(1, char::len_utf8);
            &text[..pos + q]
        }
        None => text,
    }
}

/// A record returned by the metadata service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetadataCandidate {
    pub doi: String,
    pub title: String,
    pub authors: Vec<String>,
}

impl MetadataCandidate {
    fn with_authors(&self, authors: &[String]) -> String {
        let mut parts: Vec<&str> = authors.iter().map(String::as_str).filter(|a| !a.is_empty()).collect();
        if !self.title.is_empty() {
            parts.push(&self.title);
        }
        parts.join(" ")
    }

    /// All authors followed by the title, space separated.
    pub fn all_authors_and_title(&self) -> String {
        self.with_authors(&self.authors)
    }

    pub fn first_author_and_title(&self) -> String {
        self.with_authors(&self.authors[..self.authors.len().min(1)])
    }
}

/// How the four comparison ratios collapse into one figure of merit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Min,
    Max,
}

impl std::str::FromStr for Aggregation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min" => Ok(Aggregation::Min),
            "max" => Ok(Aggregation::Max),
            other => Err(format!("unknown aggregation {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchScore {
    /// full/all-authors, full/first-author, truncated/all-authors,
    /// truncated/first-author.
    pub ratios: [f64; 4],
    pub figure_of_merit: f64,
}

pub fn score_candidate(reference: &RawReference, cand: &MetadataCandidate) -> MatchScore {
    score_candidate_with(reference, cand, Aggregation::Min)
}

pub fn score_candidate_with(
    reference: &RawReference,
    cand: &MetadataCandidate,
    aggregation: Aggregation,
) -> MatchScore {
    score_text(&reference.text, cand, aggregation)
}

/// Scores a bare query string; used where no [`RawReference`] exists.
pub fn score_text(text: &str, cand: &MetadataCandidate, aggregation: Aggregation) -> MatchScore {
    let full = text.trim();
    let truncated = truncate_at_last_quote(full);
    let all = cand.all_authors_and_title();
    let first = cand.first_author_and_title();
    let ratios = [
        levenshtein_ratio(full, &all),
        levenshtein_ratio(full, &first),
        levenshtein_ratio(truncated, &all),
        levenshtein_ratio(truncated, &first),
    ];
    let figure_of_merit = match aggregation {
        Aggregation::Min => ratios.iter().copied().fold(f64::INFINITY, f64::min),
        Aggregation::Max => ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    MatchScore {
        ratios,
        figure_of_merit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(text: &str) -> RawReference {
        RawReference {
            text: text.into(),
            embedded_doi: None,
            embedded_patent: None,
        }
    }

    fn cand(title: &str, authors: &[&str]) -> MetadataCandidate {
        MetadataCandidate {
            doi: "10.1/x".into(),
            title: title.into(),
            authors: authors.iter().map(|a| a.to_string()).collect(),
        }
    }

    #[test]
    fn truncation() {
        assert_eq!(
            truncate_at_last_quote(r#"Smith, J. "Graphene films" Nature 2005"#),
            r#"Smith, J. "Graphene films""#
        );
        assert_eq!(truncate_at_last_quote("no quotes here"), "no quotes here");
        assert_eq!(truncate_at_last_quote(r#"ends "quoted""#), r#"ends "quoted""#);
        assert_eq!(truncate_at_last_quote("A “curly” tail"), "A “curly”");
        assert_eq!(truncate_at_last_quote(""), "");
    }

    #[test]
    fn exact_match_scores_zero() {
        let c = cand("Rise of graphene", &["A. Geim", "K. Novoselov"]);
        let s = score_candidate(&raw("A. Geim K. Novoselov Rise of graphene"), &c);
        assert_eq!(s.figure_of_merit, 0.0);
        assert_eq!(s.ratios[0], 0.0);
    }

    #[test]
    fn missing_title_and_authors_do_not_panic() {
        let c = cand("", &[]);
        let s = score_candidate(&raw("something"), &c);
        assert_eq!(s.figure_of_merit, 1.0);
    }

    #[test]
    fn max_aggregation() {
        let c = cand("Rise of graphene", &["A. Geim", "K. Novoselov"]);
        let r = raw(r#"A. Geim, K. Novoselov "Rise of graphene" Nat. Mater."#);
        let lo = score_candidate_with(&r, &c, Aggregation::Min);
        let hi = score_candidate_with(&r, &c, Aggregation::Max);
        assert_eq!(lo.ratios, hi.ratios);
        assert!(lo.figure_of_merit <= hi.figure_of_merit);
        assert_eq!(hi.figure_of_merit, hi.ratios.iter().cloned().fold(0.0, f64::max));
    }

    proptest! {
        #[test]
        fn trailing_whitespace_invariant(text in "[a-zA-Z\" .,]{1,40}", pad in "[ \t\n]{0,4}") {
            let c = cand("Rise of graphene", &["A. Geim"]);
            let a = score_candidate(&raw(&text), &c);
            let b = score_candidate(&raw(&format!("{text}{pad}")), &c);
            prop_assert_eq!(a, b);
        }
    }
}
