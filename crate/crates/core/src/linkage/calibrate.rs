//! Threshold calibration on references whose DOI is known.
//!
//! Each labelled reference has its DOI tail removed, is sent as a query, and
//! the top candidate is scored. Correct and incorrect matches form two
//! populations on the figure-of-merit axis; Otsu's method splits them.

use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::client::MetadataSource;
use super::otsu::{otsu_threshold, Histogram, OtsuError, DEFAULT_BINS};
use super::score::{score_text, Aggregation};
use crate::corpus::normalize_doi;

pub const DEFAULT_SAMPLE_SIZE: usize = 200;
/// Fraction of failed queries above which calibration is abandoned.
pub const MAX_FAILURE_RATE: f64 = 0.10;

static DOI_MARKER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\bdoi\b|\b10\.\d{4,9}/").unwrap());

/// Removes everything from the first "DOI" marker (or bare DOI) onwards.
pub fn strip_doi_suffix(text: &str) -> &str {
    match DOI_MARKER.find(text) {
        Some(m) => text[..m.start()].trim_end_matches([' ', ',', ';', '.', ':']).trim(),
        None => text.trim(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledReference {
    pub text: String,
    pub doi: String,
}

/// Reads a JSONL sample of `{"text": .., "doi": ..}` lines.
pub fn load_labeled(path: impl AsRef<Path>) -> Result<Vec<LabeledReference>, String> {
    let path = path.as_ref();
    let body = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in body.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut r: LabeledReference =
            serde_json::from_str(line).map_err(|e| format!("{}:{}: {e}", path.display(), i + 1))?;
        r.doi = normalize_doi(&r.doi).ok_or_else(|| format!("{}:{}: invalid DOI", path.display(), i + 1))?;
        out.push(r);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSample {
    pub query: String,
    pub true_doi: String,
    pub candidate_doi: Option<String>,
    pub figure_of_merit: f64,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCalibration {
    pub samples: Vec<CalibrationSample>,
    pub histogram: Histogram,
    pub threshold: f64,
    pub failures: usize,
}

impl ThresholdCalibration {
    /// Samples on the wrong side of the threshold.
    pub fn misclassified(&self) -> usize {
        misclassified_at(&self.samples, self.threshold)
    }

    pub fn accuracy(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        1.0 - self.misclassified() as f64 / self.samples.len() as f64
    }
}

pub fn misclassified_at(samples: &[CalibrationSample], threshold: f64) -> usize {
    samples
        .iter()
        .filter(|s| (s.figure_of_merit < threshold) != s.correct)
        .count()
}

/// Whatever was scored before calibration stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialCalibration {
    pub samples: Vec<CalibrationSample>,
    pub failures: usize,
    pub attempted: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalibrationError {
    #[error("empty calibration sample")]
    Empty,
    #[error("{} of {} queries failed", .0.failures, .0.attempted)]
    TooManyFailures(Box<PartialCalibration>),
    #[error("{1}")]
    Degenerate(Box<PartialCalibration>, OtsuError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub bins: usize,
    pub aggregation: Aggregation,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            bins: DEFAULT_BINS,
            aggregation: Aggregation::Min,
        }
    }
}

pub fn calibrate_threshold(
    labeled: &[LabeledReference],
    source: &dyn MetadataSource,
    opts: &CalibrationOptions,
) -> Result<ThresholdCalibration, CalibrationError> {
    if labeled.is_empty() {
        return Err(CalibrationError::Empty);
    }
    let outcomes: Vec<Option<CalibrationSample>> = labeled
        .par_iter()
        .map(|l| {
            let query = strip_doi_suffix(&l.text).to_string();
            let candidates = source.query(&query, 1).ok()?;
            // An empty result is a wrong answer, not a failed query.
            let sample = match candidates.first() {
                Some(c) => CalibrationSample {
                    figure_of_merit: score_text(&query, c, opts.aggregation).figure_of_merit,
                    correct: c.doi == l.doi,
                    candidate_doi: Some(c.doi.clone()),
                    true_doi: l.doi.clone(),
                    query,
                },
                None => CalibrationSample {
                    figure_of_merit: 1.0,
                    correct: false,
                    candidate_doi: None,
                    true_doi: l.doi.clone(),
                    query,
                },
            };
            Some(sample)
        })
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_none()).count();
    let samples: Vec<CalibrationSample> = outcomes.into_iter().flatten().collect();
    let partial = || {
        Box::new(PartialCalibration {
            samples: samples.clone(),
            failures,
            attempted: labeled.len(),
        })
    };
    if failures as f64 > MAX_FAILURE_RATE * labeled.len() as f64 {
        return Err(CalibrationError::TooManyFailures(partial()));
    }
    let histogram = Histogram::from_values(samples.iter().map(|s| s.figure_of_merit), opts.bins);
    let threshold = otsu_threshold(&histogram).map_err(|e| CalibrationError::Degenerate(partial(), e))?;
    Ok(ThresholdCalibration {
        samples,
        histogram,
        threshold,
        failures,
    })
}
