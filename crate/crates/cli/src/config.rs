//! Flat `key = value` project configuration.
//!
//! Precedence is command-line flags, then the config file, then defaults.
//! Relative paths in the file are resolved against the file's directory;
//! relative paths given on the command line against the working directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use citegraph::linkage::Aggregation;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("journal_records", ""),
    ("patent_records", ""),
    ("collections_dir", ""),
    ("calibration_sample", ""),
    ("window_start", "2004"),
    ("window_end", "2017"),
    ("horizon", "4"),
    ("threshold", "0.281"),
    ("aggregation", "min"),
    ("top_candidates", "1"),
    ("max_lag", "25"),
    ("top_k", "10"),
    ("flow_regions", "6"),
    ("seed", "0"),
    ("sample_size", "1000"),
    ("calibration_bins", "256"),
    ("per_year_refs", "false"),
    ("focal_science", "G-S"),
    ("focal_technology", "G-T"),
    ("neighbour_science", "NT-S"),
    ("neighbour_technology", "NT-T"),
    ("metadata_mode", ""),
    ("metadata_fixtures", ""),
    ("metadata_url", ""),
    ("cache_dir", ""),
    ("rate_limit", "5"),
    ("out", "out"),
];

const PATH_KEYS: [&str; 7] = [
    "journal_records",
    "patent_records",
    "collections_dir",
    "calibration_sample",
    "metadata_fixtures",
    "cache_dir",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetadataMode {
    Fixture,
    Live,
}

/// Raw merged settings plus anything that failed to parse.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub values: BTreeMap<String, String>,
    /// Values as written, before path resolution.
    pub given: BTreeMap<String, String>,
    pub unknown_keys: Vec<String>,
    pub syntax_errors: Vec<String>,
    pub file: Option<PathBuf>,
}

impl RawConfig {
    pub fn defaults() -> Self {
        let values: BTreeMap<String, String> = DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        RawConfig {
            given: values.clone(),
            values,
            ..RawConfig::default()
        }
    }

    /// Layers a config file over the current values.
    pub fn load_file(&mut self, path: &Path) -> Result<(), String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        self.file = Some(path.to_path_buf());
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                self.syntax_errors
                    .push(format!("{}:{}: expected key = value", path.display(), i + 1));
                continue;
            };
            self.set(k.trim(), v.trim(), base);
        }
        Ok(())
    }

    /// Sets one key; relative paths resolve against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) {
        if !self.values.contains_key(key) {
            self.unknown_keys.push(key.to_string());
            return;
        }
        let v = if PATH_KEYS.contains(&key) && !value.is_empty() && Path::new(value).is_relative() {
            base.join(value).to_string_lossy().into_owned()
        } else {
            value.to_string()
        };
        self.given.insert(key.to_string(), value.to_string());
        self.values.insert(key.to_string(), v);
    }

    fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct ProjectConfig {
    pub journal_records: PathBuf,
    pub patent_records: PathBuf,
    pub collections_dir: PathBuf,
    pub calibration_sample: Option<PathBuf>,
    pub window_start: i32,
    pub window_end: i32,
    pub horizon: usize,
    pub threshold: f64,
    pub aggregation: Aggregation,
    pub top_candidates: usize,
    pub max_lag: usize,
    pub top_k: usize,
    pub flow_regions: usize,
    pub seed: u64,
    pub sample_size: usize,
    pub calibration_bins: usize,
    pub per_year_refs: bool,
    pub focal_science: String,
    pub focal_technology: String,
    pub neighbour_science: String,
    pub neighbour_technology: String,
    pub metadata_mode: MetadataMode,
    pub metadata_fixtures: Option<PathBuf>,
    pub metadata_url: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub rate_limit: f64,
    pub out: PathBuf,
    /// Effective key/value pairs, for the run manifest.
    pub snapshot: BTreeMap<String, String>,
}

/// Every problem found in a configuration. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub missing_paths: Vec<String>,
    pub violations: Vec<String>,
    pub unknown_keys: Vec<String>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.missing_paths.is_empty() && self.violations.is_empty() && self.unknown_keys.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(self.missing_paths.iter().map(|p| format!("missing path: {p}")));
        out.extend(self.violations.iter().cloned());
        out.extend(self.unknown_keys.iter().map(|k| format!("unknown key: {k}")));
        out
    }
}

fn parse_num<T: std::str::FromStr>(raw: &RawConfig, key: &str, report: &mut ValidationReport) -> Option<T> {
    let v = raw.get(key);
    match v.parse() {
        Ok(x) => Some(x),
        Err(_) => {
            report.violations.push(format!("{key}: cannot parse {v:?}"));
            None
        }
    }
}

fn opt_path(raw: &RawConfig, key: &str) -> Option<PathBuf> {
    let v = raw.get(key);
    (!v.is_empty()).then(|| PathBuf::from(v))
}

/// Checks paths, ranges and keys without side effects, returning the typed
/// config when nothing is wrong.
pub fn validate(raw: &RawConfig) -> (Option<ProjectConfig>, ValidationReport) {
    let mut report = ValidationReport {
        unknown_keys: raw.unknown_keys.clone(),
        violations: raw.syntax_errors.clone(),
        ..ValidationReport::default()
    };
    let require = |key: &str, want_dir: bool, report: &mut ValidationReport| -> PathBuf {
        let p = opt_path(raw, key);
        match &p {
            None => report.missing_paths.push(format!("{key} (not set)")),
            Some(p) if want_dir && !p.is_dir() => report.missing_paths.push(format!("{key}: {}", p.display())),
            Some(p) if !want_dir && !p.is_file() => report.missing_paths.push(format!("{key}: {}", p.display())),
            _ => {}
        }
        p.unwrap_or_default()
    };
    let journal_records = require("journal_records", false, &mut report);
    let patent_records = require("patent_records", false, &mut report);
    let collections_dir = require("collections_dir", true, &mut report);
    let calibration_sample = opt_path(raw, "calibration_sample");
    if let Some(p) = &calibration_sample {
        if !p.is_file() {
            report
                .missing_paths
                .push(format!("calibration_sample: {}", p.display()));
        }
    }
    let metadata_fixtures = opt_path(raw, "metadata_fixtures");
    if let Some(p) = &metadata_fixtures {
        if !p.is_dir() {
            report.missing_paths.push(format!("metadata_fixtures: {}", p.display()));
        }
    }
    let metadata_mode = match raw.get("metadata_mode") {
        "" if metadata_fixtures.is_some() => MetadataMode::Fixture,
        "" | "live" => MetadataMode::Live,
        "fixture" => {
            if metadata_fixtures.is_none() {
                report
                    .violations
                    .push("metadata_mode fixture requires metadata_fixtures".to_string());
            }
            MetadataMode::Fixture
        }
        other => {
            report
                .violations
                .push(format!("metadata_mode: expected live or fixture, got {other:?}"));
            MetadataMode::Live
        }
    };

    let window_start = parse_num::<i32>(raw, "window_start", &mut report);
    let window_end = parse_num::<i32>(raw, "window_end", &mut report);
    if let (Some(s), Some(e)) = (window_start, window_end) {
        if s > e {
            report.violations.push(format!("window_start {s} after window_end {e}"));
        }
    }
    let threshold = parse_num::<f64>(raw, "threshold", &mut report);
    if let Some(t) = threshold {
        if !(t > 0.0 && t < 1.0) {
            report.violations.push("threshold out of (0,1)".to_string());
        }
    }
    let aggregation = match raw.get("aggregation").parse::<Aggregation>() {
        Ok(a) => Some(a),
        Err(e) => {
            report.violations.push(format!("aggregation: {e}"));
            None
        }
    };
    let per_year_refs = match raw.get("per_year_refs") {
        "true" => Some(true),
        "false" => Some(false),
        other => {
            report
                .violations
                .push(format!("per_year_refs: expected true or false, got {other:?}"));
            None
        }
    };
    let horizon = parse_num::<usize>(raw, "horizon", &mut report);
    let top_candidates = parse_num::<usize>(raw, "top_candidates", &mut report);
    let max_lag = parse_num::<usize>(raw, "max_lag", &mut report);
    let top_k = parse_num::<usize>(raw, "top_k", &mut report);
    let flow_regions = parse_num::<usize>(raw, "flow_regions", &mut report);
    let seed = parse_num::<u64>(raw, "seed", &mut report);
    let sample_size = parse_num::<usize>(raw, "sample_size", &mut report);
    let calibration_bins = parse_num::<usize>(raw, "calibration_bins", &mut report);
    let rate_limit = parse_num::<f64>(raw, "rate_limit", &mut report);
    if top_candidates == Some(0) {
        report.violations.push("top_candidates must be at least 1".to_string());
    }
    if calibration_bins.is_some_and(|b| b < 2) {
        report
            .violations
            .push("calibration_bins must be at least 2".to_string());
    }
    if rate_limit.is_some_and(|r| r.is_nan() || r < 0.0) {
        report.violations.push("rate_limit must be non-negative".to_string());
    }

    if !report.is_empty() {
        return (None, report);
    }
    let snapshot = raw.given.clone();
    let cfg = ProjectConfig {
        journal_records,
        patent_records,
        collections_dir,
        calibration_sample,
        window_start: window_start.unwrap_or_default(),
        window_end: window_end.unwrap_or_default(),
        horizon: horizon.unwrap_or_default(),
        threshold: threshold.unwrap_or_default(),
        aggregation: aggregation.unwrap_or_default(),
        top_candidates: top_candidates.unwrap_or(1),
        max_lag: max_lag.unwrap_or_default(),
        top_k: top_k.unwrap_or_default(),
        flow_regions: flow_regions.unwrap_or_default(),
        seed: seed.unwrap_or_default(),
        sample_size: sample_size.unwrap_or_default(),
        calibration_bins: calibration_bins.unwrap_or(256),
        per_year_refs: per_year_refs.unwrap_or_default(),
        focal_science: raw.get("focal_science").to_string(),
        focal_technology: raw.get("focal_technology").to_string(),
        neighbour_science: raw.get("neighbour_science").to_string(),
        neighbour_technology: raw.get("neighbour_technology").to_string(),
        metadata_mode,
        metadata_fixtures,
        metadata_url: Some(raw.get("metadata_url").to_string()).filter(|s| !s.is_empty()),
        cache_dir: opt_path(raw, "cache_dir"),
        rate_limit: rate_limit.unwrap_or_default(),
        out: opt_path(raw, "out").unwrap_or_else(|| PathBuf::from("out")),
        snapshot,
    };
    (Some(cfg), report)
}
