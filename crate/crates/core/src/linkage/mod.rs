//! Resolution of free-text references to DOIs, threshold calibration, and
//! patent numbers cited by journal papers.

mod calibrate;
mod client;
mod levenshtein;
mod otsu;
mod patent_ref;
mod resolve;
mod score;

/// Default accept threshold on the figure of merit.
pub const DEFAULT_THRESHOLD: f64 = 0.281;

pub use calibrate::{
    calibrate_threshold, load_labeled, misclassified_at, strip_doi_suffix, CalibrationError, CalibrationOptions,
    CalibrationSample, LabeledReference, PartialCalibration, ThresholdCalibration, DEFAULT_SAMPLE_SIZE,
    MAX_FAILURE_RATE,
};
pub use client::{
    parse_works_response, works_response_body, ClientConfig, ClientError, HttpTransport, MetadataClient,
    MetadataSource, NoNetwork, Transport, TransportError, CACHE_DIR_ENV, DEFAULT_BASE_URL, METADATA_URL_ENV,
};
pub use levenshtein::{edit_distance, levenshtein_ratio};
pub use otsu::{otsu_split, otsu_threshold, Histogram, OtsuError, DEFAULT_BINS};
pub use patent_ref::{parse_patent_reference, PatentMatch};
pub use resolve::{
    pending_references, resolve_corpus, resolve_reference, resolve_with, summarize, Resolution, ResolutionStatus,
    ResolutionSummary, ResolveOptions,
};
pub use score::{
    score_candidate, score_candidate_with, score_text, truncate_at_last_quote, Aggregation, MatchScore,
    MetadataCandidate,
};
