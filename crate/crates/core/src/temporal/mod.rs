//! Yearly series, citation profiles, growth extrapolation and the
//! expected-citation model behind the interest ratio.

mod growth;
mod profile;
mod series;
mod simulate;

pub use growth::{extrapolate, fit_growth, fit_growth_points, Forecast, GrowthModel, DEFAULT_HORIZON};
pub use profile::{citation_profile, percentile, Band, CitationProfile, DEFAULT_MAX_LAG};
pub use series::{
    component_series, population_by_year, yearly_series, Direction, Metric, SeriesPoint, Window, YearlySeries,
};
pub use simulate::{
    expected_citations, future_citation_bands, interest_ratio, profile_band, publication_counts, reference_mix,
    BandCombination, BandInputs, CountTable, CountVariant, ExpectedOptions, FutureBands, InterestPoint, InterestSeries,
    MixRow, ReferenceMix,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TemporalError {
    #[error("empty window {start}..={end}")]
    EmptyWindow { start: i32, end: i32 },
    #[error("unknown collection {0:?}")]
    UnknownCollection(String),
    #[error("growth fit needs at least 3 years, got {0}")]
    TooFewPoints(usize),
    #[error("log of zero: no publications in {0}")]
    LogOfZero(i32),
    #[error("{0}")]
    Numeric(String),
    #[error("no citation profile for contributing collection {0:?}")]
    MissingProfile(String),
    #[error("no forecast for contributing collection {0:?}")]
    MissingForecast(String),
    #[error("series windows differ")]
    WindowMismatch,
}
