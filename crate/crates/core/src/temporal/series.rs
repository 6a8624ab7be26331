use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TemporalError;
use crate::corpus::{CollectionRegistry, Corpus, IdKind, PublicationId, Side};
use crate::graph::{focal_population, CitationGraph, EdgeKind};

/// Inclusive range of calendar years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: i32,
    pub end: i32,
}

impl Window {
    pub fn new(start: i32, end: i32) -> Result<Self, TemporalError> {
        if start > end {
            return Err(TemporalError::EmptyWindow { start, end });
        }
        Ok(Window { start, end })
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start..=self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub year: i32,
    pub value: Option<f64>,
    pub band_low: Option<f64>,
    pub band_high: Option<f64>,
}

impl SeriesPoint {
    pub fn new(year: i32, value: Option<f64>) -> Self {
        SeriesPoint {
            year,
            value,
            band_low: None,
            band_high: None,
        }
    }
}

/// One value per year over a contiguous window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlySeries {
    pub collection: String,
    pub metric: String,
    /// Component label for breakdown series.
    pub label: Option<String>,
    pub points: Vec<SeriesPoint>,
}

impl YearlySeries {
    pub fn from_fn(collection: &str, metric: &str, window: Window, mut f: impl FnMut(i32) -> Option<f64>) -> Self {
        YearlySeries {
            collection: collection.to_string(),
            metric: metric.to_string(),
            label: None,
            points: window.years().map(|y| SeriesPoint::new(y, f(y))).collect(),
        }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn window(&self) -> Option<Window> {
        Some(Window {
            start: self.points.first()?.year,
            end: self.points.last()?.year,
        })
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        let start = self.points.first()?.year;
        let i = usize::try_from(year - start).ok()?;
        self.points.get(i)?.value
    }

    pub fn values(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Every value multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut s = self.clone();
        for p in &mut s.points {
            p.value = p.value.map(|v| v * k);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Pubs,
    AvgRefs,
    AvgCites,
    AvgCrossRefs,
    AvgCrossCites,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Pubs,
        Metric::AvgRefs,
        Metric::AvgCites,
        Metric::AvgCrossRefs,
        Metric::AvgCrossCites,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Pubs => "pubs",
            Metric::AvgRefs => "avg_refs",
            Metric::AvgCites => "avg_cites",
            Metric::AvgCrossRefs => "avg_cross_refs",
            Metric::AvgCrossCites => "avg_cross_cites",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    References,
    Citations,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::References => "references",
            Direction::Citations => "citations",
        }
    }
}

fn other_kind(kind: IdKind) -> IdKind {
    match kind {
        IdKind::Journal => IdKind::Patent,
        IdKind::Patent => IdKind::Journal,
    }
}

/// Focal publications grouped by publication year.
pub fn population_by_year<'a>(
    corpus: &'a Corpus,
    registry: &CollectionRegistry,
    collection: &str,
) -> Result<BTreeMap<i32, Vec<&'a PublicationId>>, TemporalError> {
    let pop = focal_population(corpus, registry, collection)
        .map_err(|_| TemporalError::UnknownCollection(collection.to_string()))?;
    let mut by_year: BTreeMap<i32, Vec<&PublicationId>> = BTreeMap::new();
    for id in pop {
        if let Some(y) = corpus.year_of(id) {
            by_year.entry(y).or_default().push(id);
        }
    }
    Ok(by_year)
}

fn side_of(registry: &CollectionRegistry, collection: &str) -> Result<Side, TemporalError> {
    registry
        .get(collection)
        .map(|c| c.side)
        .ok_or_else(|| TemporalError::UnknownCollection(collection.to_string()))
}

/// Per-year publication count or per-publication average. Averages are
/// absent for years without publications.
pub fn yearly_series(
    graph: &CitationGraph,
    corpus: &Corpus,
    registry: &CollectionRegistry,
    collection: &str,
    metric: Metric,
    window: Window,
) -> Result<YearlySeries, TemporalError> {
    let window = Window::new(window.start, window.end)?;
    let kind = side_of(registry, collection)?.id_kind();
    let by_year = population_by_year(corpus, registry, collection)?;
    let same = EdgeKind::within(kind);
    let cross_out = EdgeKind::between(kind, other_kind(kind));
    let cross_in = EdgeKind::between(other_kind(kind), kind);
    Ok(YearlySeries::from_fn(collection, metric.as_str(), window, |y| {
        let pubs = by_year.get(&y).map(Vec::as_slice).unwrap_or(&[]);
        let n = pubs.len();
        let total = |f: &dyn Fn(&PublicationId) -> usize| pubs.iter().map(|id| f(id)).sum::<usize>();
        let sum = match metric {
            Metric::Pubs => return Some(n as f64),
            Metric::AvgRefs => total(&|id| graph.out_edges(id).filter(|e| e.kind == same).count()),
            Metric::AvgCites => total(&|id| graph.in_edges(id).filter(|e| e.kind == same).count()),
            Metric::AvgCrossRefs => total(&|id| graph.out_edges(id).filter(|e| e.kind == cross_out).count()),
            Metric::AvgCrossCites => total(&|id| graph.in_edges(id).filter(|e| e.kind == cross_in).count()),
        };
        (n > 0).then(|| sum as f64 / n as f64)
    }))
}

/// Same-kind references or citations per publication, one series per label
/// of the other endpoint. The series sum to the matching average series.
pub fn component_series(
    graph: &CitationGraph,
    corpus: &Corpus,
    registry: &CollectionRegistry,
    collection: &str,
    direction: Direction,
    window: Window,
) -> Result<Vec<YearlySeries>, TemporalError> {
    let window = Window::new(window.start, window.end)?;
    let side = side_of(registry, collection)?;
    let kind = EdgeKind::within(side.id_kind());
    let by_year = population_by_year(corpus, registry, collection)?;
    let metric = match direction {
        Direction::References => Metric::AvgRefs,
        Direction::Citations => Metric::AvgCites,
    };
    let mut counts: BTreeMap<(i32, &str), usize> = BTreeMap::new();
    for (&y, pubs) in by_year.range(window.start..=window.end) {
        for id in pubs {
            let edges: Box<dyn Iterator<Item = _>> = match direction {
                Direction::References => Box::new(graph.out_edges(id).map(|e| (e.kind, &e.dst))),
                Direction::Citations => Box::new(graph.in_edges(id).map(|e| (e.kind, &e.src))),
            };
            for (k, other) in edges {
                if k == kind {
                    *counts.entry((y, registry.classify(other))).or_default() += 1;
                }
            }
        }
    }
    Ok(registry
        .labels(side)
        .iter()
        .map(|label| {
            YearlySeries::from_fn(collection, metric.as_str(), window, |y| {
                let n = by_year.get(&y).map_or(0, Vec::len);
                let c = counts.get(&(y, label.as_str())).copied().unwrap_or(0);
                (n > 0).then(|| c as f64 / n as f64)
            })
            .with_label(label)
        })
        .collect())
}
