//! Typed citation graph and aggregate inflow/outflow reports.

mod audit;
mod build;
mod reports;

pub use audit::{overlap_audit, seeded_sample, OverlapAuditOptions, OverlapAuditReport, PatentOverlap};
pub use build::{build_graph, BuildDiagnostics, CitationEdge, CitationGraph, EdgeKind};
pub use reports::{
    bowtie, breakdown, cross_domain, directional_ratio, focal_population, BowtieReport, CrossBreakdown,
    CrossDomainReport, DirectionalRatio, LabelCount, ReportError, COUNTING,
};
