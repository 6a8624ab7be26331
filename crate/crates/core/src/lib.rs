//! Bibliometric analysis of journal and patent corpora: reference linkage,
//! typed citation graphs, temporal interest indicators and regional flows.

pub mod corpus;
pub mod geo;
pub mod graph;
pub mod linkage;
pub mod report;
pub mod temporal;
