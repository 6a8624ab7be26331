use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{CollectionRegistry, Corpus, IdKind, PublicationId, RawReference};
use crate::linkage::{parse_patent_reference, PatentMatch, Resolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    PaperCitesPaper,
    PatentCitesPatent,
    PatentCitesPaper,
    PaperCitesPatent,
}

impl EdgeKind {
    pub fn between(src: IdKind, dst: IdKind) -> EdgeKind {
        match (src, dst) {
            (IdKind::Journal, IdKind::Journal) => EdgeKind::PaperCitesPaper,
            (IdKind::Patent, IdKind::Patent) => EdgeKind::PatentCitesPatent,
            (IdKind::Patent, IdKind::Journal) => EdgeKind::PatentCitesPaper,
            (IdKind::Journal, IdKind::Patent) => EdgeKind::PaperCitesPatent,
        }
    }

    /// Edge kind between two publications of the same kind.
    pub fn within(kind: IdKind) -> EdgeKind {
        Self::between(kind, kind)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::PaperCitesPaper => "paper_cites_paper",
            EdgeKind::PatentCitesPatent => "patent_cites_patent",
            EdgeKind::PatentCitesPaper => "patent_cites_paper",
            EdgeKind::PaperCitesPatent => "paper_cites_patent",
        }
    }
}

/// `src` cites `dst`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CitationEdge {
    pub src: PublicationId,
    pub dst: PublicationId,
    pub kind: EdgeKind,
}

impl CitationEdge {
    pub fn new(src: PublicationId, dst: PublicationId) -> Self {
        let kind = EdgeKind::between(src.kind, dst.kind);
        CitationEdge { src, dst, kind }
    }
}

/// Counters for things dropped while building a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildDiagnostics {
    pub resolutions_unknown_citing: usize,
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CitationGraph {
    edges: Vec<CitationEdge>,
    #[serde(skip)]
    out_index: HashMap<PublicationId, Vec<usize>>,
    #[serde(skip)]
    in_index: HashMap<PublicationId, Vec<usize>>,
    unresolved: BTreeMap<PublicationId, usize>,
    pub diagnostics: BuildDiagnostics,
}

impl CitationGraph {
    /// Deduplicates edges and drops self-loops.
    pub fn from_edges(edges: impl IntoIterator<Item = CitationEdge>) -> Self {
        let mut g = CitationGraph::default();
        let mut set = BTreeSet::new();
        for e in edges {
            if e.src == e.dst {
                g.diagnostics.self_loops += 1;
            } else if !set.insert(e) {
                g.diagnostics.duplicate_edges += 1;
            }
        }
        g.edges = set.into_iter().collect();
        g.reindex();
        g
    }

    fn reindex(&mut self) {
        self.out_index.clear();
        self.in_index.clear();
        for (i, e) in self.edges.iter().enumerate() {
            self.out_index.entry(e.src.clone()).or_default().push(i);
            self.in_index.entry(e.dst.clone()).or_default().push(i);
        }
    }

    /// All edges in sorted order.
    pub fn edges(&self) -> &[CitationEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// References made by `id`.
    pub fn out_edges<'a>(&'a self, id: &PublicationId) -> impl Iterator<Item = &'a CitationEdge> + 'a {
        let idx = self.out_index.get(id).map(Vec::as_slice).unwrap_or(&[]);
        idx.iter().map(move |&i| &self.edges[i])
    }

    /// Citations received by `id`.
    pub fn in_edges<'a>(&'a self, id: &PublicationId) -> impl Iterator<Item = &'a CitationEdge> + 'a {
        let idx = self.in_index.get(id).map(Vec::as_slice).unwrap_or(&[]);
        idx.iter().map(move |&i| &self.edges[i])
    }

    pub fn unresolved(&self, id: &PublicationId) -> usize {
        self.unresolved.get(id).copied().unwrap_or(0)
    }

    pub fn unresolved_counts(&self) -> &BTreeMap<PublicationId, usize> {
        &self.unresolved
    }

    pub fn total_unresolved(&self) -> usize {
        self.unresolved.values().sum()
    }

    pub fn count_kind(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn remove_edge(&mut self, edge: &CitationEdge) -> bool {
        let before = self.edges.len();
        self.edges.retain(|e| e != edge);
        let removed = self.edges.len() != before;
        if removed {
            self.reindex();
        }
        removed
    }
}

/// Builds the citation graph from corpus records and reference resolutions.
///
/// Journal references carrying a DOI or a patent number link directly; other
/// free-text references link only through an accepted resolution for the same
/// (citing id, text). Anything left over counts as unresolved for its citing
/// record.
pub fn build_graph(corpus: &Corpus, registry: &CollectionRegistry, resolutions: &[Resolution]) -> CitationGraph {
    let mut lookup: HashMap<(&PublicationId, &str), Option<PublicationId>> = HashMap::new();
    let mut unknown_citing = 0;
    for r in resolutions {
        let Some(citing) = &r.citing else {
            unknown_citing += 1;
            continue;
        };
        if !corpus.contains(citing) {
            log::warn!("resolution for unknown record {citing} skipped");
            unknown_citing += 1;
            continue;
        }
        let dst = r
            .is_accepted()
            .then(|| r.doi.as_deref().and_then(|d| PublicationId::journal(d).ok()))
            .flatten();
        lookup.insert((citing, r.ref_text.as_str()), dst);
    }

    let mut edges = Vec::new();
    let mut unresolved: BTreeMap<PublicationId, usize> = BTreeMap::new();

    let free_text = |src: &PublicationId, r: &RawReference| -> Option<PublicationId> {
        if let Some(doi) = &r.embedded_doi {
            return PublicationId::journal(doi).ok();
        }
        lookup.get(&(src, r.text.as_str())).cloned().flatten()
    };

    for j in corpus.journals() {
        let mut seen = HashSet::new();
        let mut misses = 0;
        for r in &j.raw_refs {
            if !seen.insert(r.text.as_str()) {
                continue;
            }
            let dst = match &r.embedded_patent {
                Some(num) => match parse_patent_reference(num, registry) {
                    PatentMatch::InCollection(id) | PatentMatch::OthersPatent(Some(id)) => Some(id),
                    PatentMatch::OthersPatent(None) | PatentMatch::NotAPatent => None,
                },
                None => free_text(&j.id, r),
            };
            match dst {
                Some(d) => edges.push(CitationEdge::new(j.id.clone(), d)),
                None => misses += 1,
            }
        }
        if misses > 0 {
            unresolved.insert(j.id.clone(), misses);
        }
    }

    for p in corpus.patents() {
        for d in p.patent_refs.iter().chain(&p.resolved_npl) {
            edges.push(CitationEdge::new(p.id.clone(), d.clone()));
        }
        let mut seen = HashSet::new();
        let mut misses = 0;
        for r in &p.npl_refs {
            if !seen.insert(r.text.as_str()) {
                continue;
            }
            match free_text(&p.id, r) {
                Some(d) => edges.push(CitationEdge::new(p.id.clone(), d)),
                None => misses += 1,
            }
        }
        if misses > 0 {
            unresolved.insert(p.id.clone(), misses);
        }
    }

    let mut g = CitationGraph::from_edges(edges);
    g.unresolved = unresolved;
    g.diagnostics.resolutions_unknown_citing = unknown_citing;
    g
}
