//! Prioritized collection registry.
//!
//! A publication is labelled with the highest-priority collection on its side
//! that contains it, and `Others` when no collection does.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ids::{IdKind, PublicationId};
use super::CorpusError;

pub const OTHERS: &str = "Others";

/// Default priority order of collection families, highest first.
pub const DEFAULT_FAMILY_ORDER: [&str; 3] = ["G", "NT", "(2D+TMO+TMD)"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Science,
    Technology,
}

impl Side {
    pub fn id_kind(self) -> IdKind {
        match self {
            Side::Science => IdKind::Journal,
            Side::Technology => IdKind::Patent,
        }
    }

    pub fn of(kind: IdKind) -> Side {
        match kind {
            IdKind::Journal => Side::Science,
            IdKind::Patent => Side::Technology,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Side::Science => "S",
            Side::Technology => "T",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Science => "science",
            Side::Technology => "technology",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collection {
    pub name: String,
    pub side: Side,
    pub members: BTreeSet<PublicationId>,
    /// Lower value means higher priority.
    pub priority: u32,
}

impl Collection {
    pub fn new(name: impl Into<String>, side: Side, priority: u32) -> Self {
        Collection {
            name: name.into(),
            side,
            members: BTreeSet::new(),
            priority,
        }
    }

    pub fn with_members(mut self, members: impl IntoIterator<Item = PublicationId>) -> Self {
        self.members.extend(members);
        self
    }

    /// Family part of the name, e.g. `NT` for `NT-S`.
    pub fn family(&self) -> &str {
        family_of(&self.name)
    }
}

fn family_of(name: &str) -> &str {
    name.strip_suffix("-S")
        .or_else(|| name.strip_suffix("-T"))
        .unwrap_or(name)
}

/// Symmetric pairwise intersection counts; the diagonal is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    pub names: Vec<String>,
    pub counts: Vec<Vec<Option<usize>>>,
}

impl OverlapMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<usize> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        self.counts[i][j]
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CollectionRegistry {
    science: Vec<Collection>,
    technology: Vec<Collection>,
    #[serde(skip)]
    label_index: HashMap<PublicationId, usize>,
    /// Digit block of every Technology member, for region-less lookups.
    #[serde(skip)]
    patent_digits: HashMap<String, Vec<PublicationId>>,
}

impl CollectionRegistry {
    /// Validates and indexes a set of collections.
    pub fn new(collections: impl IntoIterator<Item = Collection>) -> Result<Self, CorpusError> {
        let mut science = Vec::new();
        let mut technology = Vec::new();
        for c in collections {
            let expected = c.side.id_kind();
            if let Some(bad) = c.members.iter().find(|m| m.kind != expected) {
                return Err(CorpusError::Registry(format!(
                    "collection {} contains {:?} id {}",
                    c.name, bad.kind, bad.value
                )));
            }
            match c.side {
                Side::Science => science.push(c),
                Side::Technology => technology.push(c),
            }
        }
        for list in [&mut science, &mut technology] {
            list.sort_by_key(|c| c.priority);
            for w in list.windows(2) {
                if w[0].priority == w[1].priority {
                    return Err(CorpusError::Registry(format!(
                        "collections {} and {} share priority {}",
                        w[0].name, w[1].name, w[0].priority
                    )));
                }
            }
            let mut names = BTreeSet::new();
            for c in list.iter() {
                if c.name == OTHERS || !names.insert(c.name.clone()) {
                    return Err(CorpusError::Registry(format!(
                        "invalid or repeated collection name {}",
                        c.name
                    )));
                }
            }
        }

        let mut reg = CollectionRegistry {
            science,
            technology,
            ..Default::default()
        };
        reg.reindex();
        Ok(reg)
    }

    fn reindex(&mut self) {
        self.label_index.clear();
        self.patent_digits.clear();
        for list in [&self.science, &self.technology] {
            // Iterate lowest priority first so higher priority overwrites.
            for (idx, c) in list.iter().enumerate().rev() {
                for m in &c.members {
                    self.label_index.insert(m.clone(), idx);
                }
            }
        }
        for c in &self.technology {
            for m in &c.members {
                let digits = m.value[2..].to_string();
                let entry = self.patent_digits.entry(digits).or_default();
                if !entry.contains(m) {
                    entry.push(m.clone());
                }
            }
        }
    }

    /// Reads every `<name>.ids` file in `dir`. The name must end in `-S` or `-T`.
    ///
    /// `family_order` ranks families (name without the side suffix); families
    /// not listed come after, alphabetically.
    pub fn load_dir(dir: impl AsRef<Path>, family_order: &[&str]) -> Result<Self, CorpusError> {
        let dir = dir.as_ref();
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(|e| CorpusError::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "ids"))
            .collect();
        paths.sort();

        let mut collections = Vec::new();
        for path in paths {
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| CorpusError::Registry(format!("bad file name {}", path.display())))?
                .to_string();
            let side = if name.ends_with("-S") {
                Side::Science
            } else if name.ends_with("-T") {
                Side::Technology
            } else {
                return Err(CorpusError::Registry(format!(
                    "{}: collection name must end in -S or -T",
                    path.display()
                )));
            };
            let text = fs::read_to_string(&path).map_err(|e| CorpusError::io(&path, e))?;
            let mut c = Collection::new(name, side, 0);
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let id = match side {
                    Side::Science => PublicationId::journal(line),
                    Side::Technology => PublicationId::patent(line),
                };
                match id {
                    Ok(id) => {
                        c.members.insert(id);
                    }
                    Err(e) => log::warn!("{}:{}: skipping member: {e}", path.display(), i + 1),
                }
            }
            collections.push(c);
        }

        for side in [Side::Science, Side::Technology] {
            let mut on_side: Vec<&mut Collection> = collections.iter_mut().filter(|c| c.side == side).collect();
            on_side.sort_by(|a, b| {
                let rank = |c: &Collection| {
                    family_order
                        .iter()
                        .position(|f| *f == c.family())
                        .unwrap_or(family_order.len())
                };
                rank(a).cmp(&rank(b)).then_with(|| a.name.cmp(&b.name))
            });
            for (p, c) in on_side.into_iter().enumerate() {
                c.priority = p as u32;
            }
        }
        Self::new(collections)
    }

    /// Collections on one side, highest priority first.
    pub fn collections(&self, side: Side) -> &[Collection] {
        match side {
            Side::Science => &self.science,
            Side::Technology => &self.technology,
        }
    }

    pub fn get(&self, name: &str) -> Option<&Collection> {
        self.science
            .iter()
            .chain(self.technology.iter())
            .find(|c| c.name == name)
    }

    /// Label names for a side in priority order, followed by `Others`.
    pub fn labels(&self, side: Side) -> Vec<String> {
        self.collections(side)
            .iter()
            .map(|c| c.name.clone())
            .chain(std::iter::once(OTHERS.to_string()))
            .collect()
    }

    /// Highest-priority collection containing `id`, else `Others`.
    pub fn classify(&self, id: &PublicationId) -> &str {
        let side = Side::of(id.kind);
        match self.label_index.get(id) {
            Some(&idx) => &self.collections(side)[idx].name,
            None => OTHERS,
        }
    }

    /// Whether `id` is classified into the named collection.
    pub fn is_labelled(&self, id: &PublicationId, name: &str) -> bool {
        self.classify(id) == name
    }

    /// Technology members whose digit block equals `digits`.
    pub fn patents_with_digits(&self, digits: &str) -> &[PublicationId] {
        self.patent_digits.get(digits).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_technology_member(&self, id: &PublicationId) -> bool {
        id.is_patent() && self.label_index.contains_key(id)
    }

    pub fn overlap_matrix(&self, side: Side) -> OverlapMatrix {
        let list = self.collections(side);
        let n = list.len();
        let mut counts = vec![vec![None; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let c = list[i].members.intersection(&list[j].members).count();
                counts[i][j] = Some(c);
                counts[j][i] = Some(c);
            }
        }
        OverlapMatrix {
            names: list.iter().map(|c| c.name.clone()).collect(),
            counts,
        }
    }
}
