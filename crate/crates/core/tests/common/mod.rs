#![allow(dead_code)]

use citegraph::corpus::{
    Affiliation, Author, Collection, CollectionRegistry, JournalRecord, PatentRecord, PublicationId, RawReference,
    RegionCode, Side,
};

pub fn j(doi: &str) -> PublicationId {
    PublicationId::journal(doi).unwrap()
}

pub fn p(num: &str) -> PublicationId {
    PublicationId::patent(num).unwrap()
}

/// Paper with one anonymous author and DOI-carrying references.
pub fn paper(doi: &str, year: i32, refs: &[&str]) -> JournalRecord {
    JournalRecord {
        id: j(doi),
        year,
        title: String::new(),
        authors: vec![Author {
            name: "anon, a".into(),
            affiliations: vec![],
        }],
        raw_refs: refs
            .iter()
            .map(|d| RawReference {
                text: d.to_string(),
                embedded_doi: Some(d.to_string()),
                embedded_patent: None,
            })
            .collect(),
        funding_acknowledged: false,
    }
}

pub fn with_authors(mut rec: JournalRecord, authors: &[(&str, &[&str])]) -> JournalRecord {
    rec.authors = authors
        .iter()
        .map(|(name, regions)| Author {
            name: name.to_string(),
            affiliations: regions
                .iter()
                .map(|r| Affiliation {
                    raw: String::new(),
                    region: RegionCode::new(r).unwrap_or(RegionCode::UNKNOWN),
                })
                .collect(),
        })
        .collect();
    rec
}

pub fn with_patent_refs(mut rec: JournalRecord, nums: &[&str]) -> JournalRecord {
    for n in nums {
        rec.raw_refs.push(RawReference {
            text: n.to_string(),
            embedded_doi: None,
            embedded_patent: Some(n.to_string()),
        });
    }
    rec
}

pub fn patent(num: &str, year: i32, patent_refs: &[&str], papers: &[&str]) -> PatentRecord {
    PatentRecord {
        id: p(num),
        region: RegionCode::new(&num[..2]).unwrap(),
        kind_code: None,
        year,
        language: "EN".into(),
        patent_refs: patent_refs.iter().map(|n| p(n)).collect(),
        npl_refs: Vec::new(),
        resolved_npl: papers.iter().map(|d| j(d)).collect(),
    }
}

pub fn science(name: &str, priority: u32, dois: &[&str]) -> Collection {
    Collection::new(name, Side::Science, priority).with_members(dois.iter().map(|d| j(d)))
}

pub fn technology(name: &str, priority: u32, nums: &[&str]) -> Collection {
    Collection::new(name, Side::Technology, priority).with_members(nums.iter().map(|n| p(n)))
}

pub fn registry(collections: Vec<Collection>) -> CollectionRegistry {
    CollectionRegistry::new(collections).unwrap()
}
