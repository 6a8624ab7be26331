//! Patent numbers cited by journal papers.

use crate::corpus::{CollectionRegistry, PatentNumber, PublicationId};

/// Outcome of matching a patent number found in a journal reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatentMatch {
    InCollection(PublicationId),
    /// A patent outside every Technology collection. Carries an id when the
    /// reference includes its region code.
    OthersPatent(Option<PublicationId>),
    NotAPatent,
}

/// Classifies a patent number cited by a journal paper.
///
/// The kind code is ignored. Identifying numbers shorter than 4 digits are
/// not patents. Longer numbers must match a Technology member exactly;
/// without a region code the digit block must identify a single member.
pub fn parse_patent_reference(text: &str, registry: &CollectionRegistry) -> PatentMatch {
    let Some(number) = PatentNumber::parse(text) else {
        return PatentMatch::NotAPatent;
    };
    if number.digits.len() < 4 {
        return PatentMatch::NotAPatent;
    }
    match &number.region {
        Some(_) => {
            let id = number.into_id().expect("region and >=4 digits always form a patent id");
            if registry.is_technology_member(&id) {
                PatentMatch::InCollection(id)
            } else {
                PatentMatch::OthersPatent(Some(id))
            }
        }
        None => match registry.patents_with_digits(&number.digits) {
            [only] => PatentMatch::InCollection(only.clone()),
            _ => PatentMatch::OthersPatent(None),
        },
    }
}
