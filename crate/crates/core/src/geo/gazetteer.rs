//! Country lookup for free-text affiliations.
//!
//! Only the last comma-separated token of an affiliation is consulted, which
//! is where bibliographic exports put the country ("Tsinghua Univ, Beijing,
//! Peoples R China"). US addresses usually end in "<state> <zip> USA", so the
//! last word of the token is tried as well.

use std::collections::HashMap;
use std::sync::LazyLock;

use crate::corpus::RegionCode;

const ENTRIES: &[(&str, &str)] = &[
    ("PEOPLES R CHINA", "CN"),
    ("CHINA", "CN"),
    ("PR CHINA", "CN"),
    ("P R CHINA", "CN"),
    ("HONG KONG", "HK"),
    ("MACAU", "MO"),
    ("TAIWAN", "TW"),
    ("USA", "US"),
    ("UNITED STATES", "US"),
    ("US", "US"),
    ("SOUTH KOREA", "KR"),
    ("KOREA", "KR"),
    ("REPUBLIC OF KOREA", "KR"),
    ("NORTH KOREA", "KP"),
    ("JAPAN", "JP"),
    ("INDIA", "IN"),
    ("GERMANY", "DE"),
    ("FED REP GER", "DE"),
    ("FRANCE", "FR"),
    ("ENGLAND", "GB"),
    ("SCOTLAND", "GB"),
    ("WALES", "GB"),
    ("NORTH IRELAND", "GB"),
    ("UK", "GB"),
    ("UNITED KINGDOM", "GB"),
    ("IRELAND", "IE"),
    ("ITALY", "IT"),
    ("SPAIN", "ES"),
    ("PORTUGAL", "PT"),
    ("NETHERLANDS", "NL"),
    ("BELGIUM", "BE"),
    ("LUXEMBOURG", "LU"),
    ("SWITZERLAND", "CH"),
    ("AUSTRIA", "AT"),
    ("SWEDEN", "SE"),
    ("NORWAY", "NO"),
    ("DENMARK", "DK"),
    ("FINLAND", "FI"),
    ("ICELAND", "IS"),
    ("POLAND", "PL"),
    ("CZECH REPUBLIC", "CZ"),
    ("CZECHIA", "CZ"),
    ("SLOVAKIA", "SK"),
    ("HUNGARY", "HU"),
    ("ROMANIA", "RO"),
    ("BULGARIA", "BG"),
    ("GREECE", "GR"),
    ("TURKEY", "TR"),
    ("RUSSIA", "RU"),
    ("RUSSIAN FEDERATION", "RU"),
    ("UKRAINE", "UA"),
    ("BELARUS", "BY"),
    ("SLOVENIA", "SI"),
    ("CROATIA", "HR"),
    ("SERBIA", "RS"),
    ("LITHUANIA", "LT"),
    ("LATVIA", "LV"),
    ("ESTONIA", "EE"),
    ("ISRAEL", "IL"),
    ("IRAN", "IR"),
    ("SAUDI ARABIA", "SA"),
    ("U ARAB EMIRATES", "AE"),
    ("UNITED ARAB EMIRATES", "AE"),
    ("QATAR", "QA"),
    ("EGYPT", "EG"),
    ("PAKISTAN", "PK"),
    ("BANGLADESH", "BD"),
    ("SINGAPORE", "SG"),
    ("MALAYSIA", "MY"),
    ("THAILAND", "TH"),
    ("VIETNAM", "VN"),
    ("INDONESIA", "ID"),
    ("PHILIPPINES", "PH"),
    ("AUSTRALIA", "AU"),
    ("NEW ZEALAND", "NZ"),
    ("CANADA", "CA"),
    ("MEXICO", "MX"),
    ("BRAZIL", "BR"),
    ("ARGENTINA", "AR"),
    ("CHILE", "CL"),
    ("COLOMBIA", "CO"),
    ("SOUTH AFRICA", "ZA"),
    ("NIGERIA", "NG"),
    ("ALGERIA", "DZ"),
    ("TUNISIA", "TN"),
    ("MOROCCO", "MA"),
];

static GAZETTEER: LazyLock<HashMap<&'static str, &'static str>> = LazyLock::new(|| ENTRIES.iter().copied().collect());

fn normalize(token: &str) -> String {
    token
        .chars()
        .map(|c| {
            if c.is_ascii_alphabetic() {
                c.to_ascii_uppercase()
            } else {
                ' '
            }
        })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Region of an affiliation, if its last comma token names a known country.
pub fn region_from_affiliation(raw: &str) -> Option<RegionCode> {
    let last = raw.rsplit(',').next()?;
    let token = normalize(last);
    if token.is_empty() {
        return None;
    }
    let code = GAZETTEER
        .get(token.as_str())
        .or_else(|| GAZETTEER.get(token.rsplit(' ').next()?))?;
    RegionCode::new(code).ok()
}
