//! Serialization of reports to CSV and JSON, with atomic file writes.
//!
//! CSV output is RFC 4180 with LF line endings; numbers use the shortest
//! representation that round-trips, and missing values are empty cells.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::geo::{FlowMatrix, LanguageTable, RankTable};
use crate::graph::{BowtieReport, CrossDomainReport, LabelCount};
use crate::temporal::{InterestSeries, YearlySeries};

/// Writes `bytes` to a temporary file beside `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn num(v: f64) -> String {
    if v == 0.0 {
        // avoid "-0"
        return "0".to_string();
    }
    format!("{v}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Renders a header and rows as CSV.
pub fn csv_bytes<R, I>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(r).expect("writing to memory");
    }
    w.into_inner().expect("writing to memory")
}

pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report types serialize");
    v.push(b'\n');
    v
}

/// One JSON document per line.
pub fn jsonl_bytes<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for it in items {
        serde_json::to_writer(&mut out, it).expect("report types serialize");
        out.push(b'\n');
    }
    out
}

pub const SERIES_HEADER: [&str; 7] = [
    "collection",
    "metric",
    "label",
    "year",
    "value",
    "band_low",
    "band_high",
];

/// Tidy long-format rows for any number of series.
pub fn series_csv<'a>(series: impl IntoIterator<Item = &'a YearlySeries>) -> Vec<u8> {
    let rows = series.into_iter().flat_map(|s| {
        s.points.iter().map(move |p| {
            vec![
                s.collection.clone(),
                s.metric.clone(),
                s.label.clone().unwrap_or_default(),
                p.year.to_string(),
                opt(p.value),
                opt(p.band_low),
                opt(p.band_high),
            ]
        })
    });
    csv_bytes(&SERIES_HEADER, rows)
}

/// Interest series as tidy rows with metrics actual, expected and ratio.
pub fn interest_csv<'a>(series: impl IntoIterator<Item = &'a InterestSeries>) -> Vec<u8> {
    let rows = series.into_iter().flat_map(|s| {
        s.points.iter().flat_map(move |p| {
            [("actual", p.actual), ("expected", p.expected), ("ratio", p.ratio)].map(|(m, v)| {
                vec![
                    s.collection.clone(),
                    m.to_string(),
                    String::new(),
                    p.year.to_string(),
                    opt(v),
                    String::new(),
                    String::new(),
                ]
            })
        })
    });
    csv_bytes(&SERIES_HEADER, rows)
}

fn breakdown_rows<'a>(focal: &'a str, side: &'a str, b: &'a [LabelCount]) -> impl Iterator<Item = Vec<String>> + 'a {
    b.iter().map(move |l| {
        vec![
            focal.to_string(),
            side.to_string(),
            l.label.clone(),
            l.count.to_string(),
            num(l.percent),
        ]
    })
}

pub const BREAKDOWN_HEADER: [&str; 5] = ["focal", "side", "label", "count", "percent"];

pub fn bowtie_csv<'a>(reports: impl IntoIterator<Item = &'a BowtieReport>) -> Vec<u8> {
    let rows = reports.into_iter().flat_map(|r| {
        breakdown_rows(&r.focal, "references", &r.refs_breakdown).chain(breakdown_rows(
            &r.focal,
            "citations",
            &r.cites_breakdown,
        ))
    });
    csv_bytes(&BREAKDOWN_HEADER, rows)
}

pub fn cross_domain_csv<'a>(reports: impl IntoIterator<Item = &'a CrossDomainReport>) -> Vec<u8> {
    let rows = reports.into_iter().flat_map(|r| {
        breakdown_rows(&r.focal, "referenced", &r.referenced.edges)
            .chain(breakdown_rows(&r.focal, "referenced_distinct", &r.referenced.distinct))
            .chain(breakdown_rows(&r.focal, "citing", &r.citing.edges))
            .chain(breakdown_rows(&r.focal, "citing_distinct", &r.citing.distinct))
    });
    csv_bytes(&BREAKDOWN_HEADER, rows)
}

pub fn flow_csv(m: &FlowMatrix) -> Vec<u8> {
    let rows = m.regions.iter().enumerate().flat_map(|(i, from)| {
        m.regions
            .iter()
            .enumerate()
            .map(move |(j, to)| vec![from.clone(), to.clone(), num(m.counts[i][j]), num(m.fractions[i][j])])
    });
    csv_bytes(&["from_region", "to_region", "count", "fraction"], rows)
}

#[derive(Serialize)]
struct FlowNode<'a> {
    region: &'a str,
    size: f64,
}

#[derive(Serialize)]
struct FlowNodes<'a> {
    nodes: Vec<FlowNode<'a>>,
    outside_regions: f64,
    unattributable: u64,
}

pub fn flow_nodes_json(m: &FlowMatrix) -> Vec<u8> {
    json_bytes(&FlowNodes {
        nodes: m
            .regions
            .iter()
            .zip(&m.node_sizes)
            .map(|(r, &s)| FlowNode { region: r, size: s })
            .collect(),
        outside_regions: m.outside_regions,
        unattributable: m.unattributable,
    })
}

pub fn rank_csv(t: &RankTable) -> Vec<u8> {
    let rows = t.years.iter().flat_map(|(y, entries)| {
        entries
            .iter()
            .map(move |e| vec![y.to_string(), e.rank.to_string(), e.region.clone(), num(e.score)])
    });
    csv_bytes(&["year", "rank", "region", "score"], rows)
}

/// Offices as rows, languages as columns; empty cells are `-`.
pub fn language_csv(t: &LanguageTable) -> Vec<u8> {
    let mut header = vec!["office"];
    header.extend(t.languages.iter().map(String::as_str));
    let rows = t.regions.iter().zip(&t.counts).map(|(r, row)| {
        std::iter::once(r.clone())
            .chain(
                row.iter()
                    .map(|&c| if c == 0 { "-".to_string() } else { c.to_string() }),
            )
            .collect::<Vec<_>>()
    });
    csv_bytes(&header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting_and_line_endings() {
        let b = csv_bytes(&["a", "b"], [vec!["x,y", "say \"hi\""], vec!["plain", ""]]);
        assert_eq!(
            String::from_utf8(b).unwrap(),
            "a,b\n\"x,y\",\"say \"\"hi\"\"\"\nplain,\n"
        );
    }

    #[test]
    fn numbers() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(3.0), "3");
        assert_eq!(opt(None), "");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
