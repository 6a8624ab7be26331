//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use citegraph::corpus::{
    Affiliation, Author, Collection, CollectionRegistry, Corpus, JournalRecord, PatentRecord, PublicationId,
    RawReference, RegionCode, Side,
};
use citegraph::geo::{author_credit, region_credit};
use citegraph::graph::{build_graph, overlap_audit, BowtieReport, DirectionalRatio, OverlapAuditOptions};
use citegraph::linkage::{
    calibrate_threshold, levenshtein_ratio, otsu_split, strip_doi_suffix, works_response_body, CalibrationOptions,
    Histogram, LabeledReference, MetadataCandidate, MetadataClient,
};
use citegraph::temporal::{
    citation_profile, expected_citations, extrapolate, fit_growth_points, interest_ratio, profile_band,
    publication_counts, reference_mix, yearly_series, Band, ExpectedOptions, Metric, Window,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("paper arithmetic (±0.01)", Duration::from_secs(1), paper_arithmetic),
        (
            "levenshtein oracle (1000 pairs, exact)",
            Duration::from_secs(5),
            levenshtein_oracle,
        ),
        (
            "otsu oracle (500 histograms, exact)",
            Duration::from_secs(5),
            otsu_oracle,
        ),
        (
            "linkage calibration (noisy >=95%, clean 100%)",
            Duration::from_secs(30),
            linkage_calibration,
        ),
        (
            "model consistency (ratio 1 ± 0.02, doubling exact)",
            Duration::from_secs(10),
            model_consistency,
        ),
        (
            "growth fit recovery (1e-9, >=90/100 in band)",
            Duration::from_secs(10),
            growth_recovery,
        ),
        (
            "overlap audit (planted, exact, reproducible)",
            Duration::from_secs(5),
            overlap_audit_planted,
        ),
        (
            "credit allocation (toy 1e-9, sums to 1, conserved)",
            Duration::from_secs(5),
            credit_allocation,
        ),
        (
            "end-to-end determinism (<60 s, byte-identical)",
            Duration::from_secs(60),
            end_to_end,
        ),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = check();
        let took = t0.elapsed();
        let pass = out.pass && took <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {} [{:.2}s / {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---- 1 ---------------------------------------------------------------------

fn paper_arithmetic() -> Outcome {
    const TOL: f64 = 0.01;
    let gs = BowtieReport::from_totals("G-S", 127_546, 5_312_228, 4_122_164);
    let gt = BowtieReport::from_totals("G-T", 176_193, 1_458_760, 416_550);
    let ratios = [
        DirectionalRatio::from_counts("G-S", "NT-S", 218_475, 605_594),
        DirectionalRatio::from_counts("G-T", "NT-T", 49_466, 47_810),
        DirectionalRatio::from_counts("G-S", "Others", 1_483_979, 2_284_258),
    ];
    let mut checks: Vec<(&str, f64, f64)> = vec![
        ("G-S avg_refs", gs.avg_refs, 41.6),
        ("G-S avg_cites", gs.avg_cites, 32.3),
        ("G-S value_added", gs.value_added.unwrap_or(f64::NAN), 0.78),
        ("G-T avg_refs", gt.avg_refs, 8.28),
        ("G-T avg_cites", gt.avg_cites, 2.36),
        ("G-T value_added", gt.value_added.unwrap_or(f64::NAN), 0.29),
    ];
    for (r, want) in ratios.iter().zip([0.36, 1.03, 0.65]) {
        checks.push(("directional", r.ratio.unwrap_or(f64::NAN), want));
    }
    checks.push(("patents per paper", gt.n_pubs as f64 / gs.n_pubs as f64, 1.38));
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| (got - want).abs().is_nan() || (got - want).abs() > TOL)
        .map(|(n, got, want)| format!("{n}={got:.4} (want {want})"))
        .collect();
    if bad.is_empty() {
        outcome(true, format!("{} values within ±{TOL}", checks.len()))
    } else {
        outcome(false, bad.join(", "))
    }
}

// ---- 2 ---------------------------------------------------------------------

/// Top-down memoized edit distance, independent of the library's row DP.
fn oracle_distance(a: &[char], b: &[char]) -> usize {
    fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            go(a, b, i + 1, j + 1, memo)
        } else {
            1 + go(a, b, i + 1, j, memo)
                .min(go(a, b, i, j + 1, memo))
                .min(go(a, b, i + 1, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

fn random_string(rng: &mut ChaCha8Rng, alphabet: &[char], max_len: usize) -> String {
    let n = rng.random_range(0..=max_len);
    (0..n).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

fn levenshtein_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alphabets: [Vec<char>; 3] = [
        "ab".chars().collect(),
        "abcdefgh ".chars().collect(),
        "aé漢zΩ-\" ".chars().collect(),
    ];
    let mut mismatches = 0;
    for i in 0..1000 {
        let alpha = &alphabets[i % alphabets.len()];
        let a = random_string(&mut rng, alpha, 64);
        let b = random_string(&mut rng, alpha, 64);
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        let total = ca.len() + cb.len();
        let want = if total == 0 {
            0.0
        } else {
            oracle_distance(&ca, &cb) as f64 / total as f64
        };
        let ok =
            levenshtein_ratio(&a, &b) == want && levenshtein_ratio(&b, &a) == want && levenshtein_ratio(&a, &a) == 0.0;
        if !ok {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches in 1000 pairs"))
}

// ---- 3 ---------------------------------------------------------------------

/// Exhaustive search for the split minimizing the within-class variance,
/// compared exactly with big integers. Ties keep the lowest split.
fn oracle_otsu(counts: &[u64]) -> Option<usize> {
    let mut best: Option<(usize, BigInt, BigInt)> = None;
    for k in 1..counts.len() {
        let (lo, hi) = counts.split_at(k);
        let w0: u64 = lo.iter().sum();
        let w1: u64 = hi.iter().sum();
        if w0 == 0 || w1 == 0 {
            continue;
        }
        // Σ h (i - s/w)² = Σ h (i w - s)² / w², summed exactly
        let spread = |part: &[u64], offset: usize, w: u64| -> BigInt {
            let s: i128 = part
                .iter()
                .enumerate()
                .map(|(i, &h)| h as i128 * (i + offset) as i128)
                .sum();
            let total: u128 = part
                .iter()
                .enumerate()
                .map(|(i, &h)| {
                    let d = (i + offset) as i128 * w as i128 - s;
                    h as u128 * d.unsigned_abs() * d.unsigned_abs()
                })
                .sum();
            BigInt::from(total)
        };
        let (a, b) = (spread(lo, 0, w0), spread(hi, k, w1));
        let (w0s, w1s) = (BigInt::from(w0) * w0, BigInt::from(w1) * w1);
        let num = a * &w1s + b * &w0s;
        let den = w0s * w1s;
        let better = match &best {
            None => true,
            Some((_, bn, bd)) => &num * bd < bn * &den,
        };
        if better {
            best = Some((k, num, den));
        }
    }
    best.map(|(k, _, _)| k)
}

fn otsu_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    let mut degenerate = 0;
    for t in 0..500 {
        let bins = rng.random_range(2..=256);
        let fill = rng.random_range(0.05..1.0);
        let cap = if t % 5 == 0 { 3 } else { 500 };
        let counts: Vec<u64> = (0..bins)
            .map(|_| {
                if rng.random_bool(fill) {
                    rng.random_range(0..=cap)
                } else {
                    0
                }
            })
            .collect();
        let want = oracle_otsu(&counts);
        let got = otsu_split(&Histogram::new(counts)).ok();
        if want.is_none() {
            degenerate += 1;
        }
        if got != want {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatches in 500 histograms ({degenerate} degenerate)"),
    )
}

// ---- 4 ---------------------------------------------------------------------

const SURNAMES: [&str; 16] = [
    "Novoselov",
    "Geim",
    "Ferrari",
    "Castro",
    "Neto",
    "Kim",
    "Ruoff",
    "Dai",
    "Lee",
    "Wang",
    "Zhang",
    "Bonaccorso",
    "Hersam",
    "Coleman",
    "Ajayan",
    "Chhowalla",
];
const WORDS: [&str; 24] = [
    "electric",
    "field",
    "effect",
    "atomically",
    "thin",
    "carbon",
    "films",
    "raman",
    "spectrum",
    "graphene",
    "layers",
    "intrinsic",
    "strength",
    "monolayer",
    "transistors",
    "liquid",
    "exfoliation",
    "chemical",
    "vapour",
    "deposition",
    "photonics",
    "optoelectronics",
    "two-dimensional",
    "crystals",
];

struct Work {
    doi: String,
    authors: Vec<String>,
    title: String,
}

fn works(rng: &mut ChaCha8Rng, n: usize) -> Vec<Work> {
    (0..n)
        .map(|i| {
            let authors = (0..rng.random_range(1..=4))
                .map(|_| {
                    let initial = (b'A' + rng.random_range(0..26u8)) as char;
                    format!("{initial}. {}", SURNAMES[rng.random_range(0..SURNAMES.len())])
                })
                .collect();
            let title = (0..rng.random_range(6..=12))
                .map(|_| WORDS[rng.random_range(0..WORDS.len())])
                .collect::<Vec<_>>()
                .join(" ");
            Work {
                doi: format!("10.7777/acc.{i}"),
                authors,
                title,
            }
        })
        .collect()
}

fn noisy(rng: &mut ChaCha8Rng, s: &str, rate: f64) -> String {
    s.chars()
        .filter_map(|c| {
            if !rng.random_bool(rate) {
                return Some(c);
            }
            match rng.random_range(0..3) {
                0 => None,
                1 => Some((b'a' + rng.random_range(0..26u8)) as char),
                _ => Some(c.to_ascii_uppercase()),
            }
        })
        .collect()
}

/// Labelled sample: each reference is written from its true record; the
/// search engine's top hit is the true record 75% of the time. `drop_rate`
/// of candidates lose a field (all authors, or all but the first).
fn calibration_run(noise: f64, drop_rate: f64, seed: u64) -> Result<(f64, usize, f64), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = works(&mut rng, 400);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut labeled = Vec::new();
    for (i, w) in pool.iter().take(200).enumerate() {
        let authors = noisy(&mut rng, &w.authors.join(", "), noise);
        let title = noisy(&mut rng, &w.title, noise);
        let text = format!(
            "{authors}, \"{title}\", J. Synth. Mater. {}, {}-{} ({}). doi:{}",
            rng.random_range(1..40),
            rng.random_range(1..900),
            rng.random_range(900..999),
            rng.random_range(2004..2018),
            w.doi
        );
        let hit = if rng.random_bool(0.75) { w } else { &pool[200 + i] };
        let mut cand = MetadataCandidate {
            doi: hit.doi.clone(),
            title: hit.title.clone(),
            authors: hit.authors.clone(),
        };
        if rng.random_bool(drop_rate) {
            if rng.random_bool(0.5) {
                cand.authors.clear();
            } else {
                cand.authors.truncate(1);
            }
        }
        let key = MetadataClient::query_hash(strip_doi_suffix(&text));
        std::fs::write(dir.path().join(format!("{key}.json")), works_response_body(&[cand]))
            .map_err(|e| e.to_string())?;
        labeled.push(LabeledReference {
            text,
            doi: w.doi.clone(),
        });
    }
    let client = MetadataClient::fixture(dir.path());
    let cal = calibrate_threshold(&labeled, &client, &CalibrationOptions::default()).map_err(|e| e.to_string())?;
    Ok((cal.accuracy(), cal.misclassified(), cal.threshold))
}

fn linkage_calibration() -> Outcome {
    let noisy = calibration_run(0.05, 0.20, 4);
    let clean = calibration_run(0.0, 0.0, 5);
    match (noisy, clean) {
        (Ok((acc, miss, t)), Ok((cacc, cmiss, ct))) => outcome(
            acc >= 0.95 && cacc == 1.0 && cmiss == 0,
            format!(
                "noisy accuracy {:.3} ({miss} wrong, threshold {t:.4}); clean accuracy {:.3} ({cmiss} wrong, threshold {ct:.4})",
                acc, cacc
            ),
        ),
        (a, b) => outcome(false, format!("calibration failed: {:?} / {:?}", a.err(), b.err())),
    }
}

// ---- 5 ---------------------------------------------------------------------

fn jid(s: &str) -> PublicationId {
    PublicationId::journal(s).expect("valid doi")
}

fn paper(doi: &str, year: i32, refs: &[String]) -> JournalRecord {
    JournalRecord {
        id: jid(doi),
        year,
        title: String::new(),
        authors: vec![Author {
            name: "doe, j".into(),
            affiliations: vec![],
        }],
        raw_refs: refs
            .iter()
            .map(|d| RawReference {
                text: d.clone(),
                embedded_doi: Some(d.clone()),
                embedded_patent: None,
            })
            .collect(),
        funding_acknowledged: false,
    }
}

fn model_consistency() -> Outcome {
    // N per year, r = 4, fixed mix, every reference exactly one year back
    let window = Window { start: 2001, end: 2010 };
    let n_a = |y: i32| 10 + (y - 2000) as usize;
    let n_b = |_: i32| 6usize;
    let doi = |c: &str, y: i32, k: usize| format!("10.1000/{c}.{y}.{k}");
    let mix: [(&str, usize, usize); 2] = [("a", 3, 1), ("b", 2, 2)];
    let mut papers = Vec::new();
    let (mut a_ids, mut b_ids) = (Vec::new(), Vec::new());
    for y in 2000..=2010 {
        for (c, to_a, to_b) in mix {
            let n = if c == "a" { n_a(y) } else { n_b(y) };
            for k in 0..n {
                let mut refs = Vec::new();
                if y > 2000 {
                    refs.extend((0..to_a).map(|j| doi("a", y - 1, (k * 3 + j) % n_a(y - 1))));
                    refs.extend((0..to_b).map(|j| doi("b", y - 1, (k * 3 + j) % n_b(y - 1))));
                }
                let d = doi(c, y, k);
                if c == "a" {
                    a_ids.push(jid(&d))
                } else {
                    b_ids.push(jid(&d))
                }
                papers.push(paper(&d, y, &refs));
            }
        }
    }
    let corpus = Corpus::new(papers, Vec::new());
    let registry = CollectionRegistry::new([
        Collection::new("A-S", Side::Science, 0).with_members(a_ids),
        Collection::new("B-S", Side::Science, 1).with_members(b_ids),
    ])
    .expect("registry");
    let g = build_graph(&corpus, &registry, &[]);

    let run = || -> Result<(f64, bool, usize), String> {
        let profiles = ["A-S", "B-S"]
            .iter()
            .map(|c| citation_profile(&g, &corpus, &registry, c, 25))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let median = profile_band(&profiles, Band::P50);
        let m = reference_mix(&g, &corpus, &registry, Side::Science, window).map_err(|e| e.to_string())?;
        let counts = publication_counts(&corpus, &registry, Side::Science).map_err(|e| e.to_string())?;
        let opts = ExpectedOptions {
            citing_from: None,
            citing_to: Some(window.end),
            per_year_refs: false,
        };
        let mut worst: f64 = 0.0;
        let mut doubling = true;
        let mut interior = 0;
        for target in ["A-S", "B-S"] {
            let expected =
                expected_citations(&counts, &m, &median, target, window, &opts).map_err(|e| e.to_string())?;
            let actual =
                yearly_series(&g, &corpus, &registry, target, Metric::AvgCites, window).map_err(|e| e.to_string())?;
            let once = interest_ratio(&actual, &expected).map_err(|e| e.to_string())?;
            let twice = interest_ratio(&actual.scaled(2.0), &expected).map_err(|e| e.to_string())?;
            for (p, q) in once.points.iter().zip(&twice.points) {
                if p.year >= window.end {
                    continue;
                }
                interior += 1;
                let r = p.ratio.ok_or(format!("{target} {}: no ratio", p.year))?;
                worst = worst.max((r - 1.0).abs());
                doubling &= q.ratio == Some(2.0 * r);
            }
        }
        Ok((worst, doubling, interior))
    };
    match run() {
        Ok((worst, doubling, interior)) => outcome(
            worst <= 0.02 && doubling && interior == 18,
            format!("max |ratio-1| = {worst:.2e} over {interior} interior cohorts; doubling exact: {doubling}"),
        ),
        Err(e) => outcome(false, e),
    }
}

// ---- 6 ---------------------------------------------------------------------

fn growth_recovery() -> Outcome {
    let (a, b) = (250.0_f64, 0.31_f64);
    let truth = |y: i32| a * (b * f64::from(y - 2004)).exp();
    let clean: Vec<(i32, f64)> = (2004..=2017).map(|y| (y, truth(y))).collect();
    let rel = match fit_growth_points("G-S", &clean) {
        Ok(m) => (m.slope - b).abs() / b,
        Err(e) => return outcome(false, e.to_string()),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let noise = Normal::new(0.0_f64, 0.1).expect("valid sigma");
    let mut covered = 0;
    for _ in 0..100 {
        let pts: Vec<(i32, f64)> = (2004..=2017)
            .map(|y| (y, truth(y) * noise.sample(&mut rng).exp()))
            .collect();
        let Ok(m) = fit_growth_points("G-S", &pts) else {
            continue;
        };
        let inside = (2004..=2017)
            .map(|y| m.forecast(y))
            .chain(extrapolate(&m, 4))
            .all(|f| f.low <= truth(f.year) && truth(f.year) <= f.high);
        if inside {
            covered += 1;
        }
    }
    outcome(
        rel <= 1e-9 && covered >= 90,
        format!("slope relative error {rel:.1e}; truth inside band in {covered}/100 trials"),
    )
}

// ---- 7 ---------------------------------------------------------------------

fn pid(s: &str) -> PublicationId {
    PublicationId::patent(s).expect("valid patent number")
}

fn patent(num: &str, patent_refs: &[&str], papers: &[String]) -> PatentRecord {
    PatentRecord {
        id: pid(num),
        region: RegionCode::new(&num[..2]).expect("region"),
        kind_code: None,
        year: 2012,
        language: "EN".into(),
        patent_refs: patent_refs.iter().map(|p| pid(p)).collect(),
        npl_refs: Vec::new(),
        resolved_npl: papers.iter().map(|d| jid(d)).collect(),
    }
}

fn overlap_audit_planted() -> Outcome {
    let s = |i: u32| format!("10.2000/nts.{i}");
    let science: Vec<JournalRecord> = (1..=6)
        .map(|i| paper(&s(i), 2010, &[]))
        .chain([paper("10.2000/other.1", 2010, &[])])
        .collect();
    let sr = |ids: &[u32]| ids.iter().map(|&i| s(i)).collect::<Vec<_>>();
    let plan: Vec<(&str, Vec<&str>, Vec<String>)> = vec![
        // neighbours
        ("US2000001", vec![], sr(&[1, 2, 3])),
        ("US2000002", vec![], sr(&[4])),
        ("US2000003", vec![], vec![]),
        // focal: shared/own
        ("US1000001", vec!["US2000001"], sr(&[1, 2, 5, 6])), // 2/4
        ("US1000002", vec!["US2000001", "US2000002"], sr(&[1, 4])), // 2/2
        ("US1000003", vec!["US2000002"], sr(&[5])),          // 0/1
        ("US1000004", vec!["US2000003"], sr(&[6])),          // 0/1
        ("US1000005", vec!["US2000001"], vec!["10.2000/other.1".to_string()]), // no neighbour science
        ("US1000006", vec![], sr(&[1])),                     // cites no neighbour patent
        ("US1000007", vec!["US2000001"], sr(&[3])),          // 1/1
    ];
    let patents: Vec<PatentRecord> = plan.iter().map(|(n, p, d)| patent(n, p, d)).collect();
    let corpus = Corpus::new(science, patents);
    let registry = CollectionRegistry::new([
        Collection::new("G-T", Side::Technology, 0).with_members((1..=7).map(|i| pid(&format!("US100000{i}")))),
        Collection::new("NT-T", Side::Technology, 1).with_members((1..=3).map(|i| pid(&format!("US200000{i}")))),
        Collection::new("NT-S", Side::Science, 1).with_members((1..=6).map(|i| jid(&s(i)))),
    ])
    .expect("registry");
    let g = build_graph(&corpus, &registry, &[]);
    let opts = OverlapAuditOptions {
        sample_size: 1000,
        seed: 11,
        ..OverlapAuditOptions::default()
    };
    let rep = match overlap_audit(&g, &corpus, &registry, &opts) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    // positive fractions 1/2, 1, 1
    let mean = 5.0 / 6.0;
    let sd = (((0.5f64 - mean).powi(2) + 2.0 * (1.0f64 - mean).powi(2)) / 3.0).sqrt();
    let hand = rep.sample_size == 7
        && rep.n_citing_neighbour == 6
        && rep.n_with_journal_refs == 6
        && rep.n_with_neighbour_science_refs == 5
        && rep.n_with_overlap == 3
        && rep.n_no_overlap == 2
        && rep.overlap_mean == Some(mean)
        && rep.overlap_stddev == Some(sd);

    let small = OverlapAuditOptions { sample_size: 4, ..opts };
    let bytes = || overlap_audit(&g, &corpus, &registry, &small).map(|r| serde_json::to_vec(&r).expect("serialize"));
    let reproducible = matches!((bytes(), bytes()), (Ok(a), Ok(b)) if a == b);
    outcome(
        hand && reproducible,
        format!(
            "consolidating {} disrupting {} mean {:?} sd {:?}; seeded rerun identical: {reproducible}",
            rep.n_with_overlap, rep.n_no_overlap, rep.overlap_mean, rep.overlap_stddev
        ),
    )
}

// ---- 8 ---------------------------------------------------------------------

fn authored(doi: &str, year: i32, authors: &[(&str, &[&str])], refs: &[&str]) -> JournalRecord {
    let refs: Vec<String> = refs.iter().map(|s| s.to_string()).collect();
    let mut p = paper(doi, year, &refs);
    p.authors = authors
        .iter()
        .map(|(n, regions)| Author {
            name: n.to_string(),
            affiliations: regions
                .iter()
                .map(|r| Affiliation {
                    raw: String::new(),
                    region: RegionCode::new(r).unwrap_or(RegionCode::UNKNOWN),
                })
                .collect(),
        })
        .collect();
    p
}

fn credit_allocation() -> Outcome {
    // target T by {X, Y}; d1 by X alone; two citers each cite T and d1
    let toy = [
        authored("10.3000/t", 2010, &[("x", &["CN"]), ("y", &["US"])], &[]),
        authored("10.3000/d1", 2009, &[("x", &["CN"])], &[]),
        authored("10.3000/c1", 2011, &[("z", &[])], &["10.3000/t", "10.3000/d1"]),
        authored("10.3000/c2", 2012, &[("z", &[])], &["10.3000/t", "10.3000/d1"]),
    ];
    let corpus = Corpus::new(toy.clone(), Vec::new());
    let registry = CollectionRegistry::new([]).expect("registry");
    let g = build_graph(&corpus, &registry, &[]);
    // A (authors x co-cited papers) times co-citation strengths c
    let a = [[0.5, 1.0], [0.5, 0.0]];
    let c = [2.0, 2.0];
    let s: Vec<f64> = a
        .iter()
        .map(|row| row.iter().zip(&c).map(|(x, y)| x * y).sum())
        .collect();
    let total: f64 = s.iter().sum();
    let want = [s[0] / total, s[1] / total];
    let toy_ok = match author_credit(&toy[0], &g, &corpus) {
        Ok(cv) => (cv.shares["x"] - want[0]).abs() < 1e-9 && (cv.shares["y"] - want[1]).abs() < 1e-9,
        Err(_) => false,
    };

    // random corpora: shares sum to 1 and regions conserve credit
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let regions = ["CN", "US", "KR", "JP", "DE"];
    let mut worst_sum: f64 = 0.0;
    let mut worst_conservation: f64 = 0.0;
    for trial in 0..50 {
        let n = 40;
        let papers: Vec<JournalRecord> = (0..n)
            .map(|i| {
                let k = rng.random_range(1..=4);
                let authors: Vec<(String, Vec<&str>)> = (0..k)
                    .map(|_| {
                        let name = format!("author{}", rng.random_range(0..12));
                        let affs = (0..rng.random_range(0..=2))
                            .map(|_| regions[rng.random_range(0..5)])
                            .collect();
                        (name, affs)
                    })
                    .collect();
                let refs: Vec<String> = (0..i)
                    .filter(|_| rng.random_bool(0.15))
                    .map(|j| format!("10.4000/{trial}.{j}"))
                    .collect();
                let auth: Vec<(&str, &[&str])> = authors.iter().map(|(n, a)| (n.as_str(), a.as_slice())).collect();
                let refs: Vec<&str> = refs.iter().map(String::as_str).collect();
                authored(&format!("10.4000/{trial}.{i}"), 2000 + (i % 15), &auth, &refs)
            })
            .collect();
        let corpus = Corpus::new(papers.clone(), Vec::new());
        let g = build_graph(&corpus, &registry, &[]);
        let credits: Vec<_> = papers
            .iter()
            .filter_map(|p| author_credit(p, &g, &corpus).ok())
            .collect();
        for cv in &credits {
            worst_sum = worst_sum.max((cv.total() - 1.0).abs());
        }
        let window = Window { start: 2000, end: 2014 };
        let table = region_credit(&corpus, &credits, window);
        let spread: f64 = table.values().flat_map(|y| y.values()).sum();
        let in_window = credits.iter().filter(|c| window.contains(c.year)).count() as f64;
        worst_conservation = worst_conservation.max((spread - in_window).abs());
    }
    outcome(
        toy_ok && worst_sum < 1e-12 && worst_conservation < 1e-9,
        format!(
            "toy {toy_ok} (want x={:.2}, y={:.2}); max |sum-1| {worst_sum:.1e}; max region drift {worst_conservation:.1e}",
            want[0], want[1]
        ),
    )
}

// ---- 9 ---------------------------------------------------------------------

fn end_to_end() -> Outcome {
    let conf = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini/proj.conf");
    let conf = conf.to_string_lossy().into_owned();
    let run = || -> Result<BTreeMap<String, String>, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let out = dir.path().to_string_lossy().into_owned();
        let code = citegraph_cli::run(["citegraph", "--config", &conf, "--out", &out, "all"]);
        if code != 0 {
            return Err(format!("exit {code}"));
        }
        let mut t = citegraph_cli::manifest::hash_tree(dir.path()).map_err(|e| e.to_string())?;
        t.remove(citegraph_cli::manifest::MANIFEST_FILE);
        Ok(t)
    };
    match (run(), run()) {
        (Ok(a), Ok(b)) => outcome(
            a == b && !a.is_empty(),
            format!("{} files, identical: {}", a.len(), a == b),
        ),
        (a, b) => outcome(false, format!("{:?} / {:?}", a.err(), b.err())),
    }
}
