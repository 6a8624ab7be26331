mod common;

use std::collections::BTreeMap;

use citegraph::corpus::{Corpus, Side};
use citegraph::graph::build_graph;
use citegraph::temporal::{
    citation_profile, component_series, expected_citations, extrapolate, fit_growth_points, future_citation_bands,
    reference_mix, yearly_series, Band, BandInputs, CitationProfile, CountTable, CountVariant, Direction,
    ExpectedOptions, Forecast, Metric, MixRow, ReferenceMix, Window, YearlySeries,
};
use common::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + b.abs())
}

#[test]
fn single_publication_series() {
    let corpus = Corpus::new([paper("10.1/a", 2012, &[])], []);
    let reg = registry(vec![science("G-S", 0, &["10.1/a"])]);
    let g = build_graph(&corpus, &reg, &[]);
    let w = Window::new(2010, 2014).unwrap();
    let pubs = yearly_series(&g, &corpus, &reg, "G-S", Metric::Pubs, w).unwrap();
    assert_eq!(
        pubs.values(),
        vec![Some(0.0), Some(0.0), Some(1.0), Some(0.0), Some(0.0)]
    );
    let refs = yearly_series(&g, &corpus, &reg, "G-S", Metric::AvgRefs, w).unwrap();
    assert_eq!(refs.values(), vec![None, None, Some(0.0), None, None]);
}

#[test]
fn average_references_over_two_publications() {
    let cited: Vec<String> = (0..5).map(|i| format!("10.1/x{i}")).collect();
    let c: Vec<&str> = cited.iter().map(String::as_str).collect();
    let corpus = Corpus::new(
        [paper("10.1/a", 2012, &c[..3]), paper("10.1/b", 2012, &c)]
            .into_iter()
            .chain(c.iter().map(|d| paper(d, 2010, &[]))),
        [],
    );
    let reg = registry(vec![science("G-S", 0, &["10.1/a", "10.1/b"])]);
    let g = build_graph(&corpus, &reg, &[]);
    let s = yearly_series(
        &g,
        &corpus,
        &reg,
        "G-S",
        Metric::AvgRefs,
        Window::new(2012, 2012).unwrap(),
    )
    .unwrap();
    assert_eq!(s.get(2012), Some(4.0));
}

#[test]
fn all_others_references_give_one_nonzero_component() {
    let corpus = Corpus::new(
        [
            paper("10.1/a", 2012, &["10.1/o1", "10.1/o2"]),
            paper("10.1/o1", 2011, &[]),
            paper("10.1/o2", 2011, &[]),
        ],
        [],
    );
    let reg = registry(vec![science("G-S", 0, &["10.1/a"]), science("NT-S", 1, &[])]);
    let g = build_graph(&corpus, &reg, &[]);
    let comps = component_series(
        &g,
        &corpus,
        &reg,
        "G-S",
        Direction::References,
        Window::new(2012, 2012).unwrap(),
    )
    .unwrap();
    let nonzero: Vec<_> = comps.iter().filter(|s| s.get(2012).unwrap_or(0.0) > 0.0).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0].label.as_deref(), Some("Others"));
    assert_eq!(nonzero[0].get(2012), Some(2.0));
}

#[test]
fn planted_components_over_two_years() {
    // 2010: a -> {g, n}, b -> {n, o, o2}; 2011: c -> {g}
    let corpus = Corpus::new(
        [
            paper("10.1/a", 2010, &["10.1/g", "10.1/n"]),
            paper("10.1/b", 2010, &["10.1/n", "10.1/o", "10.1/o2"]),
            paper("10.1/c", 2011, &["10.1/g"]),
            paper("10.1/g", 2008, &[]),
            paper("10.1/n", 2008, &[]),
            paper("10.1/o", 2008, &[]),
            paper("10.1/o2", 2008, &[]),
        ],
        [],
    );
    let reg = registry(vec![
        science("G-S", 0, &["10.1/a", "10.1/b", "10.1/c", "10.1/g"]),
        science("NT-S", 1, &["10.1/n"]),
    ]);
    let g = build_graph(&corpus, &reg, &[]);
    let w = Window::new(2010, 2011).unwrap();
    let comps = component_series(&g, &corpus, &reg, "G-S", Direction::References, w).unwrap();
    let by: BTreeMap<_, _> = comps.iter().map(|s| (s.label.clone().unwrap(), s)).collect();
    assert_eq!(by["G-S"].get(2010), Some(0.5));
    assert_eq!(by["NT-S"].get(2010), Some(1.0));
    assert_eq!(by["Others"].get(2010), Some(1.0));
    assert_eq!(by["G-S"].get(2011), Some(1.0));
    assert_eq!(by["NT-S"].get(2011), Some(0.0));
    let avg = yearly_series(&g, &corpus, &reg, "G-S", Metric::AvgRefs, w).unwrap();
    for y in w.years() {
        let sum: f64 = comps.iter().filter_map(|s| s.get(y)).sum();
        assert!(close(sum, avg.get(y).unwrap()));
    }
}

#[test]
fn profile_matches_quartile_oracle() {
    // A (2010) cites 2009, 2009, 2007: lags {1, 1, 3}; B (2010) cites 2008: lag {2}
    let corpus = Corpus::new(
        [
            paper("10.1/a", 2010, &["10.1/y1", "10.1/y2", "10.1/y3"]),
            paper("10.1/b", 2010, &["10.1/y4"]),
            paper("10.1/y1", 2009, &[]),
            paper("10.1/y2", 2009, &[]),
            paper("10.1/y3", 2007, &[]),
            paper("10.1/y4", 2008, &[]),
        ],
        [],
    );
    let reg = registry(vec![science("G-S", 0, &["10.1/a", "10.1/b"])]);
    let g = build_graph(&corpus, &reg, &[]);
    let prof = citation_profile(&g, &corpus, &reg, "G-S", 5).unwrap();
    assert_eq!(prof.n_pubs, 2);
    // two observations per lag: the q-quantile is lo + q (hi - lo)
    let per_pub = [[0.0, 2.0 / 3.0, 0.0, 1.0 / 3.0], [0.0, 0.0, 1.0, 0.0]];
    for band in Band::ALL {
        let q = band.quantile();
        for (lag, (&a, &b)) in per_pub[0].iter().zip(&per_pub[1]).enumerate() {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            assert!(close(prof.band(band)[lag], lo + q * (hi - lo)), "{band:?} lag {lag}");
        }
        assert_eq!(prof.band(band)[4], 0.0);
    }
}

#[test]
fn self_citing_collection_has_unit_share() {
    let corpus = Corpus::new(
        [
            paper("10.1/a", 2011, &["10.1/b"]),
            paper("10.1/b", 2010, &["10.1/c"]),
            paper("10.1/c", 2009, &[]),
        ],
        [],
    );
    let reg = registry(vec![
        science("G-S", 0, &["10.1/a", "10.1/b", "10.1/c"]),
        science("NT-S", 1, &[]),
    ]);
    let g = build_graph(&corpus, &reg, &[]);
    let mix = reference_mix(&g, &corpus, &reg, Side::Science, Window::new(2009, 2011).unwrap()).unwrap();
    assert_eq!(mix.share("G-S", "G-S"), 1.0);
    assert_eq!(mix.share("G-S", "NT-S"), 0.0);
    assert_eq!(mix.share("G-S", "Others"), 0.0);
    assert!(close(mix.rows["G-S"].refs_per_pub, 2.0 / 3.0));
}

#[test]
fn planted_mix_half_quarter_quarter() {
    let corpus = Corpus::new(
        [
            paper("10.1/a", 2011, &["10.1/g1", "10.1/g2", "10.1/n", "10.1/o"]),
            paper("10.1/g1", 2005, &[]),
            paper("10.1/g2", 2005, &[]),
            paper("10.1/n", 2005, &[]),
            paper("10.1/o", 2005, &[]),
        ],
        [],
    );
    let reg = registry(vec![
        science("G-S", 0, &["10.1/a", "10.1/g1", "10.1/g2"]),
        science("NT-S", 1, &["10.1/n"]),
    ]);
    let g = build_graph(&corpus, &reg, &[]);
    let mix = reference_mix(&g, &corpus, &reg, Side::Science, Window::new(2010, 2011).unwrap()).unwrap();
    assert_eq!(mix.share("G-S", "G-S"), 0.5);
    assert_eq!(mix.share("G-S", "NT-S"), 0.25);
    assert_eq!(mix.share("G-S", "Others"), 0.25);
    assert_eq!(mix.rows["G-S"].refs_per_pub, 4.0);
    let total: f64 = mix.rows["G-S"].shares.values().sum();
    assert_eq!(total, 1.0);
}

type MixSpec<'a> = (&'a str, f64, &'a [(&'a str, f64)]);

fn mix_of(rows: &[MixSpec<'_>], window: Window) -> ReferenceMix {
    ReferenceMix {
        side: Side::Science,
        window,
        labels: Vec::new(),
        rows: rows
            .iter()
            .map(|(c, r, shares)| {
                (
                    c.to_string(),
                    MixRow {
                        n_pubs: 1,
                        n_refs: 1,
                        refs_per_pub: *r,
                        shares: shares.iter().map(|(t, q)| (t.to_string(), *q)).collect(),
                        refs_per_pub_by_year: BTreeMap::new(),
                    },
                )
            })
            .collect(),
    }
}

#[test]
fn expected_citations_conserve_references() {
    // every reference of C lands on some cohort of T when the profile's
    // support fits inside the window, so Σ_p N_T(p) E(p) = Σ_y N_C(y) r q
    let w = Window::new(1990, 2010).unwrap();
    let prof = vec![0.1, 0.4, 0.3, 0.2];
    let (r, q) = (7.5, 0.4);
    let mut counts = CountTable::new();
    counts.insert("C".into(), (2000..=2010).map(|y| (y, f64::from(y - 1995))).collect());
    counts.insert("T".into(), (1990..=2010).map(|y| (y, 1.0 + f64::from(y % 4))).collect());
    let mix = mix_of(&[("C", r, &[("T", q)])], w);
    let profiles = BTreeMap::from([("C".to_string(), prof)]);
    let e = expected_citations(&counts, &mix, &profiles, "T", w, &ExpectedOptions::default()).unwrap();
    let received: f64 = w.years().map(|p| counts["T"][&p] * e.get(p).unwrap()).sum();
    let sent: f64 = counts["C"].values().map(|n| n * r * q).sum();
    assert!(close(received, sent), "{received} vs {sent}");
}

#[test]
fn expected_citations_toy_by_hand() {
    // C: 10 pubs in 2001, 20 in 2002; r = 3, q = 0.5; profile lag1 = 1
    // T: 5 pubs in 2000 and 2001
    let w = Window::new(2000, 2002).unwrap();
    let mut counts = CountTable::new();
    counts.insert("C".into(), BTreeMap::from([(2001, 10.0), (2002, 20.0)]));
    counts.insert("T".into(), BTreeMap::from([(2000, 5.0), (2001, 5.0)]));
    let mix = mix_of(&[("C", 3.0, &[("T", 0.5)])], w);
    let profiles = BTreeMap::from([("C".to_string(), vec![0.0, 1.0])]);
    let e = expected_citations(&counts, &mix, &profiles, "T", w, &ExpectedOptions::default()).unwrap();
    assert_eq!(e.get(2000), Some(10.0 * 3.0 * 0.5 / 5.0));
    assert_eq!(e.get(2001), Some(20.0 * 3.0 * 0.5 / 5.0));
    assert_eq!(e.get(2002), None);
}

fn forecast(year: i32, low: f64, point: f64, high: f64) -> Forecast {
    Forecast {
        year,
        point,
        low,
        high,
        log_half_width: 0.0,
    }
}

fn band_inputs_fixture() -> (
    CountTable,
    BTreeMap<String, Vec<Forecast>>,
    Vec<CitationProfile>,
    ReferenceMix,
    YearlySeries,
) {
    let w = Window::new(2010, 2012).unwrap();
    let mut counts = CountTable::new();
    counts.insert("C".into(), BTreeMap::from([(2010, 2.0), (2011, 3.0), (2012, 4.0)]));
    let forecasts = BTreeMap::from([(
        "C".to_string(),
        vec![forecast(2013, 3.0, 5.0, 8.0), forecast(2014, 4.0, 7.0, 12.0)],
    )]);
    let profiles = vec![CitationProfile::from_lags(
        "C",
        &[vec![1, 1, 2], vec![2, 3, 4], vec![1, 4], vec![3]],
        4,
    )];
    let mix = mix_of(&[("C", 6.0, &[("C", 0.75)])], w);
    let observed = YearlySeries::from_fn("C", "avg_cites", w, |y| Some(f64::from(y - 2009)));
    (counts, forecasts, profiles, mix, observed)
}

#[test]
fn envelope_matches_nine_combination_oracle() {
    let (counts, forecasts, profiles, mix, observed) = band_inputs_fixture();
    let w = Window::new(2010, 2012).unwrap();
    let fb = future_citation_bands(&BandInputs {
        observed_counts: &counts,
        forecasts: &forecasts,
        profiles: &profiles,
        mix: &mix,
        observed_avg_cites: &observed,
        target: "C",
        window: w,
    })
    .unwrap();
    assert_eq!(fb.combinations.len(), 9);

    let pick = |v: CountVariant, f: &Forecast| match v {
        CountVariant::Low => f.low,
        CountVariant::Point => f.point,
        CountVariant::High => f.high,
    };
    for p in w.years() {
        let n_p = counts["C"][&p];
        let mut vals = Vec::new();
        let mut point = None;
        for v in CountVariant::ALL {
            for b in Band::ALL {
                let prof = profiles[0].band(b);
                let f: f64 = forecasts["C"]
                    .iter()
                    .map(|fc| {
                        let lag = (fc.year - p) as usize;
                        pick(v, fc) * 6.0 * 0.75 * prof.get(lag).copied().unwrap_or(0.0)
                    })
                    .sum::<f64>()
                    / n_p;
                if v == CountVariant::Point && b == Band::P50 {
                    point = Some(f);
                }
                vals.push(f);
            }
        }
        let o = observed.get(p).unwrap();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pt = &fb.series.points[(p - 2010) as usize];
        assert!(close(pt.value.unwrap(), o + point.unwrap()), "year {p}");
        assert!(close(pt.band_low.unwrap(), o + lo), "year {p}");
        assert!(close(pt.band_high.unwrap(), o + hi), "year {p}");
        assert!(pt.band_low <= pt.value && pt.value <= pt.band_high);
    }
}

#[test]
fn collapsed_bands_equal_the_point_estimate() {
    let (counts, _, _, mix, observed) = band_inputs_fixture();
    let forecasts = BTreeMap::from([(
        "C".to_string(),
        vec![forecast(2013, 5.0, 5.0, 5.0), forecast(2014, 7.0, 7.0, 7.0)],
    )]);
    // identical publications make every quartile equal
    let profiles = vec![CitationProfile::from_lags("C", &[vec![1, 2, 3], vec![1, 2, 3]], 4)];
    let fb = future_citation_bands(&BandInputs {
        observed_counts: &counts,
        forecasts: &forecasts,
        profiles: &profiles,
        mix: &mix,
        observed_avg_cites: &observed,
        target: "C",
        window: Window::new(2010, 2012).unwrap(),
    })
    .unwrap();
    for pt in &fb.series.points {
        assert_eq!(pt.band_low, pt.value);
        assert_eq!(pt.band_high, pt.value);
    }
}

#[test]
fn exact_exponential_growth_is_recovered() {
    let pts: Vec<(i32, f64)> = (2000..2010).map(|y| (y, 3.0 * 1.25f64.powi(y - 2000))).collect();
    let m = fit_growth_points("X", &pts).unwrap();
    assert!(close(m.slope, 1.25f64.ln()));
    let f = extrapolate(&m, 2);
    assert_eq!(f.len(), 2);
    assert_eq!(f[0].year, 2010);
    assert!((f[0].point - 3.0 * 1.25f64.powi(10)).abs() < 1e-9);
    assert!(f[0].low <= f[0].point && f[0].point <= f[0].high);
}
