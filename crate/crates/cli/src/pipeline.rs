//! Subcommand implementations. Each step renders its artifacts in memory and
//! writes them atomically under `<out>/<step>/`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::json;

use citegraph::corpus::{
    funding_audit, load_journal_records, load_patent_records, CollectionRegistry, Corpus, OverlapMatrix,
    RejectionReport, Side, DEFAULT_FAMILY_ORDER,
};
use citegraph::geo::{
    credits_for, journal_flow, language_table, patent_counts_by_region, patent_flow, rank_table, region_credit,
    CreditVector, RegionYearTable,
};
use citegraph::graph::{
    bowtie, build_graph, cross_domain, directional_ratio, focal_population, overlap_audit, CitationGraph,
    OverlapAuditOptions,
};
use citegraph::linkage::{
    calibrate_threshold, load_labeled, resolve_corpus, summarize, CalibrationError, CalibrationOptions, ClientConfig,
    MetadataClient, Resolution, ResolveOptions, Transport, CACHE_DIR_ENV, DEFAULT_BASE_URL, METADATA_URL_ENV,
};
use citegraph::report::{self, csv_bytes, json_bytes, jsonl_bytes, num, opt, write_atomic};
use citegraph::temporal::{
    citation_profile, component_series, expected_citations, extrapolate, fit_growth, future_citation_bands,
    interest_ratio, profile_band, publication_counts, reference_mix, yearly_series, Band, BandInputs, CitationProfile,
    Direction, ExpectedOptions, Forecast, GrowthModel, InterestSeries, Metric, ReferenceMix, Window, YearlySeries,
};

use crate::config::{MetadataMode, ProjectConfig};
use crate::manifest::{sha256_hex, RunManifest, StepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Step {
    Ingest,
    Calibrate,
    Link,
    Graph,
    Bowtie,
    Temporal,
    Simulate,
    Interest,
    Geo,
    Flows,
    Ranks,
    AuditOverlap,
    AuditFunding,
}

impl Step {
    pub const ALL: [Step; 13] = [
        Step::Ingest,
        Step::Calibrate,
        Step::Link,
        Step::Graph,
        Step::Bowtie,
        Step::Temporal,
        Step::Simulate,
        Step::Interest,
        Step::Geo,
        Step::Flows,
        Step::Ranks,
        Step::AuditOverlap,
        Step::AuditFunding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Step::Ingest => "ingest",
            Step::Calibrate => "calibrate",
            Step::Link => "link",
            Step::Graph => "graph",
            Step::Bowtie => "bowtie",
            Step::Temporal => "temporal",
            Step::Simulate => "simulate",
            Step::Interest => "interest",
            Step::Geo => "geo",
            Step::Flows => "flows",
            Step::Ranks => "ranks",
            Step::AuditOverlap => "audit-overlap",
            Step::AuditFunding => "audit-funding",
        }
    }
}

#[derive(Debug)]
pub enum StepError {
    /// Bad configuration for this step.
    Validation(String),
    /// Unusable input data or failed computation.
    Data(String),
}

impl std::fmt::Display for StepError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepError::Validation(m) | StepError::Data(m) => f.write_str(m),
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> StepError {
    StepError::Data(e.to_string())
}

/// Builds the transport used by the metadata client.
pub type TransportFactory = Arc<dyn Fn(MetadataMode) -> Box<dyn Transport> + Send + Sync>;

pub fn default_transport() -> TransportFactory {
    Arc::new(|mode| match mode {
        MetadataMode::Fixture => Box::new(citegraph::linkage::NoNetwork),
        MetadataMode::Live => Box::new(citegraph::linkage::HttpTransport::new(Duration::from_secs(30))),
    })
}

type Artifacts = Vec<(String, Vec<u8>)>;
type GrowthFits = Vec<(String, Result<GrowthModel, String>)>;
type ModelInputs = (
    ReferenceMix,
    BTreeMap<String, Vec<f64>>,
    citegraph::temporal::CountTable,
);

pub struct Pipeline<'a> {
    cfg: &'a ProjectConfig,
    transport: TransportFactory,
    corpus: Option<Corpus>,
    registry: Option<CollectionRegistry>,
    rejections: Option<(RejectionReport, RejectionReport)>,
    resolutions: Option<Vec<Resolution>>,
    graph: Option<CitationGraph>,
    credits: Option<Vec<CreditVector>>,
    pub manifest: RunManifest,
}

impl<'a> Pipeline<'a> {
    pub fn new(cfg: &'a ProjectConfig, transport: TransportFactory) -> Result<Self, StepError> {
        let mut inputs = BTreeMap::new();
        let mut add = |label: &str, path: &Path| -> Result<(), StepError> {
            let bytes = std::fs::read(path).map_err(|e| StepError::Data(format!("{}: {e}", path.display())))?;
            inputs.insert(label.to_string(), sha256_hex(&bytes));
            Ok(())
        };
        add("journal_records", &cfg.journal_records)?;
        add("patent_records", &cfg.patent_records)?;
        if let Some(p) = &cfg.calibration_sample {
            add("calibration_sample", p)?;
        }
        for f in sorted_files(&cfg.collections_dir).map_err(data)? {
            let name = f
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            add(&format!("collections/{name}"), &f)?;
        }
        Ok(Pipeline {
            cfg,
            transport,
            corpus: None,
            registry: None,
            rejections: None,
            resolutions: None,
            graph: None,
            credits: None,
            manifest: RunManifest::new(cfg.snapshot.clone(), inputs),
        })
    }

    fn window(&self) -> Window {
        Window {
            start: self.cfg.window_start,
            end: self.cfg.window_end,
        }
    }

    pub fn run(&mut self, step: Step) -> Result<(), StepError> {
        let t0 = Instant::now();
        log::info!("running {}", step.name());
        let artifacts = match step {
            Step::Ingest => self.ingest()?,
            Step::Calibrate => self.calibrate()?,
            Step::Link => self.link()?,
            Step::Graph => self.graph_step()?,
            Step::Bowtie => self.bowtie()?,
            Step::Temporal => self.temporal()?,
            Step::Simulate => self.simulate()?,
            Step::Interest => self.interest()?,
            Step::Geo => self.geo()?,
            Step::Flows => self.flows()?,
            Step::Ranks => self.ranks()?,
            Step::AuditOverlap => self.audit_overlap()?,
            Step::AuditFunding => self.audit_funding()?,
        };
        let mut outputs = BTreeMap::new();
        for (rel, bytes) in artifacts {
            let rel = format!("{}/{rel}", step.name());
            write_atomic(&self.cfg.out.join(&rel), &bytes).map_err(data)?;
            outputs.insert(rel, sha256_hex(&bytes));
        }
        self.manifest.steps.push(StepRecord {
            name: step.name().to_string(),
            seconds: t0.elapsed().as_secs_f64(),
            outputs,
        });
        Ok(())
    }

    pub fn write_manifest(&mut self) -> Result<(), StepError> {
        self.manifest.merge_previous(&self.cfg.out);
        write_atomic(
            &self.cfg.out.join(crate::manifest::MANIFEST_FILE),
            &json_bytes(&self.manifest),
        )
        .map_err(data)
    }

    // ---- shared state ------------------------------------------------------

    fn load(&mut self) -> Result<(), StepError> {
        if self.corpus.is_some() {
            return Ok(());
        }
        let (journals, jrep) = load_journal_records(&self.cfg.journal_records).map_err(data)?;
        let (patents, prep) = load_patent_records(&self.cfg.patent_records).map_err(data)?;
        let registry = CollectionRegistry::load_dir(&self.cfg.collections_dir, &DEFAULT_FAMILY_ORDER).map_err(data)?;
        for name in [
            &self.cfg.focal_science,
            &self.cfg.focal_technology,
            &self.cfg.neighbour_science,
            &self.cfg.neighbour_technology,
        ] {
            if registry.get(name).is_none() {
                return Err(StepError::Data(format!("collection {name:?} has no id list")));
            }
        }
        self.corpus = Some(Corpus::new(journals, patents));
        self.registry = Some(registry);
        self.rejections = Some((jrep, prep));
        Ok(())
    }

    fn parts(&self) -> (&Corpus, &CollectionRegistry) {
        (
            self.corpus.as_ref().expect("corpus loaded"),
            self.registry.as_ref().expect("registry loaded"),
        )
    }

    fn metadata_client(&self) -> MetadataClient {
        let cfg = self.cfg;
        let client_cfg = ClientConfig {
            base_url: cfg
                .metadata_url
                .clone()
                .or_else(|| std::env::var(METADATA_URL_ENV).ok())
                .unwrap_or_else(|| DEFAULT_BASE_URL.to_string()),
            fixtures_dir: match cfg.metadata_mode {
                MetadataMode::Fixture => cfg.metadata_fixtures.clone(),
                MetadataMode::Live => None,
            },
            cache_dir: cfg
                .cache_dir
                .clone()
                .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from)),
            requests_per_second: cfg.rate_limit,
            ..ClientConfig::default()
        };
        MetadataClient::new(client_cfg, (self.transport)(cfg.metadata_mode))
    }

    fn resolve(&mut self) -> Result<(), StepError> {
        self.load()?;
        if self.resolutions.is_some() {
            return Ok(());
        }
        let existing = self.cfg.out.join("link/resolutions.jsonl");
        if existing.is_file() {
            let text = std::fs::read_to_string(&existing).map_err(data)?;
            let parsed: Result<Vec<Resolution>, _> = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(serde_json::from_str)
                .collect();
            self.resolutions = Some(parsed.map_err(|e| StepError::Data(format!("{}: {e}", existing.display())))?);
            return Ok(());
        }
        self.resolutions = Some(self.compute_resolutions());
        Ok(())
    }

    fn compute_resolutions(&self) -> Vec<Resolution> {
        let (corpus, _) = self.parts();
        let client = self.metadata_client();
        let opts = ResolveOptions {
            threshold: self.cfg.threshold,
            aggregation: self.cfg.aggregation,
            top_k: self.cfg.top_candidates,
        };
        resolve_corpus(corpus, &client, &opts)
    }

    fn ensure_graph(&mut self) -> Result<(), StepError> {
        if self.graph.is_some() {
            return Ok(());
        }
        self.resolve()?;
        let (corpus, registry) = self.parts();
        let g = build_graph(corpus, registry, self.resolutions.as_deref().unwrap_or(&[]));
        self.graph = Some(g);
        Ok(())
    }

    fn all_parts(&self) -> (&Corpus, &CollectionRegistry, &CitationGraph) {
        let (c, r) = self.parts();
        (c, r, self.graph.as_ref().expect("graph built"))
    }

    // ---- steps -------------------------------------------------------------

    fn ingest(&mut self) -> Result<Artifacts, StepError> {
        self.load()?;
        let (corpus, registry) = self.parts();
        let (jrep, prep) = self.rejections.as_ref().expect("loaded");
        let side_summary = |accepted: usize, rep: &RejectionReport| {
            json!({
                "accepted": accepted,
                "rejected": rep.len(),
                "duplicates": rep.duplicates(),
                "dropped_refs": rep.dropped_refs,
            })
        };
        let collections: Vec<_> = [Side::Science, Side::Technology]
            .iter()
            .flat_map(|&s| registry.collections(s))
            .map(|c| {
                let labelled = focal_population(corpus, registry, &c.name)
                    .map(|v| v.len())
                    .unwrap_or(0);
                json!({
                    "name": c.name,
                    "side": c.side.as_str(),
                    "priority": c.priority,
                    "members": c.members.len(),
                    "in_corpus": c.members.iter().filter(|m| corpus.contains(m)).count(),
                    "labelled_in_corpus": labelled,
                })
            })
            .collect();
        let summary = json!({
            "journals": side_summary(corpus.journal_count(), jrep),
            "patents": side_summary(corpus.patent_count(), prep),
            "collections": collections,
        });
        let rejections = csv_bytes(
            &["file", "line", "reason"],
            jrep.rejections
                .iter()
                .map(|r| ("journal", r))
                .chain(prep.rejections.iter().map(|r| ("patent", r)))
                .map(|(f, r)| vec![f.to_string(), r.line.to_string(), r.reason.clone()]),
        );
        Ok(vec![
            ("summary.json".into(), json_bytes(&summary)),
            ("rejections.csv".into(), rejections),
            (
                "overlap_science.csv".into(),
                overlap_csv(&registry.overlap_matrix(Side::Science)),
            ),
            (
                "overlap_technology.csv".into(),
                overlap_csv(&registry.overlap_matrix(Side::Technology)),
            ),
        ])
    }

    fn calibrate(&mut self) -> Result<Artifacts, StepError> {
        let Some(sample_path) = &self.cfg.calibration_sample else {
            return Err(StepError::Validation("calibrate needs calibration_sample".into()));
        };
        let labeled = load_labeled(sample_path).map_err(StepError::Data)?;
        let client = self.metadata_client();
        let opts = CalibrationOptions {
            bins: self.cfg.calibration_bins,
            aggregation: self.cfg.aggregation,
        };
        match calibrate_threshold(&labeled, &client, &opts) {
            Ok(cal) => {
                let summary = json!({
                    "samples": cal.samples.len(),
                    "failures": cal.failures,
                    "bins": cal.histogram.bins(),
                    "threshold": cal.threshold,
                    "misclassified": cal.misclassified(),
                    "accuracy": cal.accuracy(),
                    "configured_threshold": self.cfg.threshold,
                    "misclassified_at_configured": citegraph::linkage::misclassified_at(&cal.samples, self.cfg.threshold),
                    "histogram": cal.histogram.counts,
                });
                Ok(vec![
                    ("calibration.json".into(), json_bytes(&summary)),
                    ("samples.csv".into(), samples_csv(&cal.samples)),
                ])
            }
            Err(e) => {
                let partial = match &e {
                    CalibrationError::TooManyFailures(p) | CalibrationError::Degenerate(p, _) => Some(p),
                    CalibrationError::Empty => None,
                };
                if let Some(p) = partial {
                    let path = self.cfg.out.join("calibrate/partial.json");
                    let body = json!({"error": e.to_string(), "attempted": p.attempted, "failures": p.failures, "samples": p.samples});
                    write_atomic(&path, &json_bytes(&body)).map_err(data)?;
                }
                Err(StepError::Data(format!("calibration aborted: {e}")))
            }
        }
    }

    fn link(&mut self) -> Result<Artifacts, StepError> {
        self.load()?;
        let res = self.compute_resolutions();
        let summary = summarize(&res);
        let out = vec![
            ("resolutions.jsonl".into(), jsonl_bytes(&res)),
            (
                "summary.json".into(),
                json_bytes(&json!({"threshold": self.cfg.threshold, "counts": summary})),
            ),
        ];
        self.resolutions = Some(res);
        self.graph = None;
        Ok(out)
    }

    fn graph_step(&mut self) -> Result<Artifacts, StepError> {
        self.ensure_graph()?;
        let (_, _, g) = self.all_parts();
        let edges = csv_bytes(
            &["src", "dst", "kind"],
            g.edges()
                .iter()
                .map(|e| vec![e.src.to_string(), e.dst.to_string(), e.kind.as_str().to_string()]),
        );
        let unresolved = csv_bytes(
            &["id", "unresolved"],
            g.unresolved_counts()
                .iter()
                .map(|(id, n)| vec![id.to_string(), n.to_string()]),
        );
        let by_kind: BTreeMap<&str, usize> = g.edges().iter().fold(BTreeMap::new(), |mut m, e| {
            *m.entry(e.kind.as_str()).or_default() += 1;
            m
        });
        let summary = json!({
            "edges": g.edge_count(),
            "edges_by_kind": by_kind,
            "unresolved_references": g.total_unresolved(),
            "diagnostics": g.diagnostics,
            "counting": citegraph::graph::COUNTING,
        });
        Ok(vec![
            ("edges.csv".into(), edges),
            ("unresolved.csv".into(), unresolved),
            ("summary.json".into(), json_bytes(&summary)),
        ])
    }

    fn bowtie(&mut self) -> Result<Artifacts, StepError> {
        self.ensure_graph()?;
        let (corpus, registry, g) = self.all_parts();
        let mut bowties = Vec::new();
        let mut crosses = Vec::new();
        let mut ratios = Vec::new();
        for side in [Side::Science, Side::Technology] {
            for c in registry.collections(side) {
                bowties.push(bowtie(g, corpus, registry, &c.name).map_err(data)?);
                crosses.push(cross_domain(g, corpus, registry, &c.name).map_err(data)?);
                for b in registry.labels(side) {
                    ratios.push(directional_ratio(g, corpus, registry, &c.name, &b).map_err(data)?);
                }
            }
        }
        let n_sci = focal_population(corpus, registry, &self.cfg.focal_science)
            .map_err(data)?
            .len();
        let n_tech = focal_population(corpus, registry, &self.cfg.focal_technology)
            .map_err(data)?
            .len();
        let summary = json!({
            "focal_science": self.cfg.focal_science,
            "focal_technology": self.cfg.focal_technology,
            "papers": n_sci,
            "patents": n_tech,
            "patents_per_paper": (n_sci > 0).then(|| n_tech as f64 / n_sci as f64),
        });
        let ratio_csv = csv_bytes(
            &["a", "b", "citations_from_b", "references_into_b", "ratio"],
            ratios.iter().map(|r| {
                vec![
                    r.a.clone(),
                    r.b.clone(),
                    r.citations_from_b.to_string(),
                    r.references_into_b.to_string(),
                    opt(r.ratio),
                ]
            }),
        );
        Ok(vec![
            ("bowtie.json".into(), json_bytes(&bowties)),
            ("bowtie.csv".into(), report::bowtie_csv(&bowties)),
            ("cross_domain.json".into(), json_bytes(&crosses)),
            ("cross_domain.csv".into(), report::cross_domain_csv(&crosses)),
            ("directional.json".into(), json_bytes(&ratios)),
            ("directional.csv".into(), ratio_csv),
            ("summary.json".into(), json_bytes(&summary)),
        ])
    }

    fn collections(&self) -> Vec<(Side, String)> {
        let (_, registry) = self.parts();
        [Side::Science, Side::Technology]
            .iter()
            .flat_map(|&s| registry.collections(s).iter().map(move |c| (s, c.name.clone())))
            .collect()
    }

    fn profiles(&self) -> Result<Vec<CitationProfile>, StepError> {
        let (corpus, registry, g) = self.all_parts();
        self.collections()
            .iter()
            .map(|(_, c)| citation_profile(g, corpus, registry, c, self.cfg.max_lag).map_err(data))
            .collect()
    }

    fn growth(&self) -> Result<GrowthFits, StepError> {
        let (corpus, registry, g) = self.all_parts();
        let mut out = Vec::new();
        for (_, c) in self.collections() {
            let pubs = yearly_series(g, corpus, registry, &c, Metric::Pubs, self.window()).map_err(data)?;
            out.push((c, fit_growth(&pubs).map_err(|e| e.to_string())));
        }
        Ok(out)
    }

    fn temporal(&mut self) -> Result<Artifacts, StepError> {
        self.ensure_graph()?;
        let (corpus, registry, g) = self.all_parts();
        let w = self.window();
        let mut series = Vec::new();
        let mut components = Vec::new();
        for (_, c) in self.collections() {
            for m in Metric::ALL {
                series.push(yearly_series(g, corpus, registry, &c, m, w).map_err(data)?);
            }
            for d in [Direction::References, Direction::Citations] {
                components.extend(component_series(g, corpus, registry, &c, d, w).map_err(data)?);
            }
        }
        let profiles = self.profiles()?;
        let profile_csv = csv_bytes(
            &["collection", "lag", "p25", "p50", "p75"],
            profiles.iter().flat_map(|p| {
                (0..=p.max_lag).map(move |t| {
                    vec![
                        p.collection.clone(),
                        t.to_string(),
                        num(p.p25[t]),
                        num(p.p50[t]),
                        num(p.p75[t]),
                    ]
                })
            }),
        );
        let growth = self.growth()?;
        let mut forecasts = Vec::new();
        let mut models = Vec::new();
        for (c, m) in &growth {
            match m {
                Ok(model) => {
                    forecasts.push(forecast_series(c, &extrapolate(model, self.cfg.horizon)));
                    models.push(json!({"collection": c, "model": model}));
                }
                Err(e) => models.push(json!({"collection": c, "error": e})),
            }
        }
        Ok(vec![
            ("series.csv".into(), report::series_csv(&series)),
            ("components.csv".into(), report::series_csv(&components)),
            ("profiles.csv".into(), profile_csv),
            ("profiles.json".into(), json_bytes(&profiles)),
            ("growth.json".into(), json_bytes(&models)),
            ("forecasts.csv".into(), report::series_csv(&forecasts)),
        ])
    }

    /// Mix, profiles and counts per side.
    fn model_inputs(&self, side: Side) -> Result<ModelInputs, StepError> {
        let (corpus, registry, g) = self.all_parts();
        let mix = reference_mix(g, corpus, registry, side, self.window()).map_err(data)?;
        let profiles = self.profiles()?;
        let counts = publication_counts(corpus, registry, side).map_err(data)?;
        Ok((mix, profile_band(&profiles, Band::P50), counts))
    }

    fn expected_opts(&self) -> ExpectedOptions {
        ExpectedOptions {
            citing_from: None,
            citing_to: Some(self.cfg.window_end),
            per_year_refs: self.cfg.per_year_refs,
        }
    }

    fn simulate(&mut self) -> Result<Artifacts, StepError> {
        self.ensure_graph()?;
        let profiles = self.profiles()?;
        let growth = self.growth()?;
        let forecasts: BTreeMap<String, Vec<Forecast>> = growth
            .iter()
            .filter_map(|(c, m)| m.as_ref().ok().map(|m| (c.clone(), extrapolate(m, self.cfg.horizon))))
            .collect();
        let mut mixes = Vec::new();
        let mut expected = Vec::new();
        let mut bands = Vec::new();
        let mut combos = Vec::new();
        let mut skipped = Vec::new();
        for side in [Side::Science, Side::Technology] {
            let (mix, median, counts) = self.model_inputs(side)?;
            let (corpus, registry, g) = self.all_parts();
            for c in registry.collections(side) {
                match expected_citations(&counts, &mix, &median, &c.name, self.window(), &self.expected_opts()) {
                    Ok(s) => expected.push(s),
                    Err(e) => {
                        skipped.push(json!({"collection": c.name, "output": "expected", "reason": e.to_string()}))
                    }
                }
                let observed =
                    yearly_series(g, corpus, registry, &c.name, Metric::AvgCites, self.window()).map_err(data)?;
                let inputs = BandInputs {
                    observed_counts: &counts,
                    forecasts: &forecasts,
                    profiles: &profiles,
                    mix: &mix,
                    observed_avg_cites: &observed,
                    target: &c.name,
                    window: self.window(),
                };
                match future_citation_bands(&inputs) {
                    Ok(fb) => {
                        bands.push(fb.series);
                        for combo in fb.combinations {
                            let mut s = combo.future;
                            s.label = Some(format!("{}_{}", variant_name(combo.counts), band_name(combo.profile)));
                            combos.push(s);
                        }
                    }
                    Err(e) => {
                        skipped.push(json!({"collection": c.name, "output": "future_bands", "reason": e.to_string()}))
                    }
                }
            }
            mixes.push(mix);
        }
        let mix_csv = csv_bytes(
            &["citing", "target", "share", "refs_per_pub", "n_pubs", "n_refs"],
            mixes.iter().flat_map(|m| {
                m.rows.iter().flat_map(move |(c, row)| {
                    m.labels.iter().map(move |t| {
                        vec![
                            c.clone(),
                            t.clone(),
                            num(row.shares.get(t).copied().unwrap_or(0.0)),
                            num(row.refs_per_pub),
                            row.n_pubs.to_string(),
                            row.n_refs.to_string(),
                        ]
                    })
                })
            }),
        );
        Ok(vec![
            ("reference_mix.json".into(), json_bytes(&mixes)),
            ("reference_mix.csv".into(), mix_csv),
            ("expected.csv".into(), report::series_csv(&expected)),
            ("future_bands.csv".into(), report::series_csv(&bands)),
            ("future_combinations.csv".into(), report::series_csv(&combos)),
            ("summary.json".into(), json_bytes(&json!({"skipped": skipped}))),
        ])
    }

    fn interest(&mut self) -> Result<Artifacts, StepError> {
        self.ensure_graph()?;
        let mut all: Vec<InterestSeries> = Vec::new();
        let mut skipped = Vec::new();
        for side in [Side::Science, Side::Technology] {
            let (mix, median, counts) = self.model_inputs(side)?;
            let (corpus, registry, g) = self.all_parts();
            for c in registry.collections(side) {
                let actual: YearlySeries =
                    yearly_series(g, corpus, registry, &c.name, Metric::AvgCites, self.window()).map_err(data)?;
                match expected_citations(&counts, &mix, &median, &c.name, self.window(), &self.expected_opts())
                    .and_then(|e| interest_ratio(&actual, &e))
                {
                    Ok(s) => all.push(s),
                    Err(e) => skipped.push(json!({"collection": c.name, "reason": e.to_string()})),
                }
            }
        }
        Ok(vec![
            ("interest.csv".into(), report::interest_csv(&all)),
            (
                "interest.json".into(),
                json_bytes(&json!({"series": all, "skipped": skipped})),
            ),
        ])
    }

    fn ensure_credits(&mut self) -> Result<(), StepError> {
        self.ensure_graph()?;
        if self.credits.is_none() {
            let (corpus, registry, g) = self.all_parts();
            let papers: Vec<_> = focal_population(corpus, registry, &self.cfg.focal_science)
                .map_err(data)?
                .into_iter()
                .filter_map(|id| corpus.journal(id))
                .collect();
            self.credits = Some(credits_for(&papers, g, corpus));
        }
        Ok(())
    }

    fn region_credit(&self) -> RegionYearTable {
        let (corpus, _) = self.parts();
        region_credit(corpus, self.credits.as_deref().unwrap_or(&[]), self.window())
    }

    fn geo(&mut self) -> Result<Artifacts, StepError> {
        self.ensure_credits()?;
        let credits = self.credits.as_deref().unwrap_or(&[]);
        let table = self.region_credit();
        let total: f64 = table.values().flat_map(|y| y.values()).sum();
        let unknown: f64 = table.get("??").map(|y| y.values().sum()).unwrap_or(0.0);
        let csv = csv_bytes(
            &["region", "year", "credit"],
            table
                .iter()
                .flat_map(|(r, ys)| ys.iter().map(move |(y, v)| vec![r.clone(), y.to_string(), num(*v)])),
        );
        let summary = json!({
            "collection": self.cfg.focal_science,
            "papers_credited": credits.len(),
            "papers_in_window": credits.iter().filter(|c| self.window().contains(c.year)).count(),
            "total_credit": total,
            "unattributed_credit": unknown,
        });
        Ok(vec![
            ("credits.jsonl".into(), jsonl_bytes(credits)),
            ("credit_by_region.csv".into(), csv),
            ("summary.json".into(), json_bytes(&summary)),
        ])
    }

    fn flows(&mut self) -> Result<Artifacts, StepError> {
        self.ensure_graph()?;
        let (corpus, registry, g) = self.all_parts();
        let pf = patent_flow(corpus, registry, &self.cfg.focal_technology, self.cfg.flow_regions).map_err(data)?;
        let jf = journal_flow(corpus, g, registry, self.cfg.flow_regions);
        Ok(vec![
            ("patent_flow.csv".into(), report::flow_csv(&pf)),
            ("patent_flow_nodes.json".into(), report::flow_nodes_json(&pf)),
            ("journal_flow.csv".into(), report::flow_csv(&jf)),
            ("journal_flow_nodes.json".into(), report::flow_nodes_json(&jf)),
        ])
    }

    fn ranks(&mut self) -> Result<Artifacts, StepError> {
        self.ensure_credits()?;
        let credit = self.region_credit();
        let (corpus, registry) = self.parts();
        let patents = patent_counts_by_region(corpus, registry, &self.cfg.focal_technology).map_err(data)?;
        let w = self.window();
        let patents: RegionYearTable = patents
            .into_iter()
            .map(|(r, ys)| (r, ys.into_iter().filter(|(y, _)| w.contains(*y)).collect()))
            .collect();
        let lang = language_table(corpus, registry, &self.cfg.focal_technology, None).map_err(data)?;
        Ok(vec![
            (
                "journal_credit_ranks.csv".into(),
                report::rank_csv(&rank_table(&credit, self.cfg.top_k)),
            ),
            (
                "patent_count_ranks.csv".into(),
                report::rank_csv(&rank_table(&patents, self.cfg.top_k)),
            ),
            ("language_table.csv".into(), report::language_csv(&lang)),
            ("language_table.txt".into(), lang.render_text().into_bytes()),
        ])
    }

    fn audit_overlap(&mut self) -> Result<Artifacts, StepError> {
        self.ensure_graph()?;
        let (corpus, registry, g) = self.all_parts();
        let opts = OverlapAuditOptions {
            focal: self.cfg.focal_technology.clone(),
            neighbour_technology: self.cfg.neighbour_technology.clone(),
            neighbour_science: self.cfg.neighbour_science.clone(),
            sample_size: self.cfg.sample_size,
            seed: self.cfg.seed,
        };
        let rep = overlap_audit(g, corpus, registry, &opts).map_err(data)?;
        let csv = csv_bytes(
            &["patent", "science_refs", "shared", "fraction"],
            rep.patents.iter().map(|p| {
                vec![
                    p.patent.to_string(),
                    p.science_refs.to_string(),
                    p.shared.to_string(),
                    num(p.fraction),
                ]
            }),
        );
        Ok(vec![
            ("overlap_audit.json".into(), json_bytes(&rep)),
            ("overlap_patents.csv".into(), csv),
        ])
    }

    fn audit_funding(&mut self) -> Result<Artifacts, StepError> {
        self.load()?;
        let (corpus, registry) = self.parts();
        let papers = focal_population(corpus, registry, &self.cfg.focal_science)
            .map_err(data)?
            .into_iter()
            .filter_map(|id| corpus.journal(id));
        let rep = funding_audit(papers);
        Ok(vec![(
            "funding.json".into(),
            json_bytes(&FundingOut {
                collection: &self.cfg.focal_science,
                report: rep,
            }),
        )])
    }
}

#[derive(Serialize)]
struct FundingOut<'a> {
    collection: &'a str,
    #[serde(flatten)]
    report: citegraph::corpus::FundingReport,
}

fn variant_name(v: citegraph::temporal::CountVariant) -> &'static str {
    match v {
        citegraph::temporal::CountVariant::Low => "low",
        citegraph::temporal::CountVariant::Point => "point",
        citegraph::temporal::CountVariant::High => "high",
    }
}

fn band_name(b: Band) -> &'static str {
    match b {
        Band::P25 => "p25",
        Band::P50 => "p50",
        Band::P75 => "p75",
    }
}

fn forecast_series(collection: &str, f: &[Forecast]) -> YearlySeries {
    YearlySeries {
        collection: collection.to_string(),
        metric: "pubs_forecast".into(),
        label: None,
        points: f
            .iter()
            .map(|x| citegraph::temporal::SeriesPoint {
                year: x.year,
                value: Some(x.point),
                band_low: Some(x.low),
                band_high: Some(x.high),
            })
            .collect(),
    }
}

fn overlap_csv(m: &OverlapMatrix) -> Vec<u8> {
    let mut header = vec!["collection"];
    header.extend(m.names.iter().map(String::as_str));
    let rows = m.names.iter().zip(&m.counts).map(|(n, row)| {
        std::iter::once(n.clone())
            .chain(row.iter().map(|c| c.map_or("-".to_string(), |v| v.to_string())))
            .collect::<Vec<_>>()
    });
    csv_bytes(&header, rows)
}

fn samples_csv(samples: &[citegraph::linkage::CalibrationSample]) -> Vec<u8> {
    csv_bytes(
        &["query", "true_doi", "candidate_doi", "figure_of_merit", "correct"],
        samples.iter().map(|s| {
            vec![
                s.query.clone(),
                s.true_doi.clone(),
                s.candidate_doi.clone().unwrap_or_default(),
                num(s.figure_of_merit),
                s.correct.to_string(),
            ]
        }),
    )
}

fn sorted_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "ids"))
        .collect();
    v.sort();
    Ok(v)
}
