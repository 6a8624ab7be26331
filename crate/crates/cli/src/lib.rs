//! Command-line front end for the citation-graph pipeline.

pub mod config;
pub mod manifest;
pub mod pipeline;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::{validate, RawConfig};
use pipeline::{default_transport, Pipeline, Step, StepError, TransportFactory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Config file picked up from the working directory when `--config` is absent.
pub const DEFAULT_CONFIG: &str = "citegraph.conf";

#[derive(Debug, Parser)]
#[command(name = "citegraph", version, about = "Science/technology citation graph analysis")]
struct Cli {
    /// Project config file (key = value lines).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for reference resolution.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Seed for sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Read metadata responses from this directory instead of the network.
    #[arg(long, global = true, value_name = "DIR")]
    metadata_fixtures: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override one config key.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Check the configuration and input paths.
    Validate,
    /// Load records and id lists; report rejections and collection overlap.
    Ingest,
    /// Fit the acceptance threshold on a labelled reference sample.
    Calibrate,
    /// Resolve free-text references to DOIs.
    Link,
    /// Build the citation graph.
    Graph,
    /// Bowtie, cross-domain and directional-ratio reports.
    Bowtie,
    /// Yearly series, citation profiles and growth forecasts.
    Temporal,
    /// Expected citations and future bands.
    Simulate,
    /// Actual over expected citations.
    Interest,
    /// Author-region credit.
    Geo,
    /// Region-to-region citation flows.
    Flows,
    /// Region rank tables and the patent language table.
    Ranks,
    /// Science-overlap audit of neighbouring patents.
    AuditOverlap,
    /// Funding-acknowledgement audit.
    AuditFunding,
    /// Every step in order.
    All,
}

impl Command {
    fn steps(self) -> Vec<Step> {
        match self {
            Command::Validate => vec![],
            Command::Ingest => vec![Step::Ingest],
            Command::Calibrate => vec![Step::Calibrate],
            Command::Link => vec![Step::Link],
            Command::Graph => vec![Step::Graph],
            Command::Bowtie => vec![Step::Bowtie],
            Command::Temporal => vec![Step::Temporal],
            Command::Simulate => vec![Step::Simulate],
            Command::Interest => vec![Step::Interest],
            Command::Geo => vec![Step::Geo],
            Command::Flows => vec![Step::Flows],
            Command::Ranks => vec![Step::Ranks],
            Command::AuditOverlap => vec![Step::AuditOverlap],
            Command::AuditFunding => vec![Step::AuditFunding],
            Command::All => Step::ALL.to_vec(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_transport(args, default_transport())
}

/// Like [`run`] with a caller-supplied metadata transport.
pub fn run_with_transport<I, T>(args: I, transport: TransportFactory) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };

    let mut raw = RawConfig::defaults();
    let config_path = cli.config.clone().or_else(|| {
        Path::new(DEFAULT_CONFIG)
            .is_file()
            .then(|| PathBuf::from(DEFAULT_CONFIG))
    });
    if let Some(p) = &config_path {
        if let Err(e) = raw.load_file(p) {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    }
    let cwd = Path::new("");
    for kv in &cli.set {
        match kv.split_once('=') {
            Some((k, v)) => raw.set(k.trim(), v.trim(), cwd),
            None => raw.syntax_errors.push(format!("--set {kv}: expected KEY=VALUE")),
        }
    }
    if let Some(s) = cli.seed {
        raw.set("seed", &s.to_string(), cwd);
    }
    if let Some(d) = &cli.metadata_fixtures {
        raw.set("metadata_fixtures", &d.to_string_lossy(), cwd);
        raw.set("metadata_mode", "fixture", cwd);
    }
    if let Some(o) = &cli.out {
        raw.set("out", &o.to_string_lossy(), cwd);
    }

    let (cfg, report) = validate(&raw);
    if !report.is_empty() {
        for l in report.lines() {
            eprintln!("invalid config: {l}");
        }
        return EXIT_VALIDATION;
    }
    let cfg = cfg.expect("valid config");
    if matches!(cli.command, Command::Validate) {
        println!("config ok");
        return EXIT_OK;
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_DATA;
        }
    };

    pool.install(|| {
        let mut pipeline = match Pipeline::new(&cfg, transport) {
            Ok(p) => p,
            Err(e) => return report_error(&e),
        };
        let mut status = EXIT_OK;
        for step in cli.command.steps() {
            if let Err(e) = pipeline.run(step) {
                // `all` skips calibration when no sample is configured
                if matches!(cli.command, Command::All) && step == Step::Calibrate && cfg.calibration_sample.is_none() {
                    log::info!("skipping calibrate: no calibration_sample");
                    continue;
                }
                status = report_error(&e);
                break;
            }
        }
        if let Err(e) = pipeline.write_manifest() {
            return report_error(&e);
        }
        status
    })
}

fn report_error(e: &StepError) -> i32 {
    eprintln!("error: {e}");
    match e {
        StepError::Validation(_) => EXIT_VALIDATION,
        StepError::Data(_) => EXIT_DATA,
    }
}
