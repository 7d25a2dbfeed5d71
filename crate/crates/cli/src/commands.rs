//! Subcommand definitions and their implementations.

use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};
use shiftscope_core::synth::{generate, DriftKind, DriftScenario, DriftSpec};
use shiftscope_core::{
    evaluate, learn_reference, load_dataset, FeatureSchema, IsoDuration, ProfileParams, ReferenceProfile,
    ResultDocument, Thresholds,
};

use crate::api::AnalysisState;

#[derive(Debug, Parser)]
#[command(
    name = "shiftscope",
    version,
    about = "Covariate drift analysis over timestamped tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn reference histograms and the divergence null distribution.
    Profile(ProfileArgs),
    /// Score an observation dataset against a profile.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic reference/evaluation pair with injected drift.
    Synth(SynthArgs),
    /// Serve the read-only analysis API.
    Serve(ServeArgs),
    /// Write a static bundle of every API payload.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Reference CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// schema.json with features and lineage.
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long, short, default_value = "profile.json")]
    pub output: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub bins: u32,
    /// Number of sampled reference windows.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(2..))]
    pub windows: u32,
    /// Window length, ISO-8601 duration.
    #[arg(long, default_value = "P1D")]
    pub window: IsoDuration,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Observation CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, short, default_value = "result.json")]
    pub output: PathBuf,
    #[arg(long, default_value = "P1D")]
    pub granularity: IsoDuration,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    pub analysis_threshold: f64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Scenario JSON; inline flags below are ignored when given.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub numeric: usize,
    #[arg(long, default_value_t = 8)]
    pub categorical: usize,
    #[arg(long, default_value_t = 2)]
    pub engineered: usize,
    #[arg(long, default_value_t = 60)]
    pub reference_days: usize,
    #[arg(long, default_value_t = 60)]
    pub days: usize,
    #[arg(long, default_value_t = 1000)]
    pub rows_per_day: usize,
    #[arg(long, default_value = "2024-01-01")]
    pub start: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// `feature:kind:onset_day:magnitude`, e.g. `num_03:sudden_shift:30:4`.
    #[arg(long = "drift", value_parser = parse_drift)]
    pub drifts: Vec<DriftSpec>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub result: PathBuf,
    /// The observation CSV the result was computed from.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_drift(s: &str) -> Result<DriftSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [feature, kind, onset, magnitude] = parts[..] else {
        return Err("expected feature:kind:onset_day:magnitude".into());
    };
    Ok(DriftSpec {
        feature: feature.to_string(),
        kind: kind.parse::<DriftKind>().map_err(|e| e.to_string())?,
        onset_day: onset.parse().map_err(|e| format!("onset_day: {e}"))?,
        magnitude: magnitude.parse().map_err(|e| format!("magnitude: {e}"))?,
    })
}

/// Failure classes map to process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Invalid invocation, exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Anything else, exit code 1.
    #[error("{0:#}")]
    Runtime(#[from] anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl From<shiftscope_core::Error> for Failure {
    fn from(e: shiftscope_core::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

pub fn profile_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

pub fn run_profile(args: &ProfileArgs) -> Result<(), Failure> {
    let schema = FeatureSchema::load(&args.schema)?;
    shiftscope_core::lineage::validate(&schema)?;
    let dataset = load_dataset(&args.input, &schema)?;
    let params = ProfileParams {
        bin_count: args.bins as usize,
        window_length: args.window,
        window_count: args.windows as usize,
        seed: args.seed,
    };
    let profile = learn_reference(&dataset, &schema, params)?;
    profile.save(&args.output)?;
    tracing::info!(path = %args.output.display(), features = profile.features.len(), "profile written");
    Ok(())
}

pub fn run_evaluate(args: &EvaluateArgs) -> Result<(), Failure> {
    let thresholds = Thresholds::new(args.alpha, args.analysis_threshold).map_err(|e| Failure::Usage(e.to_string()))?;
    let bytes = read(&args.profile)?;
    let text = std::str::from_utf8(&bytes).context("profile is not UTF-8")?;
    let profile = ReferenceProfile::from_json(text)?;
    let dataset = load_dataset(&args.input, &profile.schema)?;
    let matrix = evaluate(&dataset, &profile, args.granularity, thresholds)?;
    let doc = ResultDocument::new(&matrix, &profile.schema, Some(profile_hash(&bytes)));
    doc.save(&args.output)?;
    let alarms: usize = matrix.alarm.iter().flatten().filter(|&&a| a).count();
    tracing::info!(path = %args.output.display(), windows = matrix.dates.len(), alarms, "result written");
    Ok(())
}

pub fn run_synth(args: &SynthArgs) -> Result<(), Failure> {
    let scenario = match &args.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            DriftScenario::from_json(&text)?
        }
        None => DriftScenario {
            numeric: args.numeric,
            categorical: args.categorical,
            engineered: args.engineered,
            reference_days: args.reference_days,
            days: args.days,
            rows_per_day: args.rows_per_day,
            start: args.start.clone(),
            drifts: args.drifts.clone(),
            seed: args.seed,
        },
    };
    generate(&scenario)?.write_to_dir(&args.out_dir)?;
    tracing::info!(dir = %args.out_dir.display(), "synthetic data written");
    Ok(())
}

pub fn load_state(args: &StateArgs) -> Result<AnalysisState, Failure> {
    let bytes = read(&args.profile)?;
    let profile = ReferenceProfile::from_json(std::str::from_utf8(&bytes).context("profile is not UTF-8")?)?;
    let result = ResultDocument::load(&args.result)?;
    match &result.profile_hash {
        Some(h) if *h != profile_hash(&bytes) => {
            tracing::warn!("result was computed from a different profile; it may be stale")
        }
        None => tracing::warn!("result carries no profile hash; cannot check staleness"),
        _ => {}
    }
    let dataset = load_dataset(&args.input, &profile.schema)?;
    AnalysisState::new(profile, result, dataset).map_err(|e| Failure::Runtime(e.into()))
}

pub fn run_export(args: &ExportArgs) -> Result<(), Failure> {
    let state = load_state(&args.state)?;
    let files = crate::export::export(&state, &args.out_dir)?;
    tracing::info!(dir = %args.out_dir.display(), files, "bundle written");
    Ok(())
}

pub fn run_serve(args: &ServeArgs) -> Result<(), Failure> {
    let state = Arc::new(load_state(&args.state)?);
    let addr = SocketAddr::new(args.host, args.port);
    let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
    rt.block_on(async move {
        let listener = crate::serve::bind(addr)
            .await
            .map_err(|e| anyhow!("cannot bind {addr}: {e}"))?;
        let bound = listener.local_addr().context("reading bound address")?;
        eprintln!("listening on http://{bound}");
        tracing::info!(addr = %bound, "serving");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        crate::serve::run(listener, state, shutdown)
            .await
            .context("server error")?;
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Profile(a) => run_profile(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Synth(a) => run_synth(a),
        Command::Serve(a) => run_serve(a),
        Command::Export(a) => run_export(a),
    }
}
