use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};
use shocklab::config::{PipelineConfig, SimulationConfig};
use shocklab::pipeline::{run_pipeline, Inputs, Stage};
use shocklab::{simulate, ToolError, ToolResult};

/// Detection and statistics of market-wide volatility shocks in minute-bar
/// panels.
#[derive(Parser)]
#[command(name = "shocklab", version)]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a panel.
    Ingest(RunArgs),
    /// Ingest, then score days and select main shocks.
    Detect(RunArgs),
    /// Detect, then fit response curves per shock and stock.
    Fit(RunArgs),
    /// Fit, then estimate the ensemble laws.
    Laws(RunArgs),
    /// Laws, then write plot tables and the announcement comparison.
    Report(RunArgs),
    /// Every stage.
    Run(RunArgs),
    /// Generate a synthetic panel with ground truth.
    Simulate(SimArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: PathBuf,
    /// Half-day calendar, one date per line.
    #[arg(long)]
    calendar: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Exceedance threshold in standard deviations.
    #[arg(long)]
    q: Option<f64>,
    /// Score threshold.
    #[arg(long)]
    xc: Option<f64>,
    /// Largest gap inside a cascade, minutes.
    #[arg(long)]
    dl: Option<usize>,
    /// Response horizon and edge exclusion, minutes.
    #[arg(long)]
    dt: Option<usize>,
    /// Baseline smoothing window, samples.
    #[arg(long)]
    smooth: Option<usize>,
    /// Sampling step, minutes.
    #[arg(long)]
    step: Option<usize>,
}

#[derive(Args)]
struct SimArgs {
    /// Generator spec; defaults apply when omitted.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

fn load_config(a: &RunArgs) -> ToolResult<PipelineConfig> {
    let mut c = match &a.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = a.q {
        c.q = v;
    }
    if let Some(v) = a.xc {
        c.x_c = v;
    }
    if let Some(v) = a.dl {
        c.cascade_gap = v;
    }
    if let Some(v) = a.dt {
        c.horizon = v;
    }
    if let Some(v) = a.smooth {
        c.smoothing = v;
    }
    if let Some(v) = a.step {
        c.step = v;
    }
    c.validate()?;
    Ok(c)
}

fn run_stage(a: &RunArgs, until: Stage) -> ToolResult<()> {
    let cfg = load_config(a)?;
    let inputs = Inputs {
        panel: a.input.clone(),
        calendar: a.calendar.clone(),
    };
    let summary = run_pipeline(&cfg, &inputs, &a.out, until)?;
    let accepted = summary.records.iter().filter(|r| r.accepted).count();
    info!(
        "{} days, {accepted} accepted shocks, {} warnings; outputs in {}",
        summary.records.len(),
        summary.warnings.len(),
        a.out.display()
    );
    Ok(())
}

fn run_simulation(a: &SimArgs) -> ToolResult<()> {
    let mut cfg = match &a.spec {
        Some(p) => SimulationConfig::load(p)?,
        None => SimulationConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.generator.seed = seed;
        cfg.render.seed = shocklab::config::render_seed(seed);
    }
    let out = simulate(&cfg, &a.out)?;
    info!("{} days generated, {} redraws", out.truth.len(), out.redraws);
    Ok(())
}

fn dispatch(cli: &Cli) -> ToolResult<()> {
    match &cli.command {
        Command::Ingest(a) => run_stage(a, Stage::Ingest),
        Command::Detect(a) => run_stage(a, Stage::Detect),
        Command::Fit(a) => run_stage(a, Stage::Fit),
        Command::Laws(a) => run_stage(a, Stage::Laws),
        Command::Report(a) | Command::Run(a) => run_stage(a, Stage::Report),
        Command::Simulate(a) => run_simulation(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ToolError::input(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| dispatch(&cli))),
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
