//! Staged batch run: ingest, detect, fit, laws, report.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use shocklab_core::detector::{
    build_baseline_min_days, calibrate_threshold, detect_day, resolution_consistency, score_panel,
    ComovementSeries, DetectorParams, IntradayBaseline, RejectionReason, ShockRecord,
    ThresholdCalibration,
};
use shocklab_core::laws::{
    activity_profile, activity_rows, ensemble_laws, magnitude_grid, shock_laws, ActivityBucket,
    EnsembleLaws, EnsembleSettings, LawTables,
};
use shocklab_core::series::{
    compute_volatility, exceedance_panel, normalize_and_detrend, ExceedancePanel, HalfDayCalendar,
    MinuteGrid, NormalizedVolatility,
};
use shocklab_core::stats::log_edges;
use shocklab_core::synth::{empirical_pdf, shuffle_intraday, EmpiricalPdf, DEFAULT_PDF_HI, DEFAULT_PDF_LO};

use crate::config::PipelineConfig;
use crate::error::{io_error, ToolError, ToolResult};
use crate::ingest::{ingest_file, read_calendar, IngestReport};
use crate::report::{self, Table};
use crate::table1::{table1_rows, table1_table};

/// Name of the marker written when a stage fails.
pub const FAILED_MARKER: &str = "FAILED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Detect,
    Fit,
    Laws,
    Report,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Detect => "detect",
            Stage::Fit => "fit",
            Stage::Laws => "laws",
            Stage::Report => "report",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Inputs {
    pub panel: PathBuf,
    /// Overrides the calendar named in the configuration.
    pub calendar: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub role: &'static str,
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub config: String,
    pub inputs: Vec<InputDigest>,
    pub stages: Vec<&'static str>,
    pub counts: BTreeMap<&'static str, BTreeMap<String, usize>>,
    pub outputs: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

/// Everything a run computed, for callers that want more than files.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub ingest: Option<IngestReport>,
    pub x_c: Option<f64>,
    pub calibration: Option<ThresholdCalibration<f64>>,
    pub records: Vec<ShockRecord<f64>>,
    pub tables: Option<LawTables<f64>>,
    pub alt_tables: Option<LawTables<f64>>,
    pub ensemble: Option<EnsembleLaws<f64>>,
    pub activity: Vec<ActivityBucket<f64>>,
    pub fraction_above_xc: Option<f64>,
    pub warnings: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes files below the output directory and remembers their digests.
struct OutDir {
    root: PathBuf,
    digests: BTreeMap<String, String>,
}

impl OutDir {
    fn write(&mut self, rel: &str, bytes: &[u8]) -> ToolResult<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_error(&format!("creating {}", parent.display()), e))?;
        }
        fs::write(&path, bytes).map_err(|e| io_error(&format!("writing {}", path.display()), e))?;
        self.digests.insert(rel.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn table(&mut self, rel: &str, t: &Table) -> ToolResult<()> {
        self.write(rel, &t.to_csv()?)
    }

    fn json(&mut self, rel: &str, v: &impl Serialize) -> ToolResult<()> {
        let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| io_error("rendering json", e))?;
        bytes.push(b'\n');
        self.write(rel, &bytes)
    }
}

struct Run<'a> {
    cfg: &'a PipelineConfig,
    out: OutDir,
    counts: BTreeMap<&'static str, BTreeMap<String, usize>>,
    stages: Vec<&'static str>,
    summary: RunSummary,
    timing: BTreeMap<&'static str, f64>,
}

impl Run<'_> {
    fn count(&mut self, stage: Stage, key: &str, n: usize) {
        self.counts.entry(stage.name()).or_default().insert(key.to_string(), n);
    }

    fn warn(&mut self, msg: String) {
        warn!("{msg}");
        self.summary.warnings.push(msg);
    }
}

fn digest_input(role: &'static str, path: &Path) -> ToolResult<InputDigest> {
    let bytes = fs::read(path).map_err(|e| ToolError::input(format!("cannot read {}: {e}", path.display())))?;
    Ok(InputDigest {
        role,
        name: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        bytes: bytes.len() as u64,
        sha256: sha256_hex(&bytes),
    })
}

/// Runs every stage up to and including `until`, writing results to `out`.
///
/// On failure a `FAILED` marker naming the stage is left in `out` and the
/// error is returned with its stage attached.
pub fn run_pipeline(cfg: &PipelineConfig, inputs: &Inputs, out: &Path, until: Stage) -> ToolResult<RunSummary> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(|e| io_error(&format!("creating {}", out.display()), e))?;
    let marker = out.join(FAILED_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(|e| io_error("removing stale marker", e))?;
    }
    let mut run = Run {
        cfg,
        out: OutDir {
            root: out.to_path_buf(),
            digests: BTreeMap::new(),
        },
        counts: BTreeMap::new(),
        stages: Vec::new(),
        summary: RunSummary::default(),
        timing: BTreeMap::new(),
    };
    match run_stages(&mut run, inputs, until) {
        Ok(()) => Ok(run.summary),
        Err(e) => {
            let _ = fs::write(&marker, format!("{e}\n"));
            Err(e)
        }
    }
}

fn timed<T>(run: &mut Run, stage: Stage, f: impl FnOnce(&mut Run) -> ToolResult<T>) -> ToolResult<T> {
    info!("stage {}", stage.name());
    let t0 = Instant::now();
    let v = f(run).map_err(|e| e.at(stage.name()))?;
    run.timing.insert(stage.name(), t0.elapsed().as_secs_f64());
    run.stages.push(stage.name());
    Ok(v)
}

struct Detected {
    nv: NormalizedVolatility<f64>,
    ex: ExceedancePanel<f64>,
    series: Vec<ComovementSeries<f64>>,
    params: DetectorParams<f64>,
}

fn run_stages(run: &mut Run, inputs: &Inputs, until: Stage) -> ToolResult<()> {
    let cfg = run.cfg;
    let calendar_path = inputs.calendar.clone().or_else(|| cfg.calendar.clone());
    let mut digests = vec![digest_input("panel", &inputs.panel).map_err(|e| e.at("ingest"))?];
    if let Some(p) = &calendar_path {
        digests.push(digest_input("calendar", p).map_err(|e| e.at("ingest"))?);
    }

    let (grid, calendar) = timed(run, Stage::Ingest, |run| stage_ingest(run, inputs, calendar_path.as_deref()))?;
    if until > Stage::Ingest {
        let det = timed(run, Stage::Detect, |run| stage_detect(run, &grid, &calendar))?;
        if until > Stage::Detect {
            timed(run, Stage::Fit, |run| stage_fit(run, &det))?;
        }
        if until > Stage::Fit {
            timed(run, Stage::Laws, |run| stage_laws(run, &grid))?;
        }
        if until > Stage::Laws {
            timed(run, Stage::Report, |run| stage_report(run, &det))?;
        }
    }

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: sha256_hex(cfg.render().as_bytes()),
        config: cfg.render(),
        inputs: digests,
        stages: run.stages.clone(),
        counts: run.counts.clone(),
        outputs: run.out.digests.clone(),
        warnings: run.summary.warnings.clone(),
    };
    run.out.json("manifest.json", &manifest)?;
    // Wall-clock times vary between runs, so they stay out of the manifest.
    let timing = run.timing.clone();
    run.out.json("timing.json", &timing)?;
    Ok(())
}

fn stage_ingest(
    run: &mut Run,
    inputs: &Inputs,
    calendar_path: Option<&Path>,
) -> ToolResult<(MinuteGrid<f64>, HalfDayCalendar)> {
    let calendar = match calendar_path {
        Some(p) => read_calendar(p)?,
        None => HalfDayCalendar::default(),
    };
    let (grid, report) = ingest_file(&inputs.panel, &calendar, run.cfg.activity_floor)?;
    run.count(Stage::Ingest, "rows", report.rows);
    run.count(Stage::Ingest, "days", report.days);
    run.count(Stage::Ingest, "half_days", report.half_days);
    run.count(Stage::Ingest, "symbols_seen", report.symbols_seen);
    run.count(Stage::Ingest, "symbols_retained", report.retained.len());
    run.count(Stage::Ingest, "symbols_dropped", report.dropped.len());
    run.out.json("ingest_report.json", &report)?;
    run.summary.ingest = Some(report);
    Ok((grid, calendar))
}

fn all_scores(series: &[ComovementSeries<f64>]) -> Vec<f64> {
    series
        .iter()
        .flat_map(|s| s.score.iter().flatten().copied())
        .collect()
}

fn score_pdf(
    nv: &NormalizedVolatility<f64>,
    cfg: &PipelineConfig,
    edges: &[f64],
) -> ToolResult<(ExceedancePanel<f64>, IntradayBaseline<f64>, Vec<ComovementSeries<f64>>, EmpiricalPdf<f64>)> {
    let ex = exceedance_panel(nv, cfg.q)?;
    let baseline = build_baseline_min_days(&ex, cfg.smoothing, cfg.min_baseline_days)?;
    let series = score_panel(&ex, &baseline)?;
    let pdf = empirical_pdf(&all_scores(&series), edges)?;
    Ok((ex, baseline, series, pdf))
}

fn stage_detect(run: &mut Run, grid: &MinuteGrid<f64>, calendar: &HalfDayCalendar) -> ToolResult<Detected> {
    let cfg = run.cfg;
    let raw = compute_volatility(grid, cfg.step)?;
    let nv = normalize_and_detrend(&raw, calendar)?;
    run.count(Stage::Detect, "symbols_normalized", nv.symbols().len());
    run.count(Stage::Detect, "symbols_dropped", nv.dropped.len());
    for d in &nv.dropped {
        let msg = format!("symbol {} dropped before scoring: {:?}", d.symbol, d.reason);
        run.warn(msg);
    }
    run.out.table("pattern.csv", &report::pattern_table(&nv.pattern, cfg.step))?;

    let edges = log_edges(DEFAULT_PDF_LO, DEFAULT_PDF_HI, cfg.pdf_bins_per_decade);
    let (ex, baseline, series, pdf_x) = score_pdf(&nv, cfg, &edges)?;
    run.out.table("baseline.csv", &report::baseline_table(&baseline))?;

    // The shuffled reference gets its own baseline so both pdfs are scored
    // against the intraday profile of the data they came from.
    let shuffled = shuffle_intraday(&nv, cfg.seed);
    let (_, _, _, pdf_sh) = score_pdf(&shuffled, cfg, &edges)?;
    run.out.table("calibration.csv", &report::calibration_table(&pdf_x, &pdf_sh))?;
    let cal = calibrate_threshold(&pdf_x, &pdf_sh, cfg.divergence_ratio, cfg.x_c)?;
    if let Some(w) = &cal.warning {
        let msg = format!("threshold calibration: {w}");
        run.warn(msg);
    }
    let x_c = if cfg.calibrate_xc { cal.x_c } else { cfg.x_c };
    info!("x_c = {x_c} (pdf divergence suggests {})", cal.x_c);

    let params = DetectorParams {
        x_c,
        cascade_gap: cfg.cascade_gap,
        edge_exclusion: cfg.horizon,
        smoothing_window: cfg.smoothing,
        min_baseline_days: cfg.min_baseline_days,
    };
    let records: Vec<ShockRecord<f64>> = series.par_iter().map(|s| detect_day(s, &params)).collect();
    run.out.write("shocks.jsonl", &report::shocks_jsonl(&records)?)?;

    let accepted = records.iter().filter(|r| r.accepted).count();
    run.count(Stage::Detect, "days", records.len());
    run.count(Stage::Detect, "accepted", accepted);
    for (reason, key) in [
        (RejectionReason::NoCascade, "rejected_no_cascade"),
        (RejectionReason::NearOpen, "rejected_near_open"),
        (RejectionReason::NearClose, "rejected_near_close"),
        (RejectionReason::HalfDay, "rejected_half_day"),
    ] {
        let n = records.iter().filter(|r| r.reason == Some(reason)).count();
        run.count(Stage::Detect, key, n);
    }
    if accepted == 0 {
        run.warn("no accepted main shocks; law tables will be empty".into());
    }

    let scores = all_scores(&series);
    if !scores.is_empty() {
        let above = scores.iter().filter(|&&x| x > x_c).count();
        run.summary.fraction_above_xc = Some(above as f64 / scores.len() as f64);
    }

    if cfg.resolution_steps.len() >= 2 {
        match resolution_consistency(grid, calendar, cfg.q, &cfg.resolution_steps, &params) {
            Ok((table, thresholds)) => {
                run.out.table("resolution.csv", &report::resolution_table(&table))?;
                run.count(Stage::Detect, "resolution_rows", table.rows.len());
                for (step, x) in thresholds {
                    info!("resolution step {step}: x_c = {x}");
                }
            }
            Err(e) => {
                let msg = format!("resolution check skipped: {e}");
                run.warn(msg);
            }
        }
    }

    run.summary.x_c = Some(x_c);
    run.summary.calibration = Some(cal);
    run.summary.records = records;
    Ok(Detected { nv, ex, series, params })
}

fn stage_fit(run: &mut Run, det: &Detected) -> ToolResult<()> {
    let cfg = run.cfg;
    let records = &run.summary.records;
    let tables = shock_laws(&det.nv, &det.ex, records, cfg.horizon)?;

    let alt_params = DetectorParams {
        edge_exclusion: cfg.alt_horizon,
        ..det.params.clone()
    };
    let alt_records: Vec<ShockRecord<f64>> = det.series.par_iter().map(|s| detect_day(s, &alt_params)).collect();
    let alt = shock_laws(&det.nv, &det.ex, &alt_records, cfg.alt_horizon)?;

    let accepted = records.iter().filter(|r| r.accepted).count();
    let market_skipped = tables.skipped.iter().filter(|s| s.symbol.is_none()).count();
    if tables.market.len() + market_skipped != accepted {
        return Err(ToolError::internal(format!(
            "{accepted} accepted shocks but {} market rows and {market_skipped} skips",
            tables.market.len()
        )));
    }
    run.count(Stage::Fit, "market_rows", tables.market.len());
    run.count(Stage::Fit, "market_skipped", market_skipped);
    run.count(Stage::Fit, "stock_rows", tables.stocks.len());
    run.count(Stage::Fit, "stock_skipped", tables.skipped.len() - market_skipped);
    run.count(Stage::Fit, "alt_market_rows", alt.market.len());
    for s in tables.skipped.iter().filter(|s| s.symbol.is_none()) {
        let msg = format!("shock on {} left out of the law tables: {}", s.date, s.reason);
        run.warn(msg);
    }

    run.out.table("shock_laws.csv", &report::shock_law_table(&tables.market))?;
    run.out.table(&format!("shock_laws_h{}.csv", cfg.alt_horizon), &report::shock_law_table(&alt.market))?;
    run.out.table("stock_laws.csv", &report::stock_law_table(&tables.stocks))?;
    let mut skips = Table::new(&["date", "symbol", "reason"]);
    for s in &tables.skipped {
        skips.push(vec![s.date.to_string(), s.symbol.clone().unwrap_or_default(), s.reason.clone()]);
    }
    run.out.table("law_skips.csv", &skips)?;
    run.summary.tables = Some(tables);
    run.summary.alt_tables = Some(alt);
    Ok(())
}

fn stage_laws(run: &mut Run, grid: &MinuteGrid<f64>) -> ToolResult<()> {
    let cfg = run.cfg;
    let tables = run.summary.tables.take().expect("fit stage ran");
    let alt = run.summary.alt_tables.take().expect("fit stage ran");
    let settings = EnsembleSettings {
        eta_v: cfg.eta_v,
        bath_bins: cfg.bath_bins,
        magnitude_edges: magnitude_grid(cfg.crossover_lo, cfg.crossover_hi, cfg.crossover_bins),
    };
    let ensemble = ensemble_laws(&tables, &[&alt.market], &settings);
    for (what, missing) in [
        ("market productivity", ensemble.pi_a.is_none()),
        ("market Bath ratio", ensemble.bath_a.is_none()),
        ("crossover magnitude", ensemble.m_x().is_none()),
    ] {
        if missing {
            let msg = format!("{what} not estimated: too few rows");
            run.warn(msg);
        }
    }
    run.out.json(
        "ensemble.json",
        &report::ensemble_json(&ensemble, tables.market.len(), tables.stocks.len()),
    )?;

    let activity = if grid.has_trades() {
        let by_symbol: BTreeMap<&str, f64> = grid
            .symbols()
            .iter()
            .enumerate()
            .filter_map(|(j, s)| grid.mean_trades_per_minute(j).map(|a| (s.as_str(), a)))
            .collect();
        let rows = activity_rows(&tables.stocks, |s| by_symbol.get(s).copied());
        activity_profile(&rows, cfg.activity_bins)
    } else {
        Vec::new()
    };
    run.count(Stage::Laws, "correlations", ensemble.correlations.len());
    run.count(Stage::Laws, "activity_buckets", activity.len());
    run.summary.ensemble = Some(ensemble);
    run.summary.activity = activity;
    run.summary.tables = Some(tables);
    run.summary.alt_tables = Some(alt);
    Ok(())
}

fn stage_report(run: &mut Run, det: &Detected) -> ToolResult<()> {
    let cfg = run.cfg;
    let s = std::mem::take(&mut run.summary);
    let tables = s.tables.as_ref().expect("fit stage ran");
    let alt = s.alt_tables.as_ref().expect("fit stage ran");
    let ensemble = s.ensemble.as_ref().expect("laws stage ran");

    let mut files: Vec<(&str, Table)> = vec![
        ("plots/fig06_response_curves.csv", report::response_curve_table(&det.ex, &s.records, cfg.horizon)?),
        ("plots/fig07_market_vs_stock.csv", report::market_vs_stock_table(tables)),
        ("plots/fig08_crossover.csv", report::crossover_table(&ensemble.crossover_b, &ensemble.crossover_a)),
        ("plots/fig09_stock_parameters.csv", report::stock_parameter_table(&tables.stocks)),
        ("plots/fig10_productivity.csv", report::productivity_table(tables)),
        (
            "plots/fig11_before_after.csv",
            report::before_after_table(&[(cfg.horizon, &tables.market), (cfg.alt_horizon, &alt.market)]),
        ),
        ("plots/fig12_bath_market.csv", report::bath_market_table(&tables.market)),
        ("plots/fig12_bath_stock_bins.csv", report::bath_stock_table(ensemble)),
        ("plots/fig13_activity.csv", report::activity_table(&s.activity)),
    ];
    let t1 = table1_rows(&s.records);
    let t1_len = t1.len();
    if t1.is_empty() {
        let msg = "no announcement date from the reference table is in the data; table1 comparison skipped".to_string();
        run.warn(msg);
    } else {
        files.push(("table1.csv", table1_table(&t1)));
    }
    // The score pdf figure is the calibration table under its figure name.
    let calib = fs::read(run.out.root.join("calibration.csv")).map_err(|e| io_error("reading calibration.csv", e))?;
    run.out.write("plots/fig05_score_pdf.csv", &calib)?;
    for (name, t) in &files {
        run.out.table(name, t)?;
        run.count(Stage::Report, name.rsplit('/').next().unwrap_or(name), t.rows.len());
    }
    let summary = serde_json::json!({
        "x_c": s.x_c,
        "fraction_minutes_above_x_c": s.fraction_above_xc,
        "accepted_shocks": tables.market.len(),
        "table1_matches": t1_len,
        "M_x": ensemble.m_x(),
    });
    run.out.json("report.json", &summary)?;
    let warnings = std::mem::replace(&mut run.summary.warnings, Vec::new());
    run.summary = s;
    run.summary.warnings.extend(warnings);
    Ok(())
}
