//! Synthetic panels with ground truth, written in the ingestion format.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use shocklab_core::synth::{generate_ensemble, render_grid, DayTruth};

use crate::config::SimulationConfig;
use crate::error::{io_error, ToolResult};
use crate::ingest::write_grid;
use crate::pipeline::sha256_hex;

#[derive(Debug, Serialize)]
struct SimulationManifest {
    tool: &'static str,
    version: &'static str,
    spec_hash: String,
    outputs: BTreeMap<String, String>,
    days: usize,
    symbols: usize,
    redraws: usize,
}

#[derive(Debug)]
pub struct SimulationOutput {
    pub truth: Vec<DayTruth>,
    pub redraws: usize,
}

/// Writes `panel.csv`, `truth.json`, `spec.cfg` and `manifest.json` to `out`.
pub fn simulate(cfg: &SimulationConfig, out: &Path) -> ToolResult<SimulationOutput> {
    let panel = generate_ensemble(&cfg.generator)?;
    let grid = render_grid::<f64>(&panel, &cfg.render)?;
    fs::create_dir_all(out).map_err(|e| io_error(&format!("creating {}", out.display()), e))?;

    let mut csv = Vec::new();
    write_grid(&grid, &mut csv)?;
    let truth = panel.truth();
    let mut truth_json = serde_json::to_vec_pretty(&truth).map_err(|e| io_error("rendering truth", e))?;
    truth_json.push(b'\n');
    let spec = cfg.render();

    let mut outputs = BTreeMap::new();
    for (name, bytes) in [
        ("panel.csv", csv.as_slice()),
        ("truth.json", truth_json.as_slice()),
        ("spec.cfg", spec.as_bytes()),
    ] {
        fs::write(out.join(name), bytes).map_err(|e| io_error(&format!("writing {name}"), e))?;
        outputs.insert(name.to_string(), sha256_hex(bytes));
    }
    let manifest = SimulationManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        spec_hash: sha256_hex(spec.as_bytes()),
        outputs,
        days: cfg.generator.days,
        symbols: cfg.generator.symbols,
        redraws: panel.total_redraws(),
    };
    let mut m = serde_json::to_vec_pretty(&manifest).map_err(|e| io_error("rendering manifest", e))?;
    m.push(b'\n');
    fs::write(out.join("manifest.json"), m).map_err(|e| io_error("writing manifest.json", e))?;
    Ok(SimulationOutput {
        truth,
        redraws: panel.total_redraws(),
    })
}
