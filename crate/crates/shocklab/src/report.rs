//! CSV and JSON renderings of pipeline results.

use chrono::NaiveDate;
use serde::Serialize;
use serde_json::{json, Value};
use shocklab_core::detector::{IntradayBaseline, RejectionReason, ResolutionTable, ShockRecord};
use shocklab_core::laws::{
    displaced_curves, ActivityBucket, CrossoverScan, EnsembleLaws, LawTables, OmoriFit, ShockLawRow,
    StockLawRow,
};
use shocklab_core::series::ExceedancePanel;
use shocklab_core::synth::EmpiricalPdf;

use crate::error::{io_error, ToolResult};

/// Rows of a CSV table, header first.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> ToolResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e| io_error("rendering csv", e);
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        w.into_inner().map_err(|e| io_error("rendering csv", e))
    }
}

pub fn num(v: f64) -> String {
    v.to_string()
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn fit_field(f: &Option<OmoriFit<f64>>, g: fn(&OmoriFit<f64>) -> f64) -> String {
    opt(f.as_ref().map(g))
}

pub fn pattern_table(pattern: &[f64], step: usize) -> Table {
    let mut t = Table::new(&["sample", "minute", "pattern"]);
    for (k, &p) in pattern.iter().enumerate().skip(1) {
        t.push(vec![k.to_string(), (k * step).to_string(), num(p)]);
    }
    t
}

pub fn baseline_table(b: &IntradayBaseline<f64>) -> Table {
    let mut t = Table::new(&["sample", "minute", "mean", "std", "raw_mean", "raw_std", "usable"]);
    for k in 1..b.len() {
        t.push(vec![
            k.to_string(),
            (k * b.step).to_string(),
            num(b.mean_rate[k]),
            num(b.std_rate[k]),
            num(b.raw_mean[k]),
            num(b.raw_std[k]),
            b.usable(k).to_string(),
        ]);
    }
    t
}

/// `(bin, pdf_x, pdf_x_sh)`, plus bin edges, one row per bin.
pub fn calibration_table(x: &EmpiricalPdf<f64>, x_sh: &EmpiricalPdf<f64>) -> Table {
    let mut t = Table::new(&["bin", "lo", "hi", "pdf_x", "pdf_x_sh"]);
    for i in 0..x.bins() {
        t.push(vec![
            i.to_string(),
            num(x.edges[i]),
            num(x.edges[i + 1]),
            num(x.density[i]),
            num(x_sh.density[i]),
        ]);
    }
    t
}

#[derive(Serialize)]
struct ShockLine<'a> {
    date: NaiveDate,
    t_c: Option<usize>,
    x_peak: Option<f64>,
    cascade: &'a [usize],
    weight: f64,
    accepted: bool,
    reason: Option<RejectionReason>,
}

/// One JSON object per day.
pub fn shocks_jsonl(records: &[ShockRecord<f64>]) -> ToolResult<Vec<u8>> {
    let mut out = Vec::new();
    for r in records {
        let line = ShockLine {
            date: r.date,
            t_c: r.t_c,
            x_peak: r.x_peak,
            cascade: &r.cascade,
            weight: r.weight,
            accepted: r.accepted,
            reason: r.reason,
        };
        serde_json::to_writer(&mut out, &line).map_err(|e| io_error("rendering shocks", e))?;
        out.push(b'\n');
    }
    Ok(out)
}

pub fn resolution_table(r: &ResolutionTable) -> Table {
    let mut t = Table::new(&["date", "reference_step", "step", "t_c_reference", "t_c", "abs_diff"]);
    for row in &r.rows {
        t.push(vec![
            row.date.to_string(),
            row.reference_step.to_string(),
            row.step.to_string(),
            row.t_c_reference.to_string(),
            row.t_c.to_string(),
            row.abs_diff.to_string(),
        ]);
    }
    t
}

const LAW_COLUMNS: [&str; 13] = [
    "date", "M", "omega_b", "omega_a", "alpha_b", "alpha_a", "P_b", "P_a", "V1", "V2b", "V2a", "r_b", "r_a",
];

pub fn shock_law_table(rows: &[ShockLawRow<f64>]) -> Table {
    let mut t = Table::new(&LAW_COLUMNS);
    for r in rows {
        t.push(vec![
            r.date.to_string(),
            num(r.m),
            fit_field(&r.fit_b, |f| f.omega),
            fit_field(&r.fit_a, |f| f.omega),
            fit_field(&r.fit_b, |f| f.alpha),
            fit_field(&r.fit_a, |f| f.alpha),
            num(r.p_b),
            num(r.p_a),
            num(r.v1),
            num(r.v2_b),
            num(r.v2_a),
            fit_field(&r.fit_b, |f| f.r),
            fit_field(&r.fit_a, |f| f.r),
        ]);
    }
    t
}

pub fn stock_law_table(rows: &[StockLawRow<f64>]) -> Table {
    let mut header = vec!["date", "symbol"];
    header.extend_from_slice(&LAW_COLUMNS[1..]);
    let mut t = Table::new(&header);
    for r in rows {
        t.push(vec![
            r.date.to_string(),
            r.symbol.clone(),
            num(r.m),
            fit_field(&r.fit_b, |f| f.omega),
            fit_field(&r.fit_a, |f| f.omega),
            fit_field(&r.fit_b, |f| f.alpha),
            fit_field(&r.fit_a, |f| f.alpha),
            num(r.p_b),
            num(r.p_a),
            num(r.v1),
            num(r.v2_b),
            num(r.v2_a),
            fit_field(&r.fit_b, |f| f.r),
            fit_field(&r.fit_a, |f| f.r),
        ]);
    }
    t
}

/// Ensemble summary with the headline quantities at the top level.
pub fn ensemble_json(e: &EnsembleLaws<f64>, primary_rows: usize, stock_rows: usize) -> Value {
    let pi = |f: &Option<shocklab_core::laws::ProductivityFit<f64>>| f.map(|f| f.pi);
    json!({
        "Pi_b": pi(&e.pi_b),
        "Pi_a": pi(&e.pi_a),
        "C_B_b": e.bath_b.map(|b| b.c_b),
        "C_B_a": e.bath_a.map(|b| b.c_b),
        "B_b": e.bath_b.map(|b| b.b),
        "B_a": e.bath_a.map(|b| b.b),
        "M_x": e.m_x(),
        "correlations": e.correlations,
        "productivity": {
            "market_b": e.pi_b,
            "market_a": e.pi_a,
            "market_b_log_m": e.pi_b_vs_m,
            "market_a_log_m": e.pi_a_vs_m,
            "stock_b": e.stock_pi_b,
            "stock_a": e.stock_pi_a,
            "triggering": e.triggering,
        },
        "bath": {
            "market_b": e.bath_b,
            "market_a": e.bath_a,
            "stock_b_binned_slope": e.stock_bath_b.as_ref().map(|b| b.line.slope),
            "stock_a_binned_slope": e.stock_bath_a.as_ref().map(|b| b.line.slope),
        },
        "rows": { "market": primary_rows, "stock": stock_rows },
    })
}

pub fn response_curve_table(
    ex: &ExceedancePanel<f64>,
    records: &[ShockRecord<f64>],
    horizon: usize,
) -> ToolResult<Table> {
    let mut t = Table::new(&["date", "side", "tau", "N"]);
    for rec in records.iter().filter(|r| r.accepted) {
        let Some(day) = ex.days.iter().find(|d| d.date == rec.date) else { continue };
        let Ok((b, a)) = displaced_curves(&day.rate, rec, horizon) else { continue };
        for (name, c) in [("before", &b), ("after", &a)] {
            for (tau, n) in c.tau.iter().zip(&c.cumulative) {
                t.push(vec![rec.date.to_string(), name.into(), tau.to_string(), num(*n)]);
            }
        }
    }
    Ok(t)
}

/// Market fit next to the mean of the per-stock fits of the same shock.
pub fn market_vs_stock_table(tables: &LawTables<f64>) -> Table {
    let mut t = Table::new(&[
        "date", "side", "omega_market", "alpha_market", "omega_stock_mean", "alpha_stock_mean", "stocks",
    ]);
    for m in &tables.market {
        let stocks: Vec<&StockLawRow<f64>> = tables.stocks.iter().filter(|s| s.date == m.date).collect();
        for (side, mf, pick) in [
            ("before", &m.fit_b, (|s: &StockLawRow<f64>| s.fit_b) as fn(&StockLawRow<f64>) -> Option<OmoriFit<f64>>),
            ("after", &m.fit_a, |s: &StockLawRow<f64>| s.fit_a),
        ] {
            let fits: Vec<OmoriFit<f64>> = stocks.iter().filter_map(|s| pick(s)).collect();
            let mean = |g: fn(&OmoriFit<f64>) -> f64| {
                (!fits.is_empty()).then(|| fits.iter().map(g).sum::<f64>() / fits.len() as f64)
            };
            t.push(vec![
                m.date.to_string(),
                side.into(),
                fit_field(mf, |f| f.omega),
                fit_field(mf, |f| f.alpha),
                opt(mean(|f| f.omega)),
                opt(mean(|f| f.alpha)),
                fits.len().to_string(),
            ]);
        }
    }
    t
}

pub fn crossover_table(before: &Option<CrossoverScan<f64>>, after: &Option<CrossoverScan<f64>>) -> Table {
    let mut t = Table::new(&["side", "lo", "hi", "rows", "omega", "alpha"]);
    for (side, scan) in [("before", before), ("after", after)] {
        for b in scan.iter().flat_map(|s| &s.bins) {
            t.push(vec![
                side.into(),
                num(b.lo),
                num(b.hi),
                b.rows.to_string(),
                opt(b.omega),
                opt(b.alpha),
            ]);
        }
    }
    t
}

pub fn stock_parameter_table(rows: &[StockLawRow<f64>]) -> Table {
    let mut t = Table::new(&["date", "symbol", "M", "omega_b", "omega_a", "alpha_b", "alpha_a"]);
    for r in rows {
        t.push(vec![
            r.date.to_string(),
            r.symbol.clone(),
            num(r.m),
            fit_field(&r.fit_b, |f| f.omega),
            fit_field(&r.fit_a, |f| f.omega),
            fit_field(&r.fit_b, |f| f.alpha),
            fit_field(&r.fit_a, |f| f.alpha),
        ]);
    }
    t
}

pub fn productivity_table(tables: &LawTables<f64>) -> Table {
    let mut t = Table::new(&["level", "date", "symbol", "M", "P_b", "P_a"]);
    for r in &tables.market {
        t.push(vec!["market".into(), r.date.to_string(), String::new(), num(r.m), num(r.p_b), num(r.p_a)]);
    }
    for r in &tables.stocks {
        t.push(vec!["stock".into(), r.date.to_string(), r.symbol.clone(), num(r.m), num(r.p_b), num(r.p_a)]);
    }
    t
}

pub fn before_after_table(sets: &[(usize, &[ShockLawRow<f64>])]) -> Table {
    let mut t = Table::new(&["horizon", "date", "omega_b", "omega_a", "alpha_b", "alpha_a", "P_b", "P_a"]);
    for (h, rows) in sets {
        for r in rows.iter() {
            t.push(vec![
                h.to_string(),
                r.date.to_string(),
                fit_field(&r.fit_b, |f| f.omega),
                fit_field(&r.fit_a, |f| f.omega),
                fit_field(&r.fit_b, |f| f.alpha),
                fit_field(&r.fit_a, |f| f.alpha),
                num(r.p_b),
                num(r.p_a),
            ]);
        }
    }
    t
}

pub fn bath_market_table(rows: &[ShockLawRow<f64>]) -> Table {
    let mut t = Table::new(&["date", "V1", "V2b", "V2a"]);
    for r in rows {
        t.push(vec![r.date.to_string(), num(r.v1), num(r.v2_b), num(r.v2_a)]);
    }
    t
}

pub fn bath_stock_table(e: &EnsembleLaws<f64>) -> Table {
    let mut t = Table::new(&["side", "bin", "v1_mean", "v2_mean", "v2_std", "count"]);
    for (side, fit) in [("before", &e.stock_bath_b), ("after", &e.stock_bath_a)] {
        for (i, b) in fit.iter().flat_map(|f| f.bins.iter()).enumerate() {
            t.push(vec![
                side.into(),
                i.to_string(),
                num(b.v1_mean),
                num(b.v2_mean),
                num(b.v2_std),
                b.count.to_string(),
            ]);
        }
    }
    t
}

pub fn activity_table(buckets: &[ActivityBucket<f64>]) -> Table {
    let mut t = Table::new(&[
        "lo", "hi", "rows", "activity", "alpha_b", "alpha_a", "omega_b", "omega_a", "P_b", "P_a", "v1", "v2_b", "v2_a",
    ]);
    for b in buckets {
        t.push(vec![
            num(b.lo),
            num(b.hi),
            b.rows.to_string(),
            num(b.activity),
            opt(b.alpha_b),
            opt(b.alpha_a),
            opt(b.omega_b),
            opt(b.omega_a),
            num(b.p_b),
            num(b.p_a),
            num(b.v1),
            num(b.v2_b),
            num(b.v2_a),
        ]);
    }
    t
}
