//! Agreement of main-shock times detected at different sampling steps.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::{detect_panel, DetectorParams, ShockRecord};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{
    compute_volatility, exceedance_panel, normalize_and_detrend, HalfDayCalendar, MinuteGrid,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionRow {
    pub date: NaiveDate,
    pub reference_step: usize,
    pub step: usize,
    pub t_c_reference: usize,
    pub t_c: usize,
    pub abs_diff: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionTable {
    pub rows: Vec<ResolutionRow>,
    /// Mean |T_c(step) - T_c(reference)| per compared step.
    pub mean_abs_diff: BTreeMap<usize, f64>,
    /// Days skipped per compared step because one side has no main shock.
    pub skipped: BTreeMap<usize, usize>,
}

/// Compares main-shock minutes of each step's records against the first
/// entry (the reference step). Only days present at both steps with a
/// detected main shock enter the table.
pub fn compare_resolutions<F: Scalar>(records: &[(usize, Vec<ShockRecord<F>>)]) -> ResolutionTable {
    let mut table = ResolutionTable {
        rows: Vec::new(),
        mean_abs_diff: BTreeMap::new(),
        skipped: BTreeMap::new(),
    };
    let Some(((ref_step, reference), others)) = records.split_first() else {
        return table;
    };
    let by_date: BTreeMap<NaiveDate, Option<usize>> =
        reference.iter().map(|r| (r.date, r.t_c)).collect();
    for (step, recs) in others {
        let mut total = 0usize;
        let mut n = 0usize;
        let mut skipped = 0usize;
        for r in recs {
            match (by_date.get(&r.date).copied().flatten(), r.t_c) {
                (Some(a), Some(b)) => {
                    let d = a.abs_diff(b);
                    table.rows.push(ResolutionRow {
                        date: r.date,
                        reference_step: *ref_step,
                        step: *step,
                        t_c_reference: a,
                        t_c: b,
                        abs_diff: d,
                    });
                    total += d;
                    n += 1;
                }
                _ => skipped += 1,
            }
        }
        if n > 0 {
            table.mean_abs_diff.insert(*step, total as f64 / n as f64);
        }
        table.skipped.insert(*step, skipped);
    }
    table
}

/// Threshold that leaves exactly `target_days` days with a cascade, given
/// each day's peak score: the midpoint between the `target`-th and the next
/// largest peak.
pub fn threshold_for_day_count<F: Scalar>(day_peaks: &[Option<F>], target_days: usize) -> Option<F> {
    let mut peaks: Vec<F> = day_peaks.iter().flatten().copied().collect();
    peaks.sort_by(|a, b| b.partial_cmp(a).expect("finite peak scores"));
    if target_days == 0 {
        return peaks.first().copied();
    }
    if target_days > peaks.len() {
        return None;
    }
    let lower = peaks
        .get(target_days)
        .copied()
        .unwrap_or_else(|| peaks[target_days - 1] - F::one());
    Some((peaks[target_days - 1] + lower) / F::of(2.0))
}

/// Runs detection on `grid` at every step in `steps` and compares the
/// main-shock times against the first step.
///
/// The first step uses `params.x_c`; every other step gets the threshold
/// that yields the same number of days with a cascade.
pub fn resolution_consistency<F: Scalar>(
    grid: &MinuteGrid<F>,
    calendar: &HalfDayCalendar,
    q: F,
    steps: &[usize],
    params: &DetectorParams<F>,
) -> Result<(ResolutionTable, BTreeMap<usize, F>)> {
    let mut records = Vec::new();
    let mut thresholds = BTreeMap::new();
    let mut target = None;
    for &step in steps {
        if thresholds.contains_key(&step) {
            return Err(Error::InvalidParameter(format!("step {step} listed twice")));
        }
        let raw = compute_volatility(grid, step)?;
        let nv = normalize_and_detrend(&raw, calendar)?;
        let panel = exceedance_panel(&nv, q)?;
        let scan = detect_panel(&panel, params)?;
        let recs = match target {
            None => {
                target = Some(scan.records.iter().filter(|r| r.t_c.is_some()).count());
                thresholds.insert(step, params.x_c);
                scan.records
            }
            Some(t) => {
                let peaks: Vec<Option<F>> = scan.series.iter().map(|s| s.peak()).collect();
                let x_c = threshold_for_day_count(&peaks, t).unwrap_or(params.x_c);
                thresholds.insert(step, x_c);
                let p = DetectorParams { x_c, ..params.clone() };
                scan.series.iter().map(|s| super::detect_day(s, &p)).collect()
            }
        };
        records.push((step, recs));
    }
    Ok((compare_resolutions(&records), thresholds))
}
