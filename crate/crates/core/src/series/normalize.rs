//! Per-symbol scaling and removal of the intraday U-shaped activity pattern.
//!
//! Volatility is first divided by each symbol's standard deviation over the
//! whole period, then every value at intraday sample `k` is divided by the
//! mean scaled volatility at `k` over all symbols and all full trading days.
//! The pattern is multiplicative; half-days are excluded from its estimate
//! but are still detrended with it.

use serde::Serialize;

use super::grid::HalfDayCalendar;
use super::volatility::{VolatilityPanel, FIRST_SAMPLE};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    /// Fewer than two days with data.
    TooFewDays,
    /// Full-period standard deviation is zero.
    ZeroVariance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedSymbol {
    pub symbol: String,
    pub reason: DropReason,
}

/// Volatility in units of full-period standard deviation with the intraday
/// pattern removed.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedVolatility<F> {
    pub panel: VolatilityPanel<F>,
    /// Full-period standard deviation of the raw series, per retained symbol.
    pub sigma_full: Vec<F>,
    /// Multiplicative intraday pattern per sample; index 0 is unused and 1.
    pub pattern: Vec<F>,
    pub dropped: Vec<DroppedSymbol>,
}

impl<F: Scalar> NormalizedVolatility<F> {
    pub fn symbols(&self) -> &[String] {
        &self.panel.symbols
    }

    /// Cross-symbol, cross-full-day mean at each sample (1 by construction).
    pub fn full_day_minute_means(&self) -> Vec<F> {
        let len = self.pattern.len();
        let mut sum = vec![F::zero(); len];
        let mut cnt = vec![0usize; len];
        for day in self.panel.days.iter().filter(|d| !d.half_day) {
            for s in day.series.iter().flatten() {
                for k in FIRST_SAMPLE..len.min(s.len()) {
                    sum[k] += s[k];
                    cnt[k] += 1;
                }
            }
        }
        sum.iter()
            .zip(&cnt)
            .map(|(&s, &c)| if c > 0 { s / F::of_usize(c) } else { F::nan() })
            .collect()
    }
}

pub fn normalize_and_detrend<F: Scalar>(
    raw: &VolatilityPanel<F>,
    calendar: &HalfDayCalendar,
) -> Result<NormalizedVolatility<F>> {
    let n_sym = raw.symbols.len();
    let mut keep = Vec::with_capacity(n_sym);
    let mut sigma_full = Vec::new();
    let mut dropped = Vec::new();

    for j in 0..n_sym {
        let days_present = raw.days.iter().filter(|d| d.series[j].is_some()).count();
        if days_present < 2 {
            dropped.push(DroppedSymbol {
                symbol: raw.symbols[j].clone(),
                reason: DropReason::TooFewDays,
            });
            continue;
        }
        let values: Vec<F> = raw.symbol_values(j).collect();
        let sigma = crate::stats::std_dev(&values).unwrap_or_else(F::zero);
        if !(sigma > F::zero()) || !sigma.is_finite() {
            dropped.push(DroppedSymbol {
                symbol: raw.symbols[j].clone(),
                reason: DropReason::ZeroVariance,
            });
            continue;
        }
        keep.push(j);
        sigma_full.push(sigma);
    }
    if keep.is_empty() {
        return Err(Error::Degenerate(
            "no symbol survives variance and day-count checks".into(),
        ));
    }

    let mut days: Vec<_> = raw
        .days
        .iter()
        .map(|d| super::volatility::VolDay {
            date: d.date,
            samples: d.samples,
            half_day: calendar.contains(d.date),
            series: keep
                .iter()
                .zip(&sigma_full)
                .map(|(&j, &sigma)| {
                    d.series[j]
                        .as_ref()
                        .map(|s| s.iter().map(|&v| v / sigma).collect::<Vec<F>>())
                })
                .collect(),
        })
        .collect();

    let full_len = {
        let mut lens = days
            .iter()
            .filter(|d| !d.half_day && d.present() > 0)
            .map(|d| d.samples);
        let first = lens.next().ok_or_else(|| {
            Error::Degenerate("no full trading day to estimate the intraday pattern".into())
        })?;
        if lens.any(|l| l != first) {
            return Err(Error::Degenerate(
                "full trading days differ in length".into(),
            ));
        }
        first
    };
    if let Some(d) = days.iter().find(|d| d.half_day && d.samples > full_len) {
        return Err(Error::Degenerate(format!(
            "half-day {} is longer than a full session",
            d.date
        )));
    }

    let mut pattern = vec![F::zero(); full_len];
    let mut counts = vec![0usize; full_len];
    for day in days.iter().filter(|d| !d.half_day) {
        for s in day.series.iter().flatten() {
            for k in FIRST_SAMPLE..full_len {
                pattern[k] += s[k];
                counts[k] += 1;
            }
        }
    }
    if full_len > 0 {
        pattern[0] = F::one();
    }
    for k in FIRST_SAMPLE..full_len {
        pattern[k] /= F::of_usize(counts[k]);
        if !(pattern[k] > F::zero()) {
            return Err(Error::Degenerate(format!(
                "intraday pattern vanishes at sample {k}"
            )));
        }
    }

    for day in &mut days {
        for s in day.series.iter_mut().flatten() {
            for k in FIRST_SAMPLE..s.len() {
                s[k] /= pattern[k];
            }
        }
    }

    Ok(NormalizedVolatility {
        panel: VolatilityPanel {
            step: raw.step,
            symbols: keep.iter().map(|&j| raw.symbols[j].clone()).collect(),
            days,
        },
        sigma_full,
        pattern,
        dropped,
    })
}
