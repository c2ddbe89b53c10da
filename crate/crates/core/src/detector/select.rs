use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::cascade::{find_cascades, Cascade};
use super::score::ComovementSeries;
use super::DetectorParams;
use crate::scalar::Scalar;
use crate::series::FIRST_SAMPLE;

/// Default exclusion window, in minutes, at either end of the session.
pub const DEFAULT_EDGE_EXCLUSION: usize = 90;
/// Alternative, stricter exclusion window.
pub const ALT_EDGE_EXCLUSION: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectionReason {
    NearOpen,
    NearClose,
    HalfDay,
    NoCascade,
}

/// Main shock of one day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockRecord<F> {
    pub date: NaiveDate,
    pub step: usize,
    /// Minute after the open of the main shock.
    pub t_c: Option<usize>,
    pub x_peak: Option<F>,
    /// Minutes of the selected cascade's members.
    pub cascade: Vec<usize>,
    pub weight: F,
    pub accepted: bool,
    pub reason: Option<RejectionReason>,
}

impl<F: Scalar> ShockRecord<F> {
    /// Sample index of the main shock at the record's step.
    pub fn sample(&self) -> Option<usize> {
        self.t_c.map(|t| t / self.step)
    }
}

/// Picks the heaviest cascade (earliest on ties) and its peak sample (earliest
/// on ties), then applies the edge and half-day exclusions.
///
/// A shock is kept only if the whole window of `edge_exclusion` minutes on
/// both sides lies inside the defined part of the session.
pub fn select_main_shock<F: Scalar>(
    series: &ComovementSeries<F>,
    cascades: &[Cascade<F>],
    edge_exclusion: usize,
) -> ShockRecord<F> {
    let step = series.step;
    let mut best: Option<&Cascade<F>> = None;
    for c in cascades {
        if best.map_or(true, |b| c.weight > b.weight) {
            best = Some(c);
        }
    }
    let Some(best) = best else {
        return ShockRecord {
            date: series.date,
            step,
            t_c: None,
            x_peak: None,
            cascade: Vec::new(),
            weight: F::zero(),
            accepted: false,
            reason: Some(RejectionReason::NoCascade),
        };
    };
    let (k, x) = best.peak();
    let t_c = k * step;
    let first_minute = FIRST_SAMPLE * step;
    let last_minute = series.samples().saturating_sub(1) * step;
    let reason = if series.half_day {
        Some(RejectionReason::HalfDay)
    } else if t_c < first_minute + edge_exclusion {
        Some(RejectionReason::NearOpen)
    } else if t_c + edge_exclusion > last_minute {
        Some(RejectionReason::NearClose)
    } else {
        None
    };
    ShockRecord {
        date: series.date,
        step,
        t_c: Some(t_c),
        x_peak: Some(x),
        cascade: best.members.iter().map(|&m| m * step).collect(),
        weight: best.weight,
        accepted: reason.is_none(),
        reason,
    }
}

/// Cascade grouping followed by main-shock selection for one day.
pub fn detect_day<F: Scalar>(series: &ComovementSeries<F>, params: &DetectorParams<F>) -> ShockRecord<F> {
    let cascades = find_cascades(series, params.x_c, params.cascade_gap);
    select_main_shock(series, &cascades, params.edge_exclusion)
}
