use serde::{Deserialize, Serialize};

use crate::detector::ShockRecord;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::FIRST_SAMPLE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Before,
    After,
}

/// Cumulative number of exceedances at displaced times `tau = 1..=horizon`
/// on one side of a main shock. The main-shock sample itself is counted on
/// neither side.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve<F> {
    pub side: Side,
    /// Displaced time in minutes, strictly increasing.
    pub tau: Vec<usize>,
    pub cumulative: Vec<F>,
    /// Horizon in minutes.
    pub horizon: usize,
}

impl<F: Scalar> ResponseCurve<F> {
    /// `N(horizon)`.
    pub fn terminal(&self) -> F {
        self.cumulative.last().copied().unwrap_or_else(F::zero)
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }
}

/// Before/after curves around sample `center` of a per-sample rate series
/// (market fraction or a single stock's 0/1 indicator), for `horizon`
/// samples on each side. `step` converts samples to minutes.
pub fn displaced_curves_at<F: Scalar>(
    rate: &[F],
    center: usize,
    horizon: usize,
    step: usize,
) -> Result<(ResponseCurve<F>, ResponseCurve<F>)> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    if center < FIRST_SAMPLE + horizon || center + horizon >= rate.len() {
        return Err(Error::InvalidParameter(format!(
            "window of {horizon} samples around sample {center} leaves the day ({} samples)",
            rate.len()
        )));
    }
    let tau: Vec<usize> = (1..=horizon).map(|t| t * step).collect();
    let mut before = Vec::with_capacity(horizon);
    let mut after = Vec::with_capacity(horizon);
    let (mut nb, mut na) = (F::zero(), F::zero());
    for t in 1..=horizon {
        nb += rate[center - t];
        na += rate[center + t];
        before.push(nb);
        after.push(na);
    }
    Ok((
        ResponseCurve {
            side: Side::Before,
            tau: tau.clone(),
            cumulative: before,
            horizon: horizon * step,
        },
        ResponseCurve {
            side: Side::After,
            tau,
            cumulative: after,
            horizon: horizon * step,
        },
    ))
}

/// [`displaced_curves_at`] for an accepted shock, horizon in minutes.
pub fn displaced_curves<F: Scalar>(
    rate: &[F],
    shock: &ShockRecord<F>,
    horizon_minutes: usize,
) -> Result<(ResponseCurve<F>, ResponseCurve<F>)> {
    let center = match (shock.accepted, shock.sample()) {
        (true, Some(k)) => k,
        _ => return Err(Error::UnacceptedShock { date: shock.date }),
    };
    displaced_curves_at(rate, center, horizon_minutes / shock.step, shock.step)
}
