use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{ExceedancePanel, FIRST_SAMPLE};

pub const DEFAULT_SMOOTHING_WINDOW: usize = 15;
/// Fewest full trading days a baseline is estimated from.
pub const MIN_BASELINE_DAYS: usize = 30;

/// Intraday mean and dispersion of the market exceedance rate.
///
/// Indices are samples of the panel the baseline was built from; sample 0
/// carries no value and is always excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayBaseline<F> {
    pub step: usize,
    /// Smoothed per-sample mean of the exceedance rate across days.
    pub mean_rate: Vec<F>,
    /// Smoothed per-sample standard deviation across days.
    pub std_rate: Vec<F>,
    pub raw_mean: Vec<F>,
    pub raw_std: Vec<F>,
    pub smoothing_window: usize,
    /// Samples that cannot be scored (undefined or zero dispersion).
    pub excluded: Vec<usize>,
    pub days_used: usize,
}

impl<F: Scalar> IntradayBaseline<F> {
    pub fn len(&self) -> usize {
        self.mean_rate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_rate.is_empty()
    }

    pub fn usable(&self, k: usize) -> bool {
        k >= FIRST_SAMPLE && k < self.len() && self.std_rate[k] > F::zero()
    }
}

/// Per-sample mean and standard deviation of the market rate over full days,
/// each smoothed by a centred moving average.
pub fn build_baseline<F: Scalar>(
    panel: &ExceedancePanel<F>,
    smoothing_window: usize,
) -> Result<IntradayBaseline<F>> {
    build_baseline_min_days(panel, smoothing_window, MIN_BASELINE_DAYS)
}

pub fn build_baseline_min_days<F: Scalar>(
    panel: &ExceedancePanel<F>,
    smoothing_window: usize,
    min_days: usize,
) -> Result<IntradayBaseline<F>> {
    if smoothing_window == 0 || smoothing_window % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "smoothing window must be odd and positive, got {smoothing_window}"
        )));
    }
    let full: Vec<_> = panel
        .days
        .iter()
        .filter(|d| !d.half_day && d.present > 0)
        .collect();
    if full.len() < min_days {
        return Err(Error::Insufficient(format!(
            "baseline needs at least {min_days} full days, got {}",
            full.len()
        )));
    }
    let len = full[0].samples;
    if full.iter().any(|d| d.samples != len) {
        return Err(Error::Degenerate("full trading days differ in length".into()));
    }

    let mut raw_mean = vec![F::zero(); len];
    let mut raw_std = vec![F::zero(); len];
    let mut column = Vec::with_capacity(full.len());
    for k in FIRST_SAMPLE..len {
        column.clear();
        column.extend(full.iter().map(|d| d.rate[k]));
        raw_mean[k] = crate::stats::mean(&column).unwrap_or_else(F::zero);
        let first = column[0];
        raw_std[k] = if column.iter().all(|&v| v == first) {
            F::zero()
        } else {
            crate::stats::std_dev(&column).unwrap_or_else(F::zero)
        };
    }

    let mean_rate = smooth_preserving_mass(&raw_mean, smoothing_window);
    let std_rate = smooth_preserving_mass(&raw_std, smoothing_window);
    let excluded = (0..len)
        .filter(|&k| k < FIRST_SAMPLE || !(std_rate[k] > F::zero()))
        .collect();

    Ok(IntradayBaseline {
        step: panel.step,
        mean_rate,
        std_rate,
        raw_mean,
        raw_std,
        smoothing_window,
        excluded,
        days_used: full.len(),
    })
}

/// Centred moving average over samples `FIRST_SAMPLE..`, with the window
/// shrinking symmetrically near either end, rescaled so the smoothed curve
/// keeps the sum of the input.
pub fn smooth_preserving_mass<F: Scalar>(curve: &[F], window: usize) -> Vec<F> {
    let len = curve.len();
    let mut out = vec![F::zero(); len];
    if len <= FIRST_SAMPLE {
        return out;
    }
    let half = window / 2;
    let last = len - 1;
    for k in FIRST_SAMPLE..len {
        let h = half.min(k - FIRST_SAMPLE).min(last - k);
        let mut acc = F::zero();
        for &v in &curve[k - h..=k + h] {
            acc += v;
        }
        out[k] = acc / F::of_usize(2 * h + 1);
    }
    let mut before = F::zero();
    let mut after = F::zero();
    for k in FIRST_SAMPLE..len {
        before += curve[k];
        after += out[k];
    }
    if after > F::zero() {
        let scale = before / after;
        for v in &mut out[FIRST_SAMPLE..] {
            *v *= scale;
        }
    }
    out
}
