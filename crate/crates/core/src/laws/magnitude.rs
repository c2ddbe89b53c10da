use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::FIRST_SAMPLE;

/// Half-width, in minutes, of the window a single stock's magnitude is taken
/// from.
pub const STOCK_MAGNITUDE_WINDOW: usize = 3;

/// `M = log10 V(T_c)`.
pub fn magnitude<F: Scalar>(volatility: &[F], t_c: usize) -> Result<F> {
    let v = *volatility
        .get(t_c)
        .ok_or_else(|| Error::InvalidParameter(format!("sample {t_c} outside the day")))?;
    if !(v > F::zero()) {
        return Err(Error::Degenerate(format!("zero volatility at main shock sample {t_c}")));
    }
    Ok(v.log10())
}

/// `log10` of the largest value within `half_width` samples of `t_c`.
pub fn windowed_magnitude<F: Scalar>(volatility: &[F], t_c: usize, half_width: usize) -> Result<F> {
    if t_c >= volatility.len() {
        return Err(Error::InvalidParameter(format!("sample {t_c} outside the day")));
    }
    let lo = t_c.saturating_sub(half_width).max(FIRST_SAMPLE.min(t_c));
    let hi = (t_c + half_width).min(volatility.len() - 1);
    let peak = volatility[lo..=hi]
        .iter()
        .copied()
        .fold(F::zero(), |a, b| a.max(b));
    if !(peak > F::zero()) {
        return Err(Error::Degenerate(format!(
            "zero volatility within {half_width} samples of {t_c}"
        )));
    }
    Ok(peak.log10())
}
