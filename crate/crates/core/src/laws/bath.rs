//! Bath law: the second-largest event within the horizon scales with the
//! main shock, `V_2 = C_B V_1`, `B = -log10 C_B`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::FIRST_SAMPLE;
use crate::stats::{equal_count_ranges, mean, ols, pearson, std_dev, LineFit};

pub const MIN_BATH_ROWS: usize = 30;
pub const DEFAULT_BATH_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathExtremes<F> {
    pub v1: F,
    pub v2_before: F,
    pub v2_after: F,
}

/// `V_1 = V(t_c)`, and the largest values in `[t_c - h, t_c)` and
/// `(t_c, t_c + h]`, with `h` in samples.
pub fn bath_extremes<F: Scalar>(series: &[F], t_c: usize, horizon: usize) -> Result<BathExtremes<F>> {
    if horizon == 0 || t_c < FIRST_SAMPLE + horizon || t_c + horizon >= series.len() {
        return Err(Error::InvalidParameter(format!(
            "window of {horizon} samples around sample {t_c} leaves the day"
        )));
    }
    let max = |s: &[F]| s.iter().copied().fold(F::neg_infinity(), |a, b| a.max(b));
    Ok(BathExtremes {
        v1: series[t_c],
        v2_before: max(&series[t_c - horizon..t_c]),
        v2_after: max(&series[t_c + 1..=t_c + horizon]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathFit<F> {
    pub c_b: F,
    pub b: F,
    pub r: F,
    pub chi2: F,
    pub n: usize,
}

/// `C_B` from least squares through the origin, `sum V1 V2 / sum V1^2`.
pub fn fit_bath_proportional<F: Scalar>(rows: &[(F, F)]) -> Option<BathFit<F>> {
    if rows.len() < MIN_BATH_ROWS {
        return None;
    }
    let (mut sxy, mut sxx) = (F::zero(), F::zero());
    for &(v1, v2) in rows {
        sxy += v1 * v2;
        sxx += v1 * v1;
    }
    if !(sxx > F::zero()) {
        return None;
    }
    let c_b = sxy / sxx;
    let mut chi2 = F::zero();
    for &(v1, v2) in rows {
        let e = v2 - c_b * v1;
        chi2 += e * e;
    }
    let (xs, ys): (Vec<F>, Vec<F>) = rows.iter().copied().unzip();
    Some(BathFit {
        c_b,
        b: -c_b.log10(),
        r: pearson(&xs, &ys).unwrap_or_else(F::nan),
        chi2,
        n: rows.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathBin<F> {
    pub v1_mean: F,
    pub v2_mean: F,
    pub v2_std: F,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedBath<F> {
    pub bins: Vec<BathBin<F>>,
    /// Line through the bin means, free intercept.
    pub line: LineFit<F>,
}

/// Equal-count bins of `V_1`, mean and spread of `V_2` per bin, then a line
/// through the bin means.
pub fn fit_bath_binned<F: Scalar>(rows: &[(F, F)], bins: usize) -> Option<BinnedBath<F>> {
    if rows.len() < MIN_BATH_ROWS {
        return None;
    }
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite volatilities"));
    let bins: Vec<BathBin<F>> = equal_count_ranges(sorted.len(), bins)
        .into_iter()
        .map(|r| {
            let v1: Vec<F> = sorted[r.clone()].iter().map(|p| p.0).collect();
            let v2: Vec<F> = sorted[r.clone()].iter().map(|p| p.1).collect();
            BathBin {
                v1_mean: mean(&v1).expect("non-empty bin"),
                v2_mean: mean(&v2).expect("non-empty bin"),
                v2_std: std_dev(&v2).expect("non-empty bin"),
                count: r.len(),
            }
        })
        .collect();
    let xs: Vec<F> = bins.iter().map(|b| b.v1_mean).collect();
    let ys: Vec<F> = bins.iter().map(|b| b.v2_mean).collect();
    let line = ols(&xs, &ys)?;
    Some(BinnedBath { bins, line })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathMode {
    Proportional,
    Binned { bins: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathEstimate<F> {
    Proportional(BathFit<F>),
    Binned(BinnedBath<F>),
}

pub fn fit_bath<F: Scalar>(rows: &[(F, F)], mode: BathMode) -> Option<BathEstimate<F>> {
    match mode {
        BathMode::Proportional => fit_bath_proportional(rows).map(BathEstimate::Proportional),
        BathMode::Binned { bins } => fit_bath_binned(rows, bins).map(BathEstimate::Binned),
    }
}
