use serde::Serialize;

use super::curve::ResponseCurve;
use crate::scalar::Scalar;
use crate::stats::ols;

/// Fewest rows with positive productivity a fit is reported for.
pub const MIN_PRODUCTIVITY_ROWS: usize = 30;
/// Tail exponent of the cumulative volatility distribution used by default.
pub const DEFAULT_ETA_V: f64 = 3.0;

/// Number of preshocks or aftershocks within the horizon, `P = N(horizon)`.
pub fn productivity<F: Scalar>(curve: &ResponseCurve<F>) -> F {
    curve.terminal()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductivityFit<F> {
    /// Slope of `log10 P` against `M = log10 V(T_c)`.
    pub pi: F,
    pub stderr: F,
    pub intercept: F,
    pub r: F,
    pub n_used: usize,
    pub n_zero_excluded: usize,
}

fn fit_rows<F: Scalar>(rows: &[(F, F)], log_x: bool) -> Option<ProductivityFit<F>> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut zeros = 0;
    for &(m, p) in rows {
        if !(p > F::zero()) {
            zeros += 1;
            continue;
        }
        let x = if log_x {
            if !(m > F::zero()) {
                continue;
            }
            m.log10()
        } else {
            m
        };
        xs.push(x);
        ys.push(p.log10());
    }
    if xs.len() < MIN_PRODUCTIVITY_ROWS {
        return None;
    }
    let line = ols(&xs, &ys)?;
    Some(ProductivityFit {
        pi: line.slope,
        stderr: line.stderr_slope,
        intercept: line.intercept,
        r: line.r,
        n_used: xs.len(),
        n_zero_excluded: zeros,
    })
}

/// Least squares of `log10 P` on `M` over `(M, P)` rows, i.e. the exponent
/// of `P ~ V(T_c)^Pi`. Rows with `P = 0` are excluded and counted.
pub fn fit_productivity<F: Scalar>(rows: &[(F, F)]) -> Option<ProductivityFit<F>> {
    fit_rows(rows, false)
}

/// Alternative form `P ~ M^Pi`: `log10 P` on `log10 M`, rows with `M > 0`.
pub fn fit_productivity_vs_magnitude<F: Scalar>(rows: &[(F, F)]) -> Option<ProductivityFit<F>> {
    fit_rows(rows, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Decreasing,
    Flat,
    Increasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriggeringExponent<F> {
    /// Exponent of `N_tot(V) = P(V) P_a ~ V^(Pi_a - eta_V)`.
    pub exponent: F,
    pub trend: Trend,
}

/// Scaling of the total number of aftershocks triggered by all main shocks
/// of size `V`.
pub fn total_triggering_exponent<F: Scalar>(pi_a: F, eta_v: F) -> TriggeringExponent<F> {
    let exponent = pi_a - eta_v;
    let trend = if exponent < F::zero() {
        Trend::Decreasing
    } else if exponent > F::zero() {
        Trend::Increasing
    } else {
        Trend::Flat
    };
    TriggeringExponent { exponent, trend }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::curve::Side;

    fn rows(pi: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let m = i as f64 / n as f64 * 1.5;
                (m, 10f64.powf(m).powf(pi))
            })
            .collect()
    }

    #[test]
    fn empty_curve_has_no_productivity() {
        let c = ResponseCurve::<f64> {
            side: Side::After,
            tau: vec![],
            cumulative: vec![],
            horizon: 90,
        };
        assert_eq!(productivity(&c), 0.0);
    }

    #[test]
    fn noiseless_inversion() {
        for pi in [0.48, 0.25] {
            let f = fit_productivity(&rows(pi, 40)).unwrap();
            assert!((f.pi - pi).abs() < 1e-9);
            assert_eq!(f.n_used, 40);
        }
    }

    #[test]
    fn zero_rows_excluded() {
        let mut r = rows(0.4, 30);
        r.push((1.0, 0.0));
        let f = fit_productivity(&r).unwrap();
        assert_eq!(f.n_zero_excluded, 1);
        r.truncate(29);
        assert!(fit_productivity(&r).is_none());
    }

    #[test]
    fn triggering_exponent() {
        let t = total_triggering_exponent(0.48f64, 3.0);
        assert!((t.exponent + 2.52).abs() < 1e-12);
        assert_eq!(t.trend, Trend::Decreasing);
        assert_eq!(total_triggering_exponent(3.0, 3.0).trend, Trend::Flat);
        let t = total_triggering_exponent(3.5, 3.0);
        assert_eq!(t.exponent, 0.5);
        assert_eq!(t.trend, Trend::Increasing);
    }
}
