//! Omori-law fit of a cumulative response curve.
//!
//! A rate `n(tau) ~ alpha * tau^-omega` integrates to
//! `N(tau) ~ beta * tau^(1 - omega)` with `alpha = beta * (1 - omega)`. The
//! exponent and amplitude come from an unweighted least-squares line through
//! `(log10 tau, log10 N)`.

use serde::{Deserialize, Serialize};

use super::curve::ResponseCurve;
use crate::scalar::Scalar;
use crate::stats::ols;

/// Fewest positive curve points a fit is reported for.
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmoriFit<F> {
    pub omega: F,
    pub beta: F,
    pub alpha: F,
    pub stderr_omega: F,
    pub r: F,
    pub n_points: usize,
}

impl<F: Scalar> OmoriFit<F> {
    fn from_line(slope: F, intercept: F, stderr: F, r: F, n: usize) -> Self {
        let omega = F::one() - slope;
        let beta = F::ten().powf(intercept);
        Self {
            omega,
            beta,
            alpha: beta * (F::one() - omega),
            stderr_omega: stderr,
            r,
            n_points: n,
        }
    }
}

/// Fits the curve's positive points. Returns `None` when fewer than
/// [`MIN_FIT_POINTS`] are positive or all of them share one `tau`.
pub fn fit_omori<F: Scalar>(curve: &ResponseCurve<F>) -> Option<OmoriFit<F>> {
    let (xs, ys): (Vec<F>, Vec<F>) = curve
        .tau
        .iter()
        .zip(&curve.cumulative)
        .filter(|(_, &n)| n > F::zero())
        .map(|(&t, &n)| (F::of_usize(t).log10(), n.log10()))
        .unzip();
    if xs.len() < MIN_FIT_POINTS {
        return None;
    }
    let line = ols(&xs, &ys)?;
    Some(OmoriFit::from_line(
        line.slope,
        line.intercept,
        line.stderr_slope,
        line.r,
        line.n,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::curve::Side;

    fn exact(beta: f64, omega: f64) -> ResponseCurve<f64> {
        let tau: Vec<usize> = (1..=90).collect();
        ResponseCurve {
            side: Side::After,
            cumulative: tau.iter().map(|&t| beta * (t as f64).powf(1.0 - omega)).collect(),
            tau,
            horizon: 90,
        }
    }

    #[test]
    fn noiseless_power_law() {
        let f = fit_omori(&exact(2.0, 0.3)).unwrap();
        assert!((f.omega - 0.3).abs() < 1e-9);
        assert!((f.beta - 2.0).abs() < 1e-9);
        assert!((f.alpha - 1.4).abs() < 1e-9);
        assert_eq!(f.n_points, 90);
    }

    #[test]
    fn inverse_construction_from_rate_parameters() {
        let (omega, alpha) = (0.09, 0.21);
        let f = fit_omori(&exact(alpha / (1.0 - omega), omega)).unwrap();
        assert!((f.omega - omega).abs() < 1e-9);
        assert!((f.alpha - alpha).abs() < 1e-9);
    }

    #[test]
    fn negative_exponent_allowed() {
        let f = fit_omori(&exact(0.05, -0.4)).unwrap();
        assert!((f.omega + 0.4).abs() < 1e-9);
    }

    #[test]
    fn zeros_skipped_and_minimum_enforced() {
        let mut c = exact(1.0, 0.2);
        for v in &mut c.cumulative[..86] {
            *v = 0.0;
        }
        assert!(fit_omori(&c).is_none());
        c.cumulative[85] = 0.5;
        let f = fit_omori(&c).unwrap();
        assert_eq!(f.n_points, 5);
    }
}
