//! Turns a synthetic volatility panel into minute prices and trade counts,
//! so generated data can go through the real ingestion path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::generator::SyntheticPanel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{GridDay, MinuteGrid, SymbolDay};

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub seed: u64,
    /// Absolute log return per unit of volatility.
    pub return_scale: f64,
    /// Depth of the intraday U shape: volatility at the open and close is
    /// `1 + u_pattern` times the midday level.
    pub u_pattern: f64,
    /// Mean trades per minute are log-uniform over this range, per symbol.
    pub activity: Option<(f64, f64)>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            return_scale: 1e-3,
            u_pattern: 0.0,
            activity: Some((3.0, 163.0)),
        }
    }
}

fn u_shape(m: usize, minutes: usize, depth: f64) -> f64 {
    let x = 2.0 * m as f64 / (minutes - 1).max(1) as f64 - 1.0;
    1.0 + depth * x * x
}

pub fn render_grid<F: Scalar>(panel: &SyntheticPanel, spec: &RenderSpec) -> Result<MinuteGrid<F>> {
    if !(spec.return_scale > 0.0) || !(spec.u_pattern >= 0.0) {
        return Err(Error::InvalidParameter("render scale and U depth must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = panel.symbols.len();
    let start: Vec<f64> = (0..n).map(|_| rng.random_range(10.0..200.0)).collect();
    let rates: Option<Vec<f64>> = match spec.activity {
        Some((lo, hi)) if lo > 0.0 && hi >= lo => Some(
            (0..n)
                .map(|_| lo * (hi / lo).powf(rng.random::<f64>()))
                .collect(),
        ),
        Some(_) => return Err(Error::InvalidParameter("activity range must be positive".into())),
        None => None,
    };
    let minutes = panel.spec.minutes;
    let mut days = Vec::with_capacity(panel.days.len());
    for (d, day) in panel.days.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(d as u64 + 1);
        let symbols = day
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let mut prices = Vec::with_capacity(minutes);
                let mut p = start[j];
                prices.push(F::of(p));
                for (m, &vol) in v.iter().enumerate().skip(1) {
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    p *= (sign * vol * spec.return_scale * u_shape(m, minutes, spec.u_pattern)).exp();
                    prices.push(F::of(p));
                }
                let trades = rates.as_ref().map(|r| {
                    let dist = Poisson::new(r[j]).expect("positive rate");
                    (0..minutes).map(|_| dist.sample(&mut rng) as u32).collect()
                });
                Some(SymbolDay { prices, trades })
            })
            .collect();
        days.push(GridDay {
            date: day.truth.date,
            minutes,
            symbols,
        });
    }
    MinuteGrid::new(panel.symbols.clone(), days)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::compute_volatility;
    use crate::synth::{generate_ensemble, GeneratorSpec};

    #[test]
    fn flat_render_recovers_volatility() {
        let panel = generate_ensemble(&GeneratorSpec {
            days: 2,
            symbols: 4,
            ..GeneratorSpec::default()
        })
        .unwrap();
        let grid: MinuteGrid<f64> = render_grid(&panel, &RenderSpec::default()).unwrap();
        assert!(grid.has_trades());
        let vol = compute_volatility(&grid, 1).unwrap();
        for (d, day) in vol.days.iter().enumerate() {
            for (j, s) in day.series.iter().enumerate() {
                let s = s.as_ref().unwrap();
                for m in 1..390 {
                    let want = panel.days[d].values[j][m] * 1e-3;
                    assert!((s[m] - want).abs() < 1e-12, "{d} {j} {m}");
                }
            }
        }
    }
}
