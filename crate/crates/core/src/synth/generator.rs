//! Synthetic volatility days with an injected main shock and Omori-law
//! activity on both sides of it.
//!
//! Each symbol independently exceeds the threshold at minute `T_c +- tau`
//! with probability `min(1, background + p(tau))`, where `p` is the Omori
//! rate integrated over the minute,
//! `p(tau) = beta * (tau^(1-omega) - (tau-1)^(1-omega))`, `beta = alpha / (1-omega)`.
//! Summing `p` telescopes to `beta * tau^(1-omega)`, so the expected
//! cumulative count is exactly the curve the Omori fit looks for.

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::spec::{BathLaw, GeneratorSpec, ShockPlacement};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{NormalizedVolatility, VolDay, VolatilityPanel, FIRST_SAMPLE};

/// Attempts per day before an infeasible configuration is reported.
pub const MAX_REDRAWS: usize = 10_000;
/// Background rate that fixes the sub-threshold scale when the configured
/// background is zero.
pub const REFERENCE_BACKGROUND: f64 = 0.01;

/// Ground truth for one side of a main shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideTruth {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Some minute's probability was capped at 1.
    pub clipped: bool,
    /// Expected exceedances per symbol within the horizon, background
    /// included.
    pub expected_count: f64,
    /// Market volatility the largest minute was set to, when enforced.
    pub v2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayTruth {
    pub day: usize,
    pub date: NaiveDate,
    /// Minute of the main shock.
    pub t_c: usize,
    /// Drawn main-shock scale.
    pub v1: f64,
    /// Cross-symbol mean volatility at `t_c`.
    pub market_v1: f64,
    pub before: SideTruth,
    pub after: SideTruth,
    pub redraws: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDay {
    /// `values[j][m]`: volatility of symbol `j` over minute `m`.
    pub values: Vec<Vec<f64>>,
    pub truth: DayTruth,
}

/// `n` consecutive weekdays from `start` (moved forward to a weekday).
pub fn trading_dates(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date in range");
    }
    out
}

fn omori_increment(beta: f64, omega: f64, tau: usize) -> f64 {
    let e = 1.0 - omega;
    beta * ((tau as f64).powf(e) - ((tau - 1) as f64).powf(e))
}

/// Per-minute probabilities for `tau = 1..=horizon` (index 0 unused).
fn side_probabilities(beta: f64, omega: f64, background: f64, horizon: usize) -> (Vec<f64>, bool) {
    let mut clipped = false;
    let mut p = vec![0.0; horizon + 1];
    for (tau, slot) in p.iter_mut().enumerate().skip(1) {
        let raw = background + omori_increment(beta, omega, tau);
        if raw > 1.0 {
            clipped = true;
        }
        *slot = raw.min(1.0);
    }
    (p, clipped)
}

struct Side {
    truth: SideTruth,
    prob: Vec<f64>,
}

fn plan_side(spec: &GeneratorSpec, omega: f64, alpha: f64, v1: f64) -> Option<Side> {
    let h = spec.horizon;
    let bg = spec.background;
    let beta = match spec.productivity {
        Some(law) => {
            let target = law.scale * v1.powf(law.pi);
            let beta = (target - bg * h as f64) / (h as f64).powf(1.0 - omega);
            if !(beta > 0.0) {
                return None;
            }
            beta
        }
        None => alpha / (1.0 - omega),
    };
    let (prob, clipped) = side_probabilities(beta, omega, bg, h);
    if clipped && spec.productivity.is_some() {
        return None;
    }
    Some(Side {
        truth: SideTruth {
            omega,
            alpha: beta * (1.0 - omega),
            beta,
            clipped,
            expected_count: prob[1..].iter().sum(),
            v2: None,
        },
        prob,
    })
}

struct Draws {
    normal: Normal,
    sub_scale: f64,
    sub_mass: f64,
}

impl Draws {
    fn new(spec: &GeneratorSpec) -> Self {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let reference = if spec.background > 0.0 { spec.background } else { REFERENCE_BACKGROUND };
        let z = normal.inverse_cdf(1.0 - reference / 2.0);
        Self {
            normal,
            sub_scale: spec.q / z,
            sub_mass: 1.0 - reference,
        }
    }

    /// Half-normal value truncated below `q`.
    fn below(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.random();
        self.sub_scale * self.normal.inverse_cdf(0.5 + 0.5 * u * self.sub_mass)
    }
}

fn pareto(rng: &mut ChaCha8Rng, min: f64, eta: f64) -> f64 {
    let u: f64 = rng.random();
    min * (1.0 - u).powf(-1.0 / eta)
}

fn truncated_pareto(rng: &mut ChaCha8Rng, min: f64, max: f64, eta: f64) -> f64 {
    let u: f64 = rng.random();
    let tail = (min / max).powf(eta);
    min * (1.0 - u * (1.0 - tail)).powf(-1.0 / eta)
}

fn market_at(values: &[Vec<f64>], m: usize) -> f64 {
    values.iter().map(|s| s[m]).sum::<f64>() / values.len() as f64
}

/// Raises the largest market minute of `range` that has at least one
/// exceedance to the Bath target by scaling only its exceeding values, so
/// every indicator is left as drawn. Returns `false` when the day has to be
/// redrawn.
fn enforce_bath(
    values: &mut [Vec<f64>],
    range: std::ops::Range<usize>,
    side: &mut Side,
    law: BathLaw,
    market_v1: f64,
    q: f64,
    rng: &mut ChaCha8Rng,
) -> bool {
    let e: f64 = rng.random_range(-1.0..=1.0);
    let target = law.ratio * market_v1 * (1.0 + law.noise * e);
    let mut best: Option<(usize, f64)> = None;
    for m in range.clone() {
        let v = market_at(values, m);
        if values.iter().any(|s| s[m] >= q) && best.map_or(true, |(_, b)| v > b) {
            best = Some((m, v));
        }
    }
    let Some((m_star, _)) = best else { return false };
    let n = values.len() as f64;
    let (below, above): (f64, f64) = values.iter().fold((0.0, 0.0), |(b, a), s| {
        if s[m_star] >= q {
            (b, a + s[m_star])
        } else {
            (b + s[m_star], a)
        }
    });
    let f = (target * n - below) / above;
    if !(f >= 1.0) {
        return false;
    }
    for s in values.iter_mut() {
        if s[m_star] >= q {
            s[m_star] *= f;
        }
    }
    if range.clone().any(|m| m != m_star && market_at(values, m) > target) {
        return false;
    }
    side.truth.v2 = Some(market_at(values, m_star));
    true
}

fn per_day_rng(seed: u64, day: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(day as u64);
    rng
}

/// Day `day` of the ensemble described by `spec`. Depends only on
/// `(spec, day)`.
pub fn generate_omori_day(spec: &GeneratorSpec, day: usize) -> Result<SyntheticDay> {
    spec.validate()?;
    let date = *trading_dates(spec.start_date, day + 1).last().expect("non-empty");
    generate_day_at(spec, day, date, &Draws::new(spec))
}

fn generate_day_at(spec: &GeneratorSpec, day: usize, date: NaiveDate, draws: &Draws) -> Result<SyntheticDay> {
    let mut rng = per_day_rng(spec.seed, day);
    let h = spec.horizon;
    let mut redraws = 0;
    loop {
        if redraws > MAX_REDRAWS {
            return Err(Error::InvalidParameter(format!(
                "day {day}: no feasible draw after {MAX_REDRAWS} attempts"
            )));
        }
        let t_c = match spec.placement {
            ShockPlacement::Fixed { minute } => minute,
            ShockPlacement::Uniform { lo, hi } => rng.random_range(lo..=hi),
        };
        let v1 = truncated_pareto(&mut rng, spec.v1_min, spec.v1_max, spec.eta_v);
        let (Some(mut before), Some(mut after)) = (
            plan_side(spec, spec.omega_b, spec.alpha_b, v1),
            plan_side(spec, spec.omega_a, spec.alpha_a, v1),
        ) else {
            redraws += 1;
            continue;
        };

        let mut values = Vec::with_capacity(spec.symbols);
        for _ in 0..spec.symbols {
            let mut s = vec![0.0; spec.minutes];
            for (m, slot) in s.iter_mut().enumerate().skip(FIRST_SAMPLE) {
                if m == t_c {
                    *slot = v1 * rng.random_range(0.5..=1.5);
                    continue;
                }
                let p = if m < t_c && t_c - m <= h {
                    before.prob[t_c - m]
                } else if m > t_c && m - t_c <= h {
                    after.prob[m - t_c]
                } else {
                    spec.background
                };
                *slot = if rng.random::<f64>() < p {
                    pareto(&mut rng, spec.q, spec.eta_v)
                } else {
                    draws.below(&mut rng)
                };
            }
            values.push(s);
        }
        let market_v1 = market_at(&values, t_c);

        if let Some(law) = spec.bath {
            let mut ok = true;
            for (range, side) in [
                (t_c - h..t_c, &mut before),
                (t_c + 1..t_c + h + 1, &mut after),
            ] {
                ok = ok && enforce_bath(&mut values, range, side, law, market_v1, spec.q, &mut rng);
            }
            if !ok {
                redraws += 1;
                continue;
            }
        }

        return Ok(SyntheticDay {
            values,
            truth: DayTruth {
                day,
                date,
                t_c,
                v1,
                market_v1,
                before: before.truth,
                after: after.truth,
                redraws,
            },
        });
    }
}

/// A generated panel with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPanel {
    pub spec: GeneratorSpec,
    pub symbols: Vec<String>,
    pub days: Vec<SyntheticDay>,
}

impl SyntheticPanel {
    pub fn truth(&self) -> Vec<DayTruth> {
        self.days.iter().map(|d| d.truth.clone()).collect()
    }

    pub fn total_redraws(&self) -> usize {
        self.days.iter().map(|d| d.truth.redraws).sum()
    }

    /// One-minute volatility panel; no half-days.
    pub fn volatility<F: Scalar>(&self) -> VolatilityPanel<F> {
        VolatilityPanel {
            step: 1,
            symbols: self.symbols.clone(),
            days: self
                .days
                .iter()
                .map(|d| VolDay {
                    date: d.truth.date,
                    samples: self.spec.minutes,
                    half_day: false,
                    series: d
                        .values
                        .iter()
                        .map(|s| Some(s.iter().map(|&v| F::of(v)).collect()))
                        .collect(),
                })
                .collect(),
        }
    }

    /// The panel as already-normalized volatility with unit scale and a flat
    /// intraday pattern.
    pub fn normalized<F: Scalar>(&self) -> NormalizedVolatility<F> {
        NormalizedVolatility {
            panel: self.volatility(),
            sigma_full: vec![F::one(); self.symbols.len()],
            pattern: vec![F::one(); self.spec.minutes],
            dropped: Vec::new(),
        }
    }
}

/// Symbol identifiers used by generated panels; they sort in index order.
pub fn synthetic_symbols(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len().max(3);
    (0..n).map(|j| format!("S{j:0width$}")).collect()
}

/// Every day of `spec`, generated in parallel. Identical specs give
/// identical panels.
pub fn generate_ensemble(spec: &GeneratorSpec) -> Result<SyntheticPanel> {
    spec.validate()?;
    let dates = trading_dates(spec.start_date, spec.days);
    let draws = Draws::new(spec);
    let days = dates
        .par_iter()
        .enumerate()
        .map(|(d, &date)| generate_day_at(spec, d, date, &draws))
        .collect::<Result<Vec<_>>>()?;
    Ok(SyntheticPanel {
        spec: spec.clone(),
        symbols: synthetic_symbols(spec.symbols),
        days,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::spec::ProductivityLaw;

    fn small() -> GeneratorSpec {
        GeneratorSpec {
            days: 4,
            symbols: 10,
            ..GeneratorSpec::default()
        }
    }

    #[test]
    fn weekdays_only() {
        let d = trading_dates(NaiveDate::from_ymd_opt(2001, 1, 5).unwrap(), 3);
        assert_eq!(
            d,
            vec![
                NaiveDate::from_ymd_opt(2001, 1, 5).unwrap(),
                NaiveDate::from_ymd_opt(2001, 1, 8).unwrap(),
                NaiveDate::from_ymd_opt(2001, 1, 9).unwrap(),
            ]
        );
    }

    #[test]
    fn integrated_rate_telescopes() {
        let (p, clipped) = side_probabilities(0.5, 0.3, 0.0, 90);
        assert!(!clipped);
        let total: f64 = p[1..].iter().sum();
        assert!((total - 0.5 * 90f64.powf(0.7)).abs() < 1e-12);
    }

    #[test]
    fn clipping_flagged() {
        let spec = GeneratorSpec {
            omega_a: 0.5,
            alpha_a: 0.9,
            ..small()
        };
        let d = generate_omori_day(&spec, 0).unwrap();
        assert!(d.truth.after.clipped);
        assert!(!d.truth.before.clipped);
    }

    #[test]
    fn day_is_independent_of_ensemble() {
        let spec = small();
        let e = generate_ensemble(&spec).unwrap();
        assert_eq!(generate_omori_day(&spec, 2).unwrap(), e.days[2]);
        assert_eq!(generate_ensemble(&spec).unwrap(), e);
    }

    #[test]
    fn main_shock_exceeds_threshold() {
        let e = generate_ensemble(&small()).unwrap();
        for d in &e.days {
            let t = d.truth.t_c;
            assert!(d.values.iter().all(|s| s[t] >= 3.0));
            assert!(d.values.iter().all(|s| s[0] == 0.0));
            assert!(d.values.iter().flatten().all(|&v| v >= 0.0 && v.is_finite()));
        }
    }

    #[test]
    fn noiseless_bath_enforced() {
        let spec = GeneratorSpec {
            bath: Some(BathLaw { ratio: 0.9, noise: 0.0 }),
            ..small()
        };
        for d in generate_ensemble(&spec).unwrap().days {
            let t = d.truth;
            assert!((t.after.v2.unwrap() / t.market_v1 - 0.9).abs() < 1e-12);
            assert!((t.before.v2.unwrap() / t.market_v1 - 0.9).abs() < 1e-12);
        }
    }

    #[test]
    fn productivity_sets_expected_count() {
        let law = ProductivityLaw { pi: 0.48, scale: 2.0 };
        let spec = GeneratorSpec {
            productivity: Some(law),
            ..small()
        };
        for d in generate_ensemble(&spec).unwrap().days {
            let t = d.truth;
            let want = law.scale * t.v1.powf(law.pi);
            assert!((t.after.expected_count - want).abs() < 1e-9);
            assert!((t.before.expected_count - want).abs() < 1e-9);
            assert!((t.after.alpha - t.after.beta * (1.0 - t.after.omega)).abs() < 1e-15);
        }
    }

    #[test]
    fn symbols_sort_in_index_order() {
        let s = synthetic_symbols(1200);
        let mut sorted = s.clone();
        sorted.sort();
        assert_eq!(s, sorted);
    }
}
