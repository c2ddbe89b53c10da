use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{FIRST_SAMPLE, REGULAR_SESSION_MINUTES};

/// Where the main shock of each day is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "rule")]
pub enum ShockPlacement {
    Fixed { minute: usize },
    /// Uniform over `lo..=hi`.
    Uniform { lo: usize, hi: usize },
}

/// Expected number of exceedances within the horizon on each side scales
/// as `scale * V1^pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductivityLaw {
    pub pi: f64,
    pub scale: f64,
}

/// Largest market volatility on each side of the shock is set to
/// `ratio * V1 * (1 + e)`, `e` uniform on `[-noise, noise]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathLaw {
    pub ratio: f64,
    pub noise: f64,
}

/// Synthetic panel description. Volatility values are produced directly in
/// normalized units, so `q` here is the same threshold the detector uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub days: usize,
    pub symbols: usize,
    pub minutes: usize,
    pub start_date: NaiveDate,
    pub placement: ShockPlacement,
    pub omega_b: f64,
    pub omega_a: f64,
    pub alpha_b: f64,
    pub alpha_a: f64,
    /// Per-minute exceedance probability away from the shock.
    pub background: f64,
    pub q: f64,
    pub eta_v: f64,
    /// Main-shock scale is drawn from a Pareto law with exponent `eta_v`,
    /// truncated to `[v1_min, v1_max]`; each symbol gets the scale times a
    /// factor uniform on `[0.5, 1.5]`.
    pub v1_min: f64,
    pub v1_max: f64,
    /// Minutes on each side the Omori rate is applied over.
    pub horizon: usize,
    pub productivity: Option<ProductivityLaw>,
    pub bath: Option<BathLaw>,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            days: 200,
            symbols: 50,
            minutes: REGULAR_SESSION_MINUTES,
            start_date: NaiveDate::from_ymd_opt(2001, 1, 2).expect("valid date"),
            placement: ShockPlacement::Uniform { lo: 130, hi: 260 },
            omega_b: 0.09,
            omega_a: 0.32,
            alpha_b: 0.21,
            alpha_a: 0.5,
            background: 0.02,
            q: 3.0,
            eta_v: 3.0,
            v1_min: 12.0,
            v1_max: 200.0,
            horizon: 90,
            productivity: None,
            bath: None,
            seed: 1,
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.days == 0 || self.symbols == 0 {
            return bad("days and symbols must be positive".into());
        }
        if self.horizon == 0 || self.minutes < 2 * self.horizon + FIRST_SAMPLE + 1 {
            return bad(format!(
                "a {}-minute day cannot hold a {}-minute window on both sides",
                self.minutes, self.horizon
            ));
        }
        let lo_ok = FIRST_SAMPLE + self.horizon;
        let hi_ok = self.minutes - 1 - self.horizon;
        let (lo, hi) = match self.placement {
            ShockPlacement::Fixed { minute } => (minute, minute),
            ShockPlacement::Uniform { lo, hi } => (lo, hi),
        };
        if lo > hi || lo < lo_ok || hi > hi_ok {
            return bad(format!("shock placement must lie within {lo_ok}..={hi_ok}"));
        }
        for (name, v) in [
            ("alpha_b", self.alpha_b),
            ("alpha_a", self.alpha_a),
            ("background", self.background),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be a non-negative rate, got {v}"));
            }
        }
        if self.background >= 1.0 {
            return bad("background rate must be below 1".into());
        }
        for (name, v) in [("omega_b", self.omega_b), ("omega_a", self.omega_a)] {
            if !(v < 1.0) || !v.is_finite() {
                return bad(format!("{name} must be below 1, got {v}"));
            }
        }
        if !(self.q > 0.0) {
            return bad("q must be positive".into());
        }
        if !(self.eta_v > 1.0) {
            return bad(format!("eta_v must exceed 1, got {}", self.eta_v));
        }
        if !(self.v1_min >= 2.0 * self.q) || !(self.v1_max > self.v1_min) {
            return bad("main-shock range must satisfy 2 q <= v1_min < v1_max".into());
        }
        if let Some(p) = self.productivity {
            if !(p.scale > 0.0) || !p.pi.is_finite() {
                return bad("productivity scale must be positive".into());
            }
            if self.v1_max < 10.0 * self.v1_min {
                return bad("productivity ensembles need main shocks spanning a decade".into());
            }
        }
        if let Some(b) = self.bath {
            if !(b.ratio > 0.0) || !(0.0..1.0).contains(&b.noise) {
                return bad("bath ratio must be positive and noise in [0, 1)".into());
            }
        }
        Ok(())
    }
}
