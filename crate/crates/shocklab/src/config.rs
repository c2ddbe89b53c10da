//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored; a `#` after a value
//! starts a comment. Keys are unique. Floats are written in Rust's shortest
//! round-trip form, so `parse(render(c)) == c` holds exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use shocklab_core::detector::{
    DEFAULT_CASCADE_GAP, DEFAULT_DIVERGENCE_RATIO, DEFAULT_EDGE_EXCLUSION, DEFAULT_SMOOTHING_WINDOW,
    DEFAULT_XC, MIN_BASELINE_DAYS, ALT_EDGE_EXCLUSION,
};
use shocklab_core::laws::{DEFAULT_ACTIVITY_BINS, DEFAULT_BATH_BINS, DEFAULT_ETA_V};
use shocklab_core::series::{DEFAULT_Q, REGULAR_SESSION_MINUTES, SUPPORTED_STEPS};
use shocklab_core::synth::{
    BathLaw, GeneratorSpec, ProductivityLaw, RenderSpec, ShockPlacement, DEFAULT_BINS_PER_DECADE,
};

use crate::error::{ToolError, ToolResult};

/// Parsed `key = value` pairs; every key has to be consumed.
#[derive(Debug, Default)]
pub struct KvFile {
    entries: BTreeMap<String, (usize, String)>,
    origin: String,
}

impl KvFile {
    pub fn parse(text: &str, origin: &str) -> ToolResult<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ToolError::input(format!("{origin}:{line_no}: expected `key = value`")));
            };
            let k = k.trim().to_string();
            if k.is_empty() {
                return Err(ToolError::input(format!("{origin}:{line_no}: empty key")));
            }
            if let Some((first, _)) = entries.insert(k.clone(), (line_no, v.trim().to_string())) {
                return Err(ToolError::input(format!(
                    "{origin}:{line_no}: key `{k}` already set on line {first}"
                )));
            }
        }
        Ok(Self {
            entries,
            origin: origin.to_string(),
        })
    }

    pub fn read(path: &Path) -> ToolResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ToolError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    fn take_raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    pub fn take<T: FromStr>(&mut self, key: &str, default: T) -> ToolResult<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.take_raw(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().map_err(|e| {
                ToolError::input(format!("{}:{line}: bad value for `{key}`: {e}", self.origin))
            }),
        }
    }

    pub fn take_opt<T: FromStr>(&mut self, key: &str) -> ToolResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take_raw(key) {
            None => Ok(None),
            Some((_, v)) if v.is_empty() || v == "none" => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e| {
                ToolError::input(format!("{}:{line}: bad value for `{key}`: {e}", self.origin))
            }),
        }
    }

    pub fn take_list(&mut self, key: &str, default: Vec<usize>) -> ToolResult<Vec<usize>> {
        match self.take_raw(key) {
            None => Ok(default),
            Some((line, v)) => v
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| ToolError::input(format!("{}:{line}: bad list for `{key}`: {e}", self.origin))),
        }
    }

    /// Fails on any key nobody asked for.
    pub fn finish(self) -> ToolResult<()> {
        match self.entries.iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(ToolError::input(format!(
                "{}:{line}: unknown key `{k}`",
                self.origin
            ))),
        }
    }
}

fn put(out: &mut String, key: &str, value: impl std::fmt::Display) {
    writeln!(out, "{key} = {value}").expect("write to string");
}

/// Analysis settings. Thread count is a run option, not configuration, so
/// it cannot change results or the config hash.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub q: f64,
    pub x_c: f64,
    /// Minutes.
    pub cascade_gap: usize,
    /// Response horizon and edge exclusion, minutes.
    pub horizon: usize,
    pub alt_horizon: usize,
    pub step: usize,
    /// Steps compared for resolution consistency; the first is the reference.
    pub resolution_steps: Vec<usize>,
    pub smoothing: usize,
    pub min_baseline_days: usize,
    /// Minimum mean trades per minute for a symbol to be kept.
    pub activity_floor: f64,
    pub calendar: Option<PathBuf>,
    pub seed: u64,
    pub pdf_bins_per_decade: usize,
    pub divergence_ratio: f64,
    /// Use the pdf-divergence threshold instead of `x_c`.
    pub calibrate_xc: bool,
    pub bath_bins: usize,
    pub activity_bins: usize,
    pub crossover_bins: usize,
    pub crossover_lo: f64,
    pub crossover_hi: f64,
    pub eta_v: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            q: DEFAULT_Q,
            x_c: DEFAULT_XC,
            cascade_gap: DEFAULT_CASCADE_GAP,
            horizon: DEFAULT_EDGE_EXCLUSION,
            alt_horizon: ALT_EDGE_EXCLUSION,
            step: 1,
            resolution_steps: vec![1, 5],
            smoothing: DEFAULT_SMOOTHING_WINDOW,
            min_baseline_days: MIN_BASELINE_DAYS,
            activity_floor: 3.0,
            calendar: None,
            seed: 1,
            pdf_bins_per_decade: DEFAULT_BINS_PER_DECADE,
            divergence_ratio: DEFAULT_DIVERGENCE_RATIO,
            calibrate_xc: false,
            bath_bins: DEFAULT_BATH_BINS,
            activity_bins: DEFAULT_ACTIVITY_BINS,
            crossover_bins: 12,
            crossover_lo: -1.0,
            crossover_hi: 2.0,
            eta_v: DEFAULT_ETA_V,
        }
    }
}

impl PipelineConfig {
    pub fn from_kv(mut kv: KvFile) -> ToolResult<Self> {
        let d = Self::default();
        let c = Self {
            q: kv.take("q", d.q)?,
            x_c: kv.take("x_c", d.x_c)?,
            cascade_gap: kv.take("cascade_gap", d.cascade_gap)?,
            horizon: kv.take("horizon", d.horizon)?,
            alt_horizon: kv.take("alt_horizon", d.alt_horizon)?,
            step: kv.take("step", d.step)?,
            resolution_steps: kv.take_list("resolution_steps", d.resolution_steps)?,
            smoothing: kv.take("smoothing", d.smoothing)?,
            min_baseline_days: kv.take("min_baseline_days", d.min_baseline_days)?,
            activity_floor: kv.take("activity_floor", d.activity_floor)?,
            calendar: kv.take_opt::<PathBuf>("calendar")?,
            seed: kv.take("seed", d.seed)?,
            pdf_bins_per_decade: kv.take("pdf_bins_per_decade", d.pdf_bins_per_decade)?,
            divergence_ratio: kv.take("divergence_ratio", d.divergence_ratio)?,
            calibrate_xc: kv.take("calibrate_xc", d.calibrate_xc)?,
            bath_bins: kv.take("bath_bins", d.bath_bins)?,
            activity_bins: kv.take("activity_bins", d.activity_bins)?,
            crossover_bins: kv.take("crossover_bins", d.crossover_bins)?,
            crossover_lo: kv.take("crossover_lo", d.crossover_lo)?,
            crossover_hi: kv.take("crossover_hi", d.crossover_hi)?,
            eta_v: kv.take("eta_v", d.eta_v)?,
        };
        kv.finish()?;
        c.validate()?;
        Ok(c)
    }

    pub fn parse(text: &str) -> ToolResult<Self> {
        Self::from_kv(KvFile::parse(text, "config")?)
    }

    pub fn load(path: &Path) -> ToolResult<Self> {
        Self::from_kv(KvFile::read(path)?)
    }

    /// Canonical text form; also the input to the config hash.
    pub fn render(&self) -> String {
        let mut s = String::new();
        put(&mut s, "q", self.q);
        put(&mut s, "x_c", self.x_c);
        put(&mut s, "cascade_gap", self.cascade_gap);
        put(&mut s, "horizon", self.horizon);
        put(&mut s, "alt_horizon", self.alt_horizon);
        put(&mut s, "step", self.step);
        let steps: Vec<String> = self.resolution_steps.iter().map(|s| s.to_string()).collect();
        put(&mut s, "resolution_steps", steps.join(","));
        put(&mut s, "smoothing", self.smoothing);
        put(&mut s, "min_baseline_days", self.min_baseline_days);
        put(&mut s, "activity_floor", self.activity_floor);
        match &self.calendar {
            Some(p) => put(&mut s, "calendar", p.display()),
            None => put(&mut s, "calendar", "none"),
        }
        put(&mut s, "seed", self.seed);
        put(&mut s, "pdf_bins_per_decade", self.pdf_bins_per_decade);
        put(&mut s, "divergence_ratio", self.divergence_ratio);
        put(&mut s, "calibrate_xc", self.calibrate_xc);
        put(&mut s, "bath_bins", self.bath_bins);
        put(&mut s, "activity_bins", self.activity_bins);
        put(&mut s, "crossover_bins", self.crossover_bins);
        put(&mut s, "crossover_lo", self.crossover_lo);
        put(&mut s, "crossover_hi", self.crossover_hi);
        put(&mut s, "eta_v", self.eta_v);
        s
    }

    pub fn validate(&self) -> ToolResult<()> {
        let bad = |m: &str| Err(ToolError::input(format!("invalid config: {m}")));
        let positive = [
            ("q", self.q),
            ("x_c", self.x_c),
            ("divergence_ratio", self.divergence_ratio),
            ("eta_v", self.eta_v),
        ];
        for (k, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return bad(&format!("{k} must be positive and finite"));
            }
        }
        if !(self.activity_floor >= 0.0) {
            return bad("activity_floor must be non-negative");
        }
        if self.cascade_gap == 0 {
            return bad("cascade_gap must be positive");
        }
        let half_day = REGULAR_SESSION_MINUTES / 2;
        for (k, h) in [("horizon", self.horizon), ("alt_horizon", self.alt_horizon)] {
            if h == 0 || h >= half_day {
                return bad(&format!("{k} must lie in 1..{half_day}"));
            }
        }
        if !SUPPORTED_STEPS.contains(&self.step) {
            return bad("step must be 1, 5 or 10");
        }
        if self.horizon % self.step != 0 || self.alt_horizon % self.step != 0 {
            return bad("horizons must be whole multiples of step");
        }
        if self.resolution_steps.iter().any(|s| !SUPPORTED_STEPS.contains(s)) {
            return bad("resolution_steps must be drawn from 1, 5, 10");
        }
        if self.smoothing == 0 || self.smoothing % 2 == 0 {
            return bad("smoothing must be a positive odd window");
        }
        if self.pdf_bins_per_decade == 0 || self.bath_bins == 0 || self.activity_bins == 0 || self.crossover_bins == 0 {
            return bad("bin counts must be positive");
        }
        if !(self.crossover_hi > self.crossover_lo) {
            return bad("crossover_hi must exceed crossover_lo");
        }
        Ok(())
    }
}

/// A generator spec plus how it is rendered to prices.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub generator: GeneratorSpec,
    pub render: RenderSpec,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let generator = GeneratorSpec::default();
        let render = RenderSpec {
            seed: render_seed(generator.seed),
            ..RenderSpec::default()
        };
        Self { generator, render }
    }
}

/// Rendering draws from its own stream of the single configured seed.
pub fn render_seed(seed: u64) -> u64 {
    seed ^ 0x5eed_0000_0000_0001
}

fn parse_placement(v: &str) -> Result<ShockPlacement, String> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    let num = |s: &str| s.parse::<usize>().map_err(|e| e.to_string());
    match parts.as_slice() {
        ["fixed", m] => Ok(ShockPlacement::Fixed { minute: num(m)? }),
        ["uniform", lo, hi] => Ok(ShockPlacement::Uniform {
            lo: num(lo)?,
            hi: num(hi)?,
        }),
        _ => Err(format!("expected `fixed <minute>` or `uniform <lo> <hi>`, got `{v}`")),
    }
}

impl SimulationConfig {
    pub fn from_kv(mut kv: KvFile) -> ToolResult<Self> {
        let d = GeneratorSpec::default();
        let r = RenderSpec::default();
        let placement = match kv.take_opt::<String>("placement")? {
            None => d.placement,
            Some(v) => parse_placement(&v).map_err(|e| ToolError::input(format!("placement: {e}")))?,
        };
        let pi = kv.take_opt::<f64>("productivity_pi")?;
        let scale = kv.take_opt::<f64>("productivity_scale")?;
        let productivity = match (pi, scale) {
            (Some(pi), Some(scale)) => Some(ProductivityLaw { pi, scale }),
            (None, None) => None,
            _ => {
                return Err(ToolError::input(
                    "productivity_pi and productivity_scale go together",
                ))
            }
        };
        let bath = kv
            .take_opt::<f64>("bath_ratio")?
            .map(|ratio| -> ToolResult<BathLaw> {
                Ok(BathLaw {
                    ratio,
                    noise: kv.take("bath_noise", 0.0)?,
                })
            })
            .transpose()?;
        let generator = GeneratorSpec {
            days: kv.take("days", d.days)?,
            symbols: kv.take("symbols", d.symbols)?,
            minutes: kv.take("minutes", d.minutes)?,
            start_date: kv.take::<NaiveDate>("start_date", d.start_date)?,
            placement,
            omega_b: kv.take("omega_b", d.omega_b)?,
            omega_a: kv.take("omega_a", d.omega_a)?,
            alpha_b: kv.take("alpha_b", d.alpha_b)?,
            alpha_a: kv.take("alpha_a", d.alpha_a)?,
            background: kv.take("background", d.background)?,
            q: kv.take("q", d.q)?,
            eta_v: kv.take("eta_v", d.eta_v)?,
            v1_min: kv.take("v1_min", d.v1_min)?,
            v1_max: kv.take("v1_max", d.v1_max)?,
            horizon: kv.take("horizon", d.horizon)?,
            productivity,
            bath,
            seed: kv.take("seed", d.seed)?,
        };
        let activity_set = kv.entries.contains_key("activity_lo") || kv.entries.contains_key("activity_hi");
        let activity = match (
            kv.take_opt::<f64>("activity_lo")?,
            kv.take_opt::<f64>("activity_hi")?,
        ) {
            _ if !activity_set => r.activity,
            (Some(lo), Some(hi)) => Some((lo, hi)),
            (None, None) => None,
            _ => return Err(ToolError::input("activity_lo and activity_hi go together")),
        };
        let render = RenderSpec {
            seed: render_seed(generator.seed),
            return_scale: kv.take("return_scale", r.return_scale)?,
            u_pattern: kv.take("u_pattern", r.u_pattern)?,
            activity,
        };
        kv.finish()?;
        generator
            .validate()
            .map_err(|e| ToolError::input(format!("invalid simulation spec: {e}")))?;
        Ok(Self { generator, render })
    }

    pub fn parse(text: &str) -> ToolResult<Self> {
        Self::from_kv(KvFile::parse(text, "spec")?)
    }

    pub fn load(path: &Path) -> ToolResult<Self> {
        Self::from_kv(KvFile::read(path)?)
    }

    pub fn render(&self) -> String {
        let g = &self.generator;
        let mut s = String::new();
        put(&mut s, "days", g.days);
        put(&mut s, "symbols", g.symbols);
        put(&mut s, "minutes", g.minutes);
        put(&mut s, "start_date", g.start_date);
        match g.placement {
            ShockPlacement::Fixed { minute } => put(&mut s, "placement", format!("fixed {minute}")),
            ShockPlacement::Uniform { lo, hi } => put(&mut s, "placement", format!("uniform {lo} {hi}")),
        }
        put(&mut s, "omega_b", g.omega_b);
        put(&mut s, "omega_a", g.omega_a);
        put(&mut s, "alpha_b", g.alpha_b);
        put(&mut s, "alpha_a", g.alpha_a);
        put(&mut s, "background", g.background);
        put(&mut s, "q", g.q);
        put(&mut s, "eta_v", g.eta_v);
        put(&mut s, "v1_min", g.v1_min);
        put(&mut s, "v1_max", g.v1_max);
        put(&mut s, "horizon", g.horizon);
        match g.productivity {
            Some(p) => {
                put(&mut s, "productivity_pi", p.pi);
                put(&mut s, "productivity_scale", p.scale);
            }
            None => {
                put(&mut s, "productivity_pi", "none");
                put(&mut s, "productivity_scale", "none");
            }
        }
        match g.bath {
            Some(b) => {
                put(&mut s, "bath_ratio", b.ratio);
                put(&mut s, "bath_noise", b.noise);
            }
            None => put(&mut s, "bath_ratio", "none"),
        }
        put(&mut s, "seed", g.seed);
        put(&mut s, "return_scale", self.render.return_scale);
        put(&mut s, "u_pattern", self.render.u_pattern);
        match self.render.activity {
            Some((lo, hi)) => {
                put(&mut s, "activity_lo", lo);
                put(&mut s, "activity_hi", hi);
            }
            None => {
                put(&mut s, "activity_lo", "none");
                put(&mut s, "activity_hi", "none");
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = PipelineConfig::default();
        assert_eq!(PipelineConfig::parse(&c.render()).unwrap(), c);
        let s = SimulationConfig::default();
        assert_eq!(SimulationConfig::parse(&s.render()).unwrap(), s);
    }

    #[test]
    fn empty_file_is_paper_defaults() {
        let c = PipelineConfig::parse("# nothing\n\n").unwrap();
        assert_eq!((c.q, c.x_c, c.cascade_gap, c.horizon), (3.0, 1.0, 60, 90));
        assert_eq!((c.activity_floor, c.smoothing, c.step), (3.0, 15, 1));
    }

    #[test]
    fn comments_and_overrides() {
        let c = PipelineConfig::parse("q = 2.5 # lower\ncalendar = half.txt\n").unwrap();
        assert_eq!(c.q, 2.5);
        assert_eq!(c.calendar, Some(PathBuf::from("half.txt")));
    }

    #[test]
    fn errors_name_the_line() {
        let e = PipelineConfig::parse("q = 3\nbogus = 1\n").unwrap_err();
        assert!(e.to_string().contains(":2:"), "{e}");
        let e = PipelineConfig::parse("q = 3\nq = 4\n").unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        assert!(PipelineConfig::parse("q = abc").is_err());
        assert!(PipelineConfig::parse("horizon = 200").is_err());
        assert!(PipelineConfig::parse("smoothing = 14").is_err());
        assert!(PipelineConfig::parse("x_c = 0").is_err());
    }

    #[test]
    fn simulation_laws() {
        let s = SimulationConfig::parse(
            "productivity_pi = 0.48\nproductivity_scale = 1\nbath_ratio = 0.9\nbath_noise = 0.1\nplacement = fixed 200\n",
        )
        .unwrap();
        assert_eq!(s.generator.productivity, Some(ProductivityLaw { pi: 0.48, scale: 1.0 }));
        assert_eq!(s.generator.bath, Some(BathLaw { ratio: 0.9, noise: 0.1 }));
        assert_eq!(s.generator.placement, ShockPlacement::Fixed { minute: 200 });
        assert_eq!(SimulationConfig::parse(&s.render()).unwrap(), s);
        assert!(SimulationConfig::parse("productivity_pi = 0.4").is_err());
    }
}
