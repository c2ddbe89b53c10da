//! Response curves around each main shock and the laws fitted to them.

pub mod activity;
pub mod bath;
pub mod crossover;
pub mod curve;
pub mod magnitude;
pub mod omori;
pub mod productivity;
pub mod relations;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

pub use activity::{activity_profile, ActivityBucket, ActivityRow, DEFAULT_ACTIVITY_BINS};
pub use bath::{
    bath_extremes, fit_bath, fit_bath_binned, fit_bath_proportional, BathBin, BathEstimate,
    BathExtremes, BathFit, BathMode, BinnedBath, DEFAULT_BATH_BINS, MIN_BATH_ROWS,
};
pub use crossover::{crossover_scan, magnitude_grid, CrossoverScan, MagnitudeBin, MIN_CROSSOVER_ROWS};
pub use curve::{displaced_curves, displaced_curves_at, ResponseCurve, Side};
pub use magnitude::{magnitude, windowed_magnitude, STOCK_MAGNITUDE_WINDOW};
pub use omori::{fit_omori, OmoriFit, MIN_FIT_POINTS};
pub use productivity::{
    fit_productivity, fit_productivity_vs_magnitude, productivity, total_triggering_exponent,
    ProductivityFit, Trend, TriggeringExponent, DEFAULT_ETA_V, MIN_PRODUCTIVITY_ROWS,
};
pub use relations::{before_after_relations, BeforeAfter, Relation, RelationPair, MIN_RELATION_ROWS};

use crate::detector::ShockRecord;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{ExceedancePanel, NormalizedVolatility};

/// Market-level response to one accepted main shock.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShockLawRow<F> {
    pub date: NaiveDate,
    pub t_c: usize,
    pub horizon: usize,
    /// `log10` of the market mean volatility at the main shock.
    pub m: F,
    pub fit_b: Option<OmoriFit<F>>,
    pub fit_a: Option<OmoriFit<F>>,
    pub p_b: F,
    pub p_a: F,
    pub v1: F,
    pub v2_b: F,
    pub v2_a: F,
}

impl<F: Scalar> ShockLawRow<F> {
    pub fn before_after(&self) -> BeforeAfter<F> {
        let both = |f: fn(&OmoriFit<F>) -> F| match (&self.fit_b, &self.fit_a) {
            (Some(b), Some(a)) => Some((f(b), f(a))),
            _ => None,
        };
        BeforeAfter {
            omega: both(|f| f.omega),
            alpha: both(|f| f.alpha),
            productivity: (self.p_b, self.p_a),
        }
    }
}

/// Response of a single stock to one accepted main shock.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StockLawRow<F> {
    pub date: NaiveDate,
    pub symbol: String,
    pub t_c: usize,
    /// `log10` of the stock's largest volatility within
    /// [`STOCK_MAGNITUDE_WINDOW`] minutes of the main shock.
    pub m: F,
    pub fit_b: Option<OmoriFit<F>>,
    pub fit_a: Option<OmoriFit<F>>,
    pub p_b: F,
    pub p_a: F,
    pub v1: F,
    pub v2_b: F,
    pub v2_a: F,
}

/// A shock or stock left out of the law tables, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedRow {
    pub date: NaiveDate,
    pub symbol: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LawTables<F> {
    pub market: Vec<ShockLawRow<F>>,
    pub stocks: Vec<StockLawRow<F>>,
    pub skipped: Vec<SkippedRow>,
}

type DayRows<F> = (Option<ShockLawRow<F>>, Vec<StockLawRow<F>>, Vec<SkippedRow>);

fn day_rows<F: Scalar>(
    nv: &NormalizedVolatility<F>,
    ex: &ExceedancePanel<F>,
    d: usize,
    rec: &ShockRecord<F>,
    horizon_minutes: usize,
) -> Result<DayRows<F>> {
    let day = &ex.days[d];
    let step = ex.step;
    let t_c = rec.sample().ok_or(Error::UnacceptedShock { date: rec.date })?;
    let h = horizon_minutes / step;
    let skip = |symbol: Option<&str>, e: Error| SkippedRow {
        date: rec.date,
        symbol: symbol.map(str::to_owned),
        reason: e.to_string(),
    };
    let mut skipped = Vec::new();

    let market = (|| -> Result<ShockLawRow<F>> {
        let (b, a) = displaced_curves(&day.rate, rec, horizon_minutes)?;
        let m = magnitude(&day.market, t_c)?;
        let ext = bath_extremes(&day.market, t_c, h)?;
        Ok(ShockLawRow {
            date: rec.date,
            t_c: t_c * step,
            horizon: h * step,
            m,
            fit_b: fit_omori(&b),
            fit_a: fit_omori(&a),
            p_b: productivity(&b),
            p_a: productivity(&a),
            v1: ext.v1,
            v2_b: ext.v2_before,
            v2_a: ext.v2_after,
        })
    })();
    let market = match market {
        Ok(r) => Some(r),
        Err(e) => {
            skipped.push(skip(None, e));
            None
        }
    };

    let window = STOCK_MAGNITUDE_WINDOW / step;
    let mut stocks = Vec::new();
    for (j, symbol) in ex.symbols.iter().enumerate() {
        let (Some(ind), Some(v)) = (&day.indicators[j], &nv.panel.days[d].series[j]) else {
            continue;
        };
        let rate: Vec<F> = ind.iter().map(|&b| F::of_usize(b as usize)).collect();
        let row = (|| -> Result<StockLawRow<F>> {
            let (b, a) = displaced_curves(&rate, rec, horizon_minutes)?;
            let m = windowed_magnitude(v, t_c, window)?;
            let ext = bath_extremes(v, t_c, h)?;
            Ok(StockLawRow {
                date: rec.date,
                symbol: symbol.clone(),
                t_c: t_c * step,
                m,
                fit_b: fit_omori(&b),
                fit_a: fit_omori(&a),
                p_b: productivity(&b),
                p_a: productivity(&a),
                v1: ext.v1,
                v2_b: ext.v2_before,
                v2_a: ext.v2_after,
            })
        })();
        match row {
            Ok(r) => stocks.push(r),
            Err(e) => skipped.push(skip(Some(symbol), e)),
        }
    }
    Ok((market, stocks, skipped))
}

/// Market and per-stock law rows for every accepted record, `horizon` in
/// minutes. Records are matched to panel days by date; rows come out sorted
/// by date, then symbol.
pub fn shock_laws<F: Scalar>(
    nv: &NormalizedVolatility<F>,
    ex: &ExceedancePanel<F>,
    records: &[ShockRecord<F>],
    horizon_minutes: usize,
) -> Result<LawTables<F>> {
    if horizon_minutes < ex.step {
        return Err(Error::InvalidParameter(format!(
            "horizon of {horizon_minutes} minutes is shorter than one step"
        )));
    }
    let mut jobs = Vec::new();
    for rec in records.iter().filter(|r| r.accepted) {
        if rec.step != ex.step {
            return Err(Error::InvalidParameter(format!(
                "record for {} has step {}, panel has {}",
                rec.date, rec.step, ex.step
            )));
        }
        let d = ex
            .days
            .iter()
            .position(|day| day.date == rec.date)
            .ok_or_else(|| Error::InvalidParameter(format!("no panel day for {}", rec.date)))?;
        jobs.push((d, rec));
    }
    jobs.sort_by_key(|(d, _)| ex.days[*d].date);
    let per_day: Vec<DayRows<F>> = jobs
        .par_iter()
        .map(|&(d, rec)| day_rows(nv, ex, d, rec, horizon_minutes))
        .collect::<Result<_>>()?;
    let mut out = LawTables::default();
    for (m, s, k) in per_day {
        out.market.extend(m);
        out.stocks.extend(s);
        out.skipped.extend(k);
    }
    Ok(out)
}

/// Settings for [`ensemble_laws`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSettings<F> {
    pub eta_v: F,
    pub bath_bins: usize,
    /// Magnitude grid for the crossover scan.
    pub magnitude_edges: Vec<F>,
}

impl<F: Scalar> Default for EnsembleSettings<F> {
    fn default() -> Self {
        Self {
            eta_v: F::of(DEFAULT_ETA_V),
            bath_bins: DEFAULT_BATH_BINS,
            magnitude_edges: magnitude_grid(F::of(-1.0), F::of(2.0), 12),
        }
    }
}

/// Reductions over all shocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleLaws<F> {
    pub pi_b: Option<ProductivityFit<F>>,
    pub pi_a: Option<ProductivityFit<F>>,
    /// `log10 P` against `log10 M` instead of `M`.
    pub pi_b_vs_m: Option<ProductivityFit<F>>,
    pub pi_a_vs_m: Option<ProductivityFit<F>>,
    pub stock_pi_b: Option<ProductivityFit<F>>,
    pub stock_pi_a: Option<ProductivityFit<F>>,
    pub triggering: Option<TriggeringExponent<F>>,
    pub bath_b: Option<BathFit<F>>,
    pub bath_a: Option<BathFit<F>>,
    #[serde(skip)]
    pub stock_bath_b: Option<BinnedBath<F>>,
    #[serde(skip)]
    pub stock_bath_a: Option<BinnedBath<F>>,
    pub crossover_b: Option<CrossoverScan<F>>,
    pub crossover_a: Option<CrossoverScan<F>>,
    pub correlations: Vec<Relation<F>>,
}

impl<F: Scalar> EnsembleLaws<F> {
    /// Crossover magnitude from the after side, falling back to the before
    /// side.
    pub fn m_x(&self) -> Option<F> {
        self.crossover_a
            .as_ref()
            .and_then(|c| c.m_x)
            .or_else(|| self.crossover_b.as_ref().and_then(|c| c.m_x))
    }
}

fn crossover_side<F: Scalar>(
    rows: &[StockLawRow<F>],
    fit: impl Fn(&StockLawRow<F>) -> Option<&OmoriFit<F>>,
    edges: &[F],
) -> Option<CrossoverScan<F>> {
    let pts: Vec<(F, F, F)> = rows
        .iter()
        .filter_map(|r| fit(r).map(|f| (r.m, f.omega, f.alpha)))
        .collect();
    crossover_scan(&pts, edges)
}

/// Ensemble fits over law rows. `alternates` holds the market rows of any
/// additional horizons whose before/after relations should be reported too.
pub fn ensemble_laws<F: Scalar>(
    tables: &LawTables<F>,
    alternates: &[&[ShockLawRow<F>]],
    settings: &EnsembleSettings<F>,
) -> EnsembleLaws<F> {
    let market = &tables.market;
    let stocks = &tables.stocks;
    let mp = |f: fn(&ShockLawRow<F>) -> F| -> Vec<(F, F)> { market.iter().map(|r| (r.m, f(r))).collect() };
    let sp = |f: fn(&StockLawRow<F>) -> F| -> Vec<(F, F)> { stocks.iter().map(|r| (r.m, f(r))).collect() };
    let pi_a = fit_productivity(&mp(|r| r.p_a));
    let bath = |f: fn(&ShockLawRow<F>) -> F| -> Vec<(F, F)> { market.iter().map(|r| (r.v1, f(r))).collect() };
    let sbath = |f: fn(&StockLawRow<F>) -> F| -> Vec<(F, F)> { stocks.iter().map(|r| (r.v1, f(r))).collect() };

    let mut correlations = Vec::new();
    for rows in std::iter::once(market.as_slice()).chain(alternates.iter().copied()) {
        if let Some(first) = rows.first() {
            let ba: Vec<BeforeAfter<F>> = rows.iter().map(|r| r.before_after()).collect();
            correlations.extend(before_after_relations(&ba, first.horizon));
        }
    }

    EnsembleLaws {
        pi_b: fit_productivity(&mp(|r| r.p_b)),
        triggering: pi_a.map(|p| total_triggering_exponent(p.pi, settings.eta_v)),
        pi_a,
        pi_b_vs_m: fit_productivity_vs_magnitude(&mp(|r| r.p_b)),
        pi_a_vs_m: fit_productivity_vs_magnitude(&mp(|r| r.p_a)),
        stock_pi_b: fit_productivity(&sp(|r| r.p_b)),
        stock_pi_a: fit_productivity(&sp(|r| r.p_a)),
        bath_b: fit_bath_proportional(&bath(|r| r.v2_b)),
        bath_a: fit_bath_proportional(&bath(|r| r.v2_a)),
        stock_bath_b: fit_bath_binned(&sbath(|r| r.v2_b), settings.bath_bins),
        stock_bath_a: fit_bath_binned(&sbath(|r| r.v2_a), settings.bath_bins),
        crossover_b: crossover_side(stocks, |r| r.fit_b.as_ref(), &settings.magnitude_edges),
        crossover_a: crossover_side(stocks, |r| r.fit_a.as_ref(), &settings.magnitude_edges),
        correlations,
    }
}

/// Joins per-stock rows with each stock's mean trades per minute.
pub fn activity_rows<F: Scalar>(
    stocks: &[StockLawRow<F>],
    activity: impl Fn(&str) -> Option<F>,
) -> Vec<ActivityRow<F>> {
    stocks
        .iter()
        .filter_map(|r| {
            Some(ActivityRow {
                activity: activity(&r.symbol)?,
                alpha_b: r.fit_b.map(|f| f.alpha),
                alpha_a: r.fit_a.map(|f| f.alpha),
                omega_b: r.fit_b.map(|f| f.omega),
                omega_a: r.fit_a.map(|f| f.omega),
                p_b: r.p_b,
                p_a: r.p_a,
                v1: r.v1,
                v2_b: r.v2_b,
                v2_a: r.v2_a,
            })
        })
        .collect()
}
