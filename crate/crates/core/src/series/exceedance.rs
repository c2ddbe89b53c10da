use chrono::NaiveDate;

use super::normalize::NormalizedVolatility;
use super::volatility::FIRST_SAMPLE;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default volatility threshold, in normalized units.
pub const DEFAULT_Q: f64 = 3.0;

/// Threshold exceedances and market aggregates for one day.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceDay<F> {
    pub date: NaiveDate,
    pub samples: usize,
    pub half_day: bool,
    /// Per-symbol 0/1 indicators, `None` for symbols missing that day.
    pub indicators: Vec<Option<Vec<u8>>>,
    /// Number of symbols with data (the divisor of both aggregates).
    pub present: usize,
    /// Fraction of present symbols at or above the threshold.
    pub rate: Vec<F>,
    /// Mean normalized volatility over present symbols.
    pub market: Vec<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceedancePanel<F> {
    pub q: F,
    pub step: usize,
    pub symbols: Vec<String>,
    pub days: Vec<ExceedanceDay<F>>,
}

impl<F: Scalar> ExceedancePanel<F> {
    /// Integer exceedance series of symbol `j` on day `d` as scalars.
    pub fn symbol_rate(&self, d: usize, j: usize) -> Option<Vec<F>> {
        self.days[d].indicators[j]
            .as_ref()
            .map(|ind| ind.iter().map(|&b| F::of_usize(b as usize)).collect())
    }
}

/// Binary exceedance `v >= q` per symbol and the market fraction and mean
/// volatility per sample.
pub fn exceedance_panel<F: Scalar>(nv: &NormalizedVolatility<F>, q: F) -> Result<ExceedancePanel<F>> {
    if !(q > F::zero()) {
        return Err(Error::InvalidParameter(format!("threshold q must be positive, got {q}")));
    }
    let days = nv
        .panel
        .days
        .iter()
        .map(|day| {
            let indicators: Vec<Option<Vec<u8>>> = day
                .series
                .iter()
                .map(|s| {
                    s.as_ref().map(|s| {
                        s.iter()
                            .enumerate()
                            .map(|(k, &v)| u8::from(k >= FIRST_SAMPLE && v >= q))
                            .collect()
                    })
                })
                .collect();
            let present = day.present();
            let mut count = vec![0usize; day.samples];
            let mut vsum = vec![F::zero(); day.samples];
            for (ind, s) in indicators.iter().zip(&day.series) {
                let (Some(ind), Some(s)) = (ind, s) else { continue };
                for k in FIRST_SAMPLE..day.samples {
                    count[k] += ind[k] as usize;
                    vsum[k] += s[k];
                }
            }
            let (rate, market) = if present > 0 {
                let p = F::of_usize(present);
                (
                    count.iter().map(|&c| F::of_usize(c) / p).collect(),
                    vsum.iter().map(|&v| v / p).collect(),
                )
            } else {
                (vec![F::zero(); day.samples], vec![F::zero(); day.samples])
            };
            ExceedanceDay {
                date: day.date,
                samples: day.samples,
                half_day: day.half_day,
                indicators,
                present,
                rate,
                market,
            }
        })
        .collect();
    Ok(ExceedancePanel {
        q,
        step: nv.panel.step,
        symbols: nv.panel.symbols.clone(),
        days,
    })
}
