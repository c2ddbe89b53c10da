use chrono::NaiveDate;

use super::grid::MinuteGrid;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sampling steps (minutes) the toolkit supports.
pub const SUPPORTED_STEPS: [usize; 3] = [1, 5, 10];

/// First sample index that carries a value; sample 0 would need an
/// overnight return and is left undefined.
pub const FIRST_SAMPLE: usize = 1;

/// Volatility values of one trading day. `series[j][k]` is the value of
/// symbol `j` at sample `k`, i.e. over the minutes `((k-1)*step, k*step]`.
/// Entries below [`FIRST_SAMPLE`] are zero and carry no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct VolDay<F> {
    pub date: NaiveDate,
    pub samples: usize,
    pub half_day: bool,
    pub series: Vec<Option<Vec<F>>>,
}

impl<F> VolDay<F> {
    pub fn present(&self) -> usize {
        self.series.iter().filter(|s| s.is_some()).count()
    }
}

/// A day x sample x symbol panel of volatility values at a fixed step.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityPanel<F> {
    pub step: usize,
    pub symbols: Vec<String>,
    pub days: Vec<VolDay<F>>,
}

impl<F: Scalar> VolatilityPanel<F> {
    /// Minute-of-day that sample `k` is stamped with (end of its interval).
    pub fn minute_of(&self, k: usize) -> usize {
        k * self.step
    }

    pub fn symbol_values(&self, j: usize) -> impl Iterator<Item = F> + '_ {
        self.days.iter().filter_map(move |d| d.series[j].as_ref()).flat_map(|s| {
            s[FIRST_SAMPLE.min(s.len())..].iter().copied()
        })
    }
}

/// Absolute log returns `|ln(p(t) / p(t - step))|` sampled every `step`
/// minutes. Minutes left over after the last full step are dropped.
pub fn compute_volatility<F: Scalar>(
    grid: &MinuteGrid<F>,
    step: usize,
) -> Result<VolatilityPanel<F>> {
    if !SUPPORTED_STEPS.contains(&step) {
        return Err(Error::UnsupportedStep(step));
    }
    let days = grid
        .days()
        .iter()
        .map(|day| {
            let samples = day.minutes / step;
            let series = day
                .symbols
                .iter()
                .map(|col| {
                    col.as_ref().map(|sd| {
                        let mut v = vec![F::zero(); samples];
                        for k in FIRST_SAMPLE..samples {
                            let now = sd.prices[k * step];
                            let before = sd.prices[(k - 1) * step];
                            v[k] = (now / before).ln().abs();
                        }
                        v
                    })
                })
                .collect();
            VolDay {
                date: day.date,
                samples,
                half_day: false,
                series,
            }
        })
        .collect();
    Ok(VolatilityPanel {
        step,
        symbols: grid.symbols().to_vec(),
        days,
    })
}
