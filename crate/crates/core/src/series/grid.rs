use std::collections::BTreeSet;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Length of a regular 9:30-16:00 session in minutes.
pub const REGULAR_SESSION_MINUTES: usize = 390;

/// One symbol's minute bars for one trading day.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDay<F> {
    pub prices: Vec<F>,
    /// Transactions per minute, when the source carries them.
    pub trades: Option<Vec<u32>>,
}

/// A trading day of the panel. `symbols[j]` is `None` when symbol `j` has no
/// data for the day.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDay<F> {
    pub date: NaiveDate,
    pub minutes: usize,
    pub symbols: Vec<Option<SymbolDay<F>>>,
}

/// Day x minute x symbol price panel.
///
/// Symbols are held in ascending identifier order and days in ascending date
/// order regardless of the order they were supplied in; all downstream
/// reductions iterate in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct MinuteGrid<F> {
    symbols: Vec<String>,
    days: Vec<GridDay<F>>,
}

impl<F: Scalar> MinuteGrid<F> {
    pub fn new(symbols: Vec<String>, mut days: Vec<GridDay<F>>) -> Result<Self> {
        let s = symbols.len();
        let unique: BTreeSet<&String> = symbols.iter().collect();
        if unique.len() != s {
            return Err(Error::InvalidParameter("duplicate symbol identifiers".into()));
        }
        for day in &days {
            if day.symbols.len() != s {
                return Err(Error::InvalidParameter(format!(
                    "day {} lists {} symbols, panel has {s}",
                    day.date,
                    day.symbols.len()
                )));
            }
            for (j, col) in day.symbols.iter().enumerate() {
                let Some(sd) = col else { continue };
                if sd.prices.len() != day.minutes {
                    return Err(Error::MissingMinutes {
                        symbol: symbols[j].clone(),
                        date: day.date,
                        found: sd.prices.len(),
                        expected: day.minutes,
                    });
                }
                if let Some(tr) = &sd.trades {
                    if tr.len() != day.minutes {
                        return Err(Error::MissingMinutes {
                            symbol: symbols[j].clone(),
                            date: day.date,
                            found: tr.len(),
                            expected: day.minutes,
                        });
                    }
                }
                if let Some(m) = sd
                    .prices
                    .iter()
                    .position(|&p| !(p > F::zero()) || !p.is_finite())
                {
                    return Err(Error::InvalidPrice {
                        symbol: symbols[j].clone(),
                        date: day.date,
                        minute: m,
                    });
                }
            }
        }
        let dates: BTreeSet<NaiveDate> = days.iter().map(|d| d.date).collect();
        if dates.len() != days.len() {
            return Err(Error::InvalidParameter("duplicate trading dates".into()));
        }

        // canonical symbol order
        let mut order: Vec<usize> = (0..s).collect();
        order.sort_by(|&a, &b| symbols[a].cmp(&symbols[b]));
        let symbols: Vec<String> = order.iter().map(|&j| symbols[j].clone()).collect();
        for day in &mut days {
            let mut cols: Vec<Option<Option<SymbolDay<F>>>> = std::mem::take(&mut day.symbols)
                .into_iter()
                .map(Some)
                .collect();
            day.symbols = order.iter().map(|&j| cols[j].take().flatten()).collect();
        }
        days.sort_by_key(|d| d.date);
        Ok(Self { symbols, days })
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn days(&self) -> &[GridDay<F>] {
        &self.days
    }

    pub fn has_trades(&self) -> bool {
        self.days
            .iter()
            .flat_map(|d| d.symbols.iter().flatten())
            .any(|sd| sd.trades.is_some())
    }

    /// Average transactions per minute of symbol `j` over every minute it
    /// has data for. `None` if the symbol carries no trade counts.
    pub fn mean_trades_per_minute(&self, j: usize) -> Option<f64> {
        let mut total = 0u64;
        let mut minutes = 0usize;
        for day in &self.days {
            if let Some(sd) = &day.symbols[j] {
                let tr = sd.trades.as_ref()?;
                total += tr.iter().map(|&t| u64::from(t)).sum::<u64>();
                minutes += tr.len();
            }
        }
        (minutes > 0).then(|| total as f64 / minutes as f64)
    }

    /// Keeps the symbols for which `keep` returns true.
    pub fn retain_symbols(&self, keep: impl Fn(usize, &str) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.symbols.len())
            .filter(|&j| keep(j, &self.symbols[j]))
            .collect();
        Self {
            symbols: idx.iter().map(|&j| self.symbols[j].clone()).collect(),
            days: self
                .days
                .iter()
                .map(|d| GridDay {
                    date: d.date,
                    minutes: d.minutes,
                    symbols: idx.iter().map(|&j| d.symbols[j].clone()).collect(),
                })
                .collect(),
        }
    }
}

/// Set of shortened sessions (days around holidays).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HalfDayCalendar {
    dates: BTreeSet<NaiveDate>,
}

impl HalfDayCalendar {
    pub fn new(dates: impl IntoIterator<Item = NaiveDate>) -> Self {
        Self {
            dates: dates.into_iter().collect(),
        }
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.dates.contains(&date)
    }

    pub fn dates(&self) -> impl Iterator<Item = &NaiveDate> {
        self.dates.iter()
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}
