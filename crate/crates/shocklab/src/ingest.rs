//! Minute-bar CSV ingestion: `date,minute,symbol,price[,trades]`.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;
use shocklab_core::series::{GridDay, HalfDayCalendar, MinuteGrid, SymbolDay, REGULAR_SESSION_MINUTES};

use crate::error::{ToolError, ToolResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolActivity {
    pub symbol: String,
    pub mean_trades: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub rows: usize,
    pub days: usize,
    /// Sum of session lengths over all days.
    pub minutes: usize,
    pub half_days: usize,
    pub symbols_seen: usize,
    pub has_trades: bool,
    pub activity_floor: f64,
    pub retained: Vec<SymbolActivity>,
    pub dropped: Vec<SymbolActivity>,
}

type Cell = (f64, Option<u32>, u64);

fn header_layout(headers: &csv::StringRecord) -> ToolResult<bool> {
    let cols: Vec<&str> = headers.iter().map(str::trim).collect();
    match cols.as_slice() {
        ["date", "minute", "symbol", "price"] => Ok(false),
        ["date", "minute", "symbol", "price", "trades"] => Ok(true),
        _ => Err(ToolError::input(format!(
            "line 1: expected header `date,minute,symbol,price[,trades]`, got `{}`",
            cols.join(",")
        ))),
    }
}

/// Parses a panel and drops symbols whose mean trades per minute fall below
/// `activity_floor`. Without a trades column nothing is dropped.
pub fn ingest_reader<R: Read>(
    input: R,
    calendar: &HalfDayCalendar,
    activity_floor: f64,
) -> ToolResult<(MinuteGrid<f64>, IngestReport)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let with_trades = header_layout(
        rdr.headers()
            .map_err(|e| ToolError::input(format!("line 1: {e}")))?,
    )?;
    let mut cells: BTreeMap<NaiveDate, BTreeMap<String, Vec<Option<Cell>>>> = BTreeMap::new();
    let mut rows = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            ToolError::input(format!("line {line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| ToolError::input(format!("line {line}: {what}"));
        let expected = if with_trades { 5 } else { 4 };
        if rec.len() != expected {
            return Err(bad(&format!("expected {expected} fields, found {}", rec.len())));
        }
        let date: NaiveDate = rec[0]
            .parse()
            .map_err(|_| bad(&format!("bad date `{}`", &rec[0])))?;
        let minute: usize = rec[1]
            .parse()
            .map_err(|_| bad(&format!("bad minute `{}`", &rec[1])))?;
        if minute >= REGULAR_SESSION_MINUTES {
            return Err(bad(&format!("minute {minute} outside 0..{REGULAR_SESSION_MINUTES}")));
        }
        let symbol = rec[2].to_string();
        if symbol.is_empty() {
            return Err(bad("empty symbol"));
        }
        let price: f64 = rec[3]
            .parse()
            .map_err(|_| bad(&format!("bad price `{}`", &rec[3])))?;
        if !(price > 0.0) || !price.is_finite() {
            return Err(bad(&format!("price must be positive, got {price}")));
        }
        let trades = if with_trades {
            Some(
                rec[4]
                    .parse::<u32>()
                    .map_err(|_| bad(&format!("bad trade count `{}`", &rec[4])))?,
            )
        } else {
            None
        };
        let slots = cells.entry(date).or_default().entry(symbol.clone()).or_default();
        if slots.len() <= minute {
            slots.resize(minute + 1, None);
        }
        if let Some((_, _, first)) = slots[minute] {
            return Err(bad(&format!(
                "duplicate row for {date} minute {minute} {symbol} (first on line {first})"
            )));
        }
        slots[minute] = Some((price, trades, line));
        rows += 1;
    }
    if rows == 0 {
        return Err(ToolError::input("input has no data rows"));
    }

    let symbols: Vec<String> = {
        let mut s: Vec<String> = cells.values().flat_map(|d| d.keys().cloned()).collect();
        s.sort();
        s.dedup();
        s
    };
    let mut days = Vec::with_capacity(cells.len());
    let mut total_minutes = 0;
    for (date, by_symbol) in cells {
        let minutes = by_symbol.values().map(Vec::len).max().unwrap_or(0);
        total_minutes += minutes;
        let mut cols = Vec::with_capacity(symbols.len());
        for sym in &symbols {
            let Some(slots) = by_symbol.get(sym) else {
                cols.push(None);
                continue;
            };
            let mut prices = Vec::with_capacity(minutes);
            let mut trades = Vec::with_capacity(minutes);
            for m in 0..minutes {
                match slots.get(m).copied().flatten() {
                    Some((p, t, _)) => {
                        prices.push(p);
                        trades.push(t.unwrap_or(0));
                    }
                    None => {
                        return Err(ToolError::input(format!(
                            "{sym} on {date} has no row for minute {m} (session is {minutes} minutes)"
                        )))
                    }
                }
            }
            cols.push(Some(SymbolDay {
                prices,
                trades: with_trades.then_some(trades),
            }));
        }
        days.push(GridDay {
            date,
            minutes,
            symbols: cols,
        });
    }
    let grid = MinuteGrid::new(symbols, days)?;

    let activity: Vec<SymbolActivity> = grid
        .symbols()
        .iter()
        .enumerate()
        .map(|(j, s)| SymbolActivity {
            symbol: s.clone(),
            mean_trades: grid.mean_trades_per_minute(j),
        })
        .collect();
    let keep: Vec<bool> = activity
        .iter()
        .map(|a| a.mean_trades.map_or(true, |m| m >= activity_floor))
        .collect();
    let (retained, dropped): (Vec<_>, Vec<_>) = activity
        .into_iter()
        .zip(&keep)
        .partition(|(_, &k)| k);
    let report = IngestReport {
        rows,
        days: grid.days().len(),
        minutes: total_minutes,
        half_days: grid.days().iter().filter(|d| calendar.contains(d.date)).count(),
        symbols_seen: grid.symbols().len(),
        has_trades: with_trades,
        activity_floor,
        retained: retained.into_iter().map(|(a, _)| a).collect(),
        dropped: dropped.into_iter().map(|(a, _)| a).collect(),
    };
    if report.retained.is_empty() {
        return Err(ToolError::input(format!(
            "no symbol reaches the activity floor of {activity_floor} trades per minute"
        )));
    }
    let grid = grid.retain_symbols(|j, _| keep[j]);
    Ok((grid, report))
}

pub fn ingest_file(
    path: &Path,
    calendar: &HalfDayCalendar,
    activity_floor: f64,
) -> ToolResult<(MinuteGrid<f64>, IngestReport)> {
    let f = std::fs::File::open(path)
        .map_err(|e| ToolError::input(format!("cannot open {}: {e}", path.display())))?;
    ingest_reader(std::io::BufReader::new(f), calendar, activity_floor)
        .map_err(|e| ToolError::input(format!("{}: {}", path.display(), e.message)))
}

/// One ISO date per line; blank lines and `#` comments are skipped.
pub fn parse_calendar(text: &str) -> ToolResult<HalfDayCalendar> {
    let mut dates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        dates.push(
            line.parse::<NaiveDate>()
                .map_err(|_| ToolError::input(format!("calendar line {}: bad date `{line}`", i + 1)))?,
        );
    }
    Ok(HalfDayCalendar::new(dates))
}

pub fn read_calendar(path: &Path) -> ToolResult<HalfDayCalendar> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ToolError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_calendar(&text)
}

/// Writes a grid in the ingestion format, so it reads back unchanged.
pub fn write_grid<W: std::io::Write>(grid: &MinuteGrid<f64>, out: W) -> ToolResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let with_trades = grid.has_trades();
    let err = |e: csv::Error| crate::error::io_error("writing panel", e);
    if with_trades {
        w.write_record(["date", "minute", "symbol", "price", "trades"]).map_err(err)?;
    } else {
        w.write_record(["date", "minute", "symbol", "price"]).map_err(err)?;
    }
    for day in grid.days() {
        let date = day.date.to_string();
        for m in 0..day.minutes {
            for (j, sym) in grid.symbols().iter().enumerate() {
                let Some(sd) = &day.symbols[j] else { continue };
                let minute = m.to_string();
                let price = sd.prices[m].to_string();
                match &sd.trades {
                    Some(t) if with_trades => {
                        w.write_record([&date, &minute, sym, &price, &t[m].to_string()])
                    }
                    _ => w.write_record([&date, &minute, sym, &price]),
                }
                .map_err(err)?;
            }
        }
    }
    w.flush().map_err(|e| crate::error::io_error("writing panel", e))
}
