//! Comparison of detected main shocks with announcement times of rate
//! decisions in 2001-2002.

use chrono::NaiveDate;
use shocklab_core::detector::ShockRecord;

use crate::report::{num, Table};

const FIXTURE: &str = include_str!("../fixtures/fomc_2001_2002.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct Announcement {
    pub date: NaiveDate,
    pub unscheduled: bool,
    pub rate: f64,
    pub change: f64,
    pub relative_change: f64,
    /// Announcement minute after the open.
    pub t: i64,
    /// Main-shock minute reported alongside.
    pub t_c: i64,
}

/// The bundled reference announcements.
pub fn announcements() -> Vec<Announcement> {
    let mut rdr = csv::Reader::from_reader(FIXTURE.as_bytes());
    rdr.records()
        .map(|r| {
            let r = r.expect("bundled fixture is valid csv");
            let f = |i: usize| r[i].parse::<f64>().expect("bundled fixture number");
            Announcement {
                date: r[0].parse().expect("bundled fixture date"),
                unscheduled: r[1].parse().expect("bundled fixture flag"),
                rate: f(2),
                change: f(3),
                relative_change: f(4),
                t: r[5].parse().expect("bundled fixture minute"),
                t_c: r[6].parse().expect("bundled fixture minute"),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub reference: Announcement,
    pub detected: Option<usize>,
    pub accepted: bool,
}

impl Table1Row {
    /// Detected main-shock minute minus the announcement minute.
    pub fn delta(&self) -> Option<i64> {
        self.detected.map(|t| t as i64 - self.reference.t)
    }

    pub fn reference_delta(&self) -> i64 {
        self.reference.t_c - self.reference.t
    }
}

/// Rows for every announcement date present in `records`.
pub fn table1_rows(records: &[ShockRecord<f64>]) -> Vec<Table1Row> {
    announcements()
        .into_iter()
        .filter_map(|a| {
            let r = records.iter().find(|r| r.date == a.date)?;
            Some(Table1Row {
                reference: a,
                detected: r.t_c,
                accepted: r.accepted,
            })
        })
        .collect()
}

pub fn table1_table(rows: &[Table1Row]) -> Table {
    let mut t = Table::new(&[
        "date", "unscheduled", "delta_r", "T", "T_c_reference", "delta_reference", "T_c", "delta", "accepted",
    ]);
    for r in rows {
        let a = &r.reference;
        t.push(vec![
            a.date.to_string(),
            a.unscheduled.to_string(),
            num(a.change),
            a.t.to_string(),
            a.t_c.to_string(),
            r.reference_delta().to_string(),
            r.detected.map(|x| x.to_string()).unwrap_or_default(),
            r.delta().map(|x| x.to_string()).unwrap_or_default(),
            r.accepted.to_string(),
        ]);
    }
    t
}
