//! Home Index and Percentage of Satisfied Demand.
//!
//! HI is the share of *active* scooters (those that served at least one trip
//! that day) whose final tract equals their home tract. Idle scooters sit at
//! home all day and are excluded from both numerator and denominator. PSD is
//! satisfied demands over all demands. Each ratio is undefined when its
//! denominator is zero, and undefined values are written as empty CSV cells.

use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{AgentId, Condition, DayResult, Scenario, ScooterAgent};

/// Column order of the metrics CSV.
pub const METRICS_HEADER: [&str; 10] = [
    "date",
    "scenario",
    "fleet_per_tract",
    "range_km",
    "n_active",
    "at_home_active",
    "hi",
    "trips_total",
    "trips_satisfied",
    "psd",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayMetrics {
    pub date: NaiveDate,
    pub scenario: Scenario,
    pub fleet_per_tract: u32,
    pub range_km: f64,
    pub n_active: u32,
    pub at_home_active: u32,
    pub hi: Option<f64>,
    pub trips_total: u64,
    pub trips_satisfied: u64,
    pub psd: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn activity(agents: &[ScooterAgent]) -> (u32, u32) {
    agents
        .iter()
        .filter(|a| a.served_count > 0)
        .fold((0, 0), |(n, home), a| (n + 1, home + a.at_home() as u32))
}

pub fn home_index(day: &DayResult) -> Option<f64> {
    let (n, home) = activity(&day.agents);
    ratio(home as u64, n as u64)
}

pub fn psd(day: &DayResult) -> Option<f64> {
    ratio(day.trips_satisfied, day.trips_total)
}

impl DayMetrics {
    pub fn from_parts(date: NaiveDate, cond: &Condition, agents: &[ScooterAgent], log: &[Option<AgentId>]) -> Self {
        let (n_active, at_home_active) = activity(agents);
        let trips_total = log.len() as u64;
        let trips_satisfied = log.iter().filter(|w| w.is_some()).count() as u64;
        Self {
            date,
            scenario: cond.scenario,
            fleet_per_tract: cond.fleet_per_tract,
            range_km: cond.range_km,
            n_active,
            at_home_active,
            hi: ratio(at_home_active as u64, n_active as u64),
            trips_total,
            trips_satisfied,
            psd: ratio(trips_satisfied, trips_total),
        }
    }

    pub fn from_day(day: &DayResult, cond: &Condition) -> Self {
        Self::from_parts(day.date, cond, &day.agents, &day.assignments)
    }

    pub fn condition(&self) -> Condition {
        Condition { fleet_per_tract: self.fleet_per_tract, range_km: self.range_km, scenario: self.scenario }
    }

    fn check(&self) -> Result<(), String> {
        let in_unit = |v: Option<f64>| v.is_none_or(|x| (0.0..=1.0).contains(&x));
        if self.at_home_active > self.n_active {
            return Err("at_home_active exceeds n_active".into());
        }
        if self.trips_satisfied > self.trips_total {
            return Err("trips_satisfied exceeds trips_total".into());
        }
        if !in_unit(self.hi) || !in_unit(self.psd) {
            return Err("hi/psd outside [0, 1]".into());
        }
        if self.hi.is_some() != (self.n_active > 0) || self.psd.is_some() != (self.trips_total > 0) {
            return Err("hi/psd definedness disagrees with counters".into());
        }
        if !(self.range_km.is_finite() && self.range_km > 0.0) {
            return Err("range_km must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("metrics header must be {:?}", METRICS_HEADER)]
    Header,
    #[error("line {line}: {reason}")]
    BadRow { line: u64, reason: String },
}

impl MetricsError {
    pub fn is_io(&self) -> bool {
        matches!(self, MetricsError::Csv(e) if e.is_io_error())
    }
}

pub fn write_metrics_csv<'a, W, I>(out: W, rows: I) -> Result<(), MetricsError>
where
    W: Write,
    I: IntoIterator<Item = &'a DayMetrics>,
{
    let mut w = csv::Writer::from_writer(out);
    let mut any = false;
    for r in rows {
        w.serialize(r)?;
        any = true;
    }
    if !any {
        w.write_record(METRICS_HEADER)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Read and validate a metrics CSV.
pub fn read_metrics_csv<R: Read>(input: R) -> Result<Vec<DayMetrics>, MetricsError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?;
    if header.len() != METRICS_HEADER.len() || header.iter().zip(METRICS_HEADER).any(|(a, b)| a.trim() != b) {
        return Err(MetricsError::Header);
    }
    let mut out = Vec::new();
    for row in rdr.deserialize::<DayMetrics>() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            if e.is_io_error() {
                MetricsError::Csv(e)
            } else {
                MetricsError::BadRow { line, reason: e.to_string() }
            }
        })?;
        row.check()
            .map_err(|reason| MetricsError::BadRow { line: out.len() as u64 + 2, reason })?;
        out.push(row);
    }
    Ok(out)
}
