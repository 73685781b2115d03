use std::io::{Read, Write};
use std::ops::AddAssign;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::parse::{format_timestamp, parse_timestamp, parse_trip_record};
use super::{HeaderMap, ParseFailure, RawTripRow, SchemaError, TractId, TripRecord, VehicleType};

/// Trips longer than this are treated as GPS noise.
pub const MAX_DISTANCE_M: u64 = 100_000;

/// Column order of the cleaned trip CSV.
pub const CLEANED_HEADER: [&str; 7] = [
    "trip_id",
    "vehicle_type",
    "start_time",
    "duration_s",
    "distance_m",
    "origin_tract",
    "dest_tract",
];

#[derive(Debug, Error)]
pub enum CleanError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    BadRow { line: u64, reason: String },
}

impl CleanError {
    /// True for failures of the underlying reader/writer rather than the data.
    pub fn is_io(&self) -> bool {
        match self {
            CleanError::Io(_) => true,
            CleanError::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}

/// Inclusive calendar-date window on trip start time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn contains(&self, day: NaiveDate) -> bool {
        self.start <= day && day <= self.end
    }
}

impl FromStr for DateWindow {
    type Err = String;

    /// `YYYY-MM-DD..YYYY-MM-DD`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected START..END, got {s:?}"))?;
        let parse = |d: &str| {
            NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|e| format!("{d:?}: {e}"))
        };
        let (start, end) = (parse(a)?, parse(b)?);
        if start > end {
            return Err(format!("window start {start} is after end {end}"));
        }
        Ok(Self { start, end })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanRules {
    pub window: Option<DateWindow>,
}

/// Row accounting for one cleaning pass.
///
/// `rows_read` always equals `rows_kept` plus every `dropped_*` counter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanReport {
    pub rows_read: u64,
    pub rows_kept: u64,
    pub dropped_missing_tract: u64,
    pub dropped_invalid_numeric: u64,
    pub dropped_bad_timestamp: u64,
    pub dropped_bad_vehicle_type: u64,
    pub dropped_out_of_window: u64,
}

impl CleanReport {
    pub fn dropped_total(&self) -> u64 {
        self.dropped_missing_tract
            + self.dropped_invalid_numeric
            + self.dropped_bad_timestamp
            + self.dropped_bad_vehicle_type
            + self.dropped_out_of_window
    }

    pub fn reconciles(&self) -> bool {
        self.rows_read == self.rows_kept + self.dropped_total()
    }

    fn record_failure(&mut self, why: ParseFailure) {
        match why {
            ParseFailure::MissingTract => self.dropped_missing_tract += 1,
            ParseFailure::BadNumeric => self.dropped_invalid_numeric += 1,
            ParseFailure::BadTimestamp => self.dropped_bad_timestamp += 1,
            ParseFailure::BadVehicleType => self.dropped_bad_vehicle_type += 1,
        }
    }
}

impl AddAssign for CleanReport {
    fn add_assign(&mut self, o: Self) {
        self.rows_read += o.rows_read;
        self.rows_kept += o.rows_kept;
        self.dropped_missing_tract += o.dropped_missing_tract;
        self.dropped_invalid_numeric += o.dropped_invalid_numeric;
        self.dropped_bad_timestamp += o.dropped_bad_timestamp;
        self.dropped_bad_vehicle_type += o.dropped_bad_vehicle_type;
        self.dropped_out_of_window += o.dropped_out_of_window;
    }
}

/// Row-at-a-time cleaner. Shards can be cleaned independently and their
/// reports summed.
#[derive(Debug, Clone, Default)]
pub struct TripCleaner {
    rules: CleanRules,
    report: CleanReport,
}

impl TripCleaner {
    pub fn new(rules: CleanRules) -> Self {
        Self { rules, report: CleanReport::default() }
    }

    pub fn push(&mut self, row: &RawTripRow<'_>) -> Option<TripRecord> {
        self.report.rows_read += 1;
        let rec = match parse_trip_record(row) {
            Ok(rec) => rec,
            Err(why) => {
                self.report.record_failure(why);
                return None;
            }
        };
        if rec.duration_s == 0 || rec.distance_m == 0 || rec.distance_m > MAX_DISTANCE_M {
            self.report.dropped_invalid_numeric += 1;
            return None;
        }
        if let Some(w) = &self.rules.window {
            if !w.contains(rec.day()) {
                self.report.dropped_out_of_window += 1;
                return None;
            }
        }
        self.report.rows_kept += 1;
        Some(rec)
    }

    pub fn report(&self) -> CleanReport {
        self.report
    }
}

fn source_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .buffer_capacity(1 << 20)
        .from_reader(input)
}

/// Stream a source CSV through the cleaner, handing each kept record to `sink`
/// in input order.
pub fn clean_csv<R, F>(input: R, rules: CleanRules, mut sink: F) -> Result<CleanReport, CleanError>
where
    R: Read,
    F: FnMut(TripRecord) -> Result<(), CleanError>,
{
    let mut rdr = source_reader(input);
    let header = HeaderMap::resolve(rdr.headers()?.iter())?;
    let mut cleaner = TripCleaner::new(rules);
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record)? {
        if let Some(trip) = cleaner.push(&header.row(&record)) {
            sink(trip)?;
        }
    }
    Ok(cleaner.report())
}

/// Count rows under the missing-tract rule alone, ignoring every other check.
/// This is the audit number for comparing against the published row counts.
pub fn tally_missing_tracts<R: Read>(input: R) -> Result<CleanReport, CleanError> {
    let mut rdr = source_reader(input);
    let header = HeaderMap::resolve(rdr.headers()?.iter())?;
    let mut report = CleanReport::default();
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record)? {
        report.rows_read += 1;
        if header.row(&record).has_both_tracts() {
            report.rows_kept += 1;
        } else {
            report.dropped_missing_tract += 1;
        }
    }
    Ok(report)
}

/// Writes the cleaned trip CSV.
pub struct CleanedTripWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CleanedTripWriter<W> {
    pub fn new(out: W) -> Result<Self, CleanError> {
        let mut inner = csv::WriterBuilder::new().from_writer(out);
        inner.write_record(CLEANED_HEADER)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, t: &TripRecord) -> Result<(), CleanError> {
        self.inner.write_record([
            t.trip_id.as_str(),
            t.vehicle_type.as_str(),
            &format_timestamp(&t.start_time),
            &t.duration_s.to_string(),
            &t.distance_m.to_string(),
            t.origin_tract.as_str(),
            t.dest_tract.as_str(),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W, CleanError> {
        self.inner.flush()?;
        self.inner.into_inner().map_err(|e| CleanError::Io(e.into_error()))
    }
}

pub fn write_cleaned_trips<'a, W, I>(out: W, trips: I) -> Result<W, CleanError>
where
    W: Write,
    I: IntoIterator<Item = &'a TripRecord>,
{
    let mut w = CleanedTripWriter::new(out)?;
    for t in trips {
        w.write(t)?;
    }
    w.finish()
}

/// Iterator over a cleaned trip CSV. The header must match [`CLEANED_HEADER`].
pub struct CleanedTripReader<R: Read> {
    rdr: csv::Reader<R>,
    record: csv::StringRecord,
}

impl<R: Read> CleanedTripReader<R> {
    pub fn new(input: R) -> Result<Self, CleanError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .buffer_capacity(1 << 20)
            .from_reader(input);
        let header = rdr.headers()?;
        if header.iter().all(str::is_empty) {
            return Err(SchemaError::MissingHeader.into());
        }
        for (i, want) in CLEANED_HEADER.iter().enumerate() {
            if header.get(i).map(str::trim) != Some(*want) {
                return Err(SchemaError::MissingColumn(want).into());
            }
        }
        Ok(Self { rdr, record: csv::StringRecord::new() })
    }

    fn decode(&self) -> Result<TripRecord, String> {
        let r = &self.record;
        let cell = |i: usize| r.get(i).unwrap_or("");
        let num = |i: usize| {
            cell(i)
                .trim()
                .parse::<u64>()
                .map_err(|_| format!("{}: not a nonnegative integer: {:?}", CLEANED_HEADER[i], cell(i)))
        };
        let tract = |i: usize| {
            TractId::new(cell(i)).ok_or_else(|| format!("{} is empty", CLEANED_HEADER[i]))
        };
        Ok(TripRecord {
            trip_id: cell(0).to_owned(),
            vehicle_type: VehicleType::parse(cell(1))
                .ok_or_else(|| format!("unknown vehicle_type {:?}", cell(1)))?,
            start_time: parse_timestamp(cell(2))
                .ok_or_else(|| format!("bad start_time {:?}", cell(2)))?,
            duration_s: num(3)?,
            distance_m: num(4)?,
            origin_tract: tract(5)?,
            dest_tract: tract(6)?,
        })
    }
}

impl<R: Read> Iterator for CleanedTripReader<R> {
    type Item = Result<TripRecord, CleanError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.rdr.read_record(&mut self.record) {
            Ok(false) => None,
            Err(e) => Some(Err(e.into())),
            Ok(true) => {
                let line = self.record.position().map_or(0, |p| p.line());
                Some(self.decode().map_err(|reason| CleanError::BadRow { line, reason }))
            }
        }
    }
}

pub fn read_cleaned_trips<R: Read>(input: R) -> Result<Vec<TripRecord>, CleanError> {
    CleanedTripReader::new(input)?.collect()
}
