use std::collections::HashMap;

use chrono::{NaiveDateTime, Timelike};
use thiserror::Error;

use super::{TractId, TripRecord, VehicleType};

/// Column names of the City of Austin dockless trip export, in file order.
pub const SOURCE_COLUMNS: [&str; 16] = [
    "ID",
    "Device ID",
    "Vehicle Type",
    "Trip Duration",
    "Trip Distance",
    "Start Time",
    "End Time",
    "Modified Date",
    "Month",
    "Hour",
    "Day of Week",
    "Council District (Start)",
    "Council District (End)",
    "Year",
    "Census Tract Start",
    "Census Tract End",
];

/// The subset of [`SOURCE_COLUMNS`] that ingest needs. Other columns are
/// tolerated and dropped.
pub const REQUIRED_COLUMNS: [&str; 7] = [
    "ID",
    "Vehicle Type",
    "Trip Duration",
    "Trip Distance",
    "Start Time",
    "Census Tract Start",
    "Census Tract End",
];

const TIMESTAMP_FORMATS: [&str; 5] = [
    "%m/%d/%Y %I:%M:%S %p",
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M:%S%.f",
    "%m/%d/%Y %H:%M:%S",
    "%m/%d/%Y %H:%M",
];

/// Why a raw row could not become a [`TripRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
pub enum ParseFailure {
    #[error("missing-tract")]
    MissingTract,
    #[error("bad-numeric")]
    BadNumeric,
    #[error("bad-timestamp")]
    BadTimestamp,
    #[error("bad-vehicle-type")]
    BadVehicleType,
}

impl ParseFailure {
    pub fn code(self) -> &'static str {
        match self {
            ParseFailure::MissingTract => "missing-tract",
            ParseFailure::BadNumeric => "bad-numeric",
            ParseFailure::BadTimestamp => "bad-timestamp",
            ParseFailure::BadVehicleType => "bad-vehicle-type",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("input has no header row")]
    MissingHeader,
    #[error("header is missing required column {0:?}")]
    MissingColumn(&'static str),
}

/// Column positions of the required fields, resolved once per file.
#[derive(Debug, Clone)]
pub struct HeaderMap {
    idx: [usize; REQUIRED_COLUMNS.len()],
}

impl HeaderMap {
    /// Header names are matched case-insensitively after trimming.
    pub fn resolve<'h, I>(header: I) -> Result<Self, SchemaError>
    where
        I: IntoIterator<Item = &'h str>,
    {
        let names: Vec<String> = header
            .into_iter()
            .map(|h| h.trim().trim_start_matches('\u{feff}').to_ascii_lowercase())
            .collect();
        if names.iter().all(|n| n.is_empty()) {
            return Err(SchemaError::MissingHeader);
        }
        let mut idx = [0usize; REQUIRED_COLUMNS.len()];
        for (slot, want) in idx.iter_mut().zip(REQUIRED_COLUMNS) {
            let lower = want.to_ascii_lowercase();
            *slot = names
                .iter()
                .position(|n| *n == lower)
                .ok_or(SchemaError::MissingColumn(want))?;
        }
        Ok(Self { idx })
    }

    /// Borrow the required cells from a record; absent cells read as empty.
    pub fn row<'r>(&self, record: &'r csv::StringRecord) -> RawTripRow<'r> {
        let get = |i: usize| record.get(self.idx[i]).unwrap_or("");
        RawTripRow {
            trip_id: get(0),
            vehicle_type: get(1),
            duration_s: get(2),
            distance_m: get(3),
            start_time: get(4),
            origin_tract: get(5),
            dest_tract: get(6),
        }
    }
}

/// Borrowed view of the cells ingest cares about.
#[derive(Debug, Clone, Copy, Default)]
pub struct RawTripRow<'a> {
    pub trip_id: &'a str,
    pub vehicle_type: &'a str,
    pub duration_s: &'a str,
    pub distance_m: &'a str,
    pub start_time: &'a str,
    pub origin_tract: &'a str,
    pub dest_tract: &'a str,
}

impl<'a> RawTripRow<'a> {
    /// Build from a column-name map keyed by [`SOURCE_COLUMNS`] names.
    pub fn from_map(map: &'a HashMap<String, String>) -> Self {
        let get = |k: &str| map.get(k).map(String::as_str).unwrap_or("");
        Self {
            trip_id: get("ID"),
            vehicle_type: get("Vehicle Type"),
            duration_s: get("Trip Duration"),
            distance_m: get("Trip Distance"),
            start_time: get("Start Time"),
            origin_tract: get("Census Tract Start"),
            dest_tract: get("Census Tract End"),
        }
    }

    /// Both tract cells are non-blank.
    pub fn has_both_tracts(&self) -> bool {
        !self.origin_tract.trim().is_empty() && !self.dest_tract.trim().is_empty()
    }
}

/// Coerce a raw row into a [`TripRecord`].
///
/// Checks run in a fixed order (tracts, timestamp, numerics, vehicle type) so
/// the reported reason is stable for rows with several defects.
pub fn parse_trip_record(row: &RawTripRow<'_>) -> Result<TripRecord, ParseFailure> {
    let origin_tract = TractId::new(row.origin_tract).ok_or(ParseFailure::MissingTract)?;
    let dest_tract = TractId::new(row.dest_tract).ok_or(ParseFailure::MissingTract)?;
    let start_time = parse_timestamp(row.start_time).ok_or(ParseFailure::BadTimestamp)?;
    let duration_s = parse_count(row.duration_s).ok_or(ParseFailure::BadNumeric)?;
    let distance_m = parse_count(row.distance_m).ok_or(ParseFailure::BadNumeric)?;
    let vehicle_type = VehicleType::parse(row.vehicle_type).ok_or(ParseFailure::BadVehicleType)?;
    Ok(TripRecord {
        trip_id: row.trip_id.trim().to_owned(),
        vehicle_type,
        start_time,
        duration_s,
        distance_m,
        origin_tract,
        dest_tract,
    })
}

/// Nonnegative integer; decimal input is rounded to the nearest unit.
fn parse_count(raw: &str) -> Option<u64> {
    let s = raw.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let v: f64 = s.parse().ok()?;
    // 2^53 keeps the rounding exact.
    if v.is_finite() && (0.0..=9_007_199_254_740_992.0).contains(&v) {
        Some(v.round() as u64)
    } else {
        None
    }
}

/// Local wall-clock timestamp, truncated to whole seconds.
pub fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    TIMESTAMP_FORMATS
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
        .and_then(|t| t.with_nanosecond(0))
}

/// ISO-8601 without offset, as written to the cleaned CSV.
pub fn format_timestamp(t: &NaiveDateTime) -> String {
    t.format("%Y-%m-%dT%H:%M:%S").to_string()
}
