//! Trip ingestion: raw open-data rows to cleaned trip records, and the
//! origin-destination views built from them.
//!
//! The source data is already anonymised to census tracts, so every location
//! in this crate is a [`TractId`]. There is no geometry anywhere.

mod clean;
mod od;
mod parse;

use std::fmt;

use chrono::{NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

pub use clean::{
    clean_csv, read_cleaned_trips, tally_missing_tracts, write_cleaned_trips, CleanError,
    CleanReport, CleanRules, CleanedTripReader, CleanedTripWriter, DateWindow, TripCleaner,
    CLEANED_HEADER, MAX_DISTANCE_M,
};
pub use od::{
    build_od_matrix, coverage_curve, select_top_tracts, Axis, CoverageCurve, OdBuilder, OdError,
    OdMatrix, TractSelection,
};
pub use parse::{
    format_timestamp, parse_timestamp, parse_trip_record, HeaderMap, ParseFailure, RawTripRow,
    SchemaError, REQUIRED_COLUMNS, SOURCE_COLUMNS,
};

/// Census tract identifier, compared by exact string equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TractId(String);

impl TractId {
    /// Returns `None` for an empty (or all-whitespace) identifier.
    pub fn new(raw: &str) -> Option<Self> {
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            None
        } else {
            Some(Self(trimmed.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TractId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VehicleType {
    Scooter,
    Bicycle,
}

impl VehicleType {
    pub fn as_str(self) -> &'static str {
        match self {
            VehicleType::Scooter => "scooter",
            VehicleType::Bicycle => "bicycle",
        }
    }

    /// Accepts the open-data spellings plus a few common aliases.
    pub fn parse(raw: &str) -> Option<Self> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "scooter" | "e-scooter" | "escooter" => Some(VehicleType::Scooter),
            "bicycle" | "bike" | "e-bike" | "ebike" => Some(VehicleType::Bicycle),
            _ => None,
        }
    }
}

impl fmt::Display for VehicleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One demand event. Post-cleaning, `duration_s > 0` and `distance_m > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripRecord {
    pub trip_id: String,
    pub vehicle_type: VehicleType,
    /// Local wall-clock time, second resolution. No timezone handling.
    pub start_time: NaiveDateTime,
    pub duration_s: u64,
    pub distance_m: u64,
    pub origin_tract: TractId,
    pub dest_tract: TractId,
}

impl TripRecord {
    /// Calendar day the trip belongs to.
    pub fn day(&self) -> NaiveDate {
        self.start_time.date()
    }
}
