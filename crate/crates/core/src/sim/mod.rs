//! The three-agent matching protocol.
//!
//! A demand generator replays one day's trips strictly in `(start_time,
//! trip_id)` order. For each trip every scooter agent that sits at the origin
//! tract, is idle and has at least the trip distance left in its battery
//! expresses interest; the central agent then picks a winner according to the
//! [`Scenario`] rule or drops the demand when nobody is interested.

mod agent;
mod day;
mod rng;
mod select;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trip_data::TractId;

pub use agent::{eligible_agents, initialize_day, AgentId, ScooterAgent, SimState, TractIndex};
pub use day::{run_day, run_day_traced, DayResult, Decision, DemandEvent};
pub use rng::{mix64, stream_seed, StreamRng};
pub use select::{select_winner, Selection};
pub use sweep::{
    run_sweep, write_assignment_log, CellAssignments, Condition, DayPartition, SweepOptions,
    SweepOutput,
};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("fleet per tract must be positive")]
    ZeroFleet,
    #[error("battery range must be positive, got {0} km")]
    BadRange(f64),
    #[error("tract set is empty")]
    EmptyTractSet,
    #[error("tract {0} appears twice in the tract set")]
    DuplicateTract(TractId),
    #[error("fleet of {fleet} over {tracts} tracts exceeds the agent id space")]
    FleetTooLarge { fleet: u32, tracts: usize },
    #[error("no conditions to simulate")]
    NoConditions,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Winner-selection rule paired with the drop-on-no-interest rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    /// Uniformly random interested scooter.
    S1,
    /// Interested scooter with the most remaining range.
    S2,
    /// Uniformly random interested scooter whose home is the trip destination.
    S3,
    /// Most remaining range among interested scooters homed at the destination.
    S4,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::S1 => "S1",
            Scenario::S2 => "S2",
            Scenario::S3 => "S3",
            Scenario::S4 => "S4",
        }
    }

    /// Small integer used when deriving per-cell random streams.
    pub fn code(self) -> u64 {
        match self {
            Scenario::S1 => 1,
            Scenario::S2 => 2,
            Scenario::S3 => 3,
            Scenario::S4 => 4,
        }
    }

    pub(crate) fn prefers_home(self) -> bool {
        matches!(self, Scenario::S3 | Scenario::S4)
    }

    pub(crate) fn prefers_charge(self) -> bool {
        matches!(self, Scenario::S2 | Scenario::S4)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().trim_start_matches('S') {
            "1" => Ok(Scenario::S1),
            "2" => Ok(Scenario::S2),
            "3" => Ok(Scenario::S3),
            "4" => Ok(Scenario::S4),
            _ => Err(format!("unknown scenario {s:?} (expected S1..S4)")),
        }
    }
}

/// What S3/S4 do when no interested scooter is homed at the destination.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomeMatchFallback {
    /// Apply the S1 (for S3) or S2 (for S4) rule to all interested scooters.
    #[default]
    AllInterested,
    /// Drop the demand.
    Drop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub fleet_per_tract: u32,
    pub max_range_m: u64,
    pub scenario: Scenario,
    pub tract_set: Vec<TractId>,
    pub master_seed: u64,
    pub home_fallback: HomeMatchFallback,
}

impl SimConfig {
    pub fn new(
        tract_set: Vec<TractId>,
        fleet_per_tract: u32,
        max_range_m: u64,
        scenario: Scenario,
        master_seed: u64,
    ) -> Self {
        Self {
            fleet_per_tract,
            max_range_m,
            scenario,
            tract_set,
            master_seed,
            home_fallback: HomeMatchFallback::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.fleet_per_tract == 0 {
            return Err(SimError::ZeroFleet);
        }
        if self.max_range_m == 0 {
            return Err(SimError::BadRange(0.0));
        }
        validate_tracts(&self.tract_set)?;
        let agents = self.fleet_per_tract as u64 * self.tract_set.len() as u64;
        if agents > u32::MAX as u64 {
            return Err(SimError::FleetTooLarge {
                fleet: self.fleet_per_tract,
                tracts: self.tract_set.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn validate_tracts(tracts: &[TractId]) -> Result<(), SimError> {
    if tracts.is_empty() {
        return Err(SimError::EmptyTractSet);
    }
    let mut seen = std::collections::HashSet::new();
    for t in tracts {
        if !seen.insert(t) {
            return Err(SimError::DuplicateTract(t.clone()));
        }
    }
    Ok(())
}
