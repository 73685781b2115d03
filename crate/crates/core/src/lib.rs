//! Agent-based replay of crowdsourced e-scooter rental demand.
//!
//! Privately owned scooters are homed in census tracts. Historical trips are
//! broadcast one at a time as rental demands; every idle scooter at the trip
//! origin with enough battery range expresses interest, and a central matcher
//! picks one winner under the configured [`sim::Scenario`] rule or drops the
//! demand. Each simulated day yields a Home Index (share of scooters that
//! served a trip and ended the day back home) and a Percentage of Satisfied
//! Demand, which [`stats`] compares across scenarios with a Gamma GLM.
//!
//! Modules, in pipeline order: [`trip_data`] → [`sim`] → [`metrics`] →
//! [`stats`]. [`synth`] generates calibrated synthetic demand and
//! [`summary`] computes boxplot-ready aggregates.

pub mod trip_data;
pub mod sim;
pub mod metrics;
pub mod stats;
pub mod synth;
pub mod summary;
