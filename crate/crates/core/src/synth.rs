//! Synthetic dockless-trip demand.
//!
//! The generator reproduces the coarse shape of a city-scale trip log reduced
//! to its busiest tracts: a handful of core tracts with Zipf-like popularity,
//! a heavy O-D diagonal, a thin tail of peripheral tracts, weekday/weekend
//! volume swings and afternoon/evening peaks. Every day is drawn from its own
//! seeded stream, so any day can be regenerated alone.

use chrono::{Datelike, Days, NaiveDate, NaiveTime, Weekday};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Poisson};
use thiserror::Error;

use crate::sim::mix64;
use crate::trip_data::{TractId, TripRecord, VehicleType, MAX_DISTANCE_M};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic demand config: {0}")]
    Config(String),
}

/// Relative trip starts per hour of day, midnight first.
const HOURLY: [f64; 24] = [
    2.2, 1.6, 1.2, 0.5, 0.3, 0.3, 0.6, 1.4, 2.6, 3.0, 3.6, 4.8, 6.0, 6.2, 6.0, 6.2, 6.8, 7.4, 7.6, 7.0, 6.0,
    5.0, 4.0, 3.0,
];

fn weekday_factor(d: Weekday) -> f64 {
    match d {
        Weekday::Mon => 0.85,
        Weekday::Tue => 0.85,
        Weekday::Wed => 0.9,
        Weekday::Thu => 0.95,
        Weekday::Fri => 1.1,
        Weekday::Sat => 1.3,
        Weekday::Sun => 1.05,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub start: NaiveDate,
    pub days: u32,
    /// Mean trips per day across all tracts, before the weekday factor.
    pub trips_per_day: f64,
    pub core_tracts: usize,
    pub tail_tracts: usize,
    /// Share of trips with at least one endpoint in the tail.
    pub tail_share: f64,
    /// Share of core trips that start and end in the same tract.
    pub self_share: f64,
    /// Exponent of the core popularity weights 1/(rank+1)^s.
    pub zipf_exponent: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(2018, 12, 1).unwrap(),
            days: 30,
            trips_per_day: 23_000.0,
            core_tracts: 14,
            tail_tracts: 60,
            tail_share: 0.09,
            self_share: 0.35,
            zipf_exponent: 0.7,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Config(m.to_owned()));
        if self.core_tracts == 0 {
            return bad("core_tracts must be positive");
        }
        if !(self.trips_per_day.is_finite() && self.trips_per_day >= 0.0) {
            return bad("trips_per_day must be finite and nonnegative");
        }
        if !(0.0..=1.0).contains(&self.tail_share) || !(0.0..=1.0).contains(&self.self_share) {
            return bad("shares must lie in [0, 1]");
        }
        if self.tail_tracts == 0 && self.tail_share > 0.0 {
            return bad("tail_share needs tail_tracts");
        }
        if !self.zipf_exponent.is_finite() || self.zipf_exponent < 0.0 {
            return bad("zipf_exponent must be finite and nonnegative");
        }
        if self.core_tracts + self.tail_tracts > 900_000 {
            return bad("too many tracts");
        }
        if self.start.checked_add_days(Days::new(self.days as u64)).is_none() {
            return bad("date range overflows");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthDemand {
    config: SynthConfig,
    tracts: Vec<TractId>,
    origin: WeightedIndex<f64>,
    dest: Vec<WeightedIndex<f64>>,
    hours: WeightedIndex<f64>,
}

impl SynthDemand {
    pub fn new(config: SynthConfig) -> Result<Self, SynthError> {
        config.validate()?;
        let n = config.core_tracts;
        let tracts = (0..n + config.tail_tracts)
            .map(|i| TractId::new(&format!("48453{:06}", 100 + 100 * i)).unwrap())
            .collect();
        let w: Vec<f64> = (0..n).map(|i| 1.0 / ((i + 1) as f64).powf(config.zipf_exponent)).collect();
        let origin = WeightedIndex::new(&w).unwrap();
        let dest = (0..n)
            .map(|i| {
                let others: f64 = w.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).sum();
                let row: Vec<f64> = (0..n)
                    .map(|j| {
                        if j == i {
                            config.self_share.max(1e-12)
                        } else if others > 0.0 {
                            (1.0 - config.self_share) * w[j] / others
                        } else {
                            0.0
                        }
                    })
                    .collect();
                WeightedIndex::new(&row).unwrap()
            })
            .collect();
        let hours = WeightedIndex::new(HOURLY).unwrap();
        Ok(Self { config, tracts, origin, dest, hours })
    }

    pub fn config(&self) -> &SynthConfig {
        &self.config
    }

    /// Core tracts first, then the tail.
    pub fn tracts(&self) -> &[TractId] {
        &self.tracts
    }

    pub fn core_tracts(&self) -> &[TractId] {
        &self.tracts[..self.config.core_tracts]
    }

    pub fn date(&self, day: u32) -> NaiveDate {
        self.config.start + Days::new(day as u64)
    }

    /// Trips of day `day` (0-based), ordered by start time then id.
    pub fn day(&self, day: u32) -> Vec<TripRecord> {
        let c = &self.config;
        let date = self.date(day);
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(mix64(c.seed) ^ day as u64));
        let mean = c.trips_per_day * weekday_factor(date.weekday());
        let count = if mean > 0.0 { Poisson::new(mean).unwrap().sample(&mut rng) as usize } else { 0 };
        let short = LogNormal::new(900f64.ln(), 0.6).unwrap();
        let speed = LogNormal::new(3.0f64.ln(), 0.3).unwrap();

        let mut trips: Vec<TripRecord> = (0..count)
            .map(|k| {
                let (o, d) = self.endpoints(&mut rng);
                let dist = if o == d {
                    short.sample(&mut rng)
                } else {
                    let gap = (o as f64 - d as f64).abs().min(6.0);
                    LogNormal::new((1400.0 + 350.0 * gap).ln(), 0.5).unwrap().sample(&mut rng)
                };
                let distance_m = (dist.round() as u64).clamp(30, MAX_DISTANCE_M);
                let duration_s = (30.0 + distance_m as f64 / speed.sample(&mut rng)).round() as u64;
                let secs = self.hours.sample(&mut rng) as u32 * 3600 + rng.random_range(0..3600);
                let start = NaiveTime::from_num_seconds_from_midnight_opt(secs, 0).unwrap();
                TripRecord {
                    trip_id: format!("syn-{day:04}-{k:06}"),
                    vehicle_type: if rng.random_bool(0.95) { VehicleType::Scooter } else { VehicleType::Bicycle },
                    start_time: date.and_time(start),
                    duration_s,
                    distance_m,
                    origin_tract: self.tracts[o].clone(),
                    dest_tract: self.tracts[d].clone(),
                }
            })
            .collect();
        trips.sort_by(|a, b| (a.start_time, &a.trip_id).cmp(&(b.start_time, &b.trip_id)));
        trips
    }

    fn endpoints(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        let c = &self.config;
        if c.tail_tracts > 0 && rng.random_bool(c.tail_share) {
            let tail = c.core_tracts + rng.random_range(0..c.tail_tracts);
            let other = if rng.random_bool(0.5) {
                self.origin.sample(rng)
            } else {
                c.core_tracts + rng.random_range(0..c.tail_tracts)
            };
            return if rng.random_bool(0.5) { (tail, other) } else { (other, tail) };
        }
        let o = self.origin.sample(rng);
        (o, self.dest[o].sample(rng))
    }

    /// All days in order.
    pub fn trips(&self) -> impl Iterator<Item = TripRecord> + '_ {
        (0..self.config.days).flat_map(|d| self.day(d))
    }
}
