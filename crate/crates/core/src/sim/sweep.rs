use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use chrono::NaiveDate;
use rayon::prelude::*;

use super::{
    validate_tracts, AgentId, DemandEvent, HomeMatchFallback, Scenario, SimError, SimState,
    StreamRng, TractIndex,
};
use crate::metrics::DayMetrics;
use crate::trip_data::{TractId, TripRecord};

/// Demand for the simulated tract set, split by calendar day of start time
/// and sorted in replay order. Days between the first and last observed day
/// with no demand are present with an empty list.
#[derive(Debug, Clone, Default)]
pub struct DayPartition {
    pub tracts: Vec<TractId>,
    pub days: Vec<(NaiveDate, Vec<DemandEvent>)>,
    /// Trips read but discarded because an endpoint lies outside the set.
    pub outside_tract_set: u64,
}

impl DayPartition {
    pub fn build<I>(trips: I, tracts: &[TractId]) -> Result<Self, SimError>
    where
        I: IntoIterator<Item = TripRecord>,
    {
        validate_tracts(tracts)?;
        let index: HashMap<&str, TractIndex> = tracts
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i as TractIndex))
            .collect();
        let mut by_day: BTreeMap<NaiveDate, Vec<DemandEvent>> = BTreeMap::new();
        let mut outside = 0u64;
        for t in trips {
            let (Some(&origin), Some(&dest)) =
                (index.get(t.origin_tract.as_str()), index.get(t.dest_tract.as_str()))
            else {
                outside += 1;
                continue;
            };
            by_day.entry(t.day()).or_default().push(DemandEvent {
                trip_id: t.trip_id.into_boxed_str(),
                start_s: t.start_time.and_utc().timestamp(),
                duration_s: t.duration_s,
                distance_m: t.distance_m,
                origin,
                dest,
            });
        }
        let mut days = Vec::new();
        if let (Some(&first), Some(&last)) = (by_day.keys().next(), by_day.keys().next_back()) {
            for date in first.iter_days().take_while(|d| *d <= last) {
                let mut demands = by_day.remove(&date).unwrap_or_default();
                demands.sort_by(|a, b| a.replay_key().cmp(&b.replay_key()));
                days.push((date, demands));
            }
        }
        Ok(Self { tracts: tracts.to_vec(), days, outside_tract_set: outside })
    }

    pub fn n_days(&self) -> usize {
        self.days.len()
    }

    pub fn n_demands(&self) -> usize {
        self.days.iter().map(|(_, d)| d.len()).sum()
    }
}

/// One (fleet, range, scenario) cell of the run matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub fleet_per_tract: u32,
    pub range_km: f64,
    pub scenario: Scenario,
}

impl Condition {
    pub fn range_m(&self) -> u64 {
        (self.range_km * 1000.0).round() as u64
    }

    /// Cartesian product in fleet, range, scenario order.
    pub fn grid(fleets: &[u32], ranges_km: &[f64], scenarios: &[Scenario]) -> Vec<Condition> {
        let mut out = Vec::new();
        for &fleet_per_tract in fleets {
            for &range_km in ranges_km {
                for &scenario in scenarios {
                    out.push(Condition { fleet_per_tract, range_km, scenario });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.fleet_per_tract == 0 {
            return Err(SimError::ZeroFleet);
        }
        if !(self.range_km.is_finite() && self.range_m() > 0) {
            return Err(SimError::BadRange(self.range_km));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub master_seed: u64,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    /// Start every day with the whole fleet at home and fully charged.
    pub daily_reset: bool,
    pub home_fallback: HomeMatchFallback,
    pub record_assignments: bool,
}

impl SweepOptions {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            jobs: 0,
            daily_reset: true,
            home_fallback: HomeMatchFallback::AllInterested,
            record_assignments: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CellAssignments {
    pub day: usize,
    pub condition: usize,
    pub winners: Vec<Option<AgentId>>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    /// One record per (day, condition), ordered by day then condition index.
    pub metrics: Vec<DayMetrics>,
    /// Same order as `metrics`; present when assignments were recorded.
    pub assignments: Option<Vec<CellAssignments>>,
}

struct CellOut {
    metrics: DayMetrics,
    winners: Option<Vec<Option<AgentId>>>,
}

fn replay_cell(
    state: &mut SimState,
    partition: &DayPartition,
    day: usize,
    cond: &Condition,
    opts: &SweepOptions,
) -> CellOut {
    let (date, demands) = &partition.days[day];
    let mut rng = StreamRng::for_cell(opts.master_seed, *date, cond.fleet_per_tract, cond.range_m(), cond.scenario);
    let log = state.replay(demands, cond.scenario, opts.home_fallback, &mut rng, |_, _| {});
    let metrics = DayMetrics::from_parts(*date, cond, state.agents(), &log);
    CellOut { metrics, winners: opts.record_assignments.then_some(log) }
}

/// Run every (day, condition) cell.
///
/// With daily reset each cell is an independent job; otherwise each
/// condition replays its days in order on a carried-over fleet. Either way
/// the output is identical for any `jobs` value.
pub fn run_sweep(partition: &DayPartition, conditions: &[Condition], opts: &SweepOptions) -> Result<SweepOutput, SimError> {
    if conditions.is_empty() {
        return Err(SimError::NoConditions);
    }
    validate_tracts(&partition.tracts)?;
    for c in conditions {
        c.validate()?;
        let agents = c.fleet_per_tract as u64 * partition.tracts.len() as u64;
        if agents > u32::MAX as u64 {
            return Err(SimError::FleetTooLarge { fleet: c.fleet_per_tract, tracts: partition.tracts.len() });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| SimError::ThreadPool(e.to_string()))?;
    let n_tracts = partition.tracts.len();
    let n_cond = conditions.len();
    let n_days = partition.n_days();

    let cells: Vec<CellOut> = pool.install(|| {
        if opts.daily_reset {
            (0..n_days * n_cond)
                .into_par_iter()
                .map(|cell| {
                    let (day, ci) = (cell / n_cond, cell % n_cond);
                    let cond = &conditions[ci];
                    let mut state = SimState::new(n_tracts, cond.fleet_per_tract, cond.range_m());
                    replay_cell(&mut state, partition, day, cond, opts)
                })
                .collect()
        } else {
            let per_cond: Vec<Vec<CellOut>> = conditions
                .par_iter()
                .map(|cond| {
                    let mut state = SimState::new(n_tracts, cond.fleet_per_tract, cond.range_m());
                    (0..n_days)
                        .map(|day| {
                            state.begin_carried_day();
                            replay_cell(&mut state, partition, day, cond, opts)
                        })
                        .collect()
                })
                .collect();
            // Transpose to (day, condition) order.
            let mut iters: Vec<_> = per_cond.into_iter().map(Vec::into_iter).collect();
            (0..n_days)
                .flat_map(|_| iters.iter_mut().map(|it| it.next().expect("one cell per day")).collect::<Vec<_>>())
                .collect()
        }
    });

    let mut metrics = Vec::with_capacity(cells.len());
    let mut assignments = opts.record_assignments.then(|| Vec::with_capacity(cells.len()));
    for (cell, out) in cells.into_iter().enumerate() {
        metrics.push(out.metrics);
        if let (Some(all), Some(winners)) = (assignments.as_mut(), out.winners) {
            all.push(CellAssignments { day: cell / n_cond, condition: cell % n_cond, winners });
        }
    }
    Ok(SweepOutput { metrics, assignments })
}

/// CSV: `date,trip_id,scenario,fleet,range_km,scooter_id` with `DROPPED` for
/// unserved demand.
pub fn write_assignment_log<W: Write>(
    out: W,
    partition: &DayPartition,
    conditions: &[Condition],
    cells: &[CellAssignments],
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "trip_id", "scenario", "fleet", "range_km", "scooter_id"])?;
    for cell in cells {
        let (date, demands) = &partition.days[cell.day];
        let cond = &conditions[cell.condition];
        let date = date.to_string();
        let fleet = cond.fleet_per_tract.to_string();
        let range = cond.range_km.to_string();
        for (d, winner) in demands.iter().zip(&cell.winners) {
            let who = winner.map_or_else(|| "DROPPED".to_owned(), |id| id.to_string());
            w.write_record([date.as_str(), &d.trip_id, cond.scenario.as_str(), &fleet, &range, &who])?;
        }
    }
    w.flush()?;
    Ok(())
}
