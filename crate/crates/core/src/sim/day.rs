use chrono::NaiveDate;

use super::{
    initialize_day, select_winner, AgentId, HomeMatchFallback, Scenario, ScooterAgent, Selection,
    SimConfig, SimState, StreamRng, TractIndex,
};

/// A trip restricted to the simulated tract set, with endpoints stored as
/// positions in that set and the start time as seconds since the epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandEvent {
    pub trip_id: Box<str>,
    pub start_s: i64,
    pub duration_s: u64,
    pub distance_m: u64,
    pub origin: TractIndex,
    pub dest: TractIndex,
}

impl DemandEvent {
    /// Replay order: start time, then trip id.
    pub fn replay_key(&self) -> (i64, &str) {
        (self.start_s, &self.trip_id)
    }
}

/// One decision as seen by a trace observer, before the winner moves.
#[derive(Debug, Clone, Copy)]
pub struct Decision<'a> {
    pub index: usize,
    pub demand: &'a DemandEvent,
    pub eois: &'a [AgentId],
    pub selection: Selection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayResult {
    pub date: NaiveDate,
    pub trips_total: u64,
    pub trips_satisfied: u64,
    /// Agent states at the end of the day.
    pub agents: Vec<ScooterAgent>,
    /// Winner per demand, aligned with the replayed demand slice.
    pub assignments: Vec<Option<AgentId>>,
}

impl SimState {
    /// Replay `demands` (sorted by [`DemandEvent::replay_key`]) strictly one at
    /// a time, calling `observe` for each decision.
    pub fn replay<F>(
        &mut self,
        demands: &[DemandEvent],
        scenario: Scenario,
        fallback: HomeMatchFallback,
        rng: &mut StreamRng,
        mut observe: F,
    ) -> Vec<Option<AgentId>>
    where
        F: FnMut(&SimState, Decision<'_>),
    {
        debug_assert!(demands.windows(2).all(|w| w[0].replay_key() <= w[1].replay_key()));
        let mut eois = Vec::new();
        let mut log = Vec::with_capacity(demands.len());
        for (index, demand) in demands.iter().enumerate() {
            self.eligible_into(demand, &mut eois);
            let selection = select_winner(self, &eois, demand, scenario, fallback, rng);
            observe(self, Decision { index, demand, eois: &eois, selection });
            if let Selection::Winner(id) = selection {
                self.execute_trip(id, demand);
            }
            log.push(selection.winner());
        }
        log
    }

    pub fn into_day_result(self, date: NaiveDate, assignments: Vec<Option<AgentId>>) -> DayResult {
        let trips_satisfied = assignments.iter().filter(|a| a.is_some()).count() as u64;
        DayResult {
            date,
            trips_total: assignments.len() as u64,
            trips_satisfied,
            agents: self.agents,
            assignments,
        }
    }
}

/// Simulate one day from a fresh fleet.
pub fn run_day(date: NaiveDate, demands: &[DemandEvent], config: &SimConfig, rng: &mut StreamRng) -> DayResult {
    run_day_traced(date, demands, config, rng, |_, _| {})
}

/// [`run_day`] with a per-decision observer.
pub fn run_day_traced<F>(
    date: NaiveDate,
    demands: &[DemandEvent],
    config: &SimConfig,
    rng: &mut StreamRng,
    observe: F,
) -> DayResult
where
    F: FnMut(&SimState, Decision<'_>),
{
    let mut state = initialize_day(config);
    let log = state.replay(demands, config.scenario, config.home_fallback, rng, observe);
    state.into_day_result(date, log)
}
