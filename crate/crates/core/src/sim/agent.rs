use super::{DemandEvent, SimConfig};

pub type AgentId = u32;
/// Position of a tract within the configured tract set.
pub type TractIndex = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScooterAgent {
    pub id: AgentId,
    pub home: TractIndex,
    pub current: TractIndex,
    /// End of the trip in progress, seconds since the epoch. Cleared lazily:
    /// a value at or before the current demand time means idle.
    pub busy_until: Option<i64>,
    pub remaining_range_m: u64,
    pub served_count: u32,
}

impl ScooterAgent {
    pub fn is_idle_at(&self, t: i64) -> bool {
        self.busy_until.is_none_or(|b| b <= t)
    }

    pub fn at_home(&self) -> bool {
        self.current == self.home
    }
}

/// Fleet state for one replay. `occupancy[t]` lists the agents currently in
/// tract `t`, sorted by id, so eligibility only scans the origin tract.
#[derive(Debug, Clone)]
pub struct SimState {
    pub(crate) agents: Vec<ScooterAgent>,
    occupancy: Vec<Vec<AgentId>>,
    max_range_m: u64,
}

/// Place `fleet_per_tract` fully charged agents in each tract of the set.
/// Agent ids are dense and grouped by tract in tract-set order.
///
/// `config` must already have passed [`SimConfig::validate`].
pub fn initialize_day(config: &SimConfig) -> SimState {
    SimState::new(config.tract_set.len(), config.fleet_per_tract, config.max_range_m)
}

impl SimState {
    pub fn new(n_tracts: usize, fleet_per_tract: u32, max_range_m: u64) -> Self {
        let mut agents = Vec::with_capacity(n_tracts * fleet_per_tract as usize);
        let mut occupancy = Vec::with_capacity(n_tracts);
        for tract in 0..n_tracts as TractIndex {
            let mut here = Vec::with_capacity(2 * fleet_per_tract as usize);
            for _ in 0..fleet_per_tract {
                let id = agents.len() as AgentId;
                agents.push(ScooterAgent {
                    id,
                    home: tract,
                    current: tract,
                    busy_until: None,
                    remaining_range_m: max_range_m,
                    served_count: 0,
                });
                here.push(id);
            }
            occupancy.push(here);
        }
        Self { agents, occupancy, max_range_m }
    }

    /// Arbitrary fleet layout: one fully charged agent per entry of `homes`,
    /// with ids in slice order.
    pub fn from_homes(n_tracts: usize, homes: &[TractIndex], max_range_m: u64) -> Self {
        let mut occupancy = vec![Vec::new(); n_tracts];
        let agents = homes
            .iter()
            .enumerate()
            .map(|(i, &home)| {
                let id = i as AgentId;
                occupancy[home as usize].push(id);
                ScooterAgent {
                    id,
                    home,
                    current: home,
                    busy_until: None,
                    remaining_range_m: max_range_m,
                    served_count: 0,
                }
            })
            .collect();
        Self { agents, occupancy, max_range_m }
    }

    pub fn agents(&self) -> &[ScooterAgent] {
        &self.agents
    }

    pub fn agent(&self, id: AgentId) -> &ScooterAgent {
        &self.agents[id as usize]
    }

    pub fn max_range_m(&self) -> u64 {
        self.max_range_m
    }

    pub fn n_tracts(&self) -> usize {
        self.occupancy.len()
    }

    /// Agents currently in `tract`, by id.
    pub fn occupants(&self, tract: TractIndex) -> &[AgentId] {
        &self.occupancy[tract as usize]
    }

    /// Interested agents for `demand`, appended to `out` in id order.
    pub fn eligible_into(&self, demand: &DemandEvent, out: &mut Vec<AgentId>) {
        out.clear();
        out.extend(self.occupancy[demand.origin as usize].iter().copied().filter(|&id| {
            let a = &self.agents[id as usize];
            a.is_idle_at(demand.start_s) && a.remaining_range_m >= demand.distance_m
        }));
    }

    /// Move the winner along the trip.
    ///
    /// Panics if the agent cannot legally serve the demand; the caller only
    /// passes winners taken from the eligible set.
    pub fn execute_trip(&mut self, id: AgentId, demand: &DemandEvent) {
        let a = &mut self.agents[id as usize];
        assert_eq!(a.current, demand.origin, "agent {id} is not at the trip origin");
        assert!(a.is_idle_at(demand.start_s), "agent {id} is mid-trip");
        assert!(
            a.remaining_range_m >= demand.distance_m,
            "agent {id} has {} m left for a {} m trip",
            a.remaining_range_m,
            demand.distance_m
        );
        a.remaining_range_m -= demand.distance_m;
        a.busy_until = Some(demand.start_s.saturating_add(demand.duration_s as i64));
        a.served_count += 1;
        if demand.origin != demand.dest {
            a.current = demand.dest;
            let from = &mut self.occupancy[demand.origin as usize];
            let pos = from.binary_search(&id).expect("occupancy tracks agent position");
            from.remove(pos);
            let to = &mut self.occupancy[demand.dest as usize];
            let pos = to.binary_search(&id).unwrap_err();
            to.insert(pos, id);
        }
    }

    /// Start-of-day bookkeeping when the fleet is *not* reset: positions,
    /// batteries and in-progress trips carry over, per-day counters do not.
    pub fn begin_carried_day(&mut self) {
        for a in &mut self.agents {
            a.served_count = 0;
        }
    }
}

/// Ids of the agents that would express interest in `demand`.
pub fn eligible_agents(state: &SimState, demand: &DemandEvent) -> Vec<AgentId> {
    let mut out = Vec::new();
    state.eligible_into(demand, &mut out);
    out
}
