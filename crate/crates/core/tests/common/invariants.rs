//! Randomized replay cases and the simulator invariants checked on them.
#![allow(dead_code)]

use scootsim::sim::{
    eligible_agents, select_winner, AgentId, DemandEvent, HomeMatchFallback, Scenario, Selection, SimState,
    StreamRng,
};

#[derive(Debug, Clone)]
pub struct Case {
    pub n_tracts: usize,
    pub homes: Vec<u32>,
    pub range_m: u64,
    /// (start, duration, distance, origin, dest)
    pub trips: Vec<(i64, u64, u64, u32, u32)>,
    pub scenario: Scenario,
    pub drop_unmatched: bool,
    pub seed: u64,
}

impl Case {
    /// Small random case: up to 4 tracts, 8 scooters and 40 trips.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = StreamRng::from_seed(seed);
        let mut below = |n: u64| rng.uniform_index(n as usize) as u64;
        let n_tracts = 1 + below(4) as usize;
        let homes = (0..1 + below(8)).map(|_| below(n_tracts as u64) as u32).collect();
        let range_m = 500 + below(4_500);
        let trips = (0..below(41))
            .map(|_| {
                (
                    below(7_200) as i64,
                    1 + below(900),
                    1 + below(3_000),
                    below(n_tracts as u64) as u32,
                    below(n_tracts as u64) as u32,
                )
            })
            .collect();
        let scenario = Scenario::ALL[below(4) as usize];
        let drop_unmatched = below(4) == 0;
        Case { n_tracts, homes, range_m, trips, scenario, drop_unmatched, seed: below(u64::MAX) }
    }

    pub fn demands(&self) -> Vec<DemandEvent> {
        let mut d: Vec<DemandEvent> = self
            .trips
            .iter()
            .enumerate()
            .map(|(i, &(start_s, duration_s, distance_m, origin, dest))| DemandEvent {
                trip_id: format!("t{i:03}").into(),
                start_s,
                duration_s,
                distance_m,
                origin,
                dest,
            })
            .collect();
        d.sort_by(|a, b| a.replay_key().cmp(&b.replay_key()));
        d
    }

    fn fallback(&self) -> HomeMatchFallback {
        if self.drop_unmatched {
            HomeMatchFallback::Drop
        } else {
            HomeMatchFallback::AllInterested
        }
    }

    fn replay(&self, demands: &[DemandEvent], mut check: impl FnMut(&SimState, &DemandEvent, &[AgentId], Selection)) -> (SimState, Vec<Option<AgentId>>) {
        let mut state = SimState::from_homes(self.n_tracts, &self.homes, self.range_m);
        let mut rng = StreamRng::from_seed(self.seed);
        let log = state.replay(demands, self.scenario, self.fallback(), &mut rng, |s, d| {
            check(s, d.demand, d.eois, d.selection)
        });
        (state, log)
    }
}

/// Check every documented invariant on one case.
pub fn check_case(case: &Case) -> Result<(), String> {
    let demands = case.demands();
    let mut errors: Vec<String> = Vec::new();
    let scen = case.scenario;
    let (state, log) = case.replay(&demands, |state, demand, eois, selection| {
        let mut fail = |m: String| errors.push(format!("{}: {m}", demand.trip_id));
        // The interest set is exactly the idle, charged agents at the origin.
        let brute: Vec<AgentId> = state
            .agents()
            .iter()
            .filter(|a| {
                a.current == demand.origin
                    && a.busy_until.is_none_or(|b| b <= demand.start_s)
                    && a.remaining_range_m >= demand.distance_m
            })
            .map(|a| a.id)
            .collect();
        if brute != eois || eligible_agents(state, demand) != eois {
            fail(format!("interest set {eois:?}, expected {brute:?}"));
        }
        let matched: Vec<AgentId> = eois.iter().copied().filter(|&i| state.agent(i).home == demand.dest).collect();
        let unmatched_drop = case.drop_unmatched && matches!(scen, Scenario::S3 | Scenario::S4) && matched.is_empty();
        // Drop soundness.
        let should_drop = eois.is_empty() || unmatched_drop;
        if should_drop != (selection == Selection::Dropped) {
            fail(format!("selection {selection:?} with interest set {eois:?}"));
        }
        if let Selection::Winner(w) = selection {
            if !eois.contains(&w) {
                fail(format!("winner {w} did not express interest"));
            }
            // Rule soundness.
            let prefers_home = matches!(scen, Scenario::S3 | Scenario::S4);
            if prefers_home && !matched.is_empty() && state.agent(w).home != demand.dest {
                fail(format!("winner {w} not homed at destination"));
            }
            if matches!(scen, Scenario::S2 | Scenario::S4) {
                let pool = if prefers_home && !matched.is_empty() { &matched[..] } else { eois };
                let best = pool.iter().map(|&i| state.agent(i).remaining_range_m).max().unwrap();
                let first = pool.iter().copied().find(|&i| state.agent(i).remaining_range_m == best).unwrap();
                if w != first {
                    fail(format!("winner {w}, expected max-charge {first}"));
                }
            }
        }
        // Singleton invariance.
        if eois.len() == 1 {
            for s in Scenario::ALL {
                let mut rng = StreamRng::from_seed(0);
                let pick = select_winner(state, eois, demand, s, HomeMatchFallback::AllInterested, &mut rng);
                if pick != Selection::Winner(eois[0]) {
                    fail(format!("singleton {eois:?} gave {pick:?} under {s}"));
                }
            }
        }
    });
    if let Some(e) = errors.first() {
        return Err(e.clone());
    }

    // Conservation.
    let agents = state.agents();
    if agents.len() != case.homes.len() || agents.iter().enumerate().any(|(i, a)| a.id as usize != i) {
        return Err("agent set changed".into());
    }
    if log.len() != demands.len() {
        return Err("log length differs from demand count".into());
    }
    for (i, a) in agents.iter().enumerate() {
        let mine: Vec<&DemandEvent> =
            demands.iter().zip(&log).filter(|(_, w)| **w == Some(i as AgentId)).map(|(d, _)| d).collect();
        // Continuity.
        let mut at = case.homes[i];
        for d in &mine {
            if d.origin != at {
                return Err(format!("agent {i} teleported from {at} to {}", d.origin));
            }
            at = d.dest;
        }
        if a.current != at || a.home != case.homes[i] {
            return Err(format!("agent {i} ends at {}, expected {at}", a.current));
        }
        // Battery monotonicity: the only drains are served trips.
        let used: u64 = mine.iter().map(|d| d.distance_m).sum();
        if used > case.range_m || a.remaining_range_m != case.range_m - used {
            return Err(format!("agent {i} battery {} after using {used}", a.remaining_range_m));
        }
        // No temporal overlap.
        for w in mine.windows(2) {
            if w[0].start_s + w[0].duration_s as i64 > w[1].start_s {
                return Err(format!("agent {i} trips {} and {} overlap", w[0].trip_id, w[1].trip_id));
            }
        }
        if a.served_count as usize != mine.len() {
            return Err(format!("agent {i} served_count {} vs {}", a.served_count, mine.len()));
        }
    }

    // Seed determinism.
    let (_, again) = case.replay(&demands, |_, _, _, _| {});
    if again != log {
        return Err("same seed produced a different log".into());
    }
    Ok(())
}
