use super::{AgentId, DemandEvent, HomeMatchFallback, Scenario, SimState, StreamRng};

/// Outcome of one central-agent decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Winner(AgentId),
    Dropped,
}

impl Selection {
    pub fn winner(self) -> Option<AgentId> {
        match self {
            Selection::Winner(id) => Some(id),
            Selection::Dropped => None,
        }
    }
}

/// Pick the winner among `eois` (ids in ascending order).
///
/// Random rules draw from `rng` only when the candidate subset has two or
/// more members. Charge ties go to the lowest id.
pub fn select_winner(
    state: &SimState,
    eois: &[AgentId],
    demand: &DemandEvent,
    scenario: Scenario,
    fallback: HomeMatchFallback,
    rng: &mut StreamRng,
) -> Selection {
    if eois.is_empty() {
        return Selection::Dropped;
    }
    let agent = |id: AgentId| state.agent(id);
    let homed = |id: &AgentId| agent(*id).home == demand.dest;

    let home_subset = scenario.prefers_home() && eois.iter().any(homed);
    if scenario.prefers_home() && !home_subset && fallback == HomeMatchFallback::Drop {
        return Selection::Dropped;
    }
    let in_subset = |id: &AgentId| !home_subset || homed(id);

    let chosen = if scenario.prefers_charge() {
        let mut best: Option<AgentId> = None;
        for id in eois.iter().copied().filter(in_subset) {
            if best.is_none_or(|b| agent(id).remaining_range_m > agent(b).remaining_range_m) {
                best = Some(id);
            }
        }
        best
    } else {
        let k = eois.iter().filter(|id| in_subset(id)).count();
        let pick = rng.uniform_index(k);
        eois.iter().copied().filter(in_subset).nth(pick)
    };
    Selection::Winner(chosen.expect("candidate subset is non-empty"))
}
