//! Hand-sized replay instances and a brute-force reference matcher.
//!
//! The reference keeps its own flat state (no occupancy index), walks demands
//! in (start, id) order and, whenever a rule chooses at random, branches over
//! every candidate. `enumerate` returns each reachable outcome with its
//! probability; `follow` walks the single branch picked by a uniform draw
//! implemented here from raw 64-bit words.
#![allow(dead_code, clippy::too_many_arguments)]

use scootsim::metrics::DayMetrics;
use scootsim::sim::{Condition, DemandEvent, HomeMatchFallback, Scenario, SimState, StreamRng};

#[derive(Debug, Clone, Copy)]
pub struct Trip {
    pub id: &'static str,
    pub start: i64,
    pub dur: u64,
    pub dist: u64,
    pub o: u32,
    pub d: u32,
}

#[derive(Debug, Clone)]
pub struct Micro {
    pub name: &'static str,
    pub n_tracts: usize,
    pub homes: Vec<u32>,
    pub range_m: u64,
    pub trips: Vec<Trip>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// (trip id, winner) in replay order.
    pub log: Vec<(&'static str, Option<u32>)>,
    pub hi: Option<f64>,
    pub psd: Option<f64>,
}

const fn t(id: &'static str, start: i64, dur: u64, dist: u64, o: u32, d: u32) -> Trip {
    Trip { id, start, dur, dist, o, d }
}

pub fn instances() -> Vec<Micro> {
    vec![
        Micro {
            name: "lone scooter out and back",
            n_tracts: 2,
            homes: vec![0],
            range_m: 35_000,
            trips: vec![t("1", 0, 600, 1200, 0, 1), t("2", 1_000, 600, 1300, 1, 0)],
        },
        Micro {
            name: "shared origin with home match",
            n_tracts: 2,
            homes: vec![0, 0, 1],
            range_m: 10_000,
            trips: vec![
                t("a", 0, 300, 900, 0, 1),
                t("b", 100, 300, 400, 0, 0),
                t("c", 500, 200, 700, 1, 0),
                t("d", 900, 300, 800, 1, 1),
                t("e", 1_500, 100, 500, 0, 1),
            ],
        },
        Micro {
            name: "battery-limited charge choice",
            n_tracts: 1,
            homes: vec![0, 0],
            range_m: 2_000,
            trips: vec![
                t("p", 0, 60, 1_500, 0, 0),
                t("q", 100, 60, 900, 0, 0),
                t("r", 200, 60, 600, 0, 0),
                t("s", 300, 60, 1_200, 0, 0),
            ],
        },
        Micro {
            name: "overlap and equal start times",
            n_tracts: 2,
            homes: vec![0, 1],
            range_m: 20_000,
            trips: vec![
                t("y", 0, 1_000, 1_000, 0, 1),
                t("x", 0, 1_000, 1_000, 0, 1),
                t("z", 500, 100, 100, 1, 0),
                t("w", 999, 10, 10, 1, 1),
                t("v", 1_000, 50, 50, 1, 0),
            ],
        },
        Micro {
            name: "three tracts, three homes",
            n_tracts: 3,
            homes: vec![0, 1, 2],
            range_m: 5_000,
            trips: vec![
                t("01", 0, 100, 1_000, 0, 1),
                t("02", 50, 100, 1_000, 1, 2),
                t("03", 200, 100, 1_500, 1, 0),
                t("04", 300, 100, 2_000, 2, 0),
                t("05", 400, 100, 2_500, 0, 2),
                t("06", 600, 100, 900, 0, 1),
            ],
        },
        Micro {
            name: "demand away from the fleet",
            n_tracts: 2,
            homes: vec![0, 0],
            range_m: 35_000,
            trips: vec![t("m", 0, 60, 500, 1, 0), t("n", 200, 60, 500, 1, 1), t("o", 400, 60, 500, 1, 0)],
        },
        Micro {
            name: "exact range boundary",
            n_tracts: 2,
            homes: vec![1, 0, 0],
            range_m: 3_000,
            trips: vec![
                t("k1", 0, 10, 3_000, 0, 1),
                t("k2", 20, 10, 3_001, 0, 0),
                t("k3", 40, 10, 2_000, 0, 1),
                t("k4", 60, 10, 1_000, 1, 0),
                t("k5", 80, 10, 1_000, 1, 1),
                t("k6", 100, 10, 1, 0, 0),
            ],
        },
    ]
}

#[derive(Clone)]
struct Fleet {
    pos: Vec<u32>,
    free_at: Vec<i64>,
    range: Vec<u64>,
    served: Vec<u32>,
}

enum Pick {
    Drop,
    Fixed(usize),
    Uniform(Vec<usize>),
}

fn ordered(m: &Micro) -> Vec<Trip> {
    let mut trips = m.trips.clone();
    trips.sort_by(|a, b| (a.start, a.id).cmp(&(b.start, b.id)));
    trips
}

fn decide(m: &Micro, f: &Fleet, trip: &Trip, s: Scenario, drop_unmatched: bool) -> Pick {
    let interested: Vec<usize> = (0..m.homes.len())
        .filter(|&i| f.pos[i] == trip.o && f.free_at[i] <= trip.start && f.range[i] >= trip.dist)
        .collect();
    if interested.is_empty() {
        return Pick::Drop;
    }
    let wants_home = matches!(s, Scenario::S3 | Scenario::S4);
    let wants_charge = matches!(s, Scenario::S2 | Scenario::S4);
    let mut pool = interested.clone();
    if wants_home {
        let matched: Vec<usize> = interested.iter().copied().filter(|&i| m.homes[i] == trip.d).collect();
        if !matched.is_empty() {
            pool = matched;
        } else if drop_unmatched {
            return Pick::Drop;
        }
    }
    if wants_charge {
        let best = pool.iter().map(|&i| f.range[i]).max().unwrap();
        Pick::Fixed(*pool.iter().find(|&&i| f.range[i] == best).unwrap())
    } else if pool.len() == 1 {
        Pick::Fixed(pool[0])
    } else {
        Pick::Uniform(pool)
    }
}

fn apply(f: &mut Fleet, i: usize, trip: &Trip) {
    f.pos[i] = trip.d;
    f.free_at[i] = trip.start + trip.dur as i64;
    f.range[i] -= trip.dist;
    f.served[i] += 1;
}

fn finish(m: &Micro, f: &Fleet, log: Vec<(&'static str, Option<u32>)>) -> Outcome {
    let active: Vec<usize> = (0..m.homes.len()).filter(|&i| f.served[i] > 0).collect();
    let home = active.iter().filter(|&&i| f.pos[i] == m.homes[i]).count();
    let served = log.iter().filter(|(_, w)| w.is_some()).count();
    Outcome {
        hi: (!active.is_empty()).then(|| home as f64 / active.len() as f64),
        psd: (!log.is_empty()).then(|| served as f64 / log.len() as f64),
        log,
    }
}

fn fresh(m: &Micro) -> Fleet {
    let n = m.homes.len();
    Fleet { pos: m.homes.clone(), free_at: vec![i64::MIN; n], range: vec![m.range_m; n], served: vec![0; n] }
}

/// Every reachable outcome with its probability; equal outcomes reached by
/// different branches are merged.
pub fn enumerate(m: &Micro, s: Scenario, drop_unmatched: bool) -> Vec<(Outcome, f64)> {
    fn go(
        m: &Micro,
        s: Scenario,
        drop_unmatched: bool,
        trips: &[Trip],
        f: Fleet,
        log: Vec<(&'static str, Option<u32>)>,
        p: f64,
        out: &mut Vec<(Outcome, f64)>,
    ) {
        let Some((trip, rest)) = trips.split_first() else {
            let o = finish(m, &f, log);
            match out.iter_mut().find(|(x, _)| *x == o) {
                Some(slot) => slot.1 += p,
                None => out.push((o, p)),
            }
            return;
        };
        let mut branch = |i: Option<usize>, q: f64| {
            let mut f = f.clone();
            let mut log = log.clone();
            if let Some(i) = i {
                apply(&mut f, i, trip);
            }
            log.push((trip.id, i.map(|i| i as u32)));
            go(m, s, drop_unmatched, rest, f, log, p * q, out);
        };
        match decide(m, &f, trip, s, drop_unmatched) {
            Pick::Drop => branch(None, 1.0),
            Pick::Fixed(i) => branch(Some(i), 1.0),
            Pick::Uniform(pool) => {
                let q = 1.0 / pool.len() as f64;
                for i in pool {
                    branch(Some(i), q);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(m, s, drop_unmatched, &ordered(m), fresh(m), Vec::new(), 1.0, &mut out);
    out
}

/// Unbiased draw in `0..k` by rejecting words at or above the largest
/// multiple of `k` below 2^64.
fn draw(rng: &mut StreamRng, k: usize) -> usize {
    let k = k as u128;
    let limit = ((1u128 << 64) / k) * k;
    loop {
        let x = rng.next_u64() as u128;
        if x < limit {
            return (x % k) as usize;
        }
    }
}

/// The branch selected by `rng`, consuming one draw per random choice
/// between two or more candidates.
pub fn follow(m: &Micro, s: Scenario, drop_unmatched: bool, rng: &mut StreamRng) -> Outcome {
    let mut f = fresh(m);
    let mut log = Vec::new();
    for trip in ordered(m) {
        let winner = match decide(m, &f, &trip, s, drop_unmatched) {
            Pick::Drop => None,
            Pick::Fixed(i) => Some(i),
            Pick::Uniform(pool) => Some(pool[draw(rng, pool.len())]),
        };
        if let Some(i) = winner {
            apply(&mut f, i, &trip);
        }
        log.push((trip.id, winner.map(|i| i as u32)));
    }
    finish(m, &f, log)
}

/// Run the library simulator on the instance.
pub fn simulate(m: &Micro, s: Scenario, drop_unmatched: bool, rng: &mut StreamRng) -> Outcome {
    let mut demands: Vec<DemandEvent> = m
        .trips
        .iter()
        .map(|t| DemandEvent {
            trip_id: t.id.into(),
            start_s: t.start,
            duration_s: t.dur,
            distance_m: t.dist,
            origin: t.o,
            dest: t.d,
        })
        .collect();
    demands.sort_by(|a, b| a.replay_key().cmp(&b.replay_key()));
    let mut state = SimState::from_homes(m.n_tracts, &m.homes, m.range_m);
    let fallback = if drop_unmatched { HomeMatchFallback::Drop } else { HomeMatchFallback::AllInterested };
    let winners = state.replay(&demands, s, fallback, rng, |_, _| {});
    let cond = Condition { fleet_per_tract: 1, range_km: m.range_m as f64 / 1000.0, scenario: s };
    let date = chrono::NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
    let dm = DayMetrics::from_parts(date, &cond, state.agents(), &winners);
    let ids: Vec<&'static str> = demands
        .iter()
        .map(|d| m.trips.iter().find(|t| *t.id == *d.trip_id).unwrap().id)
        .collect();
    Outcome { log: ids.into_iter().zip(winners).collect(), hi: dm.hi, psd: dm.psd }
}

/// Check one instance under one scenario across `seeds`. Returns the number
/// of distinct outcomes the reference can reach.
pub fn check(m: &Micro, s: Scenario, drop_unmatched: bool, seeds: std::ops::Range<u64>) -> Result<usize, String> {
    let all = enumerate(m, s, drop_unmatched);
    let total: f64 = all.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(format!("{}: branch probabilities sum to {total}", m.name));
    }
    let mut seen = vec![false; all.len()];
    for seed in seeds {
        let got = simulate(m, s, drop_unmatched, &mut StreamRng::from_seed(seed));
        let want = follow(m, s, drop_unmatched, &mut StreamRng::from_seed(seed));
        if got != want {
            return Err(format!("{} {s} seed {seed}: simulator {got:?} vs reference {want:?}", m.name));
        }
        match all.iter().position(|(o, _)| *o == got) {
            Some(i) => seen[i] = true,
            None => return Err(format!("{} {s} seed {seed}: outcome {got:?} is unreachable", m.name)),
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(format!("{} {s}: outcome {:?} (p = {}) never produced", m.name, all[i].0, all[i].1));
    }
    Ok(all.len())
}
