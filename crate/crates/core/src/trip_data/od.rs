use std::collections::{HashMap, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{TractId, TripRecord};

#[derive(Debug, Error)]
pub enum OdError {
    #[error("target coverage must be in (0, 1], got {0}")]
    InvalidTarget(f64),
    #[error("origin-destination matrix has no trips")]
    Empty,
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Square trip-count matrix; `counts[i][j]` is trips from `tracts[i]` to
/// `tracts[j]`. Tracts are sorted lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdMatrix {
    pub tracts: Vec<TractId>,
    pub counts: Vec<Vec<u64>>,
}

/// Incremental O-D tally. Tract ids are interned so each row costs two hash
/// lookups and no allocation after warm-up.
#[derive(Debug, Default)]
pub struct OdBuilder {
    index: HashMap<String, usize>,
    names: Vec<TractId>,
    cells: HashMap<(usize, usize), u64>,
}

impl OdBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, t: &TractId) -> usize {
        if let Some(&i) = self.index.get(t.as_str()) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(t.as_str().to_owned(), i);
        self.names.push(t.clone());
        i
    }

    pub fn add(&mut self, origin: &TractId, dest: &TractId) {
        let o = self.intern(origin);
        let d = self.intern(dest);
        *self.cells.entry((o, d)).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: OdBuilder) {
        for ((o, d), n) in other.cells {
            let o = self.intern(&other.names[o]);
            let d = self.intern(&other.names[d]);
            *self.cells.entry((o, d)).or_insert(0) += n;
        }
    }

    pub fn finish(self) -> OdMatrix {
        let mut order: Vec<usize> = (0..self.names.len()).collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        let mut rank = vec![0usize; order.len()];
        for (pos, &old) in order.iter().enumerate() {
            rank[old] = pos;
        }
        let n = order.len();
        let mut counts = vec![vec![0u64; n]; n];
        for ((o, d), c) in self.cells {
            counts[rank[o]][rank[d]] += c;
        }
        let tracts = order.into_iter().map(|i| self.names[i].clone()).collect();
        OdMatrix { tracts, counts }
    }
}

pub fn build_od_matrix<'a, I>(trips: I) -> OdMatrix
where
    I: IntoIterator<Item = &'a TripRecord>,
{
    let mut b = OdBuilder::new();
    for t in trips {
        b.add(&t.origin_tract, &t.dest_tract);
    }
    b.finish()
}

impl OdMatrix {
    pub fn len(&self) -> usize {
        self.tracts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.len()];
        for row in &self.counts {
            for (acc, c) in out.iter_mut().zip(row) {
                *acc += c;
            }
        }
        out
    }

    pub fn index_of(&self, t: &TractId) -> Option<usize> {
        self.tracts.binary_search(t).ok()
    }

    /// Trips with both endpoints among `members` (matrix indices).
    fn induced_total(&self, members: &[usize]) -> u64 {
        members
            .iter()
            .map(|&i| members.iter().map(|&j| self.counts[i][j]).sum::<u64>())
            .sum()
    }

    /// Structural checks for matrices read from untrusted JSON.
    pub fn validate(&self) -> Result<(), OdError> {
        let n = self.tracts.len();
        if self.counts.len() != n || self.counts.iter().any(|r| r.len() != n) {
            return Err(OdError::Malformed(format!("counts must be {n}x{n}")));
        }
        if self.tracts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(OdError::Malformed("tracts must be strictly increasing".into()));
        }
        if self.tracts.iter().any(|t| t.as_str().trim().is_empty()) {
            return Err(OdError::Malformed("empty tract id".into()));
        }
        let mut total: u64 = 0;
        for c in self.counts.iter().flatten() {
            total = total
                .checked_add(*c)
                .ok_or_else(|| OdError::Malformed("count total overflows".into()))?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, OdError> {
        let m: OdMatrix = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialises")
    }
}

/// A reduced tract set and the share of all trips it captures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractSelection {
    pub tracts: Vec<TractId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_coverage: Option<f64>,
}

impl TractSelection {
    /// Accepts either the object form written by `odmatrix` or a bare array
    /// of tract ids. The list must be non-empty and duplicate-free.
    pub fn from_json(text: &str) -> Result<Self, OdError> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            Full(TractSelection),
            Bare(Vec<TractId>),
        }
        let sel = match serde_json::from_str::<Form>(text)? {
            Form::Full(s) => s,
            Form::Bare(tracts) => TractSelection { tracts, coverage: None, target_coverage: None },
        };
        if sel.tracts.is_empty() {
            return Err(OdError::Malformed("tract set is empty".into()));
        }
        let mut seen = HashSet::new();
        for t in &sel.tracts {
            if t.as_str().trim().is_empty() {
                return Err(OdError::Malformed("empty tract id".into()));
            }
            if !seen.insert(t.as_str()) {
                return Err(OdError::Malformed(format!("duplicate tract {t}")));
            }
        }
        Ok(sel)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("selection serialises")
    }
}

/// Choose the tracts for the reduced O-D matrix.
///
/// With `explicit` set, that list is returned as-is together with its
/// coverage. Otherwise tracts are ranked by incident trips (row sum plus
/// column sum, ties by id) and the shortest ranked prefix whose induced
/// submatrix reaches `target` is returned. Tracts with no incident trips are
/// never selected.
pub fn select_top_tracts(
    od: &OdMatrix,
    target: f64,
    explicit: Option<&[TractId]>,
) -> Result<TractSelection, OdError> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(OdError::InvalidTarget(target));
    }
    let total = od.total();
    if total == 0 {
        return Err(OdError::Empty);
    }
    let share = |covered: u64| covered as f64 / total as f64;

    if let Some(list) = explicit {
        let mut members: Vec<usize> = list.iter().filter_map(|t| od.index_of(t)).collect();
        members.sort_unstable();
        members.dedup();
        return Ok(TractSelection {
            tracts: list.to_vec(),
            coverage: Some(share(od.induced_total(&members))),
            target_coverage: Some(target),
        });
    }

    let rows = od.row_sums();
    let cols = od.col_sums();
    let mut ranked: Vec<(u64, usize)> = (0..od.len())
        .map(|i| (rows[i] + cols[i], i))
        .filter(|&(w, _)| w > 0)
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    // Adding tract k contributes its self-loop plus both directions to every
    // earlier member.
    let mut covered = 0u64;
    let mut chosen: Vec<usize> = Vec::new();
    for &(_, k) in &ranked {
        covered += od.counts[k][k];
        for &j in &chosen {
            covered += od.counts[k][j] + od.counts[j][k];
        }
        chosen.push(k);
        if share(covered) >= target {
            break;
        }
    }
    Ok(TractSelection {
        tracts: chosen.iter().map(|&i| od.tracts[i].clone()).collect(),
        coverage: Some(share(covered)),
        target_coverage: Some(target),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Origin,
    Destination,
}

/// Cumulative share of trips captured by the top-k origins (or destinations).
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    pub axis: Axis,
    pub points: Vec<(usize, f64)>,
}

impl CoverageCurve {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), OdError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "cumulative_share"]).map_err(csv_err)?;
        for (k, share) in &self.points {
            w.write_record([k.to_string(), share.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> OdError {
    OdError::Io(std::io::Error::other(e))
}

pub fn coverage_curve(od: &OdMatrix, axis: Axis) -> Result<CoverageCurve, OdError> {
    let total = od.total();
    if od.is_empty() || total == 0 {
        return Err(OdError::Empty);
    }
    let mut marg = match axis {
        Axis::Origin => od.row_sums(),
        Axis::Destination => od.col_sums(),
    };
    marg.sort_unstable_by(|a, b| b.cmp(a));
    let mut acc = 0u64;
    let points = marg
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            acc += m;
            (i + 1, acc as f64 / total as f64)
        })
        .collect();
    Ok(CoverageCurve { axis, points })
}
