use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{fit_scenarios, paired_permutation_test, DesignRow, StatsError};
use crate::metrics::DayMetrics;
use crate::sim::{mix64, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Response {
    Hi,
    Psd,
}

impl Response {
    pub fn as_str(self) -> &'static str {
        match self {
            Response::Hi => "hi",
            Response::Psd => "psd",
        }
    }

    pub fn of(self, m: &DayMetrics) -> Option<f64> {
        match self {
            Response::Hi => m.hi,
            Response::Psd => m.psd,
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Response {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hi" => Ok(Response::Hi),
            "psd" => Ok(Response::Psd),
            _ => Err(format!("unknown response {s:?} (expected hi or psd)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorTriple {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl From<[f64; 3]> for IndicatorTriple {
    fn from(v: [f64; 3]) -> Self {
        Self { x1: v[0], x2: v[1], x3: v[2] }
    }
}

/// Regression summary for one (response, fleet, range) condition. Standard
/// errors and p-values are NaN (JSON `null`) when IRLS did not converge.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub response: Response,
    pub fleet_per_tract: u32,
    pub range_km: f64,
    pub n_days: usize,
    pub n_rows: usize,
    /// Days removed because some scenario had an undefined value.
    pub days_dropped: usize,
    /// Intercept, x1, x2, x3.
    pub beta: [f64; 4],
    pub se_cluster: [f64; 4],
    pub p_values: IndicatorTriple,
    pub dispersion: f64,
    pub deviance: f64,
    pub iterations: usize,
    pub converged: bool,
    pub zero_substitutions: usize,
    pub permutation_p: IndicatorTriple,
    pub permutation_exact: bool,
}

#[derive(Debug, Clone, Default)]
pub struct AnalysisOptions {
    /// Seed for the Monte-Carlo permutation path.
    pub permutation_seed: u64,
}

type CondKey = (u32, u64);
/// Per scenario: absent, present but undefined, or a value.
type DayRow = [Option<Option<f64>>; 4];

fn cond_key(m: &DayMetrics) -> CondKey {
    (m.fleet_per_tract, m.range_km.to_bits())
}

/// Fit one regression per (fleet, range) condition, ordered by fleet then
/// range.
///
/// Days on which any scenario's response is undefined are dropped from all
/// four scenarios. Zero responses become half the smallest positive value in
/// the condition.
pub fn analyze(metrics: &[DayMetrics], response: Response, opts: &AnalysisOptions) -> Result<Vec<FitReport>, StatsError> {
    let mut groups: BTreeMap<CondKey, BTreeMap<NaiveDate, DayRow>> = BTreeMap::new();
    for m in metrics {
        let slot = &mut groups.entry(cond_key(m)).or_default().entry(m.date).or_default()
            [m.scenario.code() as usize - 1];
        if slot.is_some() {
            return Err(StatsError::Data(format!(
                "duplicate row for {} {} fleet {} range {}",
                m.date, m.scenario, m.fleet_per_tract, m.range_km
            )));
        }
        *slot = Some(response.of(m));
    }

    let mut keys: Vec<CondKey> = groups.keys().copied().collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(f64::from_bits(a.1).total_cmp(&f64::from_bits(b.1))));

    let mut reports = Vec::with_capacity(keys.len());
    for key in keys {
        let days = &groups[&key];
        let (fleet, range_km) = (key.0, f64::from_bits(key.1));
        for s in Scenario::ALL {
            if days.values().all(|v| v[s.code() as usize - 1].is_none()) {
                return Err(StatsError::Data(format!(
                    "fleet {fleet} range {range_km}: no rows for scenario {s}"
                )));
            }
        }
        let complete: Vec<(NaiveDate, [f64; 4])> = days
            .iter()
            .filter_map(|(d, v)| {
                let mut out = [0.0; 4];
                for (o, x) in out.iter_mut().zip(v) {
                    *o = (*x)??;
                }
                Some((*d, out))
            })
            .collect();
        let days_dropped = days.len() - complete.len();

        let smallest = complete.iter().flat_map(|(_, v)| v.iter()).copied().filter(|v| *v > 0.0).reduce(f64::min);
        let Some(smallest) = smallest else {
            return Err(StatsError::Data(format!(
                "fleet {fleet} range {range_km}: no positive {response} values"
            )));
        };
        let mut zero_substitutions = 0;
        let complete: Vec<(NaiveDate, [f64; 4])> = complete
            .into_iter()
            .map(|(d, v)| {
                (d, v.map(|y| {
                    if y == 0.0 {
                        zero_substitutions += 1;
                        smallest / 2.0
                    } else {
                        y
                    }
                }))
            })
            .collect();

        let rows: Vec<DesignRow> = complete
            .iter()
            .flat_map(|(d, v)| Scenario::ALL.iter().zip(v).map(|(s, y)| DesignRow::new(*y, *s, *d)))
            .collect();

        let seed = mix64(opts.permutation_seed ^ mix64(fleet as u64 ^ mix64(key.1)));
        let column = |k: usize| complete.iter().map(|(_, v)| v[k]).collect::<Vec<f64>>();
        let base = column(0);
        let mut perm = [f64::NAN; 3];
        let mut exact = true;
        if complete.len() >= 2 {
            for k in 1..4 {
                let r = paired_permutation_test(&column(k), &base, seed ^ k as u64)?;
                perm[k - 1] = r.p_value;
                exact &= r.exact;
            }
        }

        let (glm, se, p) = match fit_scenarios(&rows) {
            Ok(f) => (f.glm, f.se_cluster, f.p_values),
            Err(StatsError::NotConverged { .. }) => {
                let glm = super::fit_gamma_glm(&rows)?;
                (glm, vec![f64::NAN; 4], [f64::NAN; 3])
            }
            Err(e) => {
                return Err(StatsError::Data(format!("fleet {fleet} range {range_km}: {e}")));
            }
        };

        reports.push(FitReport {
            response,
            fleet_per_tract: fleet,
            range_km,
            n_days: complete.len(),
            n_rows: rows.len(),
            days_dropped,
            beta: [glm.beta[0], glm.beta[1], glm.beta[2], glm.beta[3]],
            se_cluster: [se[0], se[1], se[2], se[3]],
            p_values: p.into(),
            dispersion: glm.dispersion,
            deviance: glm.deviance,
            iterations: glm.iterations,
            converged: glm.converged,
            zero_substitutions,
            permutation_p: perm.into(),
            permutation_exact: exact,
        });
    }
    Ok(reports)
}

pub const FLAT_HEADER: [&str; 10] = [
    "response",
    "fleet_per_tract",
    "range_km",
    "n_days",
    "term",
    "beta",
    "se_cluster",
    "p_value",
    "permutation_p",
    "converged",
];

/// One line per (condition, term) for tabulation.
pub fn write_flat_csv<W: Write>(out: W, reports: &[FitReport]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FLAT_HEADER)?;
    // Debug formatting switches to exponent notation for tiny p-values.
    let num = |v: f64| if v.is_finite() { format!("{v:?}") } else { String::new() };
    for r in reports {
        let p = [None, Some(r.p_values.x1), Some(r.p_values.x2), Some(r.p_values.x3)];
        let pp = [None, Some(r.permutation_p.x1), Some(r.permutation_p.x2), Some(r.permutation_p.x3)];
        for (k, term) in ["intercept", "x1", "x2", "x3"].iter().enumerate() {
            w.write_record([
                r.response.as_str().to_owned(),
                r.fleet_per_tract.to_string(),
                r.range_km.to_string(),
                r.n_days.to_string(),
                term.to_string(),
                num(r.beta[k]),
                num(r.se_cluster[k]),
                p[k].map(num).unwrap_or_default(),
                pp[k].map(num).unwrap_or_default(),
                r.converged.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
