//! Boxplot-ready aggregates of daily metrics.
//!
//! Quartiles use linear interpolation between order statistics (type 7: the
//! p-quantile of n sorted values sits at position p·(n−1)), the default of
//! most plotting libraries.

use std::io::Write;

use serde::Serialize;

use crate::metrics::DayMetrics;
use crate::sim::Scenario;

pub const SUMMARY_HEADER: [&str; 11] =
    ["metric", "fleet_per_tract", "range_km", "scenario", "n", "min", "q1", "median", "q3", "max", "mean"];

/// Type-7 quantile of already sorted, non-empty data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxStats {
    pub metric: &'static str,
    pub fleet_per_tract: u32,
    pub range_km: f64,
    pub scenario: Scenario,
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

impl BoxStats {
    /// `None` for an empty sample.
    pub fn from_values(
        metric: &'static str,
        fleet_per_tract: u32,
        range_km: f64,
        scenario: Scenario,
        mut values: Vec<f64>,
    ) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        let q = |p| quantile_sorted(&values, p);
        Some(Self {
            metric,
            fleet_per_tract,
            range_km,
            scenario,
            n: values.len(),
            min: values[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: values[values.len() - 1],
            mean: values.iter().sum::<f64>() / values.len() as f64,
        })
    }
}

/// HI groups first, then PSD; within each, conditions ordered by fleet,
/// range and scenario. Undefined days are skipped and groups left empty are
/// omitted.
pub fn summarize(metrics: &[DayMetrics]) -> Vec<BoxStats> {
    let mut keys: Vec<(u32, f64, Scenario)> = Vec::new();
    for m in metrics {
        let k = (m.fleet_per_tract, m.range_km, m.scenario);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut out = Vec::new();
    type Get = fn(&DayMetrics) -> Option<f64>;
    let pick: [(&'static str, Get); 2] = [("hi", |m| m.hi), ("psd", |m| m.psd)];
    for (name, get) in pick {
        for &(fleet, range, scenario) in &keys {
            let values = metrics
                .iter()
                .filter(|m| m.fleet_per_tract == fleet && m.range_km == range && m.scenario == scenario)
                .filter_map(get)
                .collect();
            out.extend(BoxStats::from_values(name, fleet, range, scenario, values));
        }
    }
    out
}

pub fn write_summary_csv<W: Write>(out: W, rows: &[BoxStats]) -> Result<(), csv::Error> {
    // Explicit header so an empty summary still has one.
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
