use std::path::PathBuf;

use scootsim::metrics::read_metrics_csv;
use scootsim::stats::{analyze, write_flat_csv, AnalysisOptions, Response};

use super::{open, sibling};
use crate::error::CliError;
use crate::manifest::{write_file, ManifestBuilder};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Daily metrics CSV from `simulate`.
    #[arg(long)]
    metrics: PathBuf,
    /// Response variable: hi or psd.
    #[arg(long)]
    response: Response,
    /// Report JSON, one object per (fleet, range) condition.
    #[arg(long)]
    out: PathBuf,
    /// Flat per-term CSV [default: <out> with a .csv extension].
    #[arg(long)]
    flat_out: Option<PathBuf>,
    /// Seed for Monte-Carlo permutation tests (used beyond 20 days).
    #[arg(long, default_value_t = 0)]
    permutation_seed: u64,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let flat = a.flat_out.clone().unwrap_or_else(|| sibling(&a.out, "csv"));
    let mut m = ManifestBuilder::new("analyze");
    m.input(&a.metrics)?;
    m.param("response", a.response).seed(a.permutation_seed);

    let metrics = read_metrics_csv(open(&a.metrics)?).map_err(|e| CliError::metrics(&a.metrics, e))?;
    let opts = AnalysisOptions { permutation_seed: a.permutation_seed };
    let reports = analyze(&metrics, a.response, &opts).map_err(|e| CliError::Schema {
        path: a.metrics.clone(),
        msg: e.to_string(),
    })?;

    let text = serde_json::to_string_pretty(&reports).expect("reports serialise");
    write_file(&a.out, |w| {
        use std::io::Write;
        writeln!(w, "{text}")
    })?;
    write_file(&flat, |w| write_flat_csv(w, &reports).map_err(std::io::Error::other))?;
    m.finish(&a.out, &[&a.out, &flat])?;

    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.converged)
        .map(|r| format!("fleet {} range {}", r.fleet_per_tract, r.range_km))
        .collect();
    if !failed.is_empty() {
        return Err(CliError::NotConverged(format!(
            "{} fit did not converge for {}",
            a.response,
            failed.join("; ")
        )));
    }
    eprintln!("{} conditions fitted for {}", reports.len(), a.response);
    Ok(())
}
