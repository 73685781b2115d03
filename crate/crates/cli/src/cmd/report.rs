use std::path::PathBuf;

use scootsim::metrics::read_metrics_csv;
use scootsim::summary::{summarize, write_summary_csv};

use super::open;
use crate::error::CliError;
use crate::manifest::{write_file, ManifestBuilder};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Daily metrics CSV from `simulate`.
    #[arg(long)]
    metrics: PathBuf,
    /// Boxplot summary CSV.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let mut m = ManifestBuilder::new("report");
    m.input(&a.metrics)?;
    let metrics = read_metrics_csv(open(&a.metrics)?).map_err(|e| CliError::metrics(&a.metrics, e))?;
    let rows = summarize(&metrics);
    write_file(&a.out, |w| write_summary_csv(w, &rows).map_err(std::io::Error::other))?;
    m.finish(&a.out, &[&a.out])?;
    eprintln!("{} summary rows", rows.len());
    Ok(())
}
