use std::path::PathBuf;

use scootsim::trip_data::{coverage_curve, select_top_tracts, Axis, CleanedTripReader, OdBuilder, TractSelection};

use super::{open, read_text};
use crate::error::CliError;
use crate::manifest::{write_file, ManifestBuilder};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Cleaned trip CSV.
    #[arg(long)]
    trips: PathBuf,
    /// Target share of trips with both endpoints inside the selected set.
    #[arg(long, default_value_t = 0.9)]
    coverage: f64,
    /// Selected tract set JSON.
    #[arg(long)]
    tracts_out: PathBuf,
    /// Cumulative origin coverage curve CSV.
    #[arg(long)]
    curve_out: PathBuf,
    /// Cumulative destination coverage curve CSV.
    #[arg(long)]
    dest_curve_out: Option<PathBuf>,
    /// Full O-D matrix JSON.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
    /// Use this tract list (JSON array or selection object) instead of ranking.
    #[arg(long)]
    explicit_tracts: Option<PathBuf>,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let mut m = ManifestBuilder::new("odmatrix");
    m.input(&a.trips)?;
    m.param("coverage", a.coverage);

    let explicit = match &a.explicit_tracts {
        Some(p) => {
            m.input(p)?;
            Some(TractSelection::from_json(&read_text(p)?).map_err(|e| CliError::od(p, e))?.tracts)
        }
        None => None,
    };

    let reader = CleanedTripReader::new(open(&a.trips)?).map_err(|e| CliError::clean(&a.trips, e))?;
    let mut b = OdBuilder::new();
    for t in reader {
        let t = t.map_err(|e| CliError::clean(&a.trips, e))?;
        b.add(&t.origin_tract, &t.dest_tract);
    }
    let od = b.finish();

    let sel = select_top_tracts(&od, a.coverage, explicit.as_deref()).map_err(|e| match e {
        scootsim::trip_data::OdError::InvalidTarget(_) => CliError::Config(e.to_string()),
        e => CliError::od(&a.trips, e),
    })?;
    write_file(&a.tracts_out, |w| {
        use std::io::Write;
        writeln!(w, "{}", sel.to_json())
    })?;
    let mut outputs = vec![a.tracts_out.as_path()];

    let curves = [(Axis::Origin, Some(&a.curve_out)), (Axis::Destination, a.dest_curve_out.as_ref())];
    for (axis, path) in curves {
        let Some(path) = path else { continue };
        let curve = coverage_curve(&od, axis).map_err(|e| CliError::od(&a.trips, e))?;
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        curve.write_csv(std::io::BufWriter::new(file)).map_err(|e| CliError::od(path, e))?;
        outputs.push(path);
    }
    if let Some(path) = &a.matrix_out {
        write_file(path, |w| {
            use std::io::Write;
            writeln!(w, "{}", od.to_json())
        })?;
        outputs.push(path);
    }
    m.finish(&a.tracts_out, &outputs)?;
    eprintln!(
        "{} tracts in matrix, {} trips; selected {} tracts covering {:.4}",
        od.len(),
        od.total(),
        sel.tracts.len(),
        sel.coverage.unwrap_or(f64::NAN)
    );
    Ok(())
}
