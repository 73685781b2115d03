use std::path::PathBuf;

use scootsim::metrics::write_metrics_csv;
use scootsim::sim::{
    run_sweep, write_assignment_log, Condition, DayPartition, HomeMatchFallback, Scenario, SweepOptions,
};
use scootsim::trip_data::{CleanedTripReader, TractSelection};

use super::{open, read_text};
use crate::error::CliError;
use crate::manifest::{write_file, ManifestBuilder};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Cleaned trip CSV.
    #[arg(long)]
    trips: PathBuf,
    /// Tract set JSON; agents are homed in listed order.
    #[arg(long)]
    tracts: PathBuf,
    /// Scooters per tract, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [50u32, 100])]
    fleet: Vec<u32>,
    /// Maximum battery range in km, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [35.0, 45.0, 60.0])]
    range_km: Vec<f64>,
    /// Scenarios to run, comma separated (S1..S4).
    #[arg(long, value_delimiter = ',', default_values_t = Scenario::ALL)]
    scenarios: Vec<Scenario>,
    /// Master seed for every random choice.
    #[arg(long)]
    seed: u64,
    /// Worker threads; 0 uses all cores. Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Daily metrics CSV.
    #[arg(long)]
    out: PathBuf,
    /// Carry positions and battery levels from one day to the next.
    #[arg(long)]
    no_daily_reset: bool,
    /// Drop a demand in S3/S4 when no interested scooter is homed at its
    /// destination, instead of falling back to all interested scooters.
    #[arg(long)]
    rule34_drop: bool,
    /// Per-trip assignment log CSV.
    #[arg(long)]
    log_assignments: Option<PathBuf>,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let mut m = ManifestBuilder::new("simulate");
    m.input(&a.trips)?.input(&a.tracts)?;
    m.param("fleet", join(&a.fleet))
        .param("range_km", join(&a.range_km))
        .param("scenarios", join(&a.scenarios))
        .seed(a.seed)
        .param("daily_reset", !a.no_daily_reset)
        .param("rule34_drop", a.rule34_drop)
        .param("log_assignments", a.log_assignments.is_some());

    let tracts = TractSelection::from_json(&read_text(&a.tracts)?).map_err(|e| CliError::od(&a.tracts, e))?.tracts;
    let conditions = Condition::grid(&a.fleet, &a.range_km, &a.scenarios);
    if conditions.is_empty() {
        return Err(CliError::Config("no conditions to run".into()));
    }
    for c in &conditions {
        c.validate()?;
    }

    let reader = CleanedTripReader::new(open(&a.trips)?).map_err(|e| CliError::clean(&a.trips, e))?;
    let mut bad = None;
    let trips = reader.map_while(|r| r.map_err(|e| bad = Some(e)).ok());
    let partition = DayPartition::build(trips, &tracts)?;
    if let Some(e) = bad {
        return Err(CliError::clean(&a.trips, e));
    }

    let mut opts = SweepOptions::new(a.seed);
    opts.jobs = a.jobs;
    opts.daily_reset = !a.no_daily_reset;
    opts.home_fallback = if a.rule34_drop { HomeMatchFallback::Drop } else { HomeMatchFallback::AllInterested };
    opts.record_assignments = a.log_assignments.is_some();
    let out = run_sweep(&partition, &conditions, &opts)?;

    write_file(&a.out, |w| write_metrics_csv(w, &out.metrics).map_err(std::io::Error::other))?;
    let mut outputs = vec![a.out.as_path()];
    if let (Some(path), Some(cells)) = (&a.log_assignments, &out.assignments) {
        write_file(path, |w| {
            write_assignment_log(w, &partition, &conditions, cells).map_err(std::io::Error::other)
        })?;
        outputs.push(path);
    }
    m.finish(&a.out, &outputs)?;
    eprintln!(
        "{} days, {} demands in the tract set ({} outside), {} conditions, {} metric rows",
        partition.n_days(),
        partition.n_demands(),
        partition.outside_tract_set,
        conditions.len(),
        out.metrics.len()
    );
    Ok(())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}
