use std::path::PathBuf;

use chrono::NaiveDate;
use scootsim::synth::{SynthConfig, SynthDemand};
use scootsim::trip_data::{CleanedTripWriter, TractSelection};

use crate::error::CliError;
use crate::manifest::{write_file, ManifestBuilder};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Cleaned trip CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Core tract set JSON, ready for `simulate --tracts`.
    #[arg(long)]
    tracts_out: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    days: u32,
    #[arg(long, default_value = "2018-12-01")]
    start: NaiveDate,
    /// Mean trips per day before the weekday factor.
    #[arg(long, default_value_t = 23_000.0)]
    trips_per_day: f64,
    #[arg(long, default_value_t = 14)]
    core_tracts: usize,
    #[arg(long, default_value_t = 60)]
    tail_tracts: usize,
    #[arg(long, default_value_t = 0.09)]
    tail_share: f64,
    #[arg(long)]
    seed: u64,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let cfg = SynthConfig {
        start: a.start,
        days: a.days,
        trips_per_day: a.trips_per_day,
        core_tracts: a.core_tracts,
        tail_tracts: a.tail_tracts,
        tail_share: a.tail_share,
        seed: a.seed,
        ..SynthConfig::default()
    };
    let gen = SynthDemand::new(cfg.clone())?;
    let mut m = ManifestBuilder::new("synth");
    m.param("config", format!("{cfg:?}")).seed(a.seed);

    let file = std::fs::File::create(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let mut w = CleanedTripWriter::new(std::io::BufWriter::new(file)).map_err(|e| CliError::clean(&a.out, e))?;
    let mut n = 0u64;
    for t in gen.trips() {
        w.write(&t).map_err(|e| CliError::clean(&a.out, e))?;
        n += 1;
    }
    w.finish().map_err(|e| CliError::clean(&a.out, e))?;
    let mut outputs = vec![a.out.as_path()];
    if let Some(path) = &a.tracts_out {
        let sel = TractSelection { tracts: gen.core_tracts().to_vec(), coverage: None, target_coverage: None };
        write_file(path, |w| {
            use std::io::Write;
            writeln!(w, "{}", sel.to_json())
        })?;
        outputs.push(path);
    }
    m.finish(&a.out, &outputs)?;
    eprintln!("wrote {n} trips over {} days", a.days);
    Ok(())
}
