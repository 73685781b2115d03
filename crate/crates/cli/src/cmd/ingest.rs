use std::path::PathBuf;

use scootsim::trip_data::{clean_csv, tally_missing_tracts, CleanReport, CleanRules, CleanedTripWriter, DateWindow};
use serde::Serialize;

use super::{open, sibling};
use crate::error::CliError;
use crate::manifest::{write_file, ManifestBuilder};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Raw trip CSV export.
    #[arg(long)]
    input: PathBuf,
    /// Cleaned trip CSV to write.
    #[arg(long, required_unless_present = "audit_missing_tracts")]
    out: Option<PathBuf>,
    /// Clean report JSON [default: <out> with a .report.json extension].
    #[arg(long)]
    report: Option<PathBuf>,
    /// Keep trips starting within START..END (inclusive, YYYY-MM-DD).
    #[arg(long)]
    window: Option<DateWindow>,
    /// Count rows under the missing-tract rule alone and write only the
    /// report; no cleaned output is produced.
    #[arg(long)]
    audit_missing_tracts: bool,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    mode: &'static str,
    #[serde(flatten)]
    report: &'a CleanReport,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let report_path = match (&a.report, &a.out) {
        (Some(r), _) => r.clone(),
        (None, Some(out)) => sibling(out, "report.json"),
        (None, None) => return Err(CliError::Config("--audit-missing-tracts without --out needs --report".into())),
    };
    let mut m = ManifestBuilder::new("ingest");
    m.input(&a.input)?;
    if let Some(w) = &a.window {
        m.param("window", format!("{}..{}", w.start, w.end));
    }
    m.param("audit_missing_tracts", a.audit_missing_tracts);

    let input = open(&a.input)?;
    let (report, mode) = match (&a.out, a.audit_missing_tracts) {
        (_, true) => {
            let r = tally_missing_tracts(input).map_err(|e| CliError::clean(&a.input, e))?;
            (r, "missing-tract-only")
        }
        (Some(out), false) => {
            let file = std::fs::File::create(out).map_err(|e| CliError::io(out, e))?;
            let mut w = CleanedTripWriter::new(std::io::BufWriter::new(file)).map_err(|e| CliError::clean(out, e))?;
            let rules = CleanRules { window: a.window };
            let mut sink_err = None;
            let r = clean_csv(input, rules, |t| {
                w.write(&t).inspect_err(|_| sink_err = Some(()))
            });
            let r = match r {
                Ok(r) => r,
                Err(e) if sink_err.is_some() => return Err(CliError::clean(out, e)),
                Err(e) => return Err(CliError::clean(&a.input, e)),
            };
            w.finish().map_err(|e| CliError::clean(out, e))?;
            (r, "full")
        }
        (None, false) => unreachable!("clap requires --out"),
    };
    debug_assert!(report.reconciles());

    let text = serde_json::to_string_pretty(&ReportFile { mode, report: &report }).expect("report serialises");
    write_file(&report_path, |w| {
        use std::io::Write;
        writeln!(w, "{text}")
    })?;
    let mut outputs = vec![report_path.as_path()];
    if let (Some(out), false) = (&a.out, a.audit_missing_tracts) {
        outputs.insert(0, out.as_path());
    }
    m.finish(outputs[0], &outputs)?;
    eprintln!(
        "read {} rows, kept {}, dropped {} (missing tract {}, invalid numeric {}, bad timestamp {}, bad vehicle type {}, out of window {})",
        report.rows_read,
        report.rows_kept,
        report.dropped_total(),
        report.dropped_missing_tract,
        report.dropped_invalid_numeric,
        report.dropped_bad_timestamp,
        report.dropped_bad_vehicle_type,
        report.dropped_out_of_window
    );
    Ok(())
}
