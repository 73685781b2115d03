#![no_main]

use libfuzzer_sys::fuzz_target;
use scootsim::trip_data::{clean_csv, tally_missing_tracts, CleanRules};

fuzz_target!(|data: &[u8]| {
    let mut kept = 0u64;
    if let Ok(report) = clean_csv(data, CleanRules::default(), |t| {
        assert!(t.duration_s > 0 && t.distance_m > 0);
        kept += 1;
        Ok(())
    }) {
        assert!(report.reconciles());
        assert_eq!(report.rows_kept, kept);
    }
    if let Ok(audit) = tally_missing_tracts(data) {
        assert!(audit.reconciles());
    }
});
