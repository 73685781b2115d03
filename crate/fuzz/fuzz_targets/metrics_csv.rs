#![no_main]

use libfuzzer_sys::fuzz_target;
use scootsim::metrics::{read_metrics_csv, write_metrics_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_metrics_csv(data) {
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &rows).unwrap();
        let again = read_metrics_csv(&buf[..]).unwrap();
        assert_eq!(again.len(), rows.len());
    }
});
