#![no_main]

use libfuzzer_sys::fuzz_target;
use scootsim::trip_data::{format_timestamp, parse_timestamp, DateWindow};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(t) = parse_timestamp(text) {
        assert_eq!(parse_timestamp(&format_timestamp(&t)), Some(t));
    }
    if let Ok(w) = text.parse::<DateWindow>() {
        assert!(w.start <= w.end);
    }
});
