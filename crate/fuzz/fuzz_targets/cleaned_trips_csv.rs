#![no_main]

use libfuzzer_sys::fuzz_target;
use scootsim::trip_data::{read_cleaned_trips, write_cleaned_trips, CleanedTripReader};

fuzz_target!(|data: &[u8]| {
    let Ok(reader) = CleanedTripReader::new(data) else { return };
    let streamed: Vec<_> = reader.collect();
    if let Ok(trips) = read_cleaned_trips(data) {
        assert!(streamed.iter().all(Result::is_ok));
        // Whatever parses must survive a write and re-read unchanged.
        let buf = write_cleaned_trips(Vec::new(), &trips).unwrap();
        assert_eq!(read_cleaned_trips(&buf[..]).unwrap(), trips);
    }
});
