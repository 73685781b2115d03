#![no_main]

use libfuzzer_sys::fuzz_target;
use scootsim::trip_data::TractSelection;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sel) = TractSelection::from_json(text) {
        assert!(!sel.tracts.is_empty());
        assert_eq!(TractSelection::from_json(&sel.to_json()).unwrap(), sel);
    }
});
