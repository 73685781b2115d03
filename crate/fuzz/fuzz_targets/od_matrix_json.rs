#![no_main]

use libfuzzer_sys::fuzz_target;
use scootsim::trip_data::{coverage_curve, select_top_tracts, Axis, OdMatrix};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(od) = OdMatrix::from_json(text) else { return };
    assert_eq!(OdMatrix::from_json(&od.to_json()).unwrap(), od);
    if let Ok(sel) = select_top_tracts(&od, 0.9, None) {
        let c = sel.coverage.unwrap();
        assert!((0.0..=1.0).contains(&c));
    }
    for axis in [Axis::Origin, Axis::Destination] {
        if let Ok(curve) = coverage_curve(&od, axis) {
            assert!(curve.points.windows(2).all(|w| w[0].1 <= w[1].1));
        }
    }
});
