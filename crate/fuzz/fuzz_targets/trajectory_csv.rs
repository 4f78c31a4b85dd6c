#![no_main]

use hopf_delay::table::parse_trajectory_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_trajectory_csv(text) {
        assert!(rows.windows(2).all(|w| w[0].t < w[1].t));
        assert!(rows.iter().all(|r| r.t.is_finite() && r.x.is_finite() && r.v.is_finite()));
    }
});
