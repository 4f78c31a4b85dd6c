#![no_main]

use hopf_delay::table::{comparison_to_csv, parse_comparison_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_comparison_csv(text) {
        let emitted = comparison_to_csv(&rows);
        assert_eq!(parse_comparison_csv(&emitted).expect("emitted report parses"), rows);
    }
});
