#![no_main]

use hopf_delay::ddesim::History;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = text.parse::<History>() {
        assert!(h.value(-1.0).is_finite());
        assert_eq!(h.describe().parse::<History>().expect("description parses"), h);
    }
});
