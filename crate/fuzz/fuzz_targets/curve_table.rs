#![no_main]

use hopf_delay::table::parse_curve_table;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_curve_table(text) {
        // anything accepted must survive emit -> parse -> emit unchanged
        let emitted = table.to_csv();
        let again = parse_curve_table(&emitted).expect("emitted table parses");
        assert_eq!(again, table);
        assert_eq!(again.to_csv(), emitted);
    }
});
