#![no_main]

use hopf_delay::hopf::parse_method_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(methods) = parse_method_list(text) {
        assert!(!methods.is_empty());
        assert!(methods.windows(2).all(|w| w[0] < w[1]));
        let joined: Vec<&str> = methods.iter().map(|m| m.as_str()).collect();
        assert_eq!(parse_method_list(&joined.join(",")).expect("canonical list parses"), methods);
    }
});
