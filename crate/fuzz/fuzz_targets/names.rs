#![no_main]

use hopf_delay::{Branch, Method, SystemKind};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(k) = text.parse::<SystemKind>() {
        assert_eq!(k.as_str().parse::<SystemKind>().ok(), Some(k));
    }
    if let Ok(m) = text.parse::<Method>() {
        assert_eq!(m.as_str().parse::<Method>().ok(), Some(m));
    }
    if let Ok(b) = text.parse::<Branch>() {
        assert_eq!(b.as_str().parse::<Branch>().ok(), Some(b));
    }
});
