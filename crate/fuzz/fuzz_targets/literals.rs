#![no_main]

use libfuzzer_sys::fuzz_target;
use lsys_primes::io::{parse_count, parse_int_range, parse_order_range};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_order_range(text) {
        assert!(r.start() <= r.end());
    }
    if let Ok(r) = parse_int_range(text) {
        assert!(r.start() <= r.end());
    }
    let _ = parse_count(text);
});
