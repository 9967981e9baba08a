#![no_main]

use libfuzzer_sys::fuzz_target;
use lsys_primes::io::read_report_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = read_report_json(data) {
        assert_eq!(r.recompute_verdict().unwrap().0, r.verdict);
    }
});
