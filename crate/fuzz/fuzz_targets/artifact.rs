#![no_main]

use libfuzzer_sys::fuzz_target;
use lsys_primes::io::validate_artifact;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = validate_artifact(text);
    }
});
