#![no_main]

use libfuzzer_sys::fuzz_target;
use lsys_primes::io::{read_trajectory_csv, validate_trajectory};

fuzz_target!(|data: &[u8]| {
    if let Ok(t) = read_trajectory_csv(data) {
        let _ = validate_trajectory(&t);
    }
});
