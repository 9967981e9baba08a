#![no_main]

use std::sync::Arc;

use libfuzzer_sys::fuzz_target;
use lsys_primes::morphism::AccessMode;
use lsys_primes::{LetterStream, Morphism};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = Morphism::from_json("fuzz", text) else {
        return;
    };
    let m = Arc::new(m);
    let Ok(word) = m.iterate_with_budget(3, 1 << 12) else {
        return;
    };
    let n = word.len() as u64;
    let direct = LetterStream::with_mode(m.clone(), n, AccessMode::DirectIndexed).ok();
    let block = LetterStream::with_mode(m.clone(), n, AccessMode::BlockExpanded).unwrap();
    for (i, &l) in word.iter().enumerate() {
        let rank = i as u64 + 1;
        assert_eq!(block.letter_at(rank).unwrap(), l);
        if let Some(d) = &direct {
            assert_eq!(d.letter_at(rank).unwrap(), l);
        }
    }
    let back = Morphism::from_config("fuzz", &m.to_config()).unwrap();
    assert_eq!(back.digest(), m.digest());
});
