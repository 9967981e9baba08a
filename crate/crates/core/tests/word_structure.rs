mod common;

use std::sync::Arc;

use lsys_primes::morphism::{complement_concat_check, factor_balance_scan};
use lsys_primes::{LetterStream, Morphism};

fn swap(w: &str) -> String {
    w.chars().map(|c| if c == 'A' { 'B' } else { 'A' }).collect()
}

#[test]
fn prefixes_nest() {
    let m = Morphism::phi();
    let mut prev = String::new();
    for k in 0..=16 {
        let w = m.render(&m.iterate(k).unwrap());
        assert_eq!(w, common::rewrite(&[('A', "AB"), ('B', "BA")], 'A', k));
        assert!(w.starts_with(&prev));
        prev = w;
    }
    let z3 = Morphism::z3();
    for k in 0..8 {
        let a = z3.render(&z3.iterate(k).unwrap());
        let b = z3.render(&z3.iterate(k + 1).unwrap());
        assert!(b.starts_with(&a));
    }
}

#[test]
fn complement_concatenation() {
    let m = Morphism::phi();
    for k in 0..16 {
        assert!(complement_concat_check(&m, k).unwrap(), "k = {k}");
        let w = common::rewrite(&[('A', "AB"), ('B', "BA")], 'A', k);
        let next = common::rewrite(&[('A', "AB"), ('B', "BA")], 'A', k + 1);
        assert_eq!(next, format!("{w}{}", swap(&w)));
    }
}

#[test]
fn decimation_identity() {
    let m = Arc::new(Morphism::phi());
    for k in 1..=16u32 {
        let stream = LetterStream::new(m.clone(), 1 << k);
        for e in 1..=k {
            let dec = stream.decimate(e).unwrap();
            let expect = m.render(&m.iterate(k - e).unwrap());
            assert_eq!(dec.len(), 1 << (k - e));
            assert_eq!(dec.to_word(), expect, "k = {k}, m = {e}");
        }
    }
}

#[test]
fn factor_balance() {
    let stream = LetterStream::new(Arc::new(Morphism::phi()), 1 << 16);
    let report = factor_balance_scan(&stream, 1000).unwrap();
    assert!(report.max_imbalance <= 2);
    assert!(report.refinements_hold());
    assert_eq!(
        report.factors_scanned,
        (1..=1000u64).map(|l| (1 << 16) - l + 1).sum::<u64>()
    );

    // independent recount over a shorter prefix
    let word: Vec<i64> = common::thue_morse(12)
        .iter()
        .map(|&c| if c == 'A' { 1 } else { -1 })
        .collect();
    let mut prefix = vec![0i64];
    for x in &word {
        prefix.push(prefix.last().unwrap() + x);
    }
    let mut worst = 0;
    for len in 1..=200 {
        for start in 0..=word.len() - len {
            let imb = (prefix[start + len] - prefix[start]).abs();
            if len % 2 == 1 {
                assert_eq!(imb, 1);
            } else {
                assert!(imb == 0 || imb == 2);
            }
            worst = worst.max(imb);
        }
    }
    let short = LetterStream::new(Arc::new(Morphism::phi()), 1 << 12);
    assert_eq!(factor_balance_scan(&short, 200).unwrap().max_imbalance, worst as u64);
}
