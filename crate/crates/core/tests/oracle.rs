mod common;

use std::sync::Arc;

use common::{brute_counts, brute_path, thue_morse};
use lsys_primes::discrepancy::{level_crossing_census, prefix_profile};
use lsys_primes::morphism::AccessMode;
use lsys_primes::{discrepancy_at, trajectory, Labeling, LetterStream, Morphism, PrimeSet};

const ORDER: u32 = 12;

fn stream(n: u64) -> LetterStream {
    LetterStream::new(Arc::new(Morphism::phi()), n)
}

#[test]
fn counts_match_brute_force_for_all_shifts() {
    let word = thue_morse(ORDER);
    let n = word.len() as u64;
    let ps = PrimeSet::new(n + 64).unwrap();
    let s = stream(n);
    for shift in -16..=16 {
        let lab = Labeling::shift(shift);
        for len in [1, 2, 5, 16, 100, 1000, n] {
            let t = discrepancy_at(&s, &lab, &ps, len).unwrap();
            let (a, b) = brute_counts(&word, shift, 1, len as usize);
            assert_eq!(t.counts, vec![a, b], "shift {shift} n {len}");
        }
    }
}

#[test]
fn progressions_match_brute_force() {
    let word = thue_morse(10);
    let n = word.len() as u64;
    let ps = PrimeSet::new(20 * n).unwrap();
    let s = stream(n);
    for stride in 1..=12 {
        for start in -3..=7 {
            let lab = Labeling::new(start, stride).unwrap();
            let t = discrepancy_at(&s, &lab, &ps, n).unwrap();
            let (a, b) = brute_counts(&word, start, stride as i64, n as usize);
            assert_eq!(t.counts, vec![a, b], "start {start} stride {stride}");
        }
    }
}

#[test]
fn progression_equals_filtered_labels() {
    // labels prime and ≡ 1 mod 4 among the stride-1 labels 1..=4n, reindexed by (label-1)/4 + 1
    let word = thue_morse(11);
    let n = 1u64 << 9;
    let ps = PrimeSet::new(4 * n).unwrap();
    let t = discrepancy_at(&stream(n), &Labeling::new(1, 4).unwrap(), &ps, n).unwrap();
    let (mut a, mut b) = (0, 0);
    for label in 1..=(4 * n as i64) {
        if label % 4 == 1 && common::is_prime(label) {
            let rank = ((label - 1) / 4) as usize;
            if word[rank] == 'A' {
                a += 1
            } else {
                b += 1
            }
        }
    }
    assert_eq!(t.counts, vec![a, b]);
}

#[test]
fn trajectory_extremes_match_brute_path() {
    let word = thue_morse(ORDER);
    let n = word.len();
    let ps = PrimeSet::new(n as u64 + 64).unwrap();
    let s = stream(n as u64);
    for shift in [-16, -5, 0, 1, 2, 3, 4, 5, 6, 11, 16] {
        let path = brute_path(&word, shift, 1, n);
        let t = trajectory(&s, &Labeling::shift(shift), &ps, n as u64, 1).unwrap();
        let sm = &t.summary;
        let min = *path.iter().min().unwrap();
        let max = *path.iter().max().unwrap();
        assert_eq!(sm.min_d, Some(min));
        assert_eq!(sm.max_d, Some(max));
        assert_eq!(
            sm.argmin_rank,
            Some(path.iter().position(|&d| d == min).unwrap() as u64 + 1)
        );
        assert_eq!(
            sm.argmax_rank,
            Some(path.iter().position(|&d| d == max).unwrap() as u64 + 1)
        );
        assert_eq!(sm.d, Some(*path.last().unwrap()));
        for c in &t.checkpoints {
            assert_eq!(c.d, Some(path[c.rank as usize - 1]));
        }
        let off: Vec<i64> = path
            .iter()
            .enumerate()
            .filter(|(i, _)| !(i + 1).is_power_of_two())
            .map(|(_, &d)| d)
            .collect();
        assert_eq!(sm.min_d_off_pow2, off.iter().min().copied());
        assert_eq!(sm.max_d_off_pow2, off.iter().max().copied());
    }
}

#[test]
fn census_matches_brute_path() {
    let word = thue_morse(ORDER);
    let n = word.len();
    let ps = PrimeSet::new(n as u64 + 64).unwrap();
    for shift in [0, 1, 4, 5] {
        let path = brute_path(&word, shift, 1, n);
        let c = level_crossing_census(&stream(n as u64), &Labeling::shift(shift), &ps, n as u64, -300..=300).unwrap();
        assert_eq!(c.total_hits(), n as u64);
        for l in &c.levels {
            let hits: Vec<usize> = (0..n).filter(|&i| path[i] == l.level).collect();
            assert_eq!(l.hits, hits.len() as u64, "level {}", l.level);
            assert_eq!(l.first_rank, hits.first().map(|&i| i as u64 + 1));
            assert_eq!(l.last_rank, hits.last().map(|&i| i as u64 + 1));
            let runs = hits
                .iter()
                .enumerate()
                .filter(|&(j, &i)| j == 0 || hits[j - 1] + 1 != i)
                .count();
            assert_eq!(l.visits, runs as u64);
        }
    }
}

#[test]
fn prefix_profile_matches_brute_path() {
    let word = thue_morse(ORDER);
    let n = word.len();
    let ps = PrimeSet::new(n as u64).unwrap();
    let path = brute_path(&word, 1, 1, n);
    let marks: Vec<u64> = (0..=ORDER).map(|k| 1 << k).collect();
    let profile = prefix_profile(&stream(n as u64), &Labeling::shift(1), &ps, &marks).unwrap();
    for p in profile {
        let prefix = &path[..p.n as usize];
        assert_eq!(p.d, *prefix.last().unwrap());
        assert_eq!(p.max_d, *prefix.iter().max().unwrap());
        assert_eq!(p.min_d, *prefix.iter().min().unwrap());
    }
}

#[test]
fn access_modes_agree_on_counts() {
    let n = 1u64 << 14;
    let ps = PrimeSet::new(n + 8).unwrap();
    let m = Arc::new(Morphism::phi());
    let direct = LetterStream::with_mode(m.clone(), n, AccessMode::DirectIndexed).unwrap();
    let block = LetterStream::with_mode(m, n, AccessMode::BlockExpanded).unwrap();
    for shift in [-3, 0, 1, 5] {
        let lab = Labeling::shift(shift);
        assert_eq!(
            discrepancy_at(&direct, &lab, &ps, n).unwrap(),
            discrepancy_at(&block, &lab, &ps, n).unwrap()
        );
    }
}

#[test]
fn small_prefix_values() {
    let ps = PrimeSet::new(1 << 10).unwrap();
    let s = stream(1 << 10);
    let lab = Labeling::shift(1);
    let d: Vec<i64> = (1..=16)
        .map(|n| discrepancy_at(&s, &lab, &ps, n).unwrap().d().unwrap())
        .collect();
    assert_eq!(d, [0, -1, -2, -2, -3, -3, -2, -2, -2, -2, -1, -1, 0, 0, 0, 0]);
    let orders: Vec<(i64, u64)> = (0..=10)
        .map(|k| {
            let t = discrepancy_at(&s, &lab, &ps, 1 << k).unwrap();
            (t.d().unwrap(), t.steps())
        })
        .collect();
    assert_eq!(
        orders,
        [
            (0, 0),
            (-1, 1),
            (-2, 2),
            (-2, 4),
            (0, 6),
            (-1, 11),
            (2, 18),
            (5, 31),
            (20, 54),
            (17, 97),
            (38, 172)
        ]
    );
}
