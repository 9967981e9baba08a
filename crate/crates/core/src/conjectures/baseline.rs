//! Seeded ±1 random walks, the coin-flip reference for prime discrepancies.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{normalized, normalized_pm1};
use crate::error::{Error, Result};

/// Level whose repeated entries contrast with the prime walk's one-time minimum.
pub const DEEP_LEVEL: i64 = -3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSummary {
    pub seed: u64,
    pub steps: u64,
    pub final_sum: i64,
    pub min: i64,
    pub argmin_step: u64,
    pub max: i64,
    pub argmax_step: u64,
    pub zero_crossings: u64,
    pub returns_to_zero: u64,
    /// Times the walk moved from above [`DEEP_LEVEL`] to at or below it.
    pub deep_entries: u64,
    pub normalized_final: f64,
    pub normalized_final_pm1: f64,
}

/// A full walk: partial sums after each step plus its summary.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineWalk {
    pub path: Vec<i32>,
    pub summary: WalkSummary,
}

impl BaselineWalk {
    /// Steps at which the partial sum equals each level.
    pub fn level_census(&self) -> BTreeMap<i64, u64> {
        let mut census = BTreeMap::new();
        for &s in &self.path {
            *census.entry(s as i64).or_insert(0) += 1;
        }
        census
    }
}

/// Walk driven by ChaCha8 seeded with `seed`; bit 1 of each draw is a +1 step.
pub fn baseline_walk(steps: u64, seed: u64) -> Result<BaselineWalk> {
    let mut path = Vec::with_capacity(steps as usize);
    let summary = walk(steps, seed, |s| path.push(s as i32))?;
    Ok(BaselineWalk { path, summary })
}

/// Summary only, without storing the path.
pub fn baseline_summary(steps: u64, seed: u64) -> Result<WalkSummary> {
    walk(steps, seed, |_| {})
}

fn walk<F: FnMut(i64)>(steps: u64, seed: u64, mut visit: F) -> Result<WalkSummary> {
    if steps == 0 {
        return Err(Error::InvalidArgument("a walk needs at least one step".into()));
    }
    if steps > i32::MAX as u64 {
        return Err(Error::Budget {
            what: "random walk",
            requested: steps,
            limit: i32::MAX as u64,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0i64;
    let (mut min, mut argmin) = (i64::MAX, 0);
    let (mut max, mut argmax) = (i64::MIN, 0);
    let mut last_sign = 0i64;
    let mut crossings = 0;
    let mut returns = 0;
    let mut deep = 0;
    let mut bits = 0u64;
    for step in 1..=steps {
        if (step - 1) % 64 == 0 {
            bits = rng.next_u64();
        }
        let up = bits & 1 == 1;
        bits >>= 1;
        let before = sum;
        sum += if up { 1 } else { -1 };
        visit(sum);
        if sum < min {
            (min, argmin) = (sum, step);
        }
        if sum > max {
            (max, argmax) = (sum, step);
        }
        if sum == 0 {
            returns += 1;
        } else {
            if last_sign != 0 && sum.signum() != last_sign {
                crossings += 1;
            }
            last_sign = sum.signum();
        }
        if sum <= DEEP_LEVEL && before > DEEP_LEVEL {
            deep += 1;
        }
    }
    Ok(WalkSummary {
        seed,
        steps,
        final_sum: sum,
        min,
        argmin_step: argmin,
        max,
        argmax_step: argmax,
        zero_crossings: crossings,
        returns_to_zero: returns,
        deep_entries: deep,
        normalized_final: normalized(sum, steps).expect("steps > 0"),
        normalized_final_pm1: normalized_pm1(sum, steps).expect("steps > 0"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub steps: u64,
    pub first_seed: u64,
    pub walks: Vec<WalkSummary>,
    pub mean_final: f64,
    /// Sample standard deviation of the final sums.
    pub std_final: f64,
    /// `std_final / sqrt(steps)`; near 1 for a fair coin.
    pub std_ratio: f64,
    /// Walks entering the region at or below [`DEEP_LEVEL`] at least twice.
    pub repeated_deep: u64,
}

/// Walks for seeds `first_seed .. first_seed + count`, run in parallel, reported in seed order.
pub fn baseline_ensemble(steps: u64, first_seed: u64, count: u64) -> Result<Ensemble> {
    if count == 0 {
        return Err(Error::InvalidArgument("ensemble needs at least one seed".into()));
    }
    let walks = (0..count)
        .into_par_iter()
        .map(|i| baseline_summary(steps, first_seed + i))
        .collect::<Result<Vec<_>>>()?;
    let finals: Vec<f64> = walks.iter().map(|w| w.final_sum as f64).collect();
    let mean = finals.iter().sum::<f64>() / count as f64;
    let var = if count > 1 {
        finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64
    } else {
        0.0
    };
    let std = var.sqrt();
    Ok(Ensemble {
        steps,
        first_seed,
        mean_final: mean,
        std_final: std,
        std_ratio: std / (steps as f64).sqrt(),
        repeated_deep: walks.iter().filter(|w| w.deep_entries >= 2).count() as u64,
        walks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_walks_repeat() {
        let a = baseline_walk(100_000, 42).unwrap();
        let b = baseline_walk(100_000, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.path, baseline_walk(100_000, 43).unwrap().path);
    }

    #[test]
    fn single_step() {
        for seed in 0..8 {
            let w = baseline_walk(1, seed).unwrap();
            assert_eq!(w.path.len(), 1);
            assert_eq!(w.summary.final_sum.abs(), 1);
            assert_eq!(w.summary.argmin_step, 1);
        }
        assert!(baseline_walk(0, 1).is_err());
    }

    #[test]
    fn summary_matches_path() {
        let w = baseline_walk(10_000, 7).unwrap();
        assert!(w.path.windows(2).all(|p| (p[1] - p[0]).abs() == 1));
        let min = *w.path.iter().min().unwrap() as i64;
        assert_eq!(w.summary.min, min);
        assert_eq!(w.path[w.summary.argmin_step as usize - 1] as i64, min);
        assert_eq!(w.summary.final_sum, *w.path.last().unwrap() as i64);
        let census = w.level_census();
        assert_eq!(census.values().sum::<u64>(), 10_000);
        assert_eq!(census.get(&0).copied().unwrap_or(0), w.summary.returns_to_zero);
        assert_eq!(baseline_summary(10_000, 7).unwrap(), w.summary);
    }

    #[test]
    fn ensemble_is_ordered_by_seed() {
        let e = baseline_ensemble(1000, 5, 4).unwrap();
        let seeds: Vec<u64> = e.walks.iter().map(|w| w.seed).collect();
        assert_eq!(seeds, vec![5, 6, 7, 8]);
    }
}
