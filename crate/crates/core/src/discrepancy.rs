//! Per-letter prime counts along a labeled morphic word.
//!
//! Rank `i` of a [`LetterStream`] carries the integer label `start + (i − 1)·stride`.
//! Every rank whose label is prime credits one count to its letter. For two-letter
//! alphabets the signed discrepancy is `D = count(first letter) − count(second letter)`,
//! where "first" and "second" follow the alphabet order (A and B for the presets).

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphism::{Letter, LetterStream};
use crate::primes::{last_label, PrimeSet};

/// Ranks per parallel work unit when counting.
const CHUNK_RANKS: u64 = 1 << 16;

/// Affine rank labeling `rank ↦ start + (rank − 1)·stride`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Labeling {
    start: i64,
    stride: u64,
}

impl Labeling {
    pub fn new(start: i64, stride: u64) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidArgument("stride must be at least 1".into()));
        }
        if stride > i64::MAX as u64 {
            return Err(Error::InvalidArgument(format!("stride {stride} is too large")));
        }
        Ok(Labeling { start, stride })
    }

    /// Consecutive integers starting at `z` ("count with shift z").
    pub fn shift(z: i64) -> Self {
        Labeling { start: z, stride: 1 }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn stride(&self) -> u64 {
        self.stride
    }

    #[inline]
    pub fn label(&self, rank: u64) -> i64 {
        self.start + ((rank - 1) * self.stride) as i64
    }

    /// Label of rank `n`, with overflow checking.
    pub fn last_label(&self, n: u64) -> Result<i64> {
        last_label(self.start, self.stride, n)
    }
}

/// Normalizes a discrepancy by the dispersion unit `sqrt(steps)/2`.
pub fn normalized(d: i64, steps: u64) -> Option<f64> {
    (steps > 0).then(|| d as f64 / ((steps as f64).sqrt() / 2.0))
}

/// Normalizes by `sqrt(steps)`, the standard deviation of a ±1 sum.
pub fn normalized_pm1(d: i64, steps: u64) -> Option<f64> {
    (steps > 0).then(|| d as f64 / (steps as f64).sqrt())
}

fn ratio(counts: &[u64]) -> Option<f64> {
    match counts {
        [a, b] if *b > 0 => Some(*a as f64 / *b as f64),
        _ => None,
    }
}

/// Final per-letter counts over ranks `1..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub n: u64,
    pub letters: Vec<char>,
    pub counts: Vec<u64>,
}

impl Tally {
    pub fn steps(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `count(first) − count(second)` for two-letter alphabets.
    pub fn d(&self) -> Option<i64> {
        match self.counts.as_slice() {
            [a, b] => Some(*a as i64 - *b as i64),
            _ => None,
        }
    }

    pub fn normalized_d(&self) -> Option<f64> {
        normalized(self.d()?, self.steps())
    }

    pub fn ratio(&self) -> Option<f64> {
        ratio(&self.counts)
    }

    /// `counts[i] − counts[j]` for all `i < j`.
    pub fn pairwise(&self) -> Vec<((char, char), i64)> {
        let mut out = Vec::new();
        for i in 0..self.counts.len() {
            for j in i + 1..self.counts.len() {
                out.push((
                    (self.letters[i], self.letters[j]),
                    self.counts[i] as i64 - self.counts[j] as i64,
                ));
            }
        }
        out
    }
}

fn check_inputs(stream: &LetterStream, labeling: &Labeling, primes: &PrimeSet, n: u64) -> Result<()> {
    if n > stream.len() {
        return Err(Error::RankOutOfRange {
            rank: n,
            length: stream.len(),
        });
    }
    if n > 0 {
        let last = labeling.last_label(n)?;
        if last > 0 && last as u64 > primes.limit() {
            return Err(Error::SieveTooSmall {
                needed: last,
                limit: primes.limit(),
            });
        }
    }
    Ok(())
}

/// Per-letter counts over an arbitrary rank range, sequentially.
pub fn count_range(
    stream: &LetterStream,
    labeling: &Labeling,
    primes: &PrimeSet,
    ranks: RangeInclusive<u64>,
) -> Result<Vec<u64>> {
    let (lo, hi) = (*ranks.start(), *ranks.end());
    if lo == 0 {
        return Err(Error::RankOutOfRange {
            rank: 0,
            length: stream.len(),
        });
    }
    check_inputs(stream, labeling, primes, hi)?;
    Ok(count_unchecked(stream, labeling, primes, lo, hi))
}

fn count_unchecked(stream: &LetterStream, labeling: &Labeling, primes: &PrimeSet, lo: u64, hi: u64) -> Vec<u64> {
    let mut counts = vec![0u64; stream.morphism().alphabet().len()];
    for rank in lo..=hi {
        if primes.contains(labeling.label(rank)) {
            counts[stream.letter_unchecked(rank).index()] += 1;
        }
    }
    counts
}

/// Counts primes per letter among ranks `1..=n`, folding rank chunks in parallel.
pub fn discrepancy_at(stream: &LetterStream, labeling: &Labeling, primes: &PrimeSet, n: u64) -> Result<Tally> {
    check_inputs(stream, labeling, primes, n)?;
    let width = stream.morphism().alphabet().len();
    let chunks = n.div_ceil(CHUNK_RANKS);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK_RANKS + 1;
            let hi = ((c + 1) * CHUNK_RANKS).min(n);
            count_unchecked(stream, labeling, primes, lo, hi)
        })
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(Tally {
        n,
        letters: stream.morphism().alphabet().to_vec(),
        counts,
    })
}

/// State at one prime step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub step: u64,
    pub rank: u64,
    pub label: i64,
    pub letter: char,
    pub counts: Vec<u64>,
    pub d: Option<i64>,
    pub normalized_d: Option<f64>,
}

/// Whole-run statistics. Extremes are taken over every rank `x ≤ n`
/// (D is constant between primes), with the first rank attaining them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: u64,
    pub shift: i64,
    pub stride: u64,
    pub letters: Vec<char>,
    pub counts: Vec<u64>,
    pub steps: u64,
    #[serde(rename = "D")]
    pub d: Option<i64>,
    #[serde(rename = "min_D")]
    pub min_d: Option<i64>,
    pub argmin_rank: Option<u64>,
    #[serde(rename = "max_D")]
    pub max_d: Option<i64>,
    pub argmax_rank: Option<u64>,
    /// Extremes over ranks that are not powers of two.
    #[serde(rename = "min_D_off_pow2")]
    pub min_d_off_pow2: Option<i64>,
    #[serde(rename = "max_D_off_pow2")]
    pub max_d_off_pow2: Option<i64>,
    /// Sign changes between consecutive nonzero values of D.
    pub zero_crossings: u64,
    /// D in dispersion units `sqrt(steps)/2`.
    #[serde(rename = "normalized_D")]
    pub normalized_d: Option<f64>,
    /// D in units of `sqrt(steps)`.
    #[serde(rename = "normalized_D_pm1")]
    pub normalized_d_pm1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub checkpoints: Vec<Checkpoint>,
    pub summary: Summary,
}

#[derive(Default)]
struct Extremes {
    min: Option<(i64, u64)>,
    max: Option<(i64, u64)>,
    min_off: Option<i64>,
    max_off: Option<i64>,
}

impl Extremes {
    /// Records value `d` held over ranks `first..=last`.
    fn run(&mut self, d: i64, first: u64, last: u64) {
        if first > last {
            return;
        }
        if self.min.is_none_or(|(m, _)| d < m) {
            self.min = Some((d, first));
        }
        if self.max.is_none_or(|(m, _)| d > m) {
            self.max = Some((d, first));
        }
        if last - first >= 2 || (first..=last).any(|x| !x.is_power_of_two()) {
            self.min_off = Some(self.min_off.map_or(d, |m| m.min(d)));
            self.max_off = Some(self.max_off.map_or(d, |m| m.max(d)));
        }
    }
}

/// Sequential walk over ranks `1..=n` reporting every prime step.
fn for_each_prime<F: FnMut(u64, i64, Letter)>(
    stream: &LetterStream,
    labeling: &Labeling,
    primes: &PrimeSet,
    n: u64,
    mut visit: F,
) {
    for rank in 1..=n {
        let label = labeling.label(rank);
        if primes.contains(label) {
            visit(rank, label, stream.letter_unchecked(rank));
        }
    }
}

/// Prime-by-prime counts with checkpoints at every `every`-th prime and at the last one.
pub fn trajectory(
    stream: &LetterStream,
    labeling: &Labeling,
    primes: &PrimeSet,
    n: u64,
    every: u64,
) -> Result<Trajectory> {
    if n == 0 {
        return Err(Error::InvalidArgument("trajectory needs n ≥ 1".into()));
    }
    if every == 0 {
        return Err(Error::InvalidArgument("checkpoint thinning must be at least 1".into()));
    }
    check_inputs(stream, labeling, primes, n)?;
    let morphism = stream.morphism();
    let letters = morphism.alphabet().to_vec();
    let binary = letters.len() == 2;

    let mut counts = vec![0u64; letters.len()];
    let mut checkpoints = Vec::new();
    let mut pending: Option<Checkpoint> = None;
    let mut extremes = Extremes::default();
    let mut d = 0i64;
    let mut run_start = 1u64;
    let mut last_sign = 0i64;
    let mut crossings = 0u64;
    let mut step = 0u64;

    for_each_prime(stream, labeling, primes, n, |rank, label, letter| {
        counts[letter.index()] += 1;
        step += 1;
        if binary {
            extremes.run(d, run_start, rank - 1);
            d = counts[0] as i64 - counts[1] as i64;
            run_start = rank;
            let sign = d.signum();
            if sign != 0 {
                if last_sign != 0 && sign != last_sign {
                    crossings += 1;
                }
                last_sign = sign;
            }
        }
        let point = Checkpoint {
            step,
            rank,
            label,
            letter: morphism.symbol(letter),
            counts: counts.clone(),
            d: binary.then_some(d),
            normalized_d: if binary { normalized(d, step) } else { None },
        };
        if step.is_multiple_of(every) {
            checkpoints.push(point);
            pending = None;
        } else {
            pending = Some(point);
        }
    });
    if let Some(last) = pending {
        checkpoints.push(last);
    }
    if binary {
        extremes.run(d, run_start, n);
    }

    let final_d = binary.then_some(d);
    let summary = Summary {
        n,
        shift: labeling.start(),
        stride: labeling.stride(),
        letters,
        steps: step,
        d: final_d,
        min_d: extremes.min.map(|m| m.0),
        argmin_rank: extremes.min.map(|m| m.1),
        max_d: extremes.max.map(|m| m.0),
        argmax_rank: extremes.max.map(|m| m.1),
        min_d_off_pow2: extremes.min_off,
        max_d_off_pow2: extremes.max_off,
        zero_crossings: crossings,
        normalized_d: final_d.and_then(|d| normalized(d, step)),
        normalized_d_pm1: final_d.and_then(|d| normalized_pm1(d, step)),
        counts,
    };
    Ok(Trajectory { checkpoints, summary })
}

/// Default thinning: every prime up to 2^16 ranks, every 64th above.
pub fn default_every(n: u64) -> u64 {
    if n <= 1 << 16 {
        1
    } else {
        64
    }
}

/// D and its running extremes at selected prefix lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixPoint {
    pub n: u64,
    pub counts: Vec<u64>,
    pub d: i64,
    /// max of D(x) over 1 ≤ x ≤ n
    pub max_d: i64,
    /// min of D(x) over 1 ≤ x ≤ n
    pub min_d: i64,
}

/// One sequential pass recording [`PrefixPoint`]s at each of `marks` (sorted, ≥ 1).
pub fn prefix_profile(
    stream: &LetterStream,
    labeling: &Labeling,
    primes: &PrimeSet,
    marks: &[u64],
) -> Result<Vec<PrefixPoint>> {
    require_binary(stream)?;
    if marks.windows(2).any(|w| w[0] > w[1]) || marks.first() == Some(&0) {
        return Err(Error::InvalidArgument(
            "prefix marks must be sorted and positive".into(),
        ));
    }
    let Some(&n) = marks.last() else {
        return Ok(Vec::new());
    };
    check_inputs(stream, labeling, primes, n)?;
    let mut counts = [0u64; 2];
    let mut d = 0i64;
    let (mut lo, mut hi) = (0i64, 0i64);
    let mut out = Vec::with_capacity(marks.len());
    let mut next = marks.iter().peekable();
    for rank in 1..=n {
        if primes.contains(labeling.label(rank)) {
            counts[stream.letter_unchecked(rank).index()] += 1;
            d = counts[0] as i64 - counts[1] as i64;
        }
        if rank == 1 {
            lo = d;
            hi = d;
        } else {
            lo = lo.min(d);
            hi = hi.max(d);
        }
        while next.peek() == Some(&&rank) {
            next.next();
            out.push(PrefixPoint {
                n: rank,
                counts: counts.to_vec(),
                d,
                max_d: hi,
                min_d: lo,
            });
        }
    }
    Ok(out)
}

/// One row of the D-by-order table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub k: u32,
    pub n: u64,
    #[serde(rename = "count_A")]
    pub count_a: u64,
    #[serde(rename = "count_B")]
    pub count_b: u64,
    /// D at n = 2^k
    #[serde(rename = "D")]
    pub d: i64,
    /// max of D(x) over 1 ≤ x ≤ 2^k
    #[serde(rename = "max_D")]
    pub max_d: i64,
    pub ratio: Option<f64>,
}

/// D at every prefix `2^k` for `k` in `orders`, from a single sequential pass.
///
/// Each row is recounted independently with the parallel fold of
/// [`discrepancy_at`]; a disagreement is reported as [`Error::Inconsistency`].
pub fn order_table(
    stream: &LetterStream,
    labeling: &Labeling,
    primes: &PrimeSet,
    orders: RangeInclusive<u32>,
) -> Result<Vec<OrderRow>> {
    require_binary(stream)?;
    if stream.morphism().width() != 2 {
        return Err(Error::InvalidArgument("order table needs a width-2 morphism".into()));
    }
    if *orders.end() >= 63 {
        return Err(Error::InvalidArgument(format!("order {} is too large", orders.end())));
    }
    let marks: Vec<u64> = orders.clone().map(|k| 1u64 << k).collect();
    let profile = prefix_profile(stream, labeling, primes, &marks)?;
    orders
        .zip(profile)
        .map(|(k, p)| {
            let recount = discrepancy_at(stream, labeling, primes, p.n)?;
            if recount.counts != p.counts {
                return Err(Error::Inconsistency(format!(
                    "order {k}: sequential pass counted {:?}, parallel fold counted {:?}",
                    p.counts, recount.counts
                )));
            }
            Ok(OrderRow {
                k,
                n: p.n,
                count_a: p.counts[0],
                count_b: p.counts[1],
                d: p.d,
                max_d: p.max_d,
                ratio: ratio(&p.counts),
            })
        })
        .collect()
}

fn require_binary(stream: &LetterStream) -> Result<()> {
    if stream.morphism().is_binary() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "signed discrepancy needs a two-letter alphabet".into(),
        ))
    }
}

/// How often D equals one level over ranks `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelHits {
    pub level: i64,
    /// Ranks x with D(x) = level.
    pub hits: u64,
    /// Maximal runs of consecutive ranks at this level.
    pub visits: u64,
    pub first_rank: Option<u64>,
    pub last_rank: Option<u64>,
    /// Last hit lies below the staleness horizon. A reporting flag only.
    pub apparently_final: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub n: u64,
    pub staleness_horizon: u64,
    pub levels: Vec<LevelHits>,
}

impl Census {
    pub fn level(&self, m: i64) -> Option<&LevelHits> {
        self.levels.iter().find(|l| l.level == m)
    }

    pub fn total_hits(&self) -> u64 {
        self.levels.iter().map(|l| l.hits).sum()
    }
}

/// Fraction of `n` below which a level's last hit counts as stale.
pub const STALENESS_FRACTION: f64 = 0.25;

/// Hit counts per level in `band`, from run lengths between consecutive primes.
pub fn level_crossing_census(
    stream: &LetterStream,
    labeling: &Labeling,
    primes: &PrimeSet,
    n: u64,
    band: RangeInclusive<i64>,
) -> Result<Census> {
    require_binary(stream)?;
    check_inputs(stream, labeling, primes, n)?;
    let horizon = (n as f64 * STALENESS_FRACTION) as u64;
    let mut levels: BTreeMap<i64, LevelHits> = band
        .clone()
        .map(|m| {
            (
                m,
                LevelHits {
                    level: m,
                    hits: 0,
                    visits: 0,
                    first_rank: None,
                    last_rank: None,
                    apparently_final: false,
                },
            )
        })
        .collect();
    let mut record = |d: i64, first: u64, last: u64| {
        if first > last {
            return;
        }
        if let Some(entry) = levels.get_mut(&d) {
            entry.hits += last - first + 1;
            entry.visits += 1;
            entry.first_rank.get_or_insert(first);
            entry.last_rank = Some(last);
        }
    };
    let mut counts = [0u64; 2];
    let mut d = 0i64;
    let mut run_start = 1u64;
    for_each_prime(stream, labeling, primes, n, |rank, _, letter| {
        record(d, run_start, rank - 1);
        counts[letter.index()] += 1;
        d = counts[0] as i64 - counts[1] as i64;
        run_start = rank;
    });
    if n > 0 {
        record(d, run_start, n);
    }
    let levels = levels
        .into_values()
        .map(|mut l| {
            l.apparently_final = l.last_rank.is_some_and(|r| r < horizon);
            l
        })
        .collect();
    Ok(Census {
        n,
        staleness_horizon: horizon,
        levels,
    })
}

/// Bound on |shift| treated as "not too big" for a prefix of length `n`:
/// `max(2^(⌊log2 n⌋ / 2), floor)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftPolicy {
    pub shift_bound: i64,
}

pub const SHIFT_BOUND_FLOOR: i64 = 64;

impl ShiftPolicy {
    pub fn for_length(n: u64) -> Self {
        let order = if n == 0 { 0 } else { 63 - n.leading_zeros() };
        let scaled = 1i64 << (order / 2);
        ShiftPolicy {
            shift_bound: scaled.max(SHIFT_BOUND_FLOOR),
        }
    }

    pub fn check(&self, shift: i64) -> Result<()> {
        if shift.unsigned_abs() > self.shift_bound as u64 {
            Err(Error::ShiftOutOfPolicy {
                shift,
                bound: self.shift_bound,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftRow {
    pub shift: i64,
    pub class: i64,
    pub counts: Vec<u64>,
    pub steps: u64,
    #[serde(rename = "D")]
    pub d: i64,
    #[serde(rename = "normalized_D")]
    pub normalized_d: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftScan {
    pub n: u64,
    pub stride: u64,
    pub policy: ShiftPolicy,
    pub rows: Vec<ShiftRow>,
}

/// One row per shift, in increasing shift order; `class` is the shift mod 6.
pub fn shift_scan(
    stream: &LetterStream,
    primes: &PrimeSet,
    n: u64,
    shifts: RangeInclusive<i64>,
    stride: u64,
    policy: ShiftPolicy,
) -> Result<ShiftScan> {
    require_binary(stream)?;
    let mut rows = Vec::new();
    for shift in shifts {
        policy.check(shift)?;
        let labeling = Labeling::new(shift, stride)?;
        let tally = discrepancy_at(stream, &labeling, primes, n)?;
        let d = tally.d().expect("binary alphabet");
        rows.push(ShiftRow {
            shift,
            class: shift.rem_euclid(6),
            steps: tally.steps(),
            normalized_d: normalized(d, tally.steps()),
            ratio: tally.ratio(),
            counts: tally.counts,
            d,
        });
    }
    Ok(ShiftScan {
        n,
        stride,
        policy,
        rows,
    })
}

/// The four discrepancies compared by the mod-6 parity equality, at orders
/// `2k − 1` and `2k` with shifts `6z + 4` and `6z + 5`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityEquality {
    pub k: u32,
    pub z: i64,
    pub shift4: i64,
    pub shift5: i64,
    /// D at shift 6z+4, order 2k−1
    pub d4_odd: i64,
    /// D at shift 6z+4, order 2k
    pub d4_even: i64,
    /// −D at shift 6z+5, order 2k−1
    pub neg_d5_odd: i64,
    /// −D at shift 6z+5, order 2k
    pub neg_d5_even: i64,
    pub all_equal: bool,
    /// D at shift 6z+4 equals −D at shift 6z+5 at both orders.
    pub mirrored: bool,
}

pub fn parity_equality_check(stream: &LetterStream, primes: &PrimeSet, k: u32, z: i64) -> Result<ParityEquality> {
    require_binary(stream)?;
    if k == 0 {
        return Err(Error::InvalidArgument("order index k must be at least 1".into()));
    }
    if stream.morphism().width() != 2 {
        return Err(Error::InvalidArgument("parity check needs a width-2 morphism".into()));
    }
    let even_len = 1u64
        .checked_shl(2 * k)
        .filter(|&l| 2 * k < 64 && l <= stream.len())
        .ok_or_else(|| Error::RankOutOfRange {
            rank: 1u64.checked_shl(2 * k).unwrap_or(u64::MAX),
            length: stream.len(),
        })?;
    let odd_len = even_len / 2;
    let shift4 = 6 * z + 4;
    let shift5 = 6 * z + 5;
    let d = |shift: i64, n: u64| -> Result<i64> {
        Ok(discrepancy_at(stream, &Labeling::shift(shift), primes, n)?
            .d()
            .expect("binary alphabet"))
    };
    let d4_odd = d(shift4, odd_len)?;
    let d4_even = d(shift4, even_len)?;
    let neg_d5_odd = -d(shift5, odd_len)?;
    let neg_d5_even = -d(shift5, even_len)?;
    Ok(ParityEquality {
        k,
        z,
        shift4,
        shift5,
        d4_odd,
        d4_even,
        neg_d5_odd,
        neg_d5_even,
        all_equal: d4_odd == d4_even && d4_even == neg_d5_odd && neg_d5_odd == neg_d5_even,
        mirrored: d4_odd == neg_d5_odd && d4_even == neg_d5_even,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::Morphism;
    use std::sync::Arc;

    fn phi(n: u64) -> LetterStream {
        LetterStream::new(Arc::new(Morphism::phi()), n)
    }

    #[test]
    fn discrepancy_small_examples() {
        let ps = PrimeSet::new(1 << 12).unwrap();
        let s = phi(1 << 10);
        let t = discrepancy_at(&s, &Labeling::shift(1), &ps, 5).unwrap();
        assert_eq!(t.counts, vec![0, 3]);
        assert_eq!(t.d(), Some(-3));
        let t = discrepancy_at(&s, &Labeling::shift(1), &ps, 1).unwrap();
        assert_eq!(t.counts, vec![0, 0]);
        assert_eq!(t.d(), Some(0));
        assert_eq!(
            discrepancy_at(&s, &Labeling::shift(1), &ps, 1 << 10).unwrap().d(),
            Some(38)
        );
    }

    #[test]
    fn input_errors() {
        let ps = PrimeSet::new(100).unwrap();
        let s = phi(1 << 10);
        assert!(matches!(
            discrepancy_at(&s, &Labeling::shift(1), &ps, 200),
            Err(Error::SieveTooSmall { needed: 200, .. })
        ));
        assert!(matches!(
            discrepancy_at(&phi(8), &Labeling::shift(1), &ps, 9),
            Err(Error::RankOutOfRange { .. })
        ));
        assert!(Labeling::new(1, 0).is_err());
        assert!(trajectory(&s, &Labeling::shift(1), &ps, 16, 0).is_err());
        assert!(trajectory(&s, &Labeling::shift(1), &ps, 0, 1).is_err());
    }

    #[test]
    fn trajectory_n16() {
        let ps = PrimeSet::new(100).unwrap();
        let t = trajectory(&phi(16), &Labeling::shift(1), &ps, 16, 1).unwrap();
        let labels: Vec<i64> = t.checkpoints.iter().map(|c| c.label).collect();
        let letters: String = t.checkpoints.iter().map(|c| c.letter).collect();
        assert_eq!(labels, vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(letters, "BBBAAA");
        assert_eq!(t.summary.d, Some(0));
        assert_eq!(t.summary.min_d, Some(-3));
        assert_eq!(t.summary.argmin_rank, Some(5));
        assert_eq!(t.summary.max_d, Some(0));
        assert_eq!(t.summary.argmax_rank, Some(1));
        assert_eq!(t.summary.zero_crossings, 0);
        assert_eq!(t.summary.steps, 6);
    }

    #[test]
    fn trajectory_other_labelings() {
        let ps = PrimeSet::new(100).unwrap();
        let t = trajectory(&phi(8), &Labeling::shift(0), &ps, 8, 1).unwrap();
        let ranks: Vec<u64> = t.checkpoints.iter().map(|c| c.rank).collect();
        assert_eq!(ranks, vec![3, 4, 6, 8]);
        assert_eq!(t.checkpoints.iter().map(|c| c.letter).collect::<String>(), "BAAB");
        assert_eq!(t.summary.d, Some(0));

        let t = trajectory(&phi(8), &Labeling::new(1, 6).unwrap(), &ps, 8, 1).unwrap();
        assert_eq!(t.summary.steps, 6);
        assert_eq!(t.summary.d, Some(0));

        let t = trajectory(&phi(8), &Labeling::new(1, 4).unwrap(), &ps, 8, 1).unwrap();
        assert_eq!(t.checkpoints.iter().map(|c| c.letter).collect::<String>(), "BABB");
        assert_eq!(t.summary.d, Some(-2));
        let t = trajectory(&phi(8), &Labeling::new(3, 4).unwrap(), &ps, 8, 1).unwrap();
        assert_eq!(t.checkpoints.iter().map(|c| c.letter).collect::<String>(), "ABBBAB");
        assert_eq!(t.summary.d, Some(-2));
        let t = trajectory(&phi(8), &Labeling::new(5, 6).unwrap(), &ps, 8, 1).unwrap();
        assert_eq!(t.checkpoints.iter().map(|c| c.letter).collect::<String>(), "ABBABAB");
        assert_eq!(t.summary.d, Some(-1));
    }

    #[test]
    fn trajectory_without_primes() {
        let ps = PrimeSet::new(100).unwrap();
        let t = trajectory(&phi(16), &Labeling::shift(1), &ps, 1, 1).unwrap();
        assert!(t.checkpoints.is_empty());
        assert_eq!(t.summary.min_d, Some(0));
        assert_eq!(t.summary.normalized_d, None);
    }

    #[test]
    fn thinning_keeps_final_and_exact_extremes() {
        let ps = PrimeSet::new(1 << 12).unwrap();
        let s = phi(1 << 12);
        let full = trajectory(&s, &Labeling::shift(1), &ps, 1 << 12, 1).unwrap();
        let thin = trajectory(&s, &Labeling::shift(1), &ps, 1 << 12, 7).unwrap();
        assert_eq!(full.summary, thin.summary);
        assert_eq!(thin.checkpoints.last(), full.checkpoints.last());
        assert!(thin
            .checkpoints
            .iter()
            .all(|c| c.step % 7 == 0 || c.step == full.summary.steps));
    }

    #[test]
    fn multi_letter_counts() {
        let ps = PrimeSet::new(100).unwrap();
        let s = LetterStream::new(Arc::new(Morphism::z3()), 27);
        let t = discrepancy_at(&s, &Labeling::shift(1), &ps, 9).unwrap();
        // ABCBCACAB at ranks 1..9: primes 2,3,5,7 land on B,C,C,C
        assert_eq!(t.counts, vec![0, 1, 3]);
        assert_eq!(t.d(), None);
        assert_eq!(t.pairwise(), vec![(('A', 'B'), -1), (('A', 'C'), -3), (('B', 'C'), -2)]);
        let traj = trajectory(&s, &Labeling::shift(1), &ps, 9, 1).unwrap();
        assert_eq!(traj.summary.counts, t.counts);
        assert_eq!(traj.summary.min_d, None);
        assert!(traj.checkpoints.iter().all(|c| c.d.is_none()));
    }

    #[test]
    fn census_examples() {
        let ps = PrimeSet::new(1 << 10).unwrap();
        let s = phi(1 << 10);
        let c = level_crossing_census(&s, &Labeling::shift(1), &ps, 1 << 10, -3..=-3).unwrap();
        let l3 = c.level(-3).unwrap();
        assert_eq!(l3.first_rank, Some(5));
        assert_eq!(l3.visits, 1);
        assert_eq!(l3.last_rank, Some(6));

        let c = level_crossing_census(&s, &Labeling::shift(1), &ps, 16, -5..=1).unwrap();
        assert_eq!(c.total_hits(), 16);
        let zero = c.level(0).unwrap();
        assert_eq!(zero.first_rank, Some(1));
        assert_eq!(zero.last_rank, Some(16));
        assert_eq!(c.level(-5).unwrap().hits, 0);
    }

    #[test]
    fn shift_policy_bound() {
        assert_eq!(ShiftPolicy::for_length(1 << 20).shift_bound, 1024);
        assert_eq!(ShiftPolicy::for_length(1 << 10).shift_bound, 64);
        assert_eq!(ShiftPolicy::for_length(1 << 21).shift_bound, 1024);
        assert!(ShiftPolicy::for_length(16).check(-65).is_err());
        assert!(ShiftPolicy::for_length(16).check(-64).is_ok());
    }

    #[test]
    fn shift_scan_rows() {
        let ps = PrimeSet::new(1 << 12).unwrap();
        let s = phi(1 << 10);
        let scan = shift_scan(&s, &ps, 1 << 10, 1..=1, 1, ShiftPolicy::for_length(1 << 10)).unwrap();
        assert_eq!(scan.rows[0].d, 38);
        let scan = shift_scan(&s, &ps, 4, -10..=-10, 1, ShiftPolicy::for_length(4)).unwrap();
        assert_eq!(scan.rows[0].d, 0);
        assert_eq!(scan.rows[0].steps, 0);
        assert_eq!(scan.rows[0].class, 2);
    }

    #[test]
    fn parity_equality_small() {
        let ps = PrimeSet::new(1 << 12).unwrap();
        let s = phi(1 << 10);
        let r = parity_equality_check(&s, &ps, 5, 0).unwrap();
        assert_eq!((r.d4_odd, r.d4_even, r.neg_d5_odd, r.neg_d5_even), (-7, 10, -7, 10));
        assert!(!r.all_equal);
        assert!(r.mirrored);
        let r = parity_equality_check(&s, &ps, 1, 0).unwrap();
        assert_eq!((r.d4_odd, r.d4_even, r.neg_d5_odd, r.neg_d5_even), (-1, 0, -1, 0));
        assert!(parity_equality_check(&s, &ps, 6, 0).is_err());
    }

    #[test]
    fn prefix_profile_tracks_running_max() {
        let ps = PrimeSet::new(1 << 12).unwrap();
        let s = phi(1 << 11);
        let p = prefix_profile(&s, &Labeling::shift(1), &ps, &[5, 16, 1 << 10, 1 << 11]).unwrap();
        assert_eq!(p[0].d, -3);
        assert_eq!(p[0].min_d, -3);
        assert_eq!(p[1].d, 0);
        assert_eq!(p[2].d, 38);
        assert_eq!(p[2].max_d, 38);
        assert_eq!(p[3].d, 51);
        assert_eq!(p[3].max_d, 53);
    }
}
