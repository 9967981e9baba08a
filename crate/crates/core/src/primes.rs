//! Segmented sieve of Eratosthenes over odd integers.

use std::io::Write;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Largest sieve limit accepted (2^34).
pub const MAX_SIEVE_LIMIT: u64 = 1 << 34;

pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

pub const MIN_SEGMENT_SIZE: u64 = 1 << 10;

/// Primes up to `limit`, one bit per odd integer (bit `i` stands for `2i + 1`).
#[derive(Clone, Debug)]
pub struct PrimeSet {
    limit: u64,
    segment_size: u64,
    bits: Vec<u64>,
}

impl PrimeSet {
    pub fn new(limit: u64) -> Result<Self> {
        PrimeSet::build(limit, DEFAULT_SEGMENT_SIZE)
    }

    /// Sieves `[2, limit]` in segments of `segment_size` integers.
    ///
    /// Segments are sieved in parallel; the table does not depend on the segment
    /// size or the thread count.
    pub fn build(limit: u64, segment_size: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument(format!("sieve limit {limit} is below 2")));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::Budget {
                what: "prime sieve",
                requested: limit,
                limit: MAX_SIEVE_LIMIT,
            });
        }
        if segment_size < MIN_SEGMENT_SIZE {
            return Err(Error::InvalidArgument(format!(
                "segment size {segment_size} is below {MIN_SEGMENT_SIZE}"
            )));
        }
        // a segment covers a whole number of 64-bit words, i.e. a multiple of 128 integers
        let words_per_segment = segment_size.div_ceil(128) as usize;
        let odd_count = limit.div_ceil(2); // odd integers 1, 3, ..., up to limit
        let word_count = odd_count.div_ceil(64) as usize;

        let base = small_primes(isqrt(limit));
        let mut bits = vec![0u64; word_count];
        bits.par_chunks_mut(words_per_segment)
            .enumerate()
            .for_each(|(seg, chunk)| sieve_segment(chunk, (seg * words_per_segment) as u64 * 64, &base));

        // bit 0 is the integer 1; bits past the limit stay clear
        bits[0] &= !1;
        for i in odd_count..word_count as u64 * 64 {
            bits[(i / 64) as usize] &= !(1 << (i % 64));
        }

        Ok(PrimeSet {
            limit,
            segment_size,
            bits,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_size(&self) -> u64 {
        self.segment_size
    }

    /// Primality of `x`. Values below 2 are not prime; values above the limit are an error.
    pub fn is_prime(&self, x: i64) -> Result<bool> {
        if x > 0 && x as u64 > self.limit {
            return Err(Error::OutOfSieve {
                value: x,
                limit: self.limit,
            });
        }
        Ok(self.contains(x))
    }

    /// Primality for labels already checked against the limit.
    #[inline]
    pub(crate) fn contains(&self, x: i64) -> bool {
        if x < 3 {
            return x == 2;
        }
        let x = x as u64;
        if x.is_multiple_of(2) {
            return false;
        }
        let i = x / 2;
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    /// Number of primes `≤ upto` (clamped to the limit).
    pub fn prime_count(&self, upto: u64) -> u64 {
        let upto = upto.min(self.limit);
        if upto < 2 {
            return 0;
        }
        let last = upto / 2 - (1 - upto % 2); // index of the largest odd ≤ upto
        let full = (last / 64) as usize;
        let mut count: u64 = self.bits[..full].iter().map(|w| w.count_ones() as u64).sum();
        let rem = last % 64 + 1;
        let mask = if rem == 64 { u64::MAX } else { (1u64 << rem) - 1 };
        count += (self.bits[full] & mask).count_ones() as u64;
        count + 1 // the prime 2
    }

    /// All primes in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let odd = self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some((w as u64 * 64 + b) * 2 + 1)
            })
        });
        std::iter::once(2).chain(odd)
    }

    /// SHA-256 of the bit table, for comparing builds.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.limit.to_le_bytes());
        for w in &self.bits {
            hasher.update(w.to_le_bytes());
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Primes among `start + i·stride` for `i in 0..count`, as `(i, value)`.
    pub fn primes_in_progression(
        &self,
        start: i64,
        stride: u64,
        count: u64,
    ) -> Result<impl Iterator<Item = (u64, u64)> + '_> {
        if stride == 0 {
            return Err(Error::InvalidArgument("stride must be at least 1".into()));
        }
        if count > 0 {
            let last = last_label(start, stride, count)?;
            if last > 0 && last as u64 > self.limit {
                return Err(Error::SieveTooSmall {
                    needed: last,
                    limit: self.limit,
                });
            }
        }
        Ok((0..count).filter_map(move |i| {
            let value = start + (i * stride) as i64;
            self.contains(value).then_some((i, value as u64))
        }))
    }

    /// Writes one prime per line.
    pub fn dump<W: Write>(&self, mut out: W) -> Result<()> {
        for p in self.iter() {
            writeln!(out, "{p}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `start + (count − 1)·stride`, checked for overflow.
pub fn last_label(start: i64, stride: u64, count: u64) -> Result<i64> {
    let span = count
        .checked_sub(1)
        .and_then(|c| c.checked_mul(stride))
        .and_then(|s| i64::try_from(s).ok())
        .ok_or_else(|| {
            Error::InvalidArgument(format!("progression of {count} terms with stride {stride} overflows"))
        })?;
    start
        .checked_add(span)
        .ok_or_else(|| Error::InvalidArgument("progression overflows".into()))
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Odd primes up to `n` by a plain sieve.
fn small_primes(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 3..=n {
        if i % 2 == 1 && !composite[i] {
            out.push(i as u64);
            for j in (i * i..=n).step_by(2 * i) {
                composite[j] = true;
            }
        }
    }
    out
}

/// Marks primes in a chunk whose first bit stands for odd integer `2·first_bit + 1`.
fn sieve_segment(chunk: &mut [u64], first_bit: u64, base: &[u64]) {
    chunk.fill(u64::MAX);
    let lo = 2 * first_bit + 1;
    let hi = lo + 2 * (chunk.len() as u64 * 64); // exclusive
    for &p in base {
        if p * p >= hi {
            break;
        }
        // first odd multiple of p that is ≥ max(p², lo)
        let mut m = (p * p).max(lo.div_ceil(p) * p);
        if m % 2 == 0 {
            m += p;
        }
        while m < hi {
            let bit = (m - lo) / 2;
            chunk[(bit / 64) as usize] &= !(1 << (bit % 64));
            m += 2 * p;
        }
    }
}
