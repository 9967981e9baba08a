//! Morphic words, prime sieving and prime-letter discrepancies.
//!
//! A uniform morphism such as Thue–Morse `A→AB, B→BA` is iterated from its axiom;
//! the letters of the resulting word are attached to integers by a [`Labeling`],
//! and the primes among those labels are tallied letter by letter.
//!
//! ```
//! use std::sync::Arc;
//! use lsys_primes::{discrepancy_at, Labeling, LetterStream, Morphism, PrimeSet};
//!
//! let stream = LetterStream::new(Arc::new(Morphism::phi()), 1 << 10);
//! let primes = PrimeSet::new(1 << 10).unwrap();
//! let tally = discrepancy_at(&stream, &Labeling::shift(1), &primes, 1 << 10).unwrap();
//! assert_eq!(tally.d(), Some(38));
//! ```

pub mod conjectures;
pub mod discrepancy;
pub mod error;
pub mod io;
pub mod morphism;
pub mod primes;

pub use conjectures::{ConjectureParams, ConjectureReport, Policy, Verdict};
pub use discrepancy::{
    discrepancy_at, level_crossing_census, order_table, parity_equality_check, shift_scan, trajectory, Labeling,
    ShiftPolicy, Tally, Trajectory,
};
pub use error::{Error, Result};
pub use morphism::{Letter, LetterStream, Morphism, MorphismConfig};
pub use primes::PrimeSet;

/// Crate version string written into every output.
pub const TOOL_VERSION: &str = concat!("lsys-primes ", env!("CARGO_PKG_VERSION"));
