//! Core algorithms for studying runs of integers whose greatest prime factor
//! stays small: prime and greatest-prime-factor sieves, exact and asymptotic
//! smooth-number counting, sorted smooth enumeration in log space, consecutive
//! gap statistics, log-space evaluation of the gap bound envelope, a dyadic
//! pigeonhole construction that certifies small gaps at astronomically large
//! heights, and the gcd reduction of a consecutive pair to a coprime
//! `a + b = c` triple with radical and quality.
//!
//! The crate is `no_std` (alloc required); all float transcendentals go
//! through [`numeric`] so results do not depend on a platform libm.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod abc;
pub mod arith;
pub mod bounds;
pub mod error;
pub mod gaps;
pub mod numeric;
pub mod pigeonhole;
pub mod smooth;

pub use error::{Error, Result};

/// Capacity knobs shared by the segmented sieve and the log-space enumerator.
///
/// Both default to 2^24 entries so peak memory stays predictable; raise them
/// explicitly for larger scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum entries in one greatest-prime-factor segment.
    pub segment_len: usize,
    /// Maximum number of values one enumeration call may produce.
    pub enum_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { segment_len: 1 << 24, enum_cap: 1 << 24 }
    }
}
