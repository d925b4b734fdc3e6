#![cfg_attr(not(test), no_std)]

//! Exact number-theoretic machinery behind density of polynomial matrix
//! dilations on the torus.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`arith`]: factorization, gcd helpers, power-full / power-free integers.
//! - [`expsum`]: complete rational exponential sums `S_{e,q}(f)`, their
//!   multiplicative evaluation, and the Hua / Weil / power-structure bounds.
//! - [`torus`]: exact rational points on `T^d`, wrap-around distance,
//!   covering radius and ε-density certification.
//! - [`glasner`]: polynomial matrices, pair-denominator histograms, the
//!   bad-set functional, dilation search and the cardinality bound formulas.
//!
//! File formats, the CLI and thread-parallel drivers live in the
//! `glasner-cli` crate.

extern crate alloc;

pub mod arith;
pub mod error;
pub mod expsum;
pub mod glasner;
pub mod rational;
pub mod torus;

pub use error::{Error, Result};
pub use rational::Rat;

/// Work limits for loops whose cost is driven by user input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest modulus summed term by term in a single direct evaluation.
    pub direct_terms: u64,
    /// Cap on the total number of elementary terms in composite evaluations.
    pub total_terms: u64,
}

impl Budget {
    pub const DEFAULT_DIRECT_TERMS: u64 = 100_000_000;
    pub const DEFAULT_TOTAL_TERMS: u64 = 1_000_000_000;

    pub const fn with_total(total_terms: u64) -> Self {
        Budget {
            direct_terms: Self::DEFAULT_DIRECT_TERMS,
            total_terms,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            direct_terms: Self::DEFAULT_DIRECT_TERMS,
            total_terms: Self::DEFAULT_TOTAL_TERMS,
        }
    }
}
