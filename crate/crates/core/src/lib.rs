//! Exact combinatorics of the generalised random Fibonacci substitution
//!
//! ```text
//! 0 -> 1
//! 1 -> 1^i 0 1^(m-i)   with probability p_i, chosen afresh at every 1
//! ```
//!
//! The crate enumerates the sets `A_n` of inflated words, their factor sets
//! `F_n`, evaluates the exact counting sequences (`l_n`, `d_i`, `|A_n|`) and
//! the entropy sequences derived from them. Everything here is pure and
//! allocation-only, so the crate builds without `std`; the `std` feature only
//! forwards to dependencies and `parallel` splits large set products across
//! rayon workers.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod counting;
pub mod entropy;
mod error;
pub mod factors;
pub mod family;
pub mod inflation;
mod par;
pub mod word;

pub use counting::CountingContext;
pub use entropy::{EntropyReport, EntropyRow};
pub use error::{Error, Result};
pub use factors::{FactorTable, Relation, StabilizationReport};
pub use family::{ChainSample, Params, Sampler};
pub use inflation::{GenerationTable, SupersetB, WindowSlicer};
pub use word::{Word, WordSet};

/// Upper bound on the number of words any single enumeration may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Budget(pub u64);

impl Budget {
    pub const DEFAULT: Budget = Budget(1 << 25);

    pub fn words(self) -> u64 {
        self.0
    }

    pub(crate) fn check(self, predicted: &num_bigint::BigUint) -> Result<()> {
        if *predicted > num_bigint::BigUint::from(self.0) {
            Err(Error::BudgetExceeded {
                predicted: predicted.clone(),
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_u128(self, predicted: u128) -> Result<()> {
        self.check(&num_bigint::BigUint::from(predicted))
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}
