//! Auxiliary-sequence criteria for discrete weighted Hardy and Copson
//! inequalities, Redheffer-type parameter conditions, and numerical
//! operator-norm experiments.
//!
//! Every check runs on a finite index range. A passing report means the
//! inequality held on that range to the stated tolerance; it is not a proof.


// `!(x > 0.0)` is deliberate throughout: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod criteria;
pub mod error;
pub mod exponent;
pub mod operator;
pub mod redheffer;
pub mod sequences;
pub mod sum;

pub use error::{Error, Result};
pub use exponent::{conjugate_exponent, ExponentPair, Regime};

/// Seed used by the randomized checks unless one is given explicitly.
pub const DEFAULT_SEED: u64 = 20_240_601;
