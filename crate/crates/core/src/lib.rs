//! Equivalent instances for feasibility ILPs, knapsack variants and
//! load balancing on identical machines.
//!
//! The crate compresses an instance into a smaller one that either has
//! exactly the same solution set (a *static* equivalent instance), or whose
//! solutions combine with a recorded pre-solution into exactly the solutions
//! of the original (an *equivalent* instance). Every reduction ships with a
//! brute-force oracle so that claims can be checked at small scale.
//!
//! All arithmetic is exact. The linear algebra in [`exactmath`] is generic
//! over an exact integer scalar; the rest of the crate works with the
//! arbitrary-precision aliases defined here.

pub mod equivvec;
pub mod error;
pub mod exactmath;
pub mod ilpcore;
pub mod ilpreduce;
pub mod knapfam;
pub mod limits;
pub mod lpcore;
pub mod schedbal;

pub use error::{Error, Result};
pub use limits::Limits;

/// Arbitrary-precision integer used for every coefficient.
pub type Int = num_bigint::BigInt;
/// Exact rational in canonical form (positive denominator, reduced).
pub type Rat = num_rational::BigRational;
/// Dense integer matrix.
pub type IntMatrix = exactmath::Matrix<Int>;
/// Integer vector.
pub type IntVector = Vec<Int>;
/// Rational vector.
pub type RatVector = Vec<Rat>;

/// Converts a machine integer into an [`Int`].
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Converts a slice of machine integers into an [`IntVector`].
pub fn ints(v: &[i64]) -> IntVector {
    v.iter().map(|&x| Int::from(x)).collect()
}
