//! Exact integer and rational linear algebra.
//!
//! Everything here is generic over [`ExactInt`], so the same elimination code
//! runs on `i64`/`i128` for speed-sensitive inner loops and on
//! [`num_bigint::BigInt`] wherever magnitudes are unbounded.

mod bits;
mod bounds;
mod det;
mod matrix;

pub use bits::BitSize;
pub use bounds::{ceil_sqrt, equivalent_norm_bound, hadamard_l1_bound, ilog2_floor};
pub use det::{cramer_solve, det, rank, CramerSolution, IndependenceTracker};
pub use matrix::Matrix;

use std::fmt::Debug;
use std::hash::Hash;

use num_integer::{Integer, Roots};
use num_traits::Signed;

/// An exact (non-wrapping in practice) signed integer scalar.
pub trait ExactInt: Clone + Debug + Ord + Hash + Integer + Signed + Roots + From<i32> {}

impl<T> ExactInt for T where T: Clone + Debug + Ord + Hash + Integer + Signed + Roots + From<i32> {}

/// Exact rational over an [`ExactInt`].
pub type Ratio<T> = num_rational::Ratio<T>;

pub(crate) fn gcd_all<T: ExactInt>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |g, x| g.gcd(x))
}

/// Divides a nonzero vector by the gcd of its entries.
pub fn primitive<T: ExactInt>(v: &[T]) -> Vec<T> {
    let g = gcd_all(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x.clone() / g.clone()).collect()
}

pub fn dot<T: ExactInt>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn l1_norm<T: ExactInt>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.abs())
}

pub fn inf_norm<T: ExactInt>(v: &[T]) -> T {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(T::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_divides_by_gcd() {
        assert_eq!(primitive(&[4i64, -6, 0]), vec![2, -3, 0]);
        assert_eq!(primitive(&[0i64, 0]), vec![0, 0]);
        assert_eq!(primitive(&[-3i64]), vec![-1]);
    }

    #[test]
    fn norms() {
        assert_eq!(l1_norm(&[1i64, -2, 3]), 6);
        assert_eq!(inf_norm(&[1i64, -7, 3]), 7);
        assert_eq!(inf_norm::<i64>(&[]), 0);
        assert_eq!(dot(&[1i64, 2], &[3, -4]), -5);
    }
}
