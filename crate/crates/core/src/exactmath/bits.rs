use num_bigint::BigInt;
use num_rational::BigRational;

use super::Matrix;

/// Encoding length in bits. A scalar `v` costs `1 + ⌈log₂(|v|+1)⌉`, that
/// is, a sign bit plus the binary length of `|v|` (so `0` costs one bit).
/// Compound values sum over their scalars.
pub trait BitSize {
    fn bit_size(&self) -> u64;
}

impl BitSize for BigInt {
    fn bit_size(&self) -> u64 {
        1 + self.magnitude().bits()
    }
}

impl BitSize for BigRational {
    fn bit_size(&self) -> u64 {
        self.numer().bit_size() + self.denom().bit_size()
    }
}

impl<T: BitSize> BitSize for [T] {
    fn bit_size(&self) -> u64 {
        self.iter().map(BitSize::bit_size).sum()
    }
}

impl<T: BitSize> BitSize for Vec<T> {
    fn bit_size(&self) -> u64 {
        self.as_slice().bit_size()
    }
}

impl<T: BitSize> BitSize for Option<T> {
    fn bit_size(&self) -> u64 {
        self.as_ref().map_or(0, BitSize::bit_size)
    }
}

impl<T: BitSize + Clone> BitSize for Matrix<T> {
    fn bit_size(&self) -> u64 {
        self.data().bit_size()
    }
}
