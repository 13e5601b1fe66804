use num_traits::{pow, One, Signed, Zero};

use crate::Int;

/// Smallest integer `s` with `s² ≥ n`, for `n ≥ 0`.
pub fn ceil_sqrt(n: &Int) -> Int {
    assert!(!n.is_negative(), "square root of a negative number");
    let s = n.sqrt();
    if &(&s * &s) < n {
        s + 1
    } else {
        s
    }
}

/// `⌊log₂ v⌋` for `v ≥ 1`.
pub fn ilog2_floor(v: &Int) -> u64 {
    assert!(v.is_positive(), "log of a non-positive number");
    v.bits() - 1
}

/// `⌈N (√N a)^(N−1)⌉`, the Hadamard-style ℓ1 bound on a scaled Cramer
/// solution whose matrix has entries bounded by `a`.
pub fn hadamard_l1_bound(n_dim: usize, a_inf: &Int) -> Int {
    assert!(n_dim >= 1);
    let n = Int::from(n_dim);
    let e = n_dim - 1;
    // square of the bound: N² · N^(N−1) · a^(2(N−1))
    let sq = &n * &n * pow(n.clone(), e) * pow(a_inf.clone(), 2 * e);
    ceil_sqrt(&sq)
}

/// `⌈N² (2√N Δ)^(N−1)⌉`, the ℓ1 bound on a minimal equivalent vector.
pub fn equivalent_norm_bound(n_dim: usize, delta: &Int) -> Int {
    if n_dim == 0 {
        return Int::zero();
    }
    let n = Int::from(n_dim);
    let e = n_dim - 1;
    // N⁴ · 4^(N−1) · N^(N−1) · Δ^(2(N−1))
    let sq = pow(n.clone(), 4) * pow(Int::from(4), e) * pow(n, e) * pow(delta.clone(), 2 * e);
    let r = ceil_sqrt(&sq);
    if r.is_zero() {
        Int::one()
    } else {
        r
    }
}
