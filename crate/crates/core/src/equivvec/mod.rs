//! Equivalent weight vectors.
//!
//! Two vectors `w`, `w̄` are equivalent on `[−Δ, Δ]^N` when they order every
//! pair of points of the box the same way. Writing `z = x − y`, this is the
//! statement that `w·z` and `w̄·z` have the same sign for every
//! `z ∈ [−2Δ, 2Δ]^N`.
//!
//! [`reduce_vector`] computes an equivalent vector of minimum ℓ1-norm. The
//! vectors equivalent to `w` are the integer points of the relative interior
//! of the cone `{x : z·x ≥ 0 for all z with w·z ≥ 0}`; after fixing signs
//! this becomes the integer program
//!
//! ```text
//!   min Σ y   s.t.  z·y ≥ 1  (w·z > 0),   z·y = 0  (w·z = 0),   y ≥ 1
//! ```
//!
//! which is solved by branch and bound with the constraints generated lazily:
//! the most violated `z` is found by a meet-in-the-middle search instead of
//! listing all `(4Δ+1)^N` normals.

mod generators;
mod minimal;
mod mitm;

pub use generators::{enumerate_generators, reduce_vector_generator_sum, GeneratorSum};
pub use minimal::min_equivalent_norm;
pub use mitm::{HalfSplit, Relation};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactmath::{equivalent_norm_bound, l1_norm, primitive};
use crate::ilpcore::{branch_and_bound, CutSource, IntProgram, LinRow};
use crate::{Error, Int, Limits, Rat, Result};

/// The normals `z ∈ [−2Δ, 2Δ]^N \ {0}` with `w·z ≥ 0`, split by whether
/// `w·z` is positive or zero. Both lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivCone {
    pub dim: usize,
    pub radius: Int,
    pub base: Vec<Int>,
    pub strict_normals: Vec<Vec<Int>>,
    pub null_normals: Vec<Vec<Int>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedVector {
    pub original: Vec<Int>,
    pub reduced: Vec<Int>,
    pub radius: Int,
    pub l1_norm: Int,
    pub verified: bool,
}

/// `2Δ` as a machine integer, rejecting `Δ < 1`.
pub(crate) fn double_radius(delta: &Int) -> Result<i64> {
    if delta < &Int::one() {
        return Err(Error::InvalidInput(format!(
            "radius must be at least 1, got {delta}"
        )));
    }
    match (delta * Int::from(2)).to_i64() {
        Some(r) if r <= u32::MAX as i64 => Ok(r),
        _ => Err(Error::budget(
            "difference-vector radius",
            delta * Int::from(2),
            u32::MAX as u64,
        )),
    }
}

pub fn build_cone(w: &[Int], delta: &Int, limits: &Limits) -> Result<EquivCone> {
    let r = double_radius(delta)?;
    let n = w.len();
    let side = 2 * r as u64 + 1;
    let total = side.checked_pow(n as u32).filter(|&t| t <= limits.cone);
    let Some(total) = total else {
        return Err(Error::budget(
            "cone normals",
            format!("{side}^{n}"),
            limits.cone,
        ));
    };
    let mut strict = Vec::new();
    let mut null = Vec::new();
    let mut z = vec![-r; n];
    for _ in 0..total {
        let s: Int = w.iter().zip(&z).map(|(a, &b)| a * b).sum();
        if z.iter().any(|&x| x != 0) {
            if s.is_positive() {
                strict.push(z.iter().map(|&x| Int::from(x)).collect());
            } else if s.is_zero() {
                null.push(z.iter().map(|&x| Int::from(x)).collect());
            }
        }
        for k in (0..n).rev() {
            if z[k] < r {
                z[k] += 1;
                break;
            }
            z[k] = -r;
        }
    }
    Ok(EquivCone {
        dim: n,
        radius: delta.clone(),
        base: w.to_vec(),
        strict_normals: strict,
        null_normals: null,
    })
}

/// A difference vector `z ∈ [−2Δ, 2Δ]^N` on which `w` and `w̄` disagree in
/// sign, or `None` when they are equivalent.
pub fn nonequivalence_witness(
    w: &[Int],
    w_bar: &[Int],
    delta: &Int,
    limits: &Limits,
) -> Result<Option<Vec<Int>>> {
    if w.len() != w_bar.len() {
        return Err(Error::Dimension(format!(
            "vectors of length {} and {}",
            w.len(),
            w_bar.len()
        )));
    }
    let r = double_radius(delta)?;
    if w.is_empty() {
        return Ok(None);
    }
    let hs = HalfSplit::new(w, r, limits.cone)?;
    let as_int = |z: Vec<i64>| z.into_iter().map(Int::from).collect();
    if let Some((v, z)) = hs.minimize(w_bar, Relation::Positive) {
        if !v.is_positive() {
            return Ok(Some(as_int(z)));
        }
    }
    if let Some((v, z)) = hs.minimize(w_bar, Relation::Zero) {
        if v.is_negative() {
            return Ok(Some(as_int(z)));
        }
    }
    Ok(None)
}

pub fn check_equivalent(w: &[Int], w_bar: &[Int], delta: &Int, limits: &Limits) -> Result<bool> {
    Ok(nonequivalence_witness(w, w_bar, delta, limits)?.is_none())
}

/// Separates the cone constraints for the sign-normalized problem.
struct ConeCuts {
    hs: HalfSplit,
    rounds: u64,
}

impl CutSource for ConeCuts {
    fn separate(&mut self, y: &[Rat], _integral: bool) -> Result<Vec<LinRow>> {
        self.rounds += 1;
        let d = y.iter().fold(Int::one(), |acc, v| acc.lcm(v.denom()));
        let scaled: Vec<Int> = y
            .iter()
            .map(|v| (v * Rat::from_integer(d.clone())).to_integer())
            .collect();
        let mut cuts = Vec::new();
        if let Some((v, z)) = self.hs.minimize(&scaled, Relation::Positive) {
            if v < d {
                let z: Vec<Int> = primitive(&z.into_iter().map(Int::from).collect::<Vec<_>>());
                cuts.push(LinRow::ge(z, Int::one()));
            }
        }
        if let Some((v, z)) = self.hs.minimize(&scaled, Relation::Zero) {
            if v.is_negative() {
                let z: Vec<Int> = primitive(&z.into_iter().map(Int::from).collect::<Vec<_>>());
                cuts.push(LinRow::eq(z, Int::zero()));
            }
        }
        Ok(cuts)
    }
}

/// Minimum-ℓ1 positive vector equivalent to the positive vector `a`.
fn reduce_positive(a: &[Int], delta: &Int, limits: &Limits) -> Result<Vec<Int>> {
    let s = a.len();
    if s <= 1 {
        return Ok(vec![Int::one(); s]);
    }
    let r = double_radius(delta)?;
    let hs = HalfSplit::new(a, r, limits.cone)?;
    let cap = equivalent_norm_bound(s, delta);

    // adjacent pairs in sorted order give cheap initial rows
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&i, &j| a[i].cmp(&a[j]).then(i.cmp(&j)));
    let mut rows = Vec::new();
    for p in order.windows(2) {
        let mut z = vec![Int::zero(); s];
        z[p[1]] = Int::one();
        z[p[0]] = -Int::one();
        rows.push(if a[p[0]] == a[p[1]] {
            LinRow::eq(z, Int::zero())
        } else {
            LinRow::ge(z, Int::one())
        });
    }
    let prog = IntProgram {
        lower: vec![Some(Int::one()); s],
        upper: vec![Some(cap.clone()); s],
        rows,
        objective: vec![Int::one(); s],
    };
    let mut cuts = ConeCuts { hs, rounds: 0 };
    match branch_and_bound(&prog, &mut cuts, limits.nodes)? {
        Some(y) => Ok(y),
        None => Err(Error::Inconsistent(format!(
            "no equivalent vector with entries at most {cap}"
        ))),
    }
}

/// The minimum-ℓ1 vector equivalent to `w` on `[−Δ, Δ]^N`. Signs (and zero
/// entries) of `w` are kept.
pub fn reduce_vector(w: &[Int], delta: &Int, limits: &Limits) -> Result<ReducedVector> {
    double_radius(delta)?;
    let support: Vec<usize> = (0..w.len()).filter(|&i| !w[i].is_zero()).collect();
    let a: Vec<Int> = support.iter().map(|&i| w[i].abs()).collect();
    let y = reduce_positive(&a, delta, limits)?;
    let mut reduced = vec![Int::zero(); w.len()];
    for (k, &i) in support.iter().enumerate() {
        reduced[i] = if w[i].is_negative() {
            -y[k].clone()
        } else {
            y[k].clone()
        };
    }
    let verified = check_equivalent(w, &reduced, delta, limits)?;
    if !verified {
        return Err(Error::Inconsistent(format!(
            "{reduced:?} is not equivalent to {w:?}"
        )));
    }
    Ok(ReducedVector {
        original: w.to_vec(),
        l1_norm: l1_norm(&reduced),
        reduced,
        radius: delta.clone(),
        verified,
    })
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Full scan over `[−2Δ, 2Δ]^N`.
    pub fn equivalent_by_scan(w: &[i64], wb: &[i64], delta: i64) -> bool {
        let n = w.len();
        let r = 2 * delta;
        let mut z = vec![-r; n];
        loop {
            let a: i64 = w.iter().zip(&z).map(|(x, y)| x * y).sum();
            let b: i64 = wb.iter().zip(&z).map(|(x, y)| x * y).sum();
            if a.signum() != b.signum() {
                return false;
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return true;
                }
                k -= 1;
                if z[k] < r {
                    z[k] += 1;
                    break;
                }
                z[k] = -r;
            }
        }
    }

    /// Smallest ℓ1-norm over all integer vectors, by increasing-norm scan.
    pub fn min_norm_by_scan(w: &[i64], delta: i64) -> i64 {
        let n = w.len();
        for k in 0.. {
            let mut found = false;
            let mut v = vec![-k; n];
            loop {
                if v.iter().map(|x| x.abs()).sum::<i64>() == k && equivalent_by_scan(w, &v, delta) {
                    found = true;
                    break;
                }
                let mut j = n;
                let mut done = true;
                while j > 0 {
                    j -= 1;
                    if v[j] < k {
                        v[j] += 1;
                        done = false;
                        break;
                    }
                    v[j] = -k;
                }
                if done {
                    break;
                }
            }
            if found {
                return k;
            }
        }
        unreachable!()
    }
}
