use num_traits::{One, Signed, Zero};

use super::{double_radius, HalfSplit, Relation};
use crate::exactmath::equivalent_norm_bound;
use crate::{Error, Int, Limits, Result};

/// Calls `f` on every integer vector of length `n` with ℓ1-norm exactly
/// `k`, in lexicographic order, until it returns `true`.
fn for_each_with_norm(n: usize, k: i64, f: &mut dyn FnMut(&[i64]) -> bool) -> bool {
    fn rec(v: &mut Vec<i64>, i: usize, rem: i64, f: &mut dyn FnMut(&[i64]) -> bool) -> bool {
        let n = v.len();
        if i + 1 == n {
            for t in if rem == 0 { vec![0] } else { vec![-rem, rem] } {
                v[i] = t;
                if f(v) {
                    return true;
                }
            }
            return false;
        }
        for t in -rem..=rem {
            v[i] = t;
            if rec(v, i + 1, rem - t.abs(), f) {
                return true;
            }
        }
        false
    }
    if n == 0 {
        return k == 0 && f(&[]);
    }
    rec(&mut vec![0; n], 0, k, f)
}

/// Smallest ℓ1-norm of an integer vector equivalent to `w` on `[−Δ, Δ]^N`,
/// by exhaustive search in order of increasing norm over all sign patterns.
pub fn min_equivalent_norm(w: &[Int], delta: &Int, limits: &Limits) -> Result<Int> {
    let r = double_radius(delta)?;
    if w.iter().all(Zero::is_zero) {
        return Ok(Int::zero());
    }
    let n = w.len();
    let hs = HalfSplit::new(w, r, limits.cone)?;
    let cap = equivalent_norm_bound(n, delta);
    let mut checked = 0u64;
    let mut k = Int::one();
    while k <= cap {
        let kk =
            i64::try_from(&k).map_err(|_| Error::budget("candidate norm", &k, i64::MAX as u64))?;
        let mut over = false;
        let found = for_each_with_norm(n, kk, &mut |v| {
            checked += 1;
            if checked > limits.enumeration {
                over = true;
                return true;
            }
            let v: Vec<Int> = v.iter().map(|&x| Int::from(x)).collect();
            let strict_ok = hs
                .minimize(&v, Relation::Positive)
                .is_none_or(|(m, _)| m.is_positive());
            strict_ok
                && hs
                    .minimize(&v, Relation::Zero)
                    .is_none_or(|(m, _)| !m.is_negative())
        });
        if over {
            return Err(Error::budget(
                "equivalent-vector candidates",
                checked,
                limits.enumeration,
            ));
        }
        if found {
            return Ok(k);
        }
        k += 1;
    }
    Err(Error::Inconsistent(format!(
        "no equivalent vector with norm at most {cap}"
    )))
}

#[cfg(test)]
mod tests {
    use super::super::oracle::min_norm_by_scan;
    use super::*;
    use crate::{int, ints};

    #[test]
    fn norm_shells() {
        let mut seen = Vec::new();
        for_each_with_norm(2, 2, &mut |v| {
            seen.push(v.to_vec());
            false
        });
        assert_eq!(seen.len(), 8);
        assert!(seen.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn small_instances() {
        let l = Limits::default();
        assert_eq!(
            min_equivalent_norm(&ints(&[1]), &int(5), &l).unwrap(),
            int(1)
        );
        assert_eq!(
            min_equivalent_norm(&ints(&[1, 2]), &int(2), &l).unwrap(),
            int(3)
        );
        assert_eq!(
            min_equivalent_norm(&ints(&[0, 0]), &int(2), &l).unwrap(),
            int(0)
        );
        for w in [[3, 5], [1, -4], [2, 2], [0, 7]] {
            assert_eq!(
                min_equivalent_norm(&ints(&w), &int(1), &l).unwrap(),
                int(min_norm_by_scan(&w, 1))
            );
        }
    }
}
