//! Meet-in-the-middle minimization of `v·z` over `z ∈ [−r, r]^n` subject to
//! `u·z > 0` or `u·z = 0`.
//!
//! The coordinates are split into two halves. Each half is enumerated once
//! together with its `u`-value; per query only the `v`-values are
//! recomputed, so repeated queries with a fixed `u` (as in cut separation)
//! cost two linear passes plus table lookups.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::exactmath::ExactInt;
use crate::{Error, Int, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `u·z > 0`
    Positive,
    /// `u·z = 0` (the zero vector included)
    Zero,
}

#[derive(Debug, Clone)]
struct Half<T> {
    start: usize,
    dims: usize,
    alpha: Vec<T>,
}

#[derive(Debug, Clone)]
struct Tables<T> {
    left: Half<T>,
    right: Half<T>,
    /// left indices sorted by alpha, descending
    left_desc: Vec<usize>,
    /// per right entry: how many left entries have alpha > −alpha_right
    above: Vec<usize>,
    /// left entries grouped by alpha
    left_group: Vec<usize>,
    n_groups: usize,
    /// per right entry: the group with alpha = −alpha_right
    partner: Vec<Option<usize>>,
}

/// Precomputed search tables for a fixed `u` and radius.
#[derive(Debug, Clone)]
pub struct HalfSplit {
    n: usize,
    r: i64,
    u: Vec<Int>,
    small: Option<Tables<i128>>,
    big: Option<Tables<BigInt>>,
}

fn count(dims: usize, r: i64) -> Option<u64> {
    (2 * r as u64 + 1).checked_pow(dims as u32)
}

fn digits(mut idx: usize, dims: usize, r: i64, out: &mut [i64]) {
    let base = (2 * r + 1) as usize;
    for k in (0..dims).rev() {
        out[k] = (idx % base) as i64 - r;
        idx /= base;
    }
}

fn half_values<T: ExactInt>(coef: &[T], r: i64) -> Vec<T> {
    let dims = coef.len();
    let total = count(dims, r).unwrap() as usize;
    let mut out = Vec::with_capacity(total);
    let mut z = vec![0i64; dims];
    for idx in 0..total {
        digits(idx, dims, r, &mut z);
        let v = coef.iter().zip(&z).fold(T::zero(), |acc, (c, &d)| {
            if d == 0 {
                acc
            } else {
                acc + c.clone() * T::from(d as i32)
            }
        });
        out.push(v);
    }
    out
}

fn build_tables<T: ExactInt>(u: &[T], r: i64, split: usize) -> Tables<T> {
    let left = Half {
        start: 0,
        dims: split,
        alpha: half_values(&u[..split], r),
    };
    let right = Half {
        start: split,
        dims: u.len() - split,
        alpha: half_values(&u[split..], r),
    };
    let mut left_desc: Vec<usize> = (0..left.alpha.len()).collect();
    left_desc.sort_by(|&i, &j| left.alpha[j].cmp(&left.alpha[i]).then(i.cmp(&j)));
    let sorted_alpha: Vec<&T> = left_desc.iter().map(|&i| &left.alpha[i]).collect();
    let above = right
        .alpha
        .iter()
        .map(|a| {
            let t = -a.clone();
            sorted_alpha.partition_point(|x| **x > t)
        })
        .collect();
    let mut ids: HashMap<T, usize> = HashMap::new();
    let left_group = left
        .alpha
        .iter()
        .map(|a| {
            let next = ids.len();
            *ids.entry(a.clone()).or_insert(next)
        })
        .collect();
    let partner = right
        .alpha
        .iter()
        .map(|a| ids.get(&-a.clone()).copied())
        .collect();
    Tables {
        n_groups: ids.len(),
        left,
        right,
        left_desc,
        above,
        left_group,
        partner,
    }
}

impl<T: ExactInt> Tables<T> {
    fn beta(&self, half: &Half<T>, v: &[T], r: i64) -> Vec<T> {
        half_values(&v[half.start..half.start + half.dims], r)
    }

    fn minimize(&self, v: &[T], r: i64, rel: Relation) -> Option<(T, usize, usize)> {
        let bl = self.beta(&self.left, v, r);
        let br = self.beta(&self.right, v, r);
        let mut best: Option<(T, usize, usize)> = None;
        let mut offer = |val: T, li: usize, ri: usize| {
            if best.as_ref().is_none_or(|(b, _, _)| val < *b) {
                best = Some((val, li, ri));
            }
        };
        match rel {
            Relation::Positive => {
                let mut pref: Vec<(T, usize)> = Vec::with_capacity(bl.len());
                for &i in &self.left_desc {
                    let cand = (bl[i].clone(), i);
                    match pref.last() {
                        Some(p) if p.0 <= cand.0 => pref.push(p.clone()),
                        _ => pref.push(cand),
                    }
                }
                for (ri, &k) in self.above.iter().enumerate() {
                    if k > 0 {
                        let (val, li) = &pref[k - 1];
                        offer(val.clone() + br[ri].clone(), *li, ri);
                    }
                }
            }
            Relation::Zero => {
                let mut gmin: Vec<Option<(T, usize)>> = vec![None; self.n_groups];
                for (i, &g) in self.left_group.iter().enumerate() {
                    if gmin[g].as_ref().is_none_or(|(b, _)| bl[i] < *b) {
                        gmin[g] = Some((bl[i].clone(), i));
                    }
                }
                for (ri, p) in self.partner.iter().enumerate() {
                    if let Some((val, li)) = p.and_then(|g| gmin[g].as_ref()) {
                        offer(val.clone() + br[ri].clone(), *li, ri);
                    }
                }
            }
        }
        best
    }
}

/// Whether every `v·z` and partial sum fits comfortably into an `i128`.
fn fits_i128(v: &[Int], n: usize, r: i64) -> bool {
    let bits = v.iter().map(|x| x.magnitude().bits()).max().unwrap_or(0);
    bits + u64::from(r.unsigned_abs().max(1).ilog2() + 1) + u64::from(n.max(1).ilog2() + 1) + 2
        < 120
}

impl HalfSplit {
    /// Tables for `u` over `[−r, r]^n`. Fails with a budget error when a
    /// half has more than `limit` points.
    pub fn new(u: &[Int], r: i64, limit: u64) -> Result<Self> {
        assert!(r >= 0);
        let n = u.len();
        let split = n / 2;
        let worst = count(n - split, r);
        if worst.is_none_or(|c| c > limit) {
            let needed = worst.map_or_else(
                || format!("({})^{}", 2 * r + 1, n - split),
                |c| c.to_string(),
            );
            return Err(Error::budget("difference vectors per half", needed, limit));
        }
        let (small, big) = if fits_i128(u, n, r) {
            let us: Vec<i128> = u.iter().map(|x| x.to_i128().unwrap()).collect();
            (Some(build_tables(&us, r, split)), None)
        } else {
            (None, Some(build_tables(u, r, split)))
        };
        Ok(HalfSplit {
            n,
            r,
            u: u.to_vec(),
            small,
            big,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> i64 {
        self.r
    }

    pub fn base(&self) -> &[Int] {
        &self.u
    }

    fn assemble(&self, li: usize, ri: usize) -> Vec<i64> {
        let split = self.n / 2;
        let mut z = vec![0i64; self.n];
        digits(li, split, self.r, &mut z[..split]);
        digits(ri, self.n - split, self.r, &mut z[split..]);
        z
    }

    /// Minimum of `v·z` over the points satisfying `rel`, with a minimizer.
    /// `None` when no point satisfies `rel`.
    pub fn minimize(&self, v: &[Int], rel: Relation) -> Option<(Int, Vec<i64>)> {
        assert_eq!(v.len(), self.n);
        if let Some(t) = &self.small {
            if fits_i128(v, self.n, self.r) {
                let vs: Vec<i128> = v.iter().map(|x| x.to_i128().unwrap()).collect();
                return t
                    .minimize(&vs, self.r, rel)
                    .map(|(val, li, ri)| (Int::from(val), self.assemble(li, ri)));
            }
        }
        let owned;
        let t = match &self.big {
            Some(t) => t,
            None => {
                owned = build_tables(&self.u, self.r, self.n / 2);
                &owned
            }
        };
        t.minimize(v, self.r, rel)
            .map(|(val, li, ri)| (val, self.assemble(li, ri)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ints;
    use proptest::prelude::*;

    fn brute(u: &[i64], v: &[i64], r: i64, rel: Relation) -> Option<i64> {
        let n = u.len();
        let total = (2 * r + 1).pow(n as u32) as usize;
        let mut z = vec![0i64; n];
        let mut best = None;
        for idx in 0..total {
            digits(idx, n, r, &mut z);
            let a: i64 = u.iter().zip(&z).map(|(x, y)| x * y).sum();
            let ok = match rel {
                Relation::Positive => a > 0,
                Relation::Zero => a == 0,
            };
            if ok {
                let b: i64 = v.iter().zip(&z).map(|(x, y)| x * y).sum();
                best = Some(best.map_or(b, |c: i64| c.min(b)));
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn matches_full_scan(
            n in 1usize..=4, r in 1i64..=2,
            u in proptest::collection::vec(-4i64..=4, 4),
            v in proptest::collection::vec(-9i64..=9, 4),
        ) {
            let hs = HalfSplit::new(&ints(&u[..n]), r, 1_000_000).unwrap();
            for rel in [Relation::Positive, Relation::Zero] {
                let got = hs.minimize(&ints(&v[..n]), rel);
                let want = brute(&u[..n], &v[..n], r, rel);
                prop_assert_eq!(got.as_ref().map(|g| g.0.clone()), want.map(Int::from));
                if let Some((val, z)) = got {
                    let a: i64 = u.iter().zip(&z).map(|(x, y)| x * y).sum();
                    let b: i64 = v.iter().zip(&z).map(|(x, y)| x * y).sum();
                    prop_assert_eq!(Int::from(b), val);
                    prop_assert!(z.iter().all(|d| d.abs() <= r));
                    match rel {
                        Relation::Positive => prop_assert!(a > 0),
                        Relation::Zero => prop_assert_eq!(a, 0),
                    }
                }
            }
        }
    }

    #[test]
    fn big_values_use_the_exact_path() {
        let big = Int::from(1u128 << 100);
        let u = vec![big.clone(), -big.clone() * 2, Int::from(1)];
        let hs = HalfSplit::new(&u, 2, 1000).unwrap();
        let (val, z) = hs.minimize(&ints(&[0, 0, 1]), Relation::Zero).unwrap();
        assert_eq!(val, Int::from(0));
        assert_eq!(z[2], 0);
        let (val, _) = hs
            .minimize(
                &[Int::from(0), Int::from(0), big.clone()],
                Relation::Positive,
            )
            .unwrap();
        assert_eq!(val, -big * 2);
    }

    #[test]
    fn budget() {
        assert!(HalfSplit::new(&ints(&[1; 8]), 2, 100)
            .unwrap_err()
            .is_budget());
    }
}
