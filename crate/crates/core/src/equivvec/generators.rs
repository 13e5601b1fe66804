use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::{build_cone, check_equivalent};
use crate::exactmath::{
    cramer_solve, hadamard_l1_bound, l1_norm, primitive, IndependenceTracker, Matrix,
};
use crate::{Error, Int, IntMatrix, Limits, Result};

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k.min(n));
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// A generating set of the cone `{x : a x ≥ 0}`, one primitive vector per
/// direction, sorted.
///
/// Candidates come from every `N` linearly independent rows `B` of `(a; I)`
/// and every right-hand side `±e_j`: the Cramer solution of `B v = ±e_j`
/// scaled by `|det B|`. A candidate is kept when it lies in the cone. Each
/// scaled candidate is checked against the Hadamard ℓ1 bound.
pub fn enumerate_generators(a: &IntMatrix, limits: &Limits) -> Result<Vec<Vec<Int>>> {
    let n = a.cols();
    if n == 0 {
        return Ok(Vec::new());
    }
    let stacked = a.vstack(&Matrix::identity(n))?;
    let total = stacked.rows();
    let subsets = binomial(total as u64, n as u64).and_then(|c| c.checked_mul(2 * n as u64));
    match subsets {
        Some(s) if s <= limits.cone => {}
        _ => {
            return Err(Error::budget(
                "generator candidates",
                subsets.map_or_else(|| "overflow".to_string(), |s| s.to_string()),
                limits.cone,
            ))
        }
    }
    let bound = hadamard_l1_bound(n, &a.inf_norm().max(Int::from(1)));
    let mut out = BTreeSet::new();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let b = stacked.select_rows(&pick);
        for j in 0..n {
            for sign in [1, -1] {
                let mut rhs = vec![Int::zero(); n];
                rhs[j] = Int::from(sign);
                let sol = match cramer_solve(&b, &rhs) {
                    Ok(s) => s,
                    Err(Error::Singular) => break,
                    Err(e) => return Err(e),
                };
                if l1_norm(&sol.scaled) > bound {
                    return Err(Error::Inconsistent(format!(
                        "generator {:?} exceeds the Hadamard bound {bound}",
                        sol.scaled
                    )));
                }
                if a.mul_vec(&sol.scaled)?.iter().all(|x| !x.is_negative()) {
                    out.insert(primitive(&sol.scaled));
                }
            }
        }
        if !next_combination(&mut pick, total) {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

/// Outcome of summing a maximal independent set of cone generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSum {
    pub vector: Vec<Int>,
    pub generators: Vec<Vec<Int>>,
    /// The independent generators that were summed, in canonical order.
    pub chosen: Vec<Vec<Int>>,
    /// Whether the sum is equivalent to the input vector.
    pub equivalent: bool,
}

/// Builds the cone of vectors weakly ordering like `w`, enumerates its
/// generators and sums a maximal linearly independent subset picked
/// greedily in canonical order. The result is checked, not assumed,
/// to be equivalent to `w`.
pub fn reduce_vector_generator_sum(
    w: &[Int],
    delta: &Int,
    limits: &Limits,
) -> Result<GeneratorSum> {
    let n = w.len();
    let cone = build_cone(w, delta, limits)?;
    let normals: BTreeSet<Vec<Int>> = cone
        .strict_normals
        .iter()
        .chain(&cone.null_normals)
        .map(|z| primitive(z))
        .collect();
    let a = Matrix::from_rows_with_cols(normals.into_iter().collect(), n)?;
    let generators = enumerate_generators(&a, limits)?;
    let mut tracker = IndependenceTracker::new(n);
    let mut chosen = Vec::new();
    for g in &generators {
        if tracker.insert(g) {
            chosen.push(g.clone());
        }
        if tracker.is_full() {
            break;
        }
    }
    let mut vector = vec![Int::zero(); n];
    for g in &chosen {
        for (x, y) in vector.iter_mut().zip(g) {
            *x += y;
        }
    }
    let equivalent = check_equivalent(w, &vector, delta, limits)?;
    Ok(GeneratorSum {
        vector,
        generators,
        chosen,
        equivalent,
    })
}
