//! Knapsack, subset sum, unbounded knapsack and multidimensional knapsack:
//! ILP encodings, static equivalent instances and dynamic-programming
//! oracles.
//!
//! Every item variable is 0-1, so a row `w·x ≤ C` is the comparison of the
//! points `(x, 0)` and `(0, 1)` of `[−1, 1]^{n+1}` under the weight vector
//! `(w, C)`. Replacing `(w, C)` by an equivalent vector for `Δ = 1` keeps the
//! set of feasible item subsets. The rows are reduced as inequalities, so no
//! slack variable needs to be bounded.

use num_traits::{pow, One, Signed, ToPrimitive, Zero};

use crate::equivvec::reduce_vector;
use crate::exactmath::{ilog2_floor, BitSize, Matrix};
use crate::ilpcore::FeasIlp;
use crate::{Error, Int, IntMatrix, Limits, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnapsackInstance {
    pub weights: Vec<Int>,
    pub profits: Vec<Int>,
    pub capacity: Int,
    pub target: Int,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetSumInstance {
    pub values: Vec<Int>,
    pub target: Int,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnboundedKnapsackInstance {
    pub weights: Vec<Int>,
    pub profits: Vec<Int>,
    pub capacity: Int,
    pub target: Int,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MdKnapsackInstance {
    /// One row per dimension, one column per item.
    pub weight_matrix: IntMatrix,
    pub profits: Vec<Int>,
    pub capacities: Vec<Int>,
    pub target: Int,
}

fn check_items(weights: &[Int], profits: &[Int], capacity: &Int) -> Result<()> {
    if weights.len() != profits.len() {
        return Err(Error::Dimension(format!(
            "{} weights, {} profits",
            weights.len(),
            profits.len()
        )));
    }
    if weights.iter().any(|w| !w.is_positive()) {
        return Err(Error::InvalidInput("weights must be positive".into()));
    }
    if profits.iter().any(Signed::is_negative) {
        return Err(Error::InvalidInput("profits must be nonnegative".into()));
    }
    if capacity.is_negative() {
        return Err(Error::InvalidInput("capacity must be nonnegative".into()));
    }
    Ok(())
}

fn chosen_sum(v: &[Int], chosen: &[bool]) -> Int {
    v.iter()
        .zip(chosen)
        .filter(|(_, &c)| c)
        .map(|(x, _)| x)
        .sum()
}

/// Calls `f` on every 0-1 vector of length `n`, in order of the binary
/// number `x_0 x_1 …`.
fn for_each_subset(n: usize, limit: u64, mut f: impl FnMut(&[bool])) -> Result<()> {
    if n >= 64 || 1u64 << n > limit {
        return Err(Error::budget("item subsets", format!("2^{n}"), limit));
    }
    let mut x = vec![false; n];
    for mask in 0..1u64 << n {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = mask >> (n - 1 - i) & 1 == 1;
        }
        f(&x);
    }
    Ok(())
}

impl KnapsackInstance {
    pub fn validate(&self) -> Result<()> {
        check_items(&self.weights, &self.profits, &self.capacity)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_solution(&self, chosen: &[bool]) -> bool {
        chosen.len() == self.len()
            && chosen_sum(&self.weights, chosen) <= self.capacity
            && chosen_sum(&self.profits, chosen) >= self.target
    }

    /// All feasible item subsets, by scanning the `2^n` candidates.
    pub fn solutions(&self, limit: u64) -> Result<Vec<Vec<bool>>> {
        let mut out = Vec::new();
        for_each_subset(self.len(), limit, |x| {
            if self.is_solution(x) {
                out.push(x.to_vec());
            }
        })?;
        Ok(out)
    }
}

impl BitSize for KnapsackInstance {
    fn bit_size(&self) -> u64 {
        self.weights.bit_size()
            + self.profits.bit_size()
            + self.capacity.bit_size()
            + self.target.bit_size()
    }
}

impl SubsetSumInstance {
    pub fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_positive()) {
            return Err(Error::InvalidInput("values must be positive".into()));
        }
        Ok(())
    }

    pub fn is_solution(&self, chosen: &[bool]) -> bool {
        chosen.len() == self.values.len() && chosen_sum(&self.values, chosen) == self.target
    }

    pub fn solutions(&self, limit: u64) -> Result<Vec<Vec<bool>>> {
        let mut out = Vec::new();
        for_each_subset(self.values.len(), limit, |x| {
            if self.is_solution(x) {
                out.push(x.to_vec());
            }
        })?;
        Ok(out)
    }
}

impl BitSize for SubsetSumInstance {
    fn bit_size(&self) -> u64 {
        self.values.bit_size() + self.target.bit_size()
    }
}

impl UnboundedKnapsackInstance {
    pub fn validate(&self) -> Result<()> {
        check_items(&self.weights, &self.profits, &self.capacity)
    }

    pub fn is_solution(&self, counts: &[Int]) -> bool {
        counts.len() == self.weights.len()
            && counts.iter().all(|c| !c.is_negative())
            && dot(&self.weights, counts) <= self.capacity
            && dot(&self.profits, counts) >= self.target
    }
}

impl BitSize for UnboundedKnapsackInstance {
    fn bit_size(&self) -> u64 {
        self.weights.bit_size()
            + self.profits.bit_size()
            + self.capacity.bit_size()
            + self.target.bit_size()
    }
}

fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl MdKnapsackInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.profits.len();
        if self.weight_matrix.cols() != n || self.weight_matrix.rows() != self.capacities.len() {
            return Err(Error::Dimension(
                "weight matrix, profits and capacities disagree".into(),
            ));
        }
        if self.profits.iter().any(Signed::is_negative)
            || self.capacities.iter().any(Signed::is_negative)
        {
            return Err(Error::InvalidInput(
                "profits and capacities must be nonnegative".into(),
            ));
        }
        if self.weight_matrix.data().iter().any(Signed::is_negative) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.profits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profits.is_empty()
    }

    pub fn is_solution(&self, chosen: &[bool]) -> bool {
        chosen.len() == self.len()
            && self
                .weight_matrix
                .row_iter()
                .zip(&self.capacities)
                .all(|(w, c)| &chosen_sum(w, chosen) <= c)
            && chosen_sum(&self.profits, chosen) >= self.target
    }

    pub fn solutions(&self, limit: u64) -> Result<Vec<Vec<bool>>> {
        let mut out = Vec::new();
        for_each_subset(self.len(), limit, |x| {
            if self.is_solution(x) {
                out.push(x.to_vec());
            }
        })?;
        Ok(out)
    }
}

impl BitSize for MdKnapsackInstance {
    fn bit_size(&self) -> u64 {
        self.weight_matrix.bit_size()
            + self.profits.bit_size()
            + self.capacities.bit_size()
            + self.target.bit_size()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackIlp {
    /// Variables `x_1 … x_n, s_1, s_2`.
    pub ilp: FeasIlp,
    /// `T > Σ p_i`: no subset reaches the target.
    pub trivially_infeasible: bool,
}

/// `Σ w x + s₁ = C`, `Σ p x − s₂ = T` with `x ∈ {0,1}^n`, `s₁ ∈ [0, C]`,
/// `s₂ ∈ [0, max(0, Σp − T)]`.
pub fn knapsack_to_ilp(inst: &KnapsackInstance) -> Result<KnapsackIlp> {
    inst.validate()?;
    let n = inst.len();
    let total: Int = inst.profits.iter().sum();
    let mut rows = vec![inst.weights.clone(), inst.profits.clone()];
    rows[0].extend([Int::one(), Int::zero()]);
    rows[1].extend([Int::zero(), -Int::one()]);
    let mut upper = vec![Int::one(); n];
    upper.push(inst.capacity.clone());
    upper.push((&total - &inst.target).max(Int::zero()));
    let ilp = FeasIlp::from_rows(
        &rows,
        vec![inst.capacity.clone(), inst.target.clone()],
        n + 2,
    )?
    .with_upper(upper)?;
    Ok(KnapsackIlp {
        ilp,
        trivially_infeasible: inst.target > total,
    })
}

/// Reduces `(coeffs, rhs)` for 0-1 variables.
fn reduce_row(coeffs: &[Int], rhs: &Int, limits: &Limits) -> Result<(Vec<Int>, Int)> {
    let mut w = coeffs.to_vec();
    w.push(rhs.clone());
    let mut r = reduce_vector(&w, &Int::one(), limits)?.reduced;
    let b = r.pop().expect("nonempty");
    Ok((r, b))
}

/// `⌊c · n² · log₂(n + 2)⌋` with `c = 16`.
pub fn knapsack_bit_bound(n: usize) -> u64 {
    let n = n as u64;
    ilog2_floor(&pow(Int::from(n + 2), (16 * n * n) as usize))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction<T> {
    pub original: T,
    pub reduced: T,
    pub bits_before: u64,
    pub bits_after: u64,
    pub bits_bound: u64,
}

fn reduction<T: BitSize>(original: T, reduced: T, n: usize) -> Reduction<T> {
    Reduction {
        bits_before: original.bit_size(),
        bits_after: reduced.bit_size(),
        bits_bound: knapsack_bit_bound(n),
        original,
        reduced,
    }
}

/// A knapsack instance with the same feasible item subsets and small
/// coefficients.
pub fn static_equiv_knapsack(
    inst: &KnapsackInstance,
    limits: &Limits,
) -> Result<Reduction<KnapsackInstance>> {
    inst.validate()?;
    let (weights, capacity) = reduce_row(&inst.weights, &inst.capacity, limits)?;
    let (profits, target) = reduce_row(&inst.profits, &inst.target, limits)?;
    let reduced = KnapsackInstance {
        weights,
        profits,
        capacity,
        target,
    };
    Ok(reduction(inst.clone(), reduced, inst.len()))
}

pub fn static_equiv_subsetsum(
    inst: &SubsetSumInstance,
    limits: &Limits,
) -> Result<Reduction<SubsetSumInstance>> {
    inst.validate()?;
    let (values, target) = reduce_row(&inst.values, &inst.target, limits)?;
    let reduced = SubsetSumInstance { values, target };
    Ok(reduction(inst.clone(), reduced, inst.values.len()))
}

/// Reduces every capacity row and the profit row.
pub fn static_equiv_mdknapsack(
    inst: &MdKnapsackInstance,
    limits: &Limits,
) -> Result<Reduction<MdKnapsackInstance>> {
    inst.validate()?;
    let n = inst.len();
    let mut rows = Vec::with_capacity(inst.capacities.len());
    let mut capacities = Vec::with_capacity(inst.capacities.len());
    for (w, c) in inst.weight_matrix.row_iter().zip(&inst.capacities) {
        let (r, b) = reduce_row(w, c, limits)?;
        rows.push(r);
        capacities.push(b);
    }
    let (profits, target) = reduce_row(&inst.profits, &inst.target, limits)?;
    let reduced = MdKnapsackInstance {
        weight_matrix: Matrix::from_rows_with_cols(rows, n)?,
        profits,
        capacities,
        target,
    };
    let mut r = reduction(inst.clone(), reduced, n);
    r.bits_bound *= inst.capacities.len().max(1) as u64;
    Ok(r)
}

/// A 0-1 knapsack instance whose copy `(i, j)` stands for `2^j` units of
/// item `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyExpansion {
    pub knapsack: KnapsackInstance,
    /// `(item, j)` per copy, in item order then increasing `j`.
    pub copies: Vec<(usize, u32)>,
    pub items: usize,
}

impl CopyExpansion {
    /// Multiplicities `x_i = Σ_j 2^j [copy (i, j) chosen]`.
    pub fn multiplicities(&self, chosen: &[bool]) -> Vec<Int> {
        let mut x = vec![Int::zero(); self.items];
        for (&(i, j), _) in self.copies.iter().zip(chosen).filter(|(_, &c)| c) {
            x[i] += Int::one() << j;
        }
        x
    }
}

/// Splits item `i` into copies `j = 0, …, ⌊log₂(C / w_i)⌋` of weight
/// `2^j w_i` and profit `2^j p_i`. Items heavier than `C` are dropped.
pub fn uks_to_knapsack(inst: &UnboundedKnapsackInstance) -> Result<CopyExpansion> {
    inst.validate()?;
    let mut weights = Vec::new();
    let mut profits = Vec::new();
    let mut copies = Vec::new();
    for (i, (w, p)) in inst.weights.iter().zip(&inst.profits).enumerate() {
        if w > &inst.capacity {
            continue;
        }
        let k = ilog2_floor(&(&inst.capacity / w));
        let k = u32::try_from(k).map_err(|_| Error::budget("item copies", k, u32::MAX as u64))?;
        for j in 0..=k {
            weights.push(w << j);
            profits.push(p << j);
            copies.push((i, j));
        }
    }
    Ok(CopyExpansion {
        knapsack: KnapsackInstance {
            weights,
            profits,
            capacity: inst.capacity.clone(),
            target: inst.target.clone(),
        },
        copies,
        items: inst.weights.len(),
    })
}

/// The copy expansion followed by the static knapsack reduction. A solution
/// of the reduced instance maps back through
/// [`CopyExpansion::multiplicities`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UksEquivalent {
    pub expansion: CopyExpansion,
    pub reduction: Reduction<KnapsackInstance>,
}

pub fn equiv_uks(inst: &UnboundedKnapsackInstance, limits: &Limits) -> Result<UksEquivalent> {
    let expansion = uks_to_knapsack(inst)?;
    let reduction = static_equiv_knapsack(&expansion.knapsack, limits)?;
    Ok(UksEquivalent {
        expansion,
        reduction,
    })
}

fn dp_capacity(capacity: &Int, rows: usize, limits: &Limits) -> Result<usize> {
    let c = capacity.to_u64().filter(|c| {
        c.checked_add(1)
            .and_then(|c| c.checked_mul(rows as u64))
            .is_some_and(|cells| cells <= limits.dp_cells)
    });
    match c {
        Some(c) => Ok(c as usize),
        None => Err(Error::budget(
            "dynamic-programming cells",
            format!("{} × ({capacity} + 1)", rows),
            limits.dp_cells,
        )),
    }
}

/// Maximum profit of a 0-1 packing within the capacity, and whether it
/// reaches the target.
pub fn dp_knapsack_oracle(inst: &KnapsackInstance, limits: &Limits) -> Result<(Int, bool)> {
    inst.validate()?;
    let c = dp_capacity(&inst.capacity, inst.len() + 1, limits)?;
    let mut best = vec![Int::zero(); c + 1];
    for (w, p) in inst.weights.iter().zip(&inst.profits) {
        let Some(w) = w.to_usize().filter(|&w| w <= c) else {
            continue;
        };
        for cap in (w..=c).rev() {
            let cand = &best[cap - w] + p;
            if cand > best[cap] {
                best[cap] = cand;
            }
        }
    }
    let max = best[c].clone();
    let ok = max >= inst.target;
    Ok((max, ok))
}

/// Maximum profit when items may be taken any number of times.
pub fn dp_uks_oracle(inst: &UnboundedKnapsackInstance, limits: &Limits) -> Result<Int> {
    inst.validate()?;
    let c = dp_capacity(&inst.capacity, inst.weights.len() + 1, limits)?;
    let mut best = vec![Int::zero(); c + 1];
    for cap in 1..=c {
        let mut v = best[cap - 1].clone();
        for (w, p) in inst.weights.iter().zip(&inst.profits) {
            if let Some(w) = w.to_usize().filter(|&w| w <= cap) {
                let cand = &best[cap - w] + p;
                if cand > v {
                    v = cand;
                }
            }
        }
        best[cap] = v;
    }
    Ok(best[c].clone())
}
