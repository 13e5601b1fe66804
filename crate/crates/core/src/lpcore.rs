//! Exact rational linear programming.
//!
//! [`Simplex`] is a bounded-variable simplex engine over general-form rows
//! `lo ≤ a·x ≤ hi`. Each row gets a logical variable equal to its activity,
//! so every constraint is a variable bound and the tableau only ever holds
//! `∂x_basic/∂x_nonbasic`. Values are kept explicitly and are exact.
//!
//! The primal method follows Bland's rule: the lowest-index eligible
//! variable enters, ties in the ratio test go to the lowest index. The dual
//! method lets the most infeasible basic variable leave and breaks ratio
//! ties by the largest pivot, then switches to Bland's rule after a fixed
//! number of pivots. Runs are deterministic.
//!
//! [`solve_vertex`] is the standard-form front end (`Ax = b`, `0 ≤ x ≤ u`).

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::exactmath::Matrix;
use crate::{Error, Int, IntMatrix, Rat, Result};

const PIVOT_LIMIT: u64 = 5_000_000;
const BLAND_AFTER: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Place {
    Basic(usize),
    Nonbasic(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Bounded-variable simplex over `n` structural variables plus one logical
/// variable per row. Cloning is cheap enough to snapshot between solves.
#[derive(Debug, Clone)]
pub struct Simplex {
    n_struct: usize,
    lo: Vec<Option<Rat>>,
    hi: Vec<Option<Rat>>,
    cost: Vec<Rat>,
    value: Vec<Rat>,
    place: Vec<Place>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    tab: Vec<Vec<Rat>>,
    d: Vec<Rat>,
    pivots: u64,
}

impl Simplex {
    /// Structural variables with the given bounds and costs (minimized).
    pub fn new(lo: Vec<Option<Rat>>, hi: Vec<Option<Rat>>, cost: Vec<Rat>) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n || cost.len() != n {
            return Err(Error::Dimension(
                "bound and cost vectors differ in length".into(),
            ));
        }
        for j in 0..n {
            if let (Some(l), Some(h)) = (&lo[j], &hi[j]) {
                if l > h {
                    return Err(Error::InvalidInput(format!(
                        "variable {j} has lower > upper"
                    )));
                }
            }
        }
        let mut s = Simplex {
            n_struct: n,
            lo,
            hi,
            value: vec![Rat::zero(); n],
            place: (0..n).map(Place::Nonbasic).collect(),
            basis: Vec::new(),
            nonbasic: (0..n).collect(),
            tab: Vec::new(),
            d: cost.clone(),
            cost,
            pivots: 0,
        };
        for j in 0..n {
            s.value[j] = s.resting_value(j, &s.d[j].clone(), false);
        }
        Ok(s)
    }

    pub fn num_structural(&self) -> usize {
        self.n_struct
    }

    pub fn num_rows(&self) -> usize {
        self.basis.len()
    }

    /// Adds `lo ≤ coeffs·x ≤ hi` over the structural variables. Dual
    /// feasibility of the current basis is preserved, so a following
    /// [`Simplex::solve`] warm-starts with the dual method.
    pub fn add_row(&mut self, coeffs: &[Rat], lo: Option<Rat>, hi: Option<Rat>) -> Result<usize> {
        if coeffs.len() != self.n_struct {
            return Err(Error::Dimension(format!(
                "row with {} coefficients for {} variables",
                coeffs.len(),
                self.n_struct
            )));
        }
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                return Err(Error::InvalidInput("row has lower > upper".into()));
            }
        }
        let mut row = vec![Rat::zero(); self.nonbasic.len()];
        let mut val = Rat::zero();
        for (j, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            val += a * &self.value[j];
            match self.place[j] {
                Place::Basic(r) => {
                    for (x, t) in row.iter_mut().zip(&self.tab[r]) {
                        if !t.is_zero() {
                            *x += a * t;
                        }
                    }
                }
                Place::Nonbasic(c) => row[c] += a,
            }
        }
        let var = self.value.len();
        self.lo.push(lo);
        self.hi.push(hi);
        self.cost.push(Rat::zero());
        self.value.push(val);
        self.place.push(Place::Basic(self.basis.len()));
        self.basis.push(var);
        self.tab.push(row);
        Ok(self.basis.len() - 1)
    }

    /// Replaces the bounds of structural variable `j`.
    pub fn set_bounds(&mut self, j: usize, lo: Option<Rat>, hi: Option<Rat>) -> Result<()> {
        if j >= self.n_struct {
            return Err(Error::Dimension(format!("no structural variable {j}")));
        }
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                return Err(Error::InvalidInput(format!(
                    "variable {j} has lower > upper"
                )));
            }
        }
        let was_hi = self.hi[j].as_ref() == Some(&self.value[j]);
        self.lo[j] = lo;
        self.hi[j] = hi;
        if let Place::Nonbasic(c) = self.place[j] {
            let dj = self.d[c].clone();
            let target = self.resting_value(j, &dj, was_hi);
            let delta = &target - &self.value[j];
            if !delta.is_zero() {
                self.shift_nonbasic(c, &delta);
            }
            self.value[j] = target;
        }
        Ok(())
    }

    /// Where a nonbasic variable should sit given its reduced cost.
    fn resting_value(&self, j: usize, dj: &Rat, prefer_hi: bool) -> Rat {
        let (lo, hi) = (&self.lo[j], &self.hi[j]);
        let pick = if dj.is_positive() {
            lo.as_ref().or(hi.as_ref())
        } else if dj.is_negative() || prefer_hi {
            hi.as_ref().or(lo.as_ref())
        } else {
            lo.as_ref().or(hi.as_ref())
        };
        pick.cloned().unwrap_or_else(Rat::zero)
    }

    fn shift_nonbasic(&mut self, c: usize, delta: &Rat) {
        for r in 0..self.basis.len() {
            let t = &self.tab[r][c];
            if !t.is_zero() {
                let b = self.basis[r];
                self.value[b] = &self.value[b] + t * delta;
            }
        }
    }

    pub fn bounds(&self, j: usize) -> (Option<&Rat>, Option<&Rat>) {
        (self.lo[j].as_ref(), self.hi[j].as_ref())
    }

    pub fn values(&self) -> &[Rat] {
        &self.value[..self.n_struct]
    }

    pub fn value(&self, j: usize) -> &Rat {
        &self.value[j]
    }

    pub fn objective(&self) -> Rat {
        self.cost
            .iter()
            .zip(&self.value)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| c * v)
            .sum()
    }

    /// Structural variables currently in the basis, ascending.
    pub fn basic_structurals(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .basis
            .iter()
            .copied()
            .filter(|&v| v < self.n_struct)
            .collect();
        set.into_iter().collect()
    }

    pub fn pivot_count(&self) -> u64 {
        self.pivots
    }

    /// Bland's rule takes over after this many pivots, which rules out
    /// cycling.
    fn bland_mode(&self) -> bool {
        self.pivots >= BLAND_AFTER
    }

    fn fixed(&self, j: usize) -> bool {
        matches!((&self.lo[j], &self.hi[j]), (Some(l), Some(h)) if l == h)
    }

    fn can_increase(&self, j: usize) -> bool {
        self.hi[j].as_ref().is_none_or(|h| &self.value[j] < h)
    }

    fn can_decrease(&self, j: usize) -> bool {
        self.lo[j].as_ref().is_none_or(|l| &self.value[j] > l)
    }

    fn dual_feasible(&self) -> bool {
        self.nonbasic.iter().enumerate().all(|(c, &j)| {
            if self.fixed(j) || self.d[c].is_zero() {
                true
            } else if self.d[c].is_positive() {
                !self.can_decrease(j)
            } else {
                !self.can_increase(j)
            }
        })
    }

    fn recompute_reduced_costs(&mut self) {
        for c in 0..self.nonbasic.len() {
            let mut v = self.cost[self.nonbasic[c]].clone();
            for (r, &b) in self.basis.iter().enumerate() {
                if !self.cost[b].is_zero() && !self.tab[r][c].is_zero() {
                    v += &self.cost[b] * &self.tab[r][c];
                }
            }
            self.d[c] = v;
        }
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > PIVOT_LIMIT {
            return Err(Error::budget("simplex pivots", self.pivots, PIVOT_LIMIT));
        }
        let p = self.tab[r][c].clone();
        let inv = Rat::one() / &p;
        let ncols = self.nonbasic.len();
        let mut prow: Vec<Rat> = self.tab[r].iter().map(|t| -(t * &inv)).collect();
        prow[c] = inv.clone();
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for k in 0..ncols {
                if k == c {
                    row[k] = &f * &inv;
                } else if !prow[k].is_zero() {
                    row[k] = &row[k] + &f * &prow[k];
                }
            }
        }
        let dc = self.d[c].clone();
        if !dc.is_zero() {
            for k in 0..ncols {
                if k == c {
                    self.d[k] = &dc * &inv;
                } else if !prow[k].is_zero() {
                    self.d[k] = &self.d[k] + &dc * &prow[k];
                }
            }
        }
        self.tab[r] = prow;
        let (leaving, entering) = (self.basis[r], self.nonbasic[c]);
        self.basis[r] = entering;
        self.nonbasic[c] = leaving;
        self.place[entering] = Place::Basic(r);
        self.place[leaving] = Place::Nonbasic(c);
        Ok(())
    }

    /// Moves nonbasic column `c` by `delta` and updates all basic values.
    fn step(&mut self, c: usize, delta: &Rat) {
        self.shift_nonbasic(c, delta);
        let j = self.nonbasic[c];
        self.value[j] = &self.value[j] + delta;
    }

    /// Dual simplex. Returns `false` when the rows are infeasible.
    fn dual_simplex(&mut self) -> Result<bool> {
        loop {
            let bland = self.bland_mode();
            // (row, variable, bound, increase, violation)
            let mut leave: Option<(usize, usize, Rat, bool, Rat)> = None;
            for (r, &b) in self.basis.iter().enumerate() {
                let below = self.lo[b]
                    .as_ref()
                    .filter(|l| &self.value[b] < *l)
                    .map(|l| (l.clone(), true, l - &self.value[b]));
                let above = self.hi[b]
                    .as_ref()
                    .filter(|h| &self.value[b] > *h)
                    .map(|h| (h.clone(), false, &self.value[b] - h));
                let Some((bound, inc, viol)) = below.or(above) else {
                    continue;
                };
                let better = match &leave {
                    None => true,
                    Some((_, lb, _, _, _)) if bland => b < *lb,
                    Some((_, lb, _, _, lv)) => viol > *lv || (viol == *lv && b < *lb),
                };
                if better {
                    leave = Some((r, b, bound, inc, viol));
                }
            }
            let Some((r, b, target, increase, _)) = leave else {
                return Ok(true);
            };
            let mut best: Option<(Rat, usize, usize)> = None;
            for (c, &j) in self.nonbasic.iter().enumerate() {
                let a = &self.tab[r][c];
                if a.is_zero() || self.fixed(j) {
                    continue;
                }
                let up = a.is_positive() == increase;
                let ok = if up {
                    self.can_increase(j)
                } else {
                    self.can_decrease(j)
                };
                if !ok {
                    continue;
                }
                let ratio = self.d[c].abs() / a.abs();
                let better = match &best {
                    None => true,
                    Some((br, bc, bj)) => {
                        ratio < *br
                            || (ratio == *br
                                && if bland {
                                    j < *bj
                                } else {
                                    let (x, y) = (a.abs(), self.tab[r][*bc].abs());
                                    x > y || (x == y && j < *bj)
                                })
                    }
                };
                if better {
                    best = Some((ratio, c, j));
                }
            }
            let Some((_, c, _)) = best else {
                return Ok(false);
            };
            let theta = (&target - &self.value[b]) / &self.tab[r][c];
            self.step(c, &theta);
            self.value[b] = target;
            self.pivot(r, c)?;
        }
    }

    /// Primal simplex from a primal feasible basis.
    fn primal_simplex(&mut self) -> Result<LpStatus> {
        loop {
            let mut enter: Option<(usize, usize)> = None;
            for (c, &j) in self.nonbasic.iter().enumerate() {
                if self.fixed(j) || enter.is_some_and(|(_, bj)| bj < j) {
                    continue;
                }
                let dc = &self.d[c];
                if (dc.is_negative() && self.can_increase(j))
                    || (dc.is_positive() && self.can_decrease(j))
                {
                    enter = Some((c, j));
                }
            }
            let Some((c, j)) = enter else {
                return Ok(LpStatus::Optimal);
            };
            let up = self.d[c].is_negative();
            // (step length, leaving row or None for a bound flip, leaving var, bound)
            let mut best: Option<(Rat, Option<usize>, usize, Rat)> = None;
            let own = if up { &self.hi[j] } else { &self.lo[j] };
            if let Some(bound) = own {
                let t = (bound - &self.value[j]).abs();
                best = Some((t, None, j, bound.clone()));
            }
            for (r, &b) in self.basis.iter().enumerate() {
                let a = &self.tab[r][c];
                if a.is_zero() {
                    continue;
                }
                let rises = a.is_positive() == up;
                let bound = if rises { &self.hi[b] } else { &self.lo[b] };
                let Some(bound) = bound else { continue };
                let t = (bound - &self.value[b]).abs() / a.abs();
                let better = match &best {
                    None => true,
                    Some((bt, brow, bv, _)) => t < *bt || (t == *bt && brow.is_some() && b < *bv),
                };
                if better {
                    best = Some((t, Some(r), b, bound.clone()));
                }
            }
            let Some((t, row, leaving, bound)) = best else {
                return Ok(LpStatus::Unbounded);
            };
            let delta = if up { t } else { -t };
            self.step(c, &delta);
            self.value[leaving] = bound;
            if let Some(r) = row {
                self.pivot(r, c)?;
            }
        }
    }

    /// Optimizes from the current state. Uses the dual method directly when
    /// the basis is dual feasible, otherwise a zero-cost dual phase to reach
    /// feasibility followed by the primal method.
    pub fn solve(&mut self) -> Result<LpStatus> {
        if self.dual_feasible() {
            return Ok(if self.dual_simplex()? {
                LpStatus::Optimal
            } else {
                LpStatus::Infeasible
            });
        }
        for x in &mut self.d {
            *x = Rat::zero();
        }
        if !self.dual_simplex()? {
            self.recompute_reduced_costs();
            return Ok(LpStatus::Infeasible);
        }
        self.recompute_reduced_costs();
        self.primal_simplex()
    }
}

/// `min objective·x  s.t.  a x = b,  0 ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardLp {
    pub a: IntMatrix,
    pub b: Vec<Int>,
    pub upper: Option<Vec<Int>>,
    pub objective: Option<Vec<Int>>,
}

impl StandardLp {
    pub fn new(a: IntMatrix, b: Vec<Int>) -> Self {
        StandardLp {
            a,
            b,
            upper: None,
            objective: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.cols();
        if self.b.len() != self.a.rows() {
            return Err(Error::Dimension(format!(
                "{} right-hand sides for {} rows",
                self.b.len(),
                self.a.rows()
            )));
        }
        if let Some(u) = &self.upper {
            if u.len() != n {
                return Err(Error::Dimension("upper bound length".into()));
            }
            if u.iter().any(Signed::is_negative) {
                return Err(Error::InvalidInput("negative upper bound".into()));
            }
        }
        if self.objective.as_ref().is_some_and(|c| c.len() != n) {
            return Err(Error::Dimension("objective length".into()));
        }
        Ok(())
    }
}

/// A basic solution. Nonbasic variables sit at a bound (zero when no upper
/// bounds are given), so without upper bounds the support is inside `basis`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpVertex {
    pub values: Vec<Rat>,
    pub basis: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpVertex),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn vertex(&self) -> Option<&LpVertex> {
        match self {
            LpOutcome::Optimal(v) => Some(v),
            _ => None,
        }
    }
}

pub fn solve_vertex(lp: &StandardLp) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.a.cols();
    let lo = vec![Some(Rat::zero()); n];
    let hi = match &lp.upper {
        Some(u) => u
            .iter()
            .map(|x| Some(Rat::from_integer(x.clone())))
            .collect(),
        None => vec![None; n],
    };
    let cost = match &lp.objective {
        Some(c) => c.iter().map(|x| Rat::from_integer(x.clone())).collect(),
        None => vec![Rat::zero(); n],
    };
    let mut s = Simplex::new(lo, hi, cost)?;
    for (row, b) in lp.a.row_iter().zip(&lp.b) {
        let coeffs: Vec<Rat> = row.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let b = Rat::from_integer(b.clone());
        s.add_row(&coeffs, Some(b.clone()), Some(b))?;
    }
    Ok(match s.solve()? {
        LpStatus::Optimal => LpOutcome::Optimal(LpVertex {
            values: s.values().to_vec(),
            basis: s.basic_structurals(),
        }),
        LpStatus::Infeasible => LpOutcome::Infeasible,
        LpStatus::Unbounded => LpOutcome::Unbounded,
    })
}

/// Checks `a·values = b` exactly.
pub fn satisfies(a: &Matrix<Int>, b: &[Int], values: &[Rat]) -> bool {
    a.row_iter().zip(b).all(|(row, bi)| {
        let lhs: Rat = row
            .iter()
            .zip(values)
            .map(|(x, v)| Rat::from_integer(x.clone()) * v)
            .sum();
        lhs == Rat::from_integer(bi.clone())
    })
}
