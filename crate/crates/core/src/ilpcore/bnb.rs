use num_traits::Zero;

use crate::lpcore::{LpStatus, Simplex};
use crate::{Error, Int, Rat, Result};

/// `lo ≤ coeffs·x ≤ hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinRow {
    pub coeffs: Vec<Int>,
    pub lo: Option<Int>,
    pub hi: Option<Int>,
}

impl LinRow {
    pub fn eq(coeffs: Vec<Int>, rhs: Int) -> Self {
        LinRow {
            coeffs,
            lo: Some(rhs.clone()),
            hi: Some(rhs),
        }
    }

    pub fn ge(coeffs: Vec<Int>, rhs: Int) -> Self {
        LinRow {
            coeffs,
            lo: Some(rhs),
            hi: None,
        }
    }

    pub fn le(coeffs: Vec<Int>, rhs: Int) -> Self {
        LinRow {
            coeffs,
            lo: None,
            hi: Some(rhs),
        }
    }

    pub fn holds(&self, x: &[Int]) -> bool {
        let v: Int = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        self.lo.as_ref().is_none_or(|l| &v >= l) && self.hi.as_ref().is_none_or(|h| &v <= h)
    }
}

/// Integer program `min objective·x` over integer `x` with variable bounds
/// and general rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntProgram {
    pub lower: Vec<Option<Int>>,
    pub upper: Vec<Option<Int>>,
    pub rows: Vec<LinRow>,
    pub objective: Vec<Int>,
}

/// Lazily supplied constraints. Called at every node with the current LP
/// optimum; returning an empty list accepts the point.
pub trait CutSource {
    fn separate(&mut self, x: &[Rat], integral: bool) -> Result<Vec<LinRow>>;
}

pub struct NoCuts;

impl CutSource for NoCuts {
    fn separate(&mut self, _: &[Rat], _: bool) -> Result<Vec<LinRow>> {
        Ok(Vec::new())
    }
}

fn to_rat(v: &Option<Int>) -> Option<Rat> {
    v.as_ref().map(|x| Rat::from_integer(x.clone()))
}

fn add_row(lp: &mut Simplex, row: &LinRow) -> Result<()> {
    let coeffs: Vec<Rat> = row
        .coeffs
        .iter()
        .map(|x| Rat::from_integer(x.clone()))
        .collect();
    lp.add_row(&coeffs, to_rat(&row.lo), to_rat(&row.hi))?;
    Ok(())
}

struct Node {
    lp: Simplex,
    pool_len: usize,
}

/// Depth-first branch and bound. Branches on the lowest-index fractional
/// variable and explores the floor side first. Cuts returned by `cuts` go
/// into a global pool that every open node picks up when it is resumed.
pub fn branch_and_bound(
    prog: &IntProgram,
    cuts: &mut dyn CutSource,
    node_limit: u64,
) -> Result<Option<Vec<Int>>> {
    let n = prog.objective.len();
    if prog.lower.len() != n
        || prog.upper.len() != n
        || prog.rows.iter().any(|r| r.coeffs.len() != n)
    {
        return Err(Error::Dimension("integer program shapes disagree".into()));
    }
    let cost: Vec<Rat> = prog
        .objective
        .iter()
        .map(|c| Rat::from_integer(c.clone()))
        .collect();
    let lo = prog.lower.iter().map(to_rat).collect();
    let hi = prog.upper.iter().map(to_rat).collect();
    let mut root = Simplex::new(lo, hi, cost)?;
    for row in &prog.rows {
        add_row(&mut root, row)?;
    }

    let mut pool: Vec<LinRow> = Vec::new();
    let mut best: Option<(Vec<Int>, Int)> = None;
    let mut stack = vec![Node {
        lp: root,
        pool_len: 0,
    }];
    let mut nodes = 0u64;

    while let Some(Node { mut lp, pool_len }) = stack.pop() {
        nodes += 1;
        if nodes > node_limit {
            return Err(Error::budget("branch-and-bound nodes", nodes, node_limit));
        }
        for row in &pool[pool_len..] {
            add_row(&mut lp, row)?;
        }
        let x = loop {
            match lp.solve()? {
                LpStatus::Infeasible => break None,
                LpStatus::Unbounded => {
                    return Err(Error::InvalidInput(
                        "integer program has an unbounded relaxation".into(),
                    ))
                }
                LpStatus::Optimal => {}
            }
            if let Some((_, inc)) = &best {
                if &lp.objective().ceil().to_integer() >= inc {
                    break None;
                }
            }
            let x = lp.values().to_vec();
            let integral = x.iter().all(Rat::is_integer);
            let new = cuts.separate(&x, integral)?;
            if new.is_empty() {
                break Some(x);
            }
            for row in &new {
                add_row(&mut lp, row)?;
            }
            pool.extend(new);
        };
        let Some(x) = x else { continue };
        match x.iter().position(|v| !v.is_integer()) {
            None => {
                let xi: Vec<Int> = x.iter().map(Rat::to_integer).collect();
                let obj: Int = xi.iter().zip(&prog.objective).map(|(a, b)| a * b).sum();
                if best.as_ref().is_none_or(|(_, inc)| &obj < inc) {
                    best = Some((xi, obj));
                }
            }
            Some(j) => {
                let (lo_j, hi_j) = lp.bounds(j);
                let (lo_j, hi_j) = (lo_j.cloned(), hi_j.cloned());
                let fl = Rat::from_integer(x[j].floor().to_integer());
                let ce = Rat::from_integer(x[j].ceil().to_integer());
                let mut up = lp.clone();
                up.set_bounds(j, Some(ce), hi_j)?;
                let mut down = lp;
                down.set_bounds(j, lo_j, Some(fl))?;
                let pool_len = pool.len();
                stack.push(Node { lp: up, pool_len });
                stack.push(Node { lp: down, pool_len });
            }
        }
    }
    Ok(best.map(|(x, _)| x))
}

impl IntProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn is_feasible_point(&self, x: &[Int]) -> bool {
        x.len() == self.num_vars()
            && x.iter().enumerate().all(|(j, v)| {
                self.lower[j].as_ref().is_none_or(|l| v >= l)
                    && self.upper[j].as_ref().is_none_or(|u| v <= u)
            })
            && self.rows.iter().all(|r| r.holds(x))
    }

    pub fn objective_value(&self, x: &[Int]) -> Int {
        x.iter()
            .zip(&self.objective)
            .fold(Int::zero(), |acc, (a, b)| acc + a * b)
    }
}
