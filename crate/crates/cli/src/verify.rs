//! Oracle checks of a claimed equivalence between two instance files.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use anyhow::{bail, Result};
use instakernel::ilpcore::{enumerate_feasible, find_feasible, visit_feasible, FeasIlp};
use instakernel::knapfam::{dp_uks_oracle, uks_to_knapsack, KnapsackInstance};
use instakernel::schedbal::{brute_force_loadbalance, LoadBalancingInstance, Schedule};
use instakernel::{Int, Limits};
use serde_json::{json, Value};

use crate::format::{Bounded, Instance, PreSol};

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    Verified,
    Skipped(String),
    Failed { reason: String, witness: Value },
}

fn strs(v: &[Int]) -> Vec<String> {
    v.iter().map(Int::to_string).collect()
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn schedule_json(s: &Schedule) -> Value {
    s.groups
        .iter()
        .map(|(k, c)| json!({"machines": k.to_string(), "configuration": strs(c)}))
        .collect()
}

fn failed(reason: impl Into<String>, witness: Value) -> Check {
    Check::Failed {
        reason: reason.into(),
        witness,
    }
}

/// Runs the oracle that fits the pair of kinds. Budget errors become
/// [`Check::Skipped`]; mismatched kinds are input errors.
pub fn check(
    original: &Instance,
    reduced: &Instance,
    pre: Option<&PreSol>,
    limits: &Limits,
) -> Result<Check> {
    match run(original, reduced, pre, limits) {
        Err(e) => match e.downcast_ref::<instakernel::Error>() {
            Some(ie) if ie.is_budget() => Ok(Check::Skipped(ie.to_string())),
            _ => Err(e),
        },
        ok => ok,
    }
}

fn run(
    original: &Instance,
    reduced: &Instance,
    pre: Option<&PreSol>,
    limits: &Limits,
) -> Result<Check> {
    use Instance as I;
    match (original, reduced, pre) {
        (I::Ilp(a), I::Ilp(b), None) => compare_ilp(a, b, limits),
        (I::Ilp(a), I::Ilp(b), Some(PreSol::Kernel(fixed))) => check_kernel(a, b, fixed, limits),
        (I::TwoStage(a), I::TwoStage(b), None) => compare_ilp(
            &bounded(a, a.ilp.assemble()?),
            &bounded(b, b.ilp.assemble()?),
            limits,
        ),
        (I::NFold(a), I::NFold(b), None) => compare_ilp(
            &bounded(a, a.ilp.assemble()?),
            &bounded(b, b.ilp.assemble()?),
            limits,
        ),
        (I::Knapsack(a), I::Knapsack(b), None) => compare_subsets(
            a.solutions(limits.enumeration)?,
            b.solutions(limits.enumeration)?,
        ),
        (I::SubsetSum(a), I::SubsetSum(b), None) => compare_subsets(
            a.solutions(limits.enumeration)?,
            b.solutions(limits.enumeration)?,
        ),
        (I::Mdks(a), I::Mdks(b), None) => compare_subsets(
            a.solutions(limits.enumeration)?,
            b.solutions(limits.enumeration)?,
        ),
        (I::Uks(a), I::Uks(b), None) => {
            let (va, vb) = (dp_uks_oracle(a, limits)?, dp_uks_oracle(b, limits)?);
            let (fa, fb) = (va >= a.target, vb >= b.target);
            if fa == fb {
                Ok(Check::Verified)
            } else {
                Ok(failed(
                    "feasibility differs",
                    json!({"original_best_profit": va.to_string(), "reduced_best_profit": vb.to_string()}),
                ))
            }
        }
        (I::Uks(a), I::Knapsack(b), Some(PreSol::Copies(copies))) => {
            check_uks(a, b, copies, limits)
        }
        (I::LoadBalance(a), I::LoadBalance(b), pre) => {
            let schedule = match pre {
                None => None,
                Some(PreSol::Schedule(p)) => Some(p),
                Some(_) => bail!("a loadbalance pair needs a loadbalance pre-solution"),
            };
            check_schedules(a, b, schedule, limits)
        }
        (a, b, Some(_)) => bail!(
            "no pre-solution check for a {} original with a {} reduced instance",
            a.kind(),
            b.kind()
        ),
        (a, b, None) => bail!(
            "cannot compare a {} instance with a {} instance",
            a.kind(),
            b.kind()
        ),
    }
}

fn bounded<T>(b: &Bounded<T>, ilp: FeasIlp) -> FeasIlp {
    match &b.bound {
        Some(u) => ilp.with_uniform_box(u),
        None => ilp,
    }
}

/// Both solution sets restricted to the intersection of the two boxes.
fn compare_ilp(a: &FeasIlp, b: &FeasIlp, limits: &Limits) -> Result<Check> {
    if a.num_vars() != b.num_vars() {
        bail!("{} variables against {}", a.num_vars(), b.num_vars());
    }
    let lower: Vec<Int> = a
        .lower
        .iter()
        .zip(&b.lower)
        .map(|(x, y)| x.max(y).clone())
        .collect();
    let upper = match (&a.upper, &b.upper) {
        (Some(x), Some(y)) => Some(x.iter().zip(y).map(|(p, q)| p.min(q).clone()).collect()),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    };
    let boxed = |ilp: &FeasIlp| FeasIlp {
        lower: lower.clone(),
        upper: upper.clone(),
        ..ilp.clone()
    };
    if lower.iter().zip(upper.iter().flatten()).any(|(l, u)| l > u) {
        return Ok(Check::Verified);
    }
    let sa: BTreeSet<Vec<Int>> = enumerate_feasible(&boxed(a), limits.enumeration)?
        .into_iter()
        .collect();
    let sb: BTreeSet<Vec<Int>> = enumerate_feasible(&boxed(b), limits.enumeration)?
        .into_iter()
        .collect();
    if let Some(x) = sa.difference(&sb).next() {
        return Ok(failed(
            "a solution of the original does not solve the reduced instance",
            json!({"solution": strs(x), "solves": "original"}),
        ));
    }
    if let Some(x) = sb.difference(&sa).next() {
        return Ok(failed(
            "a solution of the reduced instance does not solve the original",
            json!({"solution": strs(x), "solves": "reduced"}),
        ));
    }
    Ok(Check::Verified)
}

/// Every residual solution must lift to an original solution, and an empty
/// residual must leave the original empty on the lifted box.
fn check_kernel(
    original: &FeasIlp,
    residual: &FeasIlp,
    fixed: &[Int],
    limits: &Limits,
) -> Result<Check> {
    if residual.a != original.a || fixed.len() != original.num_vars() {
        return Ok(failed(
            "the residual system does not match the original matrix",
            Value::Null,
        ));
    }
    let mut bad = None;
    let mut any = false;
    visit_feasible(residual, limits.enumeration, |x| {
        any = true;
        let lifted: Vec<Int> = fixed.iter().zip(x).map(|(a, b)| a + b).collect();
        if original.is_solution(&lifted) {
            ControlFlow::Continue(())
        } else {
            bad = Some((x.to_vec(), lifted));
            ControlFlow::Break(())
        }
    })?;
    if let Some((x, lifted)) = bad {
        return Ok(failed(
            "a residual solution does not lift to a solution of the original",
            json!({"residual_solution": strs(&x), "lifted": strs(&lifted)}),
        ));
    }
    if !any {
        let top = fixed.iter().max().cloned().unwrap_or_default()
            + residual
                .upper
                .iter()
                .flatten()
                .max()
                .cloned()
                .unwrap_or_default();
        let cap = vec![top; original.num_vars()];
        if let Some(x) = find_feasible(&original.capped(&cap), limits.enumeration)? {
            return Ok(failed(
                "the original is feasible but the residual system is not",
                json!({"solution": strs(&x), "solves": "original"}),
            ));
        }
    }
    Ok(Check::Verified)
}

fn compare_subsets(a: Vec<Vec<bool>>, b: Vec<Vec<bool>>) -> Result<Check> {
    let sa: BTreeSet<Vec<bool>> = a.into_iter().collect();
    let sb: BTreeSet<Vec<bool>> = b.into_iter().collect();
    if let Some(x) = sa.difference(&sb).next() {
        return Ok(failed(
            "a subset feasible for the original is infeasible for the reduced instance",
            json!({"subset": bits(x), "solves": "original"}),
        ));
    }
    if let Some(x) = sb.difference(&sa).next() {
        return Ok(failed(
            "a subset feasible for the reduced instance is infeasible for the original",
            json!({"subset": bits(x), "solves": "reduced"}),
        ));
    }
    Ok(Check::Verified)
}

/// The copy map must match the expansion of the original; the reduced
/// 0-1 instance must have the expansion's subsets, each of which maps to a
/// solution of the original.
fn check_uks(
    original: &instakernel::knapfam::UnboundedKnapsackInstance,
    reduced: &KnapsackInstance,
    copies: &[(usize, u32)],
    limits: &Limits,
) -> Result<Check> {
    let exp = uks_to_knapsack(original)?;
    if exp.copies != copies {
        return Ok(failed(
            "the copy map differs from the expansion of the original",
            Value::Null,
        ));
    }
    if let c @ Check::Failed { .. } = compare_subsets(
        exp.knapsack.solutions(limits.enumeration)?,
        reduced.solutions(limits.enumeration)?,
    )? {
        return Ok(c);
    }
    let sols = reduced.solutions(limits.enumeration)?;
    for s in &sols {
        let x = exp.multiplicities(s);
        if !original.is_solution(&x) {
            return Ok(failed(
                "a reduced solution maps to a non-solution of the original",
                json!({"subset": bits(s), "multiplicities": strs(&x)}),
            ));
        }
    }
    let best = dp_uks_oracle(original, limits)?;
    if (best >= original.target) != !sols.is_empty() {
        return Ok(failed(
            "feasibility differs",
            json!({"original_best_profit": best.to_string(), "reduced_solutions": sols.len()}),
        ));
    }
    Ok(Check::Verified)
}

fn check_schedules(
    original: &LoadBalancingInstance,
    reduced: &LoadBalancingInstance,
    pre: Option<&instakernel::schedbal::PreSolution>,
    limits: &Limits,
) -> Result<Check> {
    let so = brute_force_loadbalance(original, limits)?;
    let sr = brute_force_loadbalance(reduced, limits)?;
    match (&so, &sr) {
        (Some(s), None) => {
            return Ok(failed(
                "the original is feasible but the reduced instance is not",
                json!({"schedule": schedule_json(s), "solves": "original"}),
            ))
        }
        (None, Some(s)) => {
            return Ok(failed(
                "the reduced instance is feasible but the original is not",
                json!({"schedule": schedule_json(s), "solves": "reduced"}),
            ))
        }
        _ => {}
    }
    if let (Some(p), Some(s)) = (pre, &sr) {
        if let Err(e) = p.apply(original, reduced, s) {
            return Ok(failed(
                format!("reconstruction fails: {e}"),
                json!({"schedule": schedule_json(s), "solves": "reduced"}),
            ));
        }
    }
    Ok(Check::Verified)
}

/// Confirms that an instance declared infeasible has no solution.
pub fn check_infeasible(original: &Instance, limits: &Limits) -> Result<Check> {
    let res = match original {
        Instance::LoadBalance(lb) => {
            brute_force_loadbalance(lb, limits).map(|s| s.map(|s| schedule_json(&s)))
        }
        _ => {
            return Ok(Check::Skipped(
                "an empty LP relaxation has no bounded brute-force check".into(),
            ))
        }
    };
    match res {
        Ok(None) => Ok(Check::Verified),
        Ok(Some(s)) => Ok(failed(
            "declared infeasible, but a solution exists",
            json!({"schedule": s}),
        )),
        Err(e) if e.is_budget() => Ok(Check::Skipped(e.to_string())),
        Err(e) => Err(e.into()),
    }
}
