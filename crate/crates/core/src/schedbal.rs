//! Load balancing on identical machines: every machine must receive a load
//! in `[l, u]`. Instances are count-encoded, so `m` and the job counts may
//! be far too large to list.
//!
//! [`equiv_loadbalancing`] computes an equivalent instance in four steps:
//!
//! 1. *Balancing.* Some schedule keeps the per-type job counts of any two
//!    machines within `2 d g` of each other, where `g` bounds the Graver
//!    basis of a single machine's block. So `⌊n_j / m⌋ − 2 d g` jobs of type
//!    `j` can be placed on every machine up front, after which no machine
//!    needs more than `4 d g` further jobs of one type.
//! 2. *Configurations.* The remaining per-machine job vectors `c` with
//!    `‖c‖∞ ≤ 4 d g` and load in the shifted window.
//! 3. *Configuration LP.* A vertex `x*` of `{x ≥ 0 : Σ c x_c = n′, Σ x_c = m}`
//!    has at most `d + 1` nonzero entries. Some integral solution is within
//!    `K` of `x*` in every coordinate, so `⌈x*_c⌉ − K` machines can be
//!    given configuration `c` outright.
//! 4. *Residual.* What is left has at most `(d + 1) K` machines.

use std::collections::HashMap;

use num_traits::{pow, One, Signed, ToPrimitive, Zero};

use crate::exactmath::{BitSize, Matrix};
use crate::ilpcore::FeasIlp;
use crate::lpcore::{solve_vertex, LpOutcome, LpVertex, StandardLp};
use crate::{Error, Int, Limits, Result};

/// Per-type job multiplicities on one machine.
pub type Configuration = Vec<Int>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LoadBalancingInstance {
    /// Processing time of each job type.
    pub p: Vec<Int>,
    /// Number of jobs of each type.
    pub n: Vec<Int>,
    pub m: Int,
    pub l: Int,
    pub u: Int,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// `l = 0`.
    Cmax,
    /// No effective upper threshold.
    Cmin,
    Cenvy,
    LoadBalancing,
}

impl LoadBalancingInstance {
    pub fn validate(&self) -> Result<()> {
        if self.p.is_empty() {
            return Err(Error::InvalidInput(
                "at least one job type is required".into(),
            ));
        }
        if self.p.len() != self.n.len() {
            return Err(Error::Dimension(format!(
                "{} processing times, {} job counts",
                self.p.len(),
                self.n.len()
            )));
        }
        if self.p.iter().any(|p| !p.is_positive()) {
            return Err(Error::InvalidInput(
                "processing times must be positive".into(),
            ));
        }
        if self.n.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInput("job counts must be nonnegative".into()));
        }
        if !self.m.is_positive() {
            return Err(Error::InvalidInput(
                "at least one machine is required".into(),
            ));
        }
        if self.l.is_negative() || self.l > self.u {
            return Err(Error::InvalidInput(format!(
                "thresholds must satisfy 0 ≤ l ≤ u, got [{}, {}]",
                self.l, self.u
            )));
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.p.len()
    }

    pub fn pmax(&self) -> Int {
        self.p.iter().max().cloned().unwrap_or_default()
    }

    pub fn total_work(&self) -> Int {
        self.p.iter().zip(&self.n).map(|(p, n)| p * n).sum()
    }

    /// `Cmax` when `l = 0`, `Cmin` when `u` is at least the total work,
    /// otherwise the general two-sided case.
    pub fn objective(&self) -> Objective {
        if self.l.is_zero() {
            Objective::Cmax
        } else if self.u >= self.total_work() {
            Objective::Cmin
        } else {
            Objective::LoadBalancing
        }
    }

    pub fn load(&self, c: &[Int]) -> Int {
        self.p.iter().zip(c).map(|(p, x)| p * x).sum()
    }
}

impl BitSize for LoadBalancingInstance {
    fn bit_size(&self) -> u64 {
        self.p.bit_size()
            + self.n.bit_size()
            + self.m.bit_size()
            + self.l.bit_size()
            + self.u.bit_size()
    }
}

/// `2 pmax + 1` for the one-sided objectives, `(4 pmax + 1)²` otherwise.
pub fn graver_norm_bound(obj: Objective, pmax: &Int) -> Int {
    match obj {
        Objective::Cmax | Objective::Cmin => Int::from(2) * pmax + 1,
        Objective::Cenvy | Objective::LoadBalancing => pow(Int::from(4) * pmax + 1, 2),
    }
}

/// `4 d g`, the per-type cap on one machine after balancing.
pub fn config_cap(obj: Objective, d: usize, pmax: &Int) -> Int {
    Int::from(4 * d) * graver_norm_bound(obj, pmax)
}

/// `4 d (4 pmax + 1)²`, the cap for every objective.
pub fn uniform_config_cap(d: usize, pmax: &Int) -> Int {
    config_cap(Objective::LoadBalancing, d, pmax)
}

/// `K = (d+1) (2 (d+1) · 4d(4pmax+1)² + 1)^{d+1}`.
pub fn prefix_threshold(d: usize, pmax: &Int) -> Int {
    let base = Int::from(2 * (d + 1)) * uniform_config_cap(d, pmax) + 1;
    Int::from(d + 1) * pow(base, d + 1)
}

/// Upper bounds on the residual instance: machines `(d+1) K`, jobs per
/// type `m″ · 4d²(4pmax+1)²`, thresholds `4d² pmax (4pmax+1)²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualCaps {
    pub machines: Int,
    pub jobs: Int,
    pub threshold: Int,
}

pub fn residual_caps(d: usize, pmax: &Int) -> ResidualCaps {
    let sq = pow(Int::from(4) * pmax + 1, 2);
    let machines = Int::from(d + 1) * prefix_threshold(d, pmax);
    let jobs = &machines * Int::from(4 * d * d) * &sq;
    let threshold = Int::from(4 * d * d) * pmax * sq;
    ResidualCaps {
        machines,
        jobs,
        threshold,
    }
}

/// Bit size of a residual instance that meets every bound of
/// [`residual_caps`] with equality.
pub fn closed_form_bits(d: usize, pmax: &Int) -> u64 {
    let caps = residual_caps(d, pmax);
    caps.machines.bit_size()
        + 2 * caps.threshold.bit_size()
        + d as u64 * (pmax.bit_size() + caps.jobs.bit_size())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Balanced {
    pub reduced: LoadBalancingInstance,
    /// Jobs of each type placed on every machine.
    pub per_machine: Vec<Int>,
    pub cap: Int,
    pub objective: Objective,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BalanceOutcome {
    Balanced(Balanced),
    Infeasible(String),
}

/// Places `q_j = max(0, ⌊n_j / m⌋ − 2 d g)` jobs of type `j` on every
/// machine and shifts the thresholds by the preassigned load.
pub fn balance_preprocess(inst: &LoadBalancingInstance, obj: Objective) -> Result<BalanceOutcome> {
    inst.validate()?;
    check_objective(inst, obj)?;
    let d = inst.d();
    let g = graver_norm_bound(obj, &inst.pmax());
    let slack = Int::from(2 * d) * &g;
    let q: Vec<Int> = inst
        .n
        .iter()
        .map(|n| (n / &inst.m - &slack).max(Int::zero()))
        .collect();
    let s = inst.load(&q);
    if s > inst.u {
        return Ok(BalanceOutcome::Infeasible(format!(
            "every balanced schedule puts load at least {s} on each machine, above u = {}",
            inst.u
        )));
    }
    let reduced = LoadBalancingInstance {
        p: inst.p.clone(),
        n: inst
            .n
            .iter()
            .zip(&q)
            .map(|(n, q)| n - &inst.m * q)
            .collect(),
        m: inst.m.clone(),
        l: (&inst.l - &s).max(Int::zero()),
        u: &inst.u - &s,
    };
    Ok(BalanceOutcome::Balanced(Balanced {
        reduced,
        per_machine: q,
        cap: Int::from(4 * d) * g,
        objective: obj,
    }))
}

fn check_objective(inst: &LoadBalancingInstance, obj: Objective) -> Result<()> {
    match obj {
        Objective::Cmax if !inst.l.is_zero() => {
            Err(Error::InvalidInput("Cmax requires l = 0".into()))
        }
        Objective::Cmin if inst.u < inst.total_work() => Err(Error::InvalidInput(
            "Cmin requires u to be at least the total work".into(),
        )),
        _ => Ok(()),
    }
}

/// All `c ∈ ℕ^d` with `c_j ≤ caps_j` and `l ≤ p·c ≤ u`, sorted.
pub fn enumerate_configurations(
    p: &[Int],
    l: &Int,
    u: &Int,
    caps: &[Int],
    limit: u64,
) -> Result<Vec<Configuration>> {
    if caps.len() != p.len() {
        return Err(Error::Dimension(format!(
            "{} caps for {} job types",
            caps.len(),
            p.len()
        )));
    }
    if l > u || u.is_negative() || caps.iter().any(Signed::is_negative) {
        return Ok(Vec::new());
    }
    let d = p.len();
    // most load the types j.. can still add
    let mut reach = vec![Int::zero(); d + 1];
    for j in (0..d).rev() {
        reach[j] = &reach[j + 1] + &p[j] * &caps[j];
    }
    let mut out = Vec::new();
    let mut c = vec![Int::zero(); d];
    fn rec(
        j: usize,
        load: Int,
        ctx: (&[Int], &Int, &Int, &[Int], &[Int], u64),
        c: &mut Vec<Int>,
        out: &mut Vec<Configuration>,
    ) -> Result<()> {
        let (p, l, u, caps, reach, limit) = ctx;
        if j == p.len() {
            if &load >= l {
                if out.len() as u64 >= limit {
                    return Err(Error::budget(
                        "configurations",
                        format!("more than {limit}"),
                        limit,
                    ));
                }
                out.push(c.clone());
            }
            return Ok(());
        }
        let hi = ((u - &load) / &p[j]).min(caps[j].clone());
        let mut k = Int::zero();
        // skip values of c_j that cannot reach l
        let need = l - &load - &reach[j + 1];
        if need.is_positive() {
            k = (need + &p[j] - 1) / &p[j];
        }
        while k <= hi {
            c[j] = k.clone();
            rec(j + 1, &load + &p[j] * &k, ctx, c, out)?;
            k += 1;
        }
        c[j] = Int::zero();
        Ok(())
    }
    rec(
        0,
        Int::zero(),
        (p, l, u, caps, &reach, limit),
        &mut c,
        &mut out,
    )?;
    Ok(out)
}

/// `Σ_c c x_c = n′` and `Σ_c x_c = m′`, one variable per configuration.
pub fn build_conf_ilp(configs: &[Configuration], n_eff: &[Int], m_eff: &Int) -> Result<FeasIlp> {
    let d = n_eff.len();
    if configs.iter().any(|c| c.len() != d) {
        return Err(Error::Dimension("configuration length".into()));
    }
    let mut a = Matrix::zeros(d + 1, configs.len());
    for (k, c) in configs.iter().enumerate() {
        for (j, v) in c.iter().enumerate() {
            a.set(j, k, v.clone());
        }
        a.set(d, k, Int::one());
    }
    let mut b = n_eff.to_vec();
    b.push(m_eff.clone());
    FeasIlp::new(a, b)
}

/// A count-encoded schedule: `(machines, jobs per type on each of them)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Schedule {
    pub groups: Vec<(Int, Configuration)>,
}

impl Schedule {
    pub fn machines(&self) -> Int {
        self.groups.iter().map(|(k, _)| k).sum()
    }

    /// Checks machine count, job totals and every machine's load.
    pub fn validate(&self, inst: &LoadBalancingInstance) -> Result<()> {
        let d = inst.d();
        let mut first = Int::zero();
        let mut totals = vec![Int::zero(); d];
        for (k, c) in &self.groups {
            if k.is_negative() || c.len() != d || c.iter().any(Signed::is_negative) {
                return Err(Error::InvalidInput(format!(
                    "malformed machine group starting at machine {first}"
                )));
            }
            if k.is_positive() {
                let load = inst.load(c);
                if load < inst.l || load > inst.u {
                    return Err(Error::InvalidInput(format!(
                        "machine {first} has load {load} outside [{}, {}]",
                        inst.l, inst.u
                    )));
                }
            }
            for (t, x) in totals.iter_mut().zip(c) {
                *t += k * x;
            }
            first += k;
        }
        if first != inst.m {
            return Err(Error::InvalidInput(format!(
                "{first} machines scheduled, instance has {}",
                inst.m
            )));
        }
        if totals != inst.n {
            return Err(Error::InvalidInput(format!(
                "job totals {totals:?} differ from {:?}",
                inst.n
            )));
        }
        Ok(())
    }

    fn push(&mut self, k: Int, c: Configuration) {
        if k.is_zero() {
            return;
        }
        match self.groups.last_mut() {
            Some((kk, cc)) if *cc == c => *kk += k,
            _ => self.groups.push((k, c)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreSolution {
    /// Balancing: jobs of each type placed on every machine.
    pub per_machine: Vec<Int>,
    /// Fixed configurations: `(machines, configuration)`, before adding
    /// `per_machine`.
    pub fixed: Vec<(Int, Configuration)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeReport {
    pub residual_bits: u64,
    pub closed_form_bits: u64,
    pub caps: ResidualCaps,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivBundle {
    pub original: LoadBalancingInstance,
    pub objective: Objective,
    /// After balancing, before fixing configurations.
    pub balanced: LoadBalancingInstance,
    pub residual: LoadBalancingInstance,
    pub pre: PreSolution,
    pub cap: Int,
    pub configurations: Vec<Configuration>,
    pub lp_vertex: LpVertex,
    pub threshold: Int,
    pub report: SizeReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LbOutcome {
    Equivalent(Box<EquivBundle>),
    Infeasible(String),
}

impl LbOutcome {
    pub fn bundle(&self) -> Option<&EquivBundle> {
        match self {
            LbOutcome::Equivalent(b) => Some(b),
            LbOutcome::Infeasible(_) => None,
        }
    }
}

/// The pipeline with the objective read off the thresholds.
pub fn equiv_loadbalancing(inst: &LoadBalancingInstance, limits: &Limits) -> Result<LbOutcome> {
    inst.validate()?;
    equiv_loadbalancing_with(inst, inst.objective(), limits)
}

pub fn equiv_loadbalancing_with(
    inst: &LoadBalancingInstance,
    obj: Objective,
    limits: &Limits,
) -> Result<LbOutcome> {
    let bal = match balance_preprocess(inst, obj)? {
        BalanceOutcome::Balanced(b) => b,
        BalanceOutcome::Infeasible(why) => return Ok(LbOutcome::Infeasible(why)),
    };
    let d = inst.d();
    let pmax = inst.pmax();
    let prime = &bal.reduced;
    // a usable configuration has c_j ≤ min(cap, n′_j), so its load is at
    // most d · pmax · cap
    let caps: Vec<Int> = prime.n.iter().map(|n| n.min(&bal.cap).clone()).collect();
    let u2 = prime.u.clone().min(prime.load(&caps));
    let configs = enumerate_configurations(&prime.p, &prime.l, &u2, &caps, limits.configurations)?;
    let ilp = build_conf_ilp(&configs, &prime.n, &prime.m)?;
    let vertex = match solve_vertex(&StandardLp::new(ilp.a.clone(), ilp.b.clone()))? {
        LpOutcome::Optimal(v) => v,
        LpOutcome::Infeasible => {
            return Ok(LbOutcome::Infeasible(
                "LP relaxation of the configuration ILP is infeasible".into(),
            ));
        }
        LpOutcome::Unbounded => unreachable!("zero objective"),
    };
    let support = vertex.values.iter().filter(|v| !v.is_zero()).count();
    if support > d + 1 {
        return Err(Error::Inconsistent(format!(
            "vertex with {support} nonzero entries for {} rows",
            d + 1
        )));
    }
    let k = prefix_threshold(d, &pmax);
    let mut fixed = Vec::new();
    let mut m2 = prime.m.clone();
    let mut n2 = prime.n.clone();
    for (c, x) in configs.iter().zip(&vertex.values) {
        let take = (x.ceil().to_integer() - &k).max(Int::zero());
        if take.is_positive() {
            m2 -= &take;
            for (nj, cj) in n2.iter_mut().zip(c) {
                *nj -= &take * cj;
            }
            fixed.push((take, c.clone()));
        }
    }
    let residual = LoadBalancingInstance {
        p: prime.p.clone(),
        n: n2,
        m: m2,
        l: prime.l.clone(),
        u: u2,
    };
    if residual.n.iter().any(Signed::is_negative) || !residual.m.is_positive() {
        return Err(Error::Inconsistent(
            "fixing configurations overdrew the instance".into(),
        ));
    }
    let report = SizeReport {
        residual_bits: residual.bit_size(),
        closed_form_bits: closed_form_bits(d, &pmax),
        caps: residual_caps(d, &pmax),
    };
    Ok(LbOutcome::Equivalent(Box::new(EquivBundle {
        original: inst.clone(),
        objective: obj,
        balanced: bal.reduced.clone(),
        residual,
        pre: PreSolution {
            per_machine: bal.per_machine,
            fixed,
        },
        cap: bal.cap,
        configurations: configs,
        lp_vertex: vertex,
        threshold: k,
        report,
    })))
}

/// Combines the pre-solution with a schedule of the residual instance.
pub fn reconstruct_schedule(
    bundle: &EquivBundle,
    residual_solution: &Schedule,
) -> Result<Schedule> {
    bundle
        .pre
        .apply(&bundle.original, &bundle.residual, residual_solution)
}

impl PreSolution {
    /// Lifts a schedule of `residual` to one of `original`: the fixed
    /// groups are added and every machine gets `per_machine` on top.
    pub fn apply(
        &self,
        original: &LoadBalancingInstance,
        residual: &LoadBalancingInstance,
        residual_solution: &Schedule,
    ) -> Result<Schedule> {
        residual_solution.validate(residual)?;
        let q = &self.per_machine;
        let plus_q =
            |c: &Configuration| -> Configuration { c.iter().zip(q).map(|(a, b)| a + b).collect() };
        let mut out = Schedule::default();
        for (k, c) in self.fixed.iter().chain(&residual_solution.groups) {
            out.push(k.clone(), plus_q(c));
        }
        out.validate(original)
            .map_err(|e| Error::Inconsistent(format!("reconstructed schedule is invalid: {e}")))?;
        Ok(out)
    }
}

fn small(v: &Int, what: &'static str, limit: u64) -> Result<u64> {
    v.to_u64()
        .filter(|&x| x <= limit)
        .ok_or_else(|| Error::budget(what, v, limit))
}

/// Exact feasibility by recursion over machines with memoized remaining
/// job counts. With `cap`, no machine may receive more than `cap` jobs of
/// one type.
pub fn brute_force_loadbalance_capped(
    inst: &LoadBalancingInstance,
    cap: Option<&Int>,
    limits: &Limits,
) -> Result<Option<Schedule>> {
    inst.validate()?;
    let m = small(&inst.m, "machines", limits.states)?;
    let n: Vec<u64> = inst
        .n
        .iter()
        .map(|x| small(x, "jobs of one type", limits.states))
        .collect::<Result<_>>()?;
    let cap = cap.map_or(u64::MAX, |c| c.to_u64().unwrap_or(u64::MAX));
    let all_lim: Vec<Int> = n.iter().map(|&x| Int::from(x.min(cap))).collect();
    let configs: Vec<Vec<u64>> = enumerate_configurations(
        &inst.p,
        &inst.l,
        &inst.u.clone().min(inst.load(&all_lim)),
        &all_lim,
        limits.configurations,
    )?
    .into_iter()
    .map(|c| c.iter().map(|x| x.to_u64().unwrap()).collect())
    .collect();

    struct Search<'a> {
        configs: &'a [Vec<u64>],
        memo: HashMap<(u64, Vec<u64>), Option<usize>>,
        limit: u64,
    }
    impl Search<'_> {
        fn go(&mut self, k: u64, rem: &[u64]) -> Result<Option<usize>> {
            if k == 0 {
                return Ok(rem.iter().all(|&x| x == 0).then_some(usize::MAX));
            }
            let key = (k, rem.to_vec());
            if let Some(r) = self.memo.get(&key) {
                return Ok(*r);
            }
            if self.memo.len() as u64 >= self.limit {
                return Err(Error::budget(
                    "scheduler states",
                    format!("more than {}", self.limit),
                    self.limit,
                ));
            }
            let mut found = None;
            let mut next = rem.to_vec();
            for (i, c) in self.configs.iter().enumerate() {
                if c.iter().zip(rem).any(|(a, b)| a > b) {
                    continue;
                }
                for ((x, a), b) in next.iter_mut().zip(c).zip(rem) {
                    *x = b - a;
                }
                if self.go(k - 1, &next)?.is_some() {
                    found = Some(i);
                    break;
                }
            }
            self.memo.insert(key, found);
            Ok(found)
        }
    }

    let mut s = Search {
        configs: &configs,
        memo: HashMap::new(),
        limit: limits.states,
    };
    if s.go(m, &n)?.is_none() {
        return Ok(None);
    }
    let mut out = Schedule::default();
    let mut rem = n;
    for k in (1..=m).rev() {
        let i = s.go(k, &rem)?.expect("feasible state");
        let c = &configs[i];
        for (r, a) in rem.iter_mut().zip(c) {
            *r -= a;
        }
        out.push(Int::one(), c.iter().map(|&x| Int::from(x)).collect());
    }
    Ok(Some(out))
}

pub fn brute_force_loadbalance(
    inst: &LoadBalancingInstance,
    limits: &Limits,
) -> Result<Option<Schedule>> {
    brute_force_loadbalance_capped(inst, None, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, ints};

    fn lb(p: &[i64], n: &[i64], m: i64, l: i64, u: i64) -> LoadBalancingInstance {
        LoadBalancingInstance {
            p: ints(p),
            n: ints(n),
            m: int(m),
            l: int(l),
            u: int(u),
        }
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn graver_bounds() {
        assert_eq!(graver_norm_bound(Objective::Cmax, &int(1)), int(3));
        assert_eq!(graver_norm_bound(Objective::Cenvy, &int(2)), int(81));
        assert_eq!(graver_norm_bound(Objective::Cmin, &int(5)), int(11));
        assert_eq!(prefix_threshold(1, &int(1)), int(2 * 401 * 401));
    }

    #[test]
    fn objective_inference() {
        assert_eq!(lb(&[1], &[4], 2, 0, 3).objective(), Objective::Cmax);
        assert_eq!(lb(&[1], &[4], 2, 1, 4).objective(), Objective::Cmin);
        assert_eq!(
            lb(&[1], &[4], 2, 1, 3).objective(),
            Objective::LoadBalancing
        );
        assert!(balance_preprocess(&lb(&[1], &[4], 2, 1, 3), Objective::Cmax).is_err());
    }

    #[test]
    fn balancing_examples() {
        let inst = lb(&[1], &[20], 2, 0, 10);
        let BalanceOutcome::Balanced(b) = balance_preprocess(&inst, Objective::Cmax).unwrap()
        else {
            panic!("expected a balanced instance")
        };
        assert_eq!(b.per_machine, ints(&[4]));
        assert_eq!(b.reduced.n, ints(&[12]));
        assert_eq!(b.reduced.u, int(6));
        assert!(brute_force_loadbalance(&inst, &lim()).unwrap().is_some());
        assert!(brute_force_loadbalance(&b.reduced, &lim())
            .unwrap()
            .is_some());

        let inst = lb(&[2, 3], &[5, 5], 3, 0, 20);
        let BalanceOutcome::Balanced(b) = balance_preprocess(&inst, Objective::Cmax).unwrap()
        else {
            panic!("expected a balanced instance")
        };
        assert_eq!(b.reduced, inst);
        assert_eq!(b.per_machine, ints(&[0, 0]));

        let big = LoadBalancingInstance {
            p: ints(&[1]),
            n: vec![int(1_000_000_000)],
            m: int(10_000_000),
            l: int(90),
            u: int(110),
        };
        let BalanceOutcome::Balanced(b) = balance_preprocess(&big, Objective::Cenvy).unwrap()
        else {
            panic!("expected a balanced instance")
        };
        assert_eq!(b.per_machine, ints(&[50]));
        assert_eq!(b.reduced.n, vec![int(500_000_000)]);
        assert_eq!(
            (b.reduced.l.clone(), b.reduced.u.clone()),
            (int(40), int(60))
        );
    }

    #[test]
    fn configuration_examples() {
        let c =
            enumerate_configurations(&ints(&[2]), &int(2), &int(6), &ints(&[324]), 1000).unwrap();
        assert_eq!(c, vec![ints(&[1]), ints(&[2]), ints(&[3])]);
        assert!(
            enumerate_configurations(&ints(&[2]), &int(5), &int(4), &ints(&[9]), 1000)
                .unwrap()
                .is_empty()
        );
        let c = enumerate_configurations(&ints(&[1, 2]), &int(0), &int(2), &ints(&[2, 2]), 1000)
            .unwrap();
        assert_eq!(
            c,
            vec![ints(&[0, 0]), ints(&[0, 1]), ints(&[1, 0]), ints(&[2, 0])]
        );
        assert!(enumerate_configurations(
            &ints(&[1, 1]),
            &int(0),
            &int(100),
            &ints(&[100, 100]),
            10
        )
        .unwrap_err()
        .is_budget());
    }

    #[test]
    fn conf_ilp_examples() {
        let configs = vec![ints(&[1]), ints(&[2]), ints(&[3])];
        let ilp = build_conf_ilp(&configs, &ints(&[6]), &int(3)).unwrap();
        assert_eq!(ilp.a.to_rows(), vec![ints(&[1, 2, 3]), ints(&[1, 1, 1])]);
        assert_eq!(ilp.b, ints(&[6, 3]));
        let ilp = build_conf_ilp(&[ints(&[2])], &ints(&[5]), &int(2)).unwrap();
        assert!(!ilp.is_solution(&ints(&[2])) && !ilp.is_solution(&ints(&[3])));
        let ilp = build_conf_ilp(&[ints(&[0])], &ints(&[0]), &int(0)).unwrap();
        assert!(ilp.is_solution(&ints(&[0])));
    }

    #[test]
    fn pipeline_examples() {
        let inst = lb(&[2], &[6], 3, 2, 6);
        let out = equiv_loadbalancing(&inst, &lim()).unwrap();
        let b = out.bundle().unwrap();
        assert!(b.pre.fixed.is_empty());
        assert_eq!(b.configurations, vec![ints(&[1]), ints(&[2]), ints(&[3])]);
        assert!(b.lp_vertex.values.iter().filter(|v| !v.is_zero()).count() <= 2);
        let w = brute_force_loadbalance(&b.residual, &lim())
            .unwrap()
            .unwrap();
        let full = reconstruct_schedule(b, &w).unwrap();
        full.validate(&inst).unwrap();

        let empty = lb(&[3], &[0], 2, 0, 5);
        let b = equiv_loadbalancing(&empty, &lim()).unwrap();
        let b = b.bundle().unwrap();
        let w = brute_force_loadbalance(&b.residual, &lim())
            .unwrap()
            .unwrap();
        assert_eq!(
            reconstruct_schedule(b, &w).unwrap().groups,
            vec![(int(2), ints(&[0]))]
        );

        let odd = lb(&[1], &[7], 2, 4, 4);
        assert!(brute_force_loadbalance(&odd, &lim()).unwrap().is_none());
        assert!(matches!(
            equiv_loadbalancing(&odd, &lim()).unwrap(),
            LbOutcome::Infeasible(_)
        ));
    }

    #[test]
    fn reconstruction_adds_balancing() {
        let inst = lb(&[1], &[20], 2, 0, 10);
        let b = equiv_loadbalancing(&inst, &lim()).unwrap();
        let b = b.bundle().unwrap();
        let w = Schedule {
            groups: vec![(int(2), ints(&[6]))],
        };
        let full = reconstruct_schedule(b, &w).unwrap();
        assert_eq!(full.groups, vec![(int(2), ints(&[10]))]);
        let bad = Schedule {
            groups: vec![(int(1), ints(&[12])), (int(1), ints(&[0]))],
        };
        assert!(reconstruct_schedule(b, &bad).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert!(
            brute_force_loadbalance(&lb(&[2, 3], &[2, 2], 1, 10, 10), &lim())
                .unwrap()
                .is_some()
        );
        assert!(
            brute_force_loadbalance(&lb(&[2, 3], &[2, 2], 1, 11, 12), &lim())
                .unwrap()
                .is_none()
        );
        let inst = lb(&[2, 3], &[2, 2], 2, 4, 6);
        brute_force_loadbalance(&inst, &lim())
            .unwrap()
            .unwrap()
            .validate(&inst)
            .unwrap();
        assert!(brute_force_loadbalance(&lb(&[2], &[9], 2, 0, 8), &lim())
            .unwrap()
            .is_none());
    }

    #[test]
    fn fixing_branch_on_many_machines() {
        let m = 2_000_000i64;
        let inst = lb(&[1], &[5 * m], m, 5, 5);
        let b = equiv_loadbalancing(&inst, &lim()).unwrap();
        let b = b.bundle().unwrap();
        let fixed: Int = b.pre.fixed.iter().map(|(k, _)| k).sum();
        assert!(fixed.is_positive());
        assert_eq!(&fixed + &b.residual.m, int(m));
        assert!(b.residual.m <= b.report.caps.machines);
        let w = Schedule {
            groups: vec![(b.residual.m.clone(), ints(&[5]))],
        };
        reconstruct_schedule(b, &w).unwrap();
    }
}
