use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use instakernel::equivvec::reduce_vector;
use instakernel::exactmath::{BitSize, Matrix};
use instakernel::ilpcore::FeasIlp;
use instakernel::ilpreduce::{
    equiv_nfold, equiv_two_stage, kernelize_feasibility, static_equiv_ilp, u_bound, KernelOutcome,
    NFoldIlp, TwoStageIlp,
};
use instakernel::knapfam::{
    equiv_uks, static_equiv_knapsack, static_equiv_mdknapsack, static_equiv_subsetsum,
    KnapsackInstance, MdKnapsackInstance, SubsetSumInstance, UnboundedKnapsackInstance,
};
use instakernel::schedbal::{
    closed_form_bits, equiv_loadbalancing, LbOutcome, LoadBalancingInstance,
};
use instakernel::{Int, Limits};
use num_bigint::RandBigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::format::{self, parse_int, Bounded, Dec, Document, Instance, PreSol};
use crate::report::{ReductionReport, Verdict, Verification, VerifyReport};
use crate::verify::{check, check_infeasible, Check};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Static,
    Kernel,
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn budget_error(e: &anyhow::Error) -> Option<&instakernel::Error> {
    e.chain()
        .filter_map(|c| c.downcast_ref::<instakernel::Error>())
        .find(|ie| ie.is_budget())
}

fn verification_of(c: &Check) -> (Verification, Option<String>, Option<Value>) {
    match c {
        Check::Verified => (Verification::Verified, None, None),
        Check::Skipped(why) => (
            Verification::Skipped,
            Some(format!("verification skipped: {why}")),
            None,
        ),
        Check::Failed { reason, witness } => (
            Verification::Failed,
            Some(reason.clone()),
            Some(witness.clone()),
        ),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorFile {
    w: Vec<Dec>,
    #[serde(default)]
    delta: Option<Dec>,
}

#[derive(Debug, Serialize)]
pub struct VectorRecord {
    pub original: Vec<Dec>,
    pub reduced: Vec<Dec>,
    pub delta: Dec,
    pub l1_norm: Dec,
    pub verification: Verification,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

/// Checks `sign(w·z) = sign(w̄·z)` for every `z ∈ [−2Δ, 2Δ]^N`.
fn scan_equivalent(w: &[Int], wb: &[Int], delta: &Int, limit: u64) -> Check {
    let n = w.len();
    let r = delta * Int::from(2);
    let side = &r * Int::from(2) + 1;
    if num_traits::pow(side, n) > Int::from(limit) {
        return Check::Skipped(format!(
            "(4Δ+1)^{n} difference vectors exceed the budget {limit}"
        ));
    }
    let mut z = vec![-r.clone(); n];
    loop {
        let a: Int = w.iter().zip(&z).map(|(x, y)| x * y).sum();
        let b: Int = wb.iter().zip(&z).map(|(x, y)| x * y).sum();
        if a.signum() != b.signum() {
            return Check::Failed {
                reason: "the vectors order two points differently".into(),
                witness: serde_json::json!({"difference": z.iter().map(Int::to_string).collect::<Vec<_>>()}),
            };
        }
        let mut i = 0;
        loop {
            if i == n {
                return Check::Verified;
            }
            if z[i] < r {
                z[i] += 1;
                break;
            }
            z[i] = -r.clone();
            i += 1;
        }
    }
}

pub fn reduce_vector_cmd(
    input: Option<&Path>,
    w_csv: Option<&str>,
    delta: Option<&str>,
    verify: bool,
    limits: &Limits,
) -> Result<(VectorRecord, u8)> {
    let (w, file_delta) = match (input, w_csv) {
        (Some(p), None) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))?;
            let f: VectorFile =
                serde_json::from_str(&text).with_context(|| format!("in {}", p.display()))?;
            (
                f.w.into_iter().map(|d| d.0).collect::<Vec<_>>(),
                f.delta.map(|d| d.0),
            )
        }
        (None, Some(csv)) => (
            csv.split(',')
                .map(|s| parse_int(s.trim()))
                .collect::<Result<Vec<_>>>()
                .context("--w expects comma-separated integers")?,
            None,
        ),
        _ => bail!("give exactly one of --in and --w"),
    };
    let delta = match delta {
        Some(d) => parse_int(d)?,
        None => file_delta.unwrap_or_else(Int::one),
    };
    if delta < Int::one() {
        bail!("--delta must be at least 1");
    }
    let red = reduce_vector(&w, &delta, limits)?;
    let check = if verify {
        scan_equivalent(&w, &red.reduced, &delta, limits.enumeration)
    } else {
        Check::Skipped("not requested".into())
    };
    let (verification, _, counterexample) = verification_of(&check);
    let code = if verification == Verification::Failed {
        3
    } else {
        0
    };
    Ok((
        VectorRecord {
            original: w.into_iter().map(Dec).collect(),
            reduced: red.reduced.into_iter().map(Dec).collect(),
            delta: Dec(delta),
            l1_norm: Dec(red.l1_norm),
            verified: verification == Verification::Verified,
            verification,
            counterexample,
        },
        code,
    ))
}

struct Compressed {
    mode: &'static str,
    verdict: Verdict,
    reduced: Option<Instance>,
    pre: Option<PreSol>,
    original_bits: u64,
    reduced_bits: Option<u64>,
    bound: Option<u64>,
}

fn reduced(
    mode: &'static str,
    inst: Instance,
    pre: Option<PreSol>,
    original_bits: u64,
    reduced_bits: u64,
    bound: u64,
) -> Compressed {
    Compressed {
        mode,
        verdict: Verdict::Reduced,
        reduced: Some(inst),
        pre,
        original_bits,
        reduced_bits: Some(reduced_bits),
        bound: Some(bound),
    }
}

fn infeasible(mode: &'static str, original_bits: u64) -> Compressed {
    Compressed {
        mode,
        verdict: Verdict::Infeasible,
        reduced: None,
        pre: None,
        original_bits,
        reduced_bits: None,
        bound: None,
    }
}

/// Size of a residual system that meets the kernel bounds with equality:
/// the same matrix, `|b′_i| = N Δ P` and the box `[0, 2P]`.
fn kernel_bound_bits(ilp: &FeasIlp, p: &Int) -> u64 {
    let n = ilp.num_vars() as u64;
    let m = ilp.num_rows() as u64;
    let rhs = Int::from(n) * ilp.delta() * p;
    ilp.a.bit_size()
        + m * rhs.bit_size()
        + n * Int::zero().bit_size()
        + n * (p * Int::from(2)).bit_size()
}

/// `max |bound|` over a finite box, which holds every solution.
fn box_radius(ilp: &FeasIlp) -> Option<Int> {
    let upper = ilp.upper.as_ref()?;
    ilp.lower.iter().chain(upper).map(Signed::abs).max()
}

fn block_u(u: Option<&Int>, bound: Option<&Int>, assembled: &FeasIlp) -> Int {
    u.or(bound).cloned().unwrap_or_else(|| u_bound(assembled))
}

fn compress_instance(
    inst: &Instance,
    mode: Mode,
    u: Option<&Int>,
    limits: &Limits,
) -> Result<Compressed> {
    let original_bits = instance_bits(inst);
    Ok(match (inst, mode) {
        (Instance::Ilp(ilp), Mode::Static) => {
            let u = u.cloned().or_else(|| box_radius(ilp));
            let r = static_equiv_ilp(ilp, u.as_ref(), limits)?;
            let b = r.bit_report;
            reduced(
                "static",
                Instance::Ilp(r.reduced),
                None,
                b.before,
                b.after,
                b.bound,
            )
        }
        (Instance::Ilp(ilp), Mode::Kernel) => match kernelize_feasibility(ilp)? {
            KernelOutcome::Kernel(k) => {
                let bound = kernel_bound_bits(ilp, &k.proximity);
                let bits = k.residual.bit_size();
                reduced(
                    "kernel",
                    Instance::Ilp(k.residual),
                    Some(PreSol::Kernel(k.fixed)),
                    original_bits,
                    bits,
                    bound,
                )
            }
            KernelOutcome::Infeasible(_) => infeasible("kernel", original_bits),
        },
        (Instance::TwoStage(t), Mode::Static) => {
            let u = block_u(u, t.bound.as_ref(), &t.ilp.assemble()?);
            let r = equiv_two_stage(&t.ilp, &u, limits)?;
            let bits = r.blocks.bit_size();
            let bound = r.bit_bound();
            let out = Bounded {
                ilp: r.blocks,
                bound: Some(u),
            };
            reduced(
                "static",
                Instance::TwoStage(out),
                None,
                original_bits,
                bits,
                bound,
            )
        }
        (Instance::NFold(t), Mode::Static) => {
            let u = block_u(u, t.bound.as_ref(), &t.ilp.assemble()?);
            let r = equiv_nfold(&t.ilp, &u, limits)?;
            let bits = r.blocks.bit_size();
            let bound = r.bit_bound();
            let out = Bounded {
                ilp: r.blocks,
                bound: Some(u),
            };
            reduced(
                "static",
                Instance::NFold(out),
                None,
                original_bits,
                bits,
                bound,
            )
        }
        (Instance::TwoStage(_) | Instance::NFold(_), Mode::Kernel) => {
            bail!("--mode kernel applies to ilp instances only")
        }
        (Instance::Knapsack(k), _) => {
            let r = static_equiv_knapsack(k, limits)?;
            reduced(
                "static",
                Instance::Knapsack(r.reduced),
                None,
                r.bits_before,
                r.bits_after,
                r.bits_bound,
            )
        }
        (Instance::SubsetSum(k), _) => {
            let r = static_equiv_subsetsum(k, limits)?;
            reduced(
                "static",
                Instance::SubsetSum(r.reduced),
                None,
                r.bits_before,
                r.bits_after,
                r.bits_bound,
            )
        }
        (Instance::Mdks(k), _) => {
            let r = static_equiv_mdknapsack(k, limits)?;
            reduced(
                "static",
                Instance::Mdks(r.reduced),
                None,
                r.bits_before,
                r.bits_after,
                r.bits_bound,
            )
        }
        (Instance::Uks(k), _) => {
            let r = equiv_uks(k, limits)?;
            let red = &r.reduction;
            reduced(
                "equivalent",
                Instance::Knapsack(red.reduced.clone()),
                Some(PreSol::Copies(r.expansion.copies)),
                original_bits,
                red.bits_after,
                red.bits_bound,
            )
        }
        (Instance::LoadBalance(lb), _) => match equiv_loadbalancing(lb, limits)? {
            LbOutcome::Equivalent(b) => {
                let bound = closed_form_bits(lb.d(), &lb.pmax());
                let bits = b.report.residual_bits;
                reduced(
                    "equivalent",
                    Instance::LoadBalance(b.residual),
                    Some(PreSol::Schedule(b.pre)),
                    original_bits,
                    bits,
                    bound,
                )
            }
            LbOutcome::Infeasible(_) => infeasible("equivalent", original_bits),
        },
    })
}

pub fn instance_bits(inst: &Instance) -> u64 {
    match inst {
        Instance::Ilp(x) => x.bit_size(),
        Instance::TwoStage(x) => x.ilp.bit_size() + x.bound.as_ref().map_or(0, BitSize::bit_size),
        Instance::NFold(x) => x.ilp.bit_size() + x.bound.as_ref().map_or(0, BitSize::bit_size),
        Instance::Knapsack(x) => x.bit_size(),
        Instance::SubsetSum(x) => x.bit_size(),
        Instance::Uks(x) => x.bit_size(),
        Instance::Mdks(x) => x.bit_size(),
        Instance::LoadBalance(x) => x.bit_size(),
    }
}

/// `x.json` becomes `x.pre.json`.
pub fn default_pre_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.pre.json"))
}

pub struct CompressArgs<'a> {
    pub input: &'a Path,
    pub mode: Mode,
    pub u: Option<&'a str>,
    pub verify: bool,
    pub out: &'a Path,
    pub pre_out: Option<&'a Path>,
}

pub fn compress_cmd(args: &CompressArgs, limits: &Limits) -> Result<(ReductionReport, u8)> {
    let start = Instant::now();
    let inst = format::read_instance(args.input)?;
    let u = args.u.map(parse_int).transpose()?;
    if u.as_ref().is_some_and(Signed::is_negative) {
        bail!("--u must be nonnegative");
    }
    let mut report = ReductionReport {
        kind: inst.kind().to_string(),
        mode: match args.mode {
            Mode::Static => "static".into(),
            Mode::Kernel => "kernel".into(),
        },
        original_bits: instance_bits(&inst),
        reduced_bits: None,
        theoretical_bound_bits: None,
        elapsed_ms: 0,
        verdict: Verdict::BudgetExceeded,
        verification: Verification::Skipped,
        note: None,
        counterexample: None,
        outputs: Vec::new(),
    };
    let c = match compress_instance(&inst, args.mode, u.as_ref(), limits) {
        Ok(c) => c,
        Err(e) => {
            let Some(be) = budget_error(&e) else {
                return Err(e);
            };
            report.note = Some(be.to_string());
            report.elapsed_ms = elapsed_ms(start);
            return Ok((report, 2));
        }
    };
    report.mode = c.mode.into();
    report.original_bits = c.original_bits;
    report.reduced_bits = c.reduced_bits;
    report.theoretical_bound_bits = c.bound;
    report.verdict = c.verdict;
    if let Some(red) = &c.reduced {
        format::write_document(args.out, &Document::Instance(red.clone()))?;
        report.outputs.push(args.out.display().to_string());
        if let Some(pre) = &c.pre {
            let path = args
                .pre_out
                .map_or_else(|| default_pre_path(args.out), Path::to_path_buf);
            format::write_document(&path, &Document::Pre(pre.clone()))?;
            report.outputs.push(path.display().to_string());
        }
    }
    let mut code = 0;
    if args.verify {
        let result = match &c.reduced {
            Some(red) => check(&inst, red, c.pre.as_ref(), limits)?,
            None => check_infeasible(&inst, limits)?,
        };
        let (v, note, witness) = verification_of(&result);
        report.verification = v;
        report.note = note;
        report.counterexample = witness;
        if v == Verification::Failed {
            code = 3;
        }
    } else {
        report.note = Some("verification not requested".into());
    }
    report.elapsed_ms = elapsed_ms(start);
    Ok((report, code))
}

pub fn verify_cmd(
    original: &Path,
    reduced_path: &Path,
    pre: Option<&Path>,
    limits: &Limits,
) -> Result<(VerifyReport, u8)> {
    let start = Instant::now();
    let a = format::read_instance(original)?;
    let b = format::read_instance(reduced_path)?;
    let p = pre.map(format::read_pre).transpose()?;
    let result = check(&a, &b, p.as_ref(), limits)?;
    let (verification, note, counterexample) = verification_of(&result);
    let code = match verification {
        Verification::Verified => 0,
        Verification::Skipped => 2,
        Verification::Failed => 3,
    };
    Ok((
        VerifyReport {
            kind: a.kind().to_string(),
            elapsed_ms: elapsed_ms(start),
            verification,
            note,
            counterexample,
        },
        code,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GenKind {
    Ilp,
    TwoStage,
    Nfold,
    Knapsack,
    Subsetsum,
    Uks,
    Mdks,
    Loadbalance,
}

fn random_bits(r: &mut ChaCha8Rng, bits: u64) -> Int {
    let lo = Int::one() << (bits.max(1) - 1);
    let hi = Int::one() << bits.max(1);
    r.gen_bigint_range(&lo, &hi)
}

fn small_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, a: i64) -> instakernel::IntMatrix {
    let data = (0..rows * cols)
        .map(|_| Int::from(r.gen_range(-a..=a)))
        .collect();
    Matrix::new(rows, cols, data).expect("consistent shape")
}

/// A random instance of the given kind. Right-hand sides are taken from a
/// planted solution, so the instance is feasible.
pub fn generate(kind: GenKind, size: usize, bits: u64, seed: u64) -> Result<Instance> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = size.max(1);
    let pick = |r: &mut ChaCha8Rng| -> Vec<bool> { (0..n).map(|_| r.gen_bool(0.5)).collect() };
    let sum_of = |v: &[Int], s: &[bool]| -> Int {
        v.iter().zip(s).filter(|(_, &c)| c).map(|(x, _)| x).sum()
    };
    Ok(match kind {
        GenKind::Ilp => {
            let m = 2.min(n);
            let big = Int::one() << bits.max(1);
            let data = (0..m * n)
                .map(|_| r.gen_bigint_range(&-big.clone(), &big))
                .collect();
            let a = Matrix::new(m, n, data)?;
            let x: Vec<Int> = (0..n).map(|_| Int::from(r.gen_range(0..=2))).collect();
            let b = a.mul_vec(&x)?;
            Instance::Ilp(FeasIlp::new(a, b)?.with_uniform_box(&Int::from(2)))
        }
        GenKind::TwoStage => {
            let blocks = n.min(3);
            let a = (0..blocks)
                .map(|_| small_matrix(&mut r, 1, 1, 20))
                .collect::<Vec<_>>();
            let b = (0..blocks)
                .map(|_| small_matrix(&mut r, 1, 2, 20))
                .collect::<Vec<_>>();
            let ts = TwoStageIlp {
                a,
                b,
                rhs: vec![vec![Int::zero()]; blocks],
            };
            let x: Vec<Int> = (0..1 + 2 * blocks)
                .map(|_| Int::from(r.gen_range(0..=1)))
                .collect();
            let rhs = ts.assemble()?.a.mul_vec(&x)?;
            Instance::TwoStage(Bounded {
                ilp: TwoStageIlp {
                    rhs: rhs.into_iter().map(|v| vec![v]).collect(),
                    ..ts
                },
                bound: Some(Int::one()),
            })
        }
        GenKind::Nfold => {
            let blocks = n.min(3);
            let a = (0..blocks)
                .map(|_| small_matrix(&mut r, 1, 2, 20))
                .collect::<Vec<_>>();
            let b = (0..blocks)
                .map(|_| small_matrix(&mut r, 1, 2, 20))
                .collect::<Vec<_>>();
            let nf = NFoldIlp {
                a,
                b,
                link_rhs: vec![Int::zero()],
                block_rhs: vec![vec![Int::zero()]; blocks],
            };
            let x: Vec<Int> = (0..2 * blocks)
                .map(|_| Int::from(r.gen_range(0..=1)))
                .collect();
            let rhs = nf.assemble()?.a.mul_vec(&x)?;
            Instance::NFold(Bounded {
                ilp: NFoldIlp {
                    link_rhs: vec![rhs[0].clone()],
                    block_rhs: rhs[1..].iter().map(|v| vec![v.clone()]).collect(),
                    ..nf
                },
                bound: Some(Int::one()),
            })
        }
        GenKind::Knapsack => {
            let weights: Vec<Int> = (0..n).map(|_| random_bits(&mut r, bits)).collect();
            let profits: Vec<Int> = (0..n).map(|_| random_bits(&mut r, bits)).collect();
            let s = pick(&mut r);
            Instance::Knapsack(KnapsackInstance {
                capacity: sum_of(&weights, &s),
                target: sum_of(&profits, &s),
                weights,
                profits,
            })
        }
        GenKind::Subsetsum => {
            let values: Vec<Int> = (0..n).map(|_| random_bits(&mut r, bits)).collect();
            let s = pick(&mut r);
            Instance::SubsetSum(SubsetSumInstance {
                target: sum_of(&values, &s),
                values,
            })
        }
        GenKind::Uks => {
            let weights: Vec<Int> = (0..n).map(|_| Int::from(r.gen_range(1..=20))).collect();
            let profits: Vec<Int> = (0..n).map(|_| Int::from(r.gen_range(0..=30))).collect();
            Instance::Uks(UnboundedKnapsackInstance {
                weights,
                profits,
                capacity: Int::from(r.gen_range(0..=50)),
                target: Int::from(r.gen_range(0..=60)),
            })
        }
        GenKind::Mdks => {
            let rows: Vec<Vec<Int>> = (0..2)
                .map(|_| (0..n).map(|_| random_bits(&mut r, bits)).collect())
                .collect();
            let profits: Vec<Int> = (0..n).map(|_| random_bits(&mut r, bits)).collect();
            let s = pick(&mut r);
            Instance::Mdks(MdKnapsackInstance {
                capacities: rows.iter().map(|row| sum_of(row, &s)).collect(),
                target: sum_of(&profits, &s),
                weight_matrix: Matrix::from_rows_with_cols(rows, n)?,
                profits,
            })
        }
        GenKind::Loadbalance => {
            let d = n.min(3);
            let p: Vec<Int> = (0..d).map(|_| Int::from(r.gen_range(1..=5))).collect();
            let m: i64 = r.gen_range(1..=4);
            let counts: Vec<i64> = (0..d).map(|_| r.gen_range(0..=3 * m)).collect();
            let inst = LoadBalancingInstance {
                n: counts.iter().map(|&c| Int::from(c)).collect(),
                m: Int::from(m),
                l: Int::zero(),
                u: Int::zero(),
                p,
            };
            let avg = inst.total_work() / Int::from(m);
            let l = (&avg - Int::from(r.gen_range(0..=2))).max(Int::zero());
            let u = &avg + Int::from(r.gen_range(1..=3));
            Instance::LoadBalance(LoadBalancingInstance { l, u, ..inst })
        }
    })
}
