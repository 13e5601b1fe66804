//! Compressions of feasibility ILPs `A x = b`.
//!
//! [`static_equiv_ilp`] replaces each row `(A_i, b_i)` by a small equivalent
//! vector, which keeps the solution set inside `[−u, u]^N` unchanged.
//! [`kernelize_feasibility`] instead fixes the part of an LP vertex that lies
//! far from zero and leaves a residual system on a small box.

use num_traits::{pow, One, Signed, Zero};

use crate::equivvec::{reduce_vector, ReducedVector};
use crate::exactmath::{ilog2_floor, BitSize, Matrix};
use crate::ilpcore::FeasIlp;
use crate::lpcore::{solve_vertex, LpOutcome, LpVertex, StandardLp};
use crate::{Error, Int, IntMatrix, Limits, Rat, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitReport {
    pub before: u64,
    pub after: u64,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticEquivIlp {
    pub original: FeasIlp,
    /// Same `M × N` shape, box intersected with `[−u, u]^N`.
    pub reduced: FeasIlp,
    pub u_used: Int,
    pub rows: Vec<ReducedVector>,
    pub bit_report: BitReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProximityKernel {
    pub fixed: Vec<Int>,
    pub residual: FeasIlp,
    pub proximity: Int,
    pub lp_vertex: LpVertex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelOutcome {
    Kernel(ProximityKernel),
    /// The LP relaxation is empty, so the ILP is too.
    Infeasible(String),
}

impl KernelOutcome {
    pub fn kernel(&self) -> Option<&ProximityKernel> {
        match self {
            KernelOutcome::Kernel(k) => Some(k),
            KernelOutcome::Infeasible(_) => None,
        }
    }
}

/// `N (M ‖A‖∞)^{2M+3} (1 + ‖b‖∞)`, a bound on the ∞-norm of a smallest
/// solution.
pub fn u_bound(ilp: &FeasIlp) -> Int {
    let m = ilp.num_rows();
    let n = Int::from(ilp.num_vars());
    let base = Int::from(m) * ilp.delta();
    let b_inf = ilp.b.iter().map(Signed::abs).max().unwrap_or_default();
    n * pow(base, 2 * m + 3) * (Int::one() + b_inf)
}

/// `M (2 M Δ + 1)^M`.
pub fn proximity_radius(m_rows: usize, delta: &Int) -> Int {
    let m = Int::from(m_rows);
    let base = Int::from(2) * &m * delta + 1;
    m * pow(base, m_rows)
}

/// `6 · max(M,1) · (N+1)² · (1 + ⌊log₂((N+1) u)⌋)`.
pub fn static_bit_bound(m_rows: usize, n_vars: usize, u: &Int) -> u64 {
    let k = n_vars as u64 + 1;
    6 * (m_rows.max(1) as u64) * k * k * (1 + ilog2_floor(&(Int::from(k) * u)))
}

/// Reduces every row of `ilp` so that the solutions with `‖x‖∞ ≤ u` are
/// unchanged. Without `u` the solution-size bound [`u_bound`] is used.
pub fn static_equiv_ilp(ilp: &FeasIlp, u: Option<&Int>, limits: &Limits) -> Result<StaticEquivIlp> {
    ilp.validate()?;
    let u = match u {
        Some(u) if u.is_negative() => {
            return Err(Error::InvalidInput(format!("negative solution bound {u}")))
        }
        Some(u) => u.clone(),
        None => u_bound(ilp),
    }
    .max(Int::one());
    let n = ilp.num_vars();
    let mut rows = Vec::with_capacity(ilp.num_rows());
    for (row, b) in ilp.a.row_iter().zip(&ilp.b) {
        let mut w = row.to_vec();
        w.push(b.clone());
        rows.push(reduce_vector(&w, &u, limits)?);
    }
    let a_rows: Vec<Vec<Int>> = rows.iter().map(|r| r.reduced[..n].to_vec()).collect();
    let b: Vec<Int> = rows.iter().map(|r| r.reduced[n].clone()).collect();
    let neg = -u.clone();
    let reduced = FeasIlp {
        a: Matrix::from_rows_with_cols(a_rows, n)?,
        b,
        lower: ilp.lower.iter().map(|l| l.max(&neg).clone()).collect(),
        upper: Some(match &ilp.upper {
            Some(up) => up.iter().map(|x| x.min(&u).clone()).collect(),
            None => vec![u.clone(); n],
        }),
    };
    let bit_report = BitReport {
        before: ilp.bit_size(),
        after: reduced.bit_size(),
        bound: static_bit_bound(ilp.num_rows(), n, &u),
    };
    Ok(StaticEquivIlp {
        original: ilp.clone(),
        reduced,
        u_used: u,
        rows,
        bit_report,
    })
}

fn ceil_rat(x: &Rat) -> Int {
    x.ceil().to_integer()
}

/// Packs `max(0, ⌈x*_i − P⌉)` of every variable, where `x*` is an LP vertex
/// and `P` the proximity radius, and returns the residual system on
/// `[0, 2P]^N`. Variables must have lower bound 0 and no upper bound.
pub fn kernelize_feasibility(ilp: &FeasIlp) -> Result<KernelOutcome> {
    ilp.validate()?;
    if ilp.lower.iter().any(|l| !l.is_zero()) || ilp.upper.is_some() {
        return Err(Error::InvalidInput(
            "the kernel expects x ≥ 0 without upper bounds".into(),
        ));
    }
    let n = ilp.num_vars();
    let delta = ilp.delta();
    let p = proximity_radius(ilp.num_rows(), &delta);
    let vertex = match solve_vertex(&StandardLp::new(ilp.a.clone(), ilp.b.clone()))? {
        LpOutcome::Optimal(v) => v,
        LpOutcome::Infeasible => {
            return Ok(KernelOutcome::Infeasible("LP relaxation infeasible".into()));
        }
        LpOutcome::Unbounded => unreachable!("zero objective"),
    };
    let pr = Rat::from_integer(p.clone());
    let fixed: Vec<Int> = vertex
        .values
        .iter()
        .map(|x| ceil_rat(&(x - &pr)).max(Int::zero()))
        .collect();
    let b_res: Vec<Int> = ilp
        .a
        .mul_vec(&fixed)?
        .into_iter()
        .zip(&ilp.b)
        .map(|(af, b)| b - af)
        .collect();
    let limit = Int::from(n) * &delta * &p;
    if let Some(bad) = b_res.iter().find(|v| v.abs() > limit) {
        return Err(Error::Inconsistent(format!(
            "residual right-hand side {bad} exceeds {limit}"
        )));
    }
    let residual = FeasIlp::new(ilp.a.clone(), b_res)?.with_upper(vec![Int::from(2) * &p; n])?;
    Ok(KernelOutcome::Kernel(ProximityKernel {
        fixed,
        residual,
        proximity: p,
        lp_vertex: vertex,
    }))
}

impl ProximityKernel {
    /// `fixed + x′`.
    pub fn lift(&self, residual_solution: &[Int]) -> Vec<Int> {
        self.fixed
            .iter()
            .zip(residual_solution)
            .map(|(a, b)| a + b)
            .collect()
    }
}

/// `A_i` is `s × r` and `B_i` is `s × t`; block row `i` reads
/// `A_i x⁰ + B_i xⁱ = b_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoStageIlp {
    pub a: Vec<IntMatrix>,
    pub b: Vec<IntMatrix>,
    pub rhs: Vec<Vec<Int>>,
}

/// `A_i` is `r × t` and `B_i` is `s × t`; the linking rows read
/// `Σ A_i xⁱ = link_rhs` and block `i` reads `B_i xⁱ = block_rhs_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NFoldIlp {
    pub a: Vec<IntMatrix>,
    pub b: Vec<IntMatrix>,
    pub link_rhs: Vec<Int>,
    pub block_rhs: Vec<Vec<Int>>,
}

fn uniform_shape(ms: &[IntMatrix], what: &str) -> Result<(usize, usize)> {
    let Some(first) = ms.first() else {
        return Err(Error::InvalidInput(format!("no {what} blocks")));
    };
    let shape = (first.rows(), first.cols());
    if ms.iter().any(|m| (m.rows(), m.cols()) != shape) {
        return Err(Error::Dimension(format!("{what} blocks differ in shape")));
    }
    Ok(shape)
}

fn check_rhs(rhs: &[Vec<Int>], blocks: usize, len: usize) -> Result<()> {
    if rhs.len() != blocks || rhs.iter().any(|r| r.len() != len) {
        return Err(Error::Dimension("block right-hand sides".into()));
    }
    Ok(())
}

impl TwoStageIlp {
    pub fn blocks(&self) -> usize {
        self.a.len()
    }

    /// `(s, r, t)`.
    pub fn shape(&self) -> Result<(usize, usize, usize)> {
        let (s, r) = uniform_shape(&self.a, "A")?;
        let (s2, t) = uniform_shape(&self.b, "B")?;
        if s != s2 || self.a.len() != self.b.len() {
            return Err(Error::Dimension("A and B blocks do not match".into()));
        }
        check_rhs(&self.rhs, self.blocks(), s)?;
        Ok((s, r, t))
    }

    /// Block row `i` as an ILP over `(x⁰, xⁱ)`.
    pub fn block_ilp(&self, i: usize) -> Result<FeasIlp> {
        let (s, r, t) = self.shape()?;
        let mut m = Matrix::zeros(s, r + t);
        for row in 0..s {
            for j in 0..r {
                m.set(row, j, self.a[i].get(row, j).clone());
            }
            for j in 0..t {
                m.set(row, r + j, self.b[i].get(row, j).clone());
            }
        }
        FeasIlp::new(m, self.rhs[i].clone())
    }

    pub fn assemble(&self) -> Result<FeasIlp> {
        let (s, r, t) = self.shape()?;
        let n = self.blocks();
        let mut m = Matrix::zeros(n * s, r + n * t);
        let mut b = Vec::with_capacity(n * s);
        for i in 0..n {
            for row in 0..s {
                for j in 0..r {
                    m.set(i * s + row, j, self.a[i].get(row, j).clone());
                }
                for j in 0..t {
                    m.set(i * s + row, r + i * t + j, self.b[i].get(row, j).clone());
                }
            }
            b.extend(self.rhs[i].iter().cloned());
        }
        FeasIlp::new(m, b)
    }
}

impl NFoldIlp {
    pub fn blocks(&self) -> usize {
        self.a.len()
    }

    /// `(r, s, t)`.
    pub fn shape(&self) -> Result<(usize, usize, usize)> {
        let (r, t) = uniform_shape(&self.a, "A")?;
        let (s, t2) = uniform_shape(&self.b, "B")?;
        if t != t2 || self.a.len() != self.b.len() {
            return Err(Error::Dimension("A and B blocks do not match".into()));
        }
        if self.link_rhs.len() != r {
            return Err(Error::Dimension("linking right-hand side".into()));
        }
        check_rhs(&self.block_rhs, self.blocks(), s)?;
        Ok((r, s, t))
    }

    /// The linking rows over all `n t` variables.
    pub fn linking_ilp(&self) -> Result<FeasIlp> {
        let (r, _, t) = self.shape()?;
        let n = self.blocks();
        let mut m = Matrix::zeros(r, n * t);
        for (i, a) in self.a.iter().enumerate() {
            for row in 0..r {
                for j in 0..t {
                    m.set(row, i * t + j, a.get(row, j).clone());
                }
            }
        }
        FeasIlp::new(m, self.link_rhs.clone())
    }

    pub fn block_ilp(&self, i: usize) -> Result<FeasIlp> {
        self.shape()?;
        FeasIlp::new(self.b[i].clone(), self.block_rhs[i].clone())
    }

    pub fn assemble(&self) -> Result<FeasIlp> {
        let (r, s, t) = self.shape()?;
        let n = self.blocks();
        let link = self.linking_ilp()?;
        let mut m = Matrix::zeros(r + n * s, n * t);
        for row in 0..r {
            for j in 0..n * t {
                m.set(row, j, link.a.get(row, j).clone());
            }
        }
        let mut b = self.link_rhs.clone();
        for i in 0..n {
            for row in 0..s {
                for j in 0..t {
                    m.set(r + i * s + row, i * t + j, self.b[i].get(row, j).clone());
                }
            }
            b.extend(self.block_rhs[i].iter().cloned());
        }
        FeasIlp::new(m, b)
    }
}

/// Per-part reductions and the reassembled system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockwiseReduction<T> {
    pub parts: Vec<StaticEquivIlp>,
    /// The reduced instance in block form.
    pub blocks: T,
    pub original: FeasIlp,
    pub reduced: FeasIlp,
}

impl<T> BlockwiseReduction<T> {
    /// Sum of the per-part bit bounds.
    pub fn bit_bound(&self) -> u64 {
        self.parts.iter().map(|p| p.bit_report.bound).sum()
    }
}

fn boxed(ilp: FeasIlp, u: &Int) -> FeasIlp {
    let n = ilp.num_vars();
    FeasIlp {
        upper: Some(vec![u.clone(); n]),
        ..ilp
    }
}

/// Reduces each row block `(A_i B_i | b_i)` on its own.
pub fn equiv_two_stage(
    ts: &TwoStageIlp,
    u: &Int,
    limits: &Limits,
) -> Result<BlockwiseReduction<TwoStageIlp>> {
    let (s, r, t) = ts.shape()?;
    let parts = (0..ts.blocks())
        .map(|i| static_equiv_ilp(&ts.block_ilp(i)?, Some(u), limits))
        .collect::<Result<Vec<_>>>()?;
    let reduced = TwoStageIlp {
        a: parts
            .iter()
            .map(|p| column_slice(&p.reduced.a, 0, r))
            .collect(),
        b: parts
            .iter()
            .map(|p| column_slice(&p.reduced.a, r, r + t))
            .collect(),
        rhs: parts.iter().map(|p| p.reduced.b.clone()).collect(),
    };
    debug_assert!(parts.iter().all(|p| p.reduced.num_rows() == s));
    Ok(BlockwiseReduction {
        original: boxed(ts.assemble()?, u),
        reduced: boxed(reduced.assemble()?, u),
        blocks: reduced,
        parts,
    })
}

/// Reduces the linking rows once and every diagonal block once.
pub fn equiv_nfold(
    nf: &NFoldIlp,
    u: &Int,
    limits: &Limits,
) -> Result<BlockwiseReduction<NFoldIlp>> {
    let (_, _, t) = nf.shape()?;
    let link = static_equiv_ilp(&nf.linking_ilp()?, Some(u), limits)?;
    let mut parts = vec![link];
    for i in 0..nf.blocks() {
        parts.push(static_equiv_ilp(&nf.block_ilp(i)?, Some(u), limits)?);
    }
    let reduced = NFoldIlp {
        a: (0..nf.blocks())
            .map(|i| column_slice(&parts[0].reduced.a, i * t, (i + 1) * t))
            .collect(),
        b: parts[1..].iter().map(|p| p.reduced.a.clone()).collect(),
        link_rhs: parts[0].reduced.b.clone(),
        block_rhs: parts[1..].iter().map(|p| p.reduced.b.clone()).collect(),
    };
    Ok(BlockwiseReduction {
        original: boxed(nf.assemble()?, u),
        reduced: boxed(reduced.assemble()?, u),
        blocks: reduced,
        parts,
    })
}

impl BitSize for TwoStageIlp {
    fn bit_size(&self) -> u64 {
        self.a.bit_size() + self.b.bit_size() + self.rhs.bit_size()
    }
}

impl BitSize for NFoldIlp {
    fn bit_size(&self) -> u64 {
        self.a.bit_size() + self.b.bit_size() + self.link_rhs.bit_size() + self.block_rhs.bit_size()
    }
}

fn column_slice(m: &IntMatrix, from: usize, to: usize) -> IntMatrix {
    let rows = m.row_iter().map(|r| r[from..to].to_vec()).collect();
    Matrix::from_rows_with_cols(rows, to - from).expect("slice of a valid matrix")
}
