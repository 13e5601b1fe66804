use num_traits::{One, Zero};

use super::{ExactInt, Matrix, Ratio};
use crate::{Error, Result};

fn rows_of<T: Clone>(m: &Matrix<T>) -> Vec<Vec<T>> {
    m.to_rows()
}

/// Determinant by Bareiss fraction-free elimination. Every intermediate
/// value is itself a minor of `m`, so nothing grows beyond the Hadamard bound.
pub fn det<T: ExactInt>(m: &Matrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(T::one());
    }
    let mut a = rows_of(m);
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(T::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = v / prev.clone();
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Rank over the rationals, via fraction-free elimination.
pub fn rank<T: ExactInt>(m: &Matrix<T>) -> usize {
    let mut a = rows_of(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let (f, g) = (a[r][c].clone(), a[i][c].clone());
            for j in c..cols {
                a[i][j] = a[i][j].clone() * f.clone() - a[r][j].clone() * g.clone();
            }
            let h = super::gcd_all(&a[i][c..]);
            if !h.is_zero() && !h.is_one() {
                for x in &mut a[i][c..] {
                    *x = x.clone() / h.clone();
                }
            }
        }
        r += 1;
    }
    r
}

/// Result of [`cramer_solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CramerSolution<T: ExactInt> {
    pub rational: Vec<Ratio<T>>,
    /// `scale * rational`, always integral.
    pub scaled: Vec<T>,
    /// `|det B|`.
    pub scale: T,
}

/// Solves `b_mat x = rhs` by Cramer's rule.
pub fn cramer_solve<T: ExactInt>(b_mat: &Matrix<T>, rhs: &[T]) -> Result<CramerSolution<T>> {
    let d = det(b_mat)?;
    if rhs.len() != b_mat.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            rhs.len(),
            b_mat.rows()
        )));
    }
    if d.is_zero() {
        return Err(Error::Singular);
    }
    let n = b_mat.cols();
    let mut rational = Vec::with_capacity(n);
    let mut scaled = Vec::with_capacity(n);
    for i in 0..n {
        let mut bi = b_mat.clone();
        for (r, v) in rhs.iter().enumerate() {
            bi.set(r, i, v.clone());
        }
        let di = det(&bi)?;
        scaled.push(if d.is_negative() {
            -di.clone()
        } else {
            di.clone()
        });
        rational.push(Ratio::new(di, d.clone()));
    }
    Ok(CramerSolution {
        rational,
        scaled,
        scale: d.abs(),
    })
}

/// Incremental linear-independence test over the rationals. Keeps the
/// accepted vectors in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct IndependenceTracker<T: ExactInt> {
    dim: usize,
    rows: Vec<(usize, Vec<Ratio<T>>)>,
}

impl<T: ExactInt> IndependenceTracker<T> {
    pub fn new(dim: usize) -> Self {
        IndependenceTracker {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    fn reduce(&self, v: &[T]) -> Vec<Ratio<T>> {
        let mut v: Vec<Ratio<T>> = v.iter().map(|x| Ratio::from_integer(x.clone())).collect();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        v
    }

    pub fn is_independent(&self, v: &[T]) -> bool {
        self.reduce(v).iter().any(|x| !x.is_zero())
    }

    /// Adds `v` if it is independent of everything accepted so far.
    pub fn insert(&mut self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = Ratio::one() / r[p].clone();
        for x in &mut r {
            *x = x.clone() * inv.clone();
        }
        for (_, row) in &mut self.rows {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        self.rows.push((p, r));
        true
    }
}
