//! Small exact integer programming: a branch-and-bound solver over the
//! rational relaxation and an exhaustive enumerator of feasible points.

mod bnb;
mod enumerate;

pub use bnb::{branch_and_bound, CutSource, IntProgram, LinRow, NoCuts};
pub use enumerate::{enumerate_feasible, find_feasible, visit_feasible};

use std::ops::ControlFlow;

use num_traits::Zero;

use crate::exactmath::{BitSize, Matrix};
use crate::{Error, Int, IntMatrix, Result};

/// `a x = b`, `lower ≤ x ≤ upper`, `x` integral.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeasIlp {
    pub a: IntMatrix,
    pub b: Vec<Int>,
    pub lower: Vec<Int>,
    pub upper: Option<Vec<Int>>,
}

impl FeasIlp {
    /// Nonnegative variables, no upper bounds.
    pub fn new(a: IntMatrix, b: Vec<Int>) -> Result<Self> {
        let ilp = FeasIlp {
            lower: vec![Int::zero(); a.cols()],
            a,
            b,
            upper: None,
        };
        ilp.validate()?;
        Ok(ilp)
    }

    pub fn with_upper(mut self, upper: Vec<Int>) -> Result<Self> {
        self.upper = Some(upper);
        self.validate()?;
        Ok(self)
    }

    pub fn from_rows(rows: &[Vec<Int>], b: Vec<Int>, n: usize) -> Result<Self> {
        Self::new(Matrix::from_rows_with_cols(rows.to_vec(), n)?, b)
    }

    pub fn num_vars(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    /// `‖A‖∞`, the largest absolute coefficient.
    pub fn delta(&self) -> Int {
        self.a.inf_norm()
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
        if self.lower.len() != n {
            return Err(Error::Dimension("lower bound length".into()));
        }
        if let Some(u) = &self.upper {
            if u.len() != n {
                return Err(Error::Dimension("upper bound length".into()));
            }
            if let Some(j) = (0..n).find(|&j| u[j] < self.lower[j]) {
                return Err(Error::InvalidInput(format!(
                    "variable {j} has lower > upper"
                )));
            }
        }
        Ok(())
    }

    /// Copy with every upper bound replaced by `min(upper, cap)`.
    pub fn capped(&self, cap: &[Int]) -> Self {
        let upper = match &self.upper {
            Some(u) => u.iter().zip(cap).map(|(a, b)| a.min(b).clone()).collect(),
            None => cap.to_vec(),
        };
        FeasIlp {
            upper: Some(upper),
            ..self.clone()
        }
    }

    pub fn with_uniform_box(&self, u: &Int) -> Self {
        self.capped(&vec![u.clone(); self.num_vars()])
    }

    pub fn is_solution(&self, x: &[Int]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let in_box = x
            .iter()
            .enumerate()
            .all(|(j, v)| v >= &self.lower[j] && self.upper.as_ref().is_none_or(|u| v <= &u[j]));
        in_box && self.a.mul_vec(x).is_ok_and(|ax| ax == self.b)
    }

    pub fn into_program(&self, objective: Option<&[Int]>) -> IntProgram {
        let n = self.num_vars();
        IntProgram {
            lower: self.lower.iter().cloned().map(Some).collect(),
            upper: match &self.upper {
                Some(u) => u.iter().cloned().map(Some).collect(),
                None => vec![None; n],
            },
            rows: self
                .a
                .row_iter()
                .zip(&self.b)
                .map(|(r, b)| LinRow::eq(r.to_vec(), b.clone()))
                .collect(),
            objective: objective.map_or_else(|| vec![Int::zero(); n], <[Int]>::to_vec),
        }
    }
}

impl BitSize for FeasIlp {
    fn bit_size(&self) -> u64 {
        self.a.bit_size() + self.b.bit_size() + self.lower.bit_size() + self.upper.bit_size()
    }
}

/// Minimizes `objective` over the integer points of `ilp` inside the box
/// `x ≤ upper_box`. Returns `None` when there is no such point.
pub fn solve_ilp(
    ilp: &FeasIlp,
    objective: Option<&[Int]>,
    upper_box: &[Int],
    node_limit: u64,
) -> Result<Option<Vec<Int>>> {
    ilp.validate()?;
    if upper_box.len() != ilp.num_vars() {
        return Err(Error::Dimension("box length".into()));
    }
    if objective.is_some_and(|c| c.len() != ilp.num_vars()) {
        return Err(Error::Dimension("objective length".into()));
    }
    let capped = ilp.capped(upper_box);
    if capped
        .lower
        .iter()
        .zip(capped.upper.as_ref().unwrap())
        .any(|(l, u)| l > u)
    {
        return Ok(None);
    }
    branch_and_bound(&capped.into_program(objective), &mut NoCuts, node_limit)
}

/// `true` when some point of the (finite) box satisfies the system.
pub fn is_feasible(ilp: &FeasIlp, limit: u64) -> Result<bool> {
    Ok(find_feasible(ilp, limit)?.is_some())
}

/// Counts solutions, stopping early once `stop_at` have been seen.
pub fn count_feasible(ilp: &FeasIlp, limit: u64, stop_at: u64) -> Result<u64> {
    let mut n = 0u64;
    visit_feasible(ilp, limit, |_| {
        n += 1;
        if n >= stop_at {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, ints};

    fn ilp(rows: &[&[i64]], b: &[i64], upper: &[i64]) -> FeasIlp {
        let n = upper.len();
        FeasIlp::from_rows(
            &rows.iter().map(|r| ints(r)).collect::<Vec<_>>(),
            ints(b),
            n,
        )
        .unwrap()
        .with_upper(ints(upper))
        .unwrap()
    }

    #[test]
    fn solve_examples() {
        let p = ilp(&[&[1, 1]], &[2], &[2, 2]);
        assert_eq!(
            solve_ilp(&p, Some(&ints(&[1, 0])), &ints(&[2, 2]), 1000).unwrap(),
            Some(ints(&[0, 2]))
        );

        let p = ilp(&[&[1, 1]], &[5], &[2, 2]);
        assert_eq!(solve_ilp(&p, None, &ints(&[2, 2]), 1000).unwrap(), None);

        let p = ilp(&[&[2, 3]], &[7], &[3, 3]);
        assert_eq!(
            solve_ilp(&p, Some(&ints(&[1, 1])), &ints(&[3, 3]), 1000).unwrap(),
            Some(ints(&[2, 1]))
        );
    }

    #[test]
    fn box_tighter_than_bounds() {
        let p = ilp(&[&[1, 1]], &[3], &[5, 5]);
        assert_eq!(
            solve_ilp(&p, Some(&ints(&[-1, 0])), &ints(&[2, 9]), 1000).unwrap(),
            Some(ints(&[2, 1]))
        );
    }

    #[test]
    fn validation() {
        let bad = FeasIlp::from_rows(&[ints(&[1, 1])], ints(&[1, 2]), 2);
        assert!(matches!(bad, Err(Error::Dimension(_))));
        let p = FeasIlp::from_rows(&[ints(&[1, 1])], ints(&[1]), 2).unwrap();
        assert!(p.clone().with_upper(ints(&[-1, 0])).is_err());
        assert!(p.is_solution(&ints(&[1, 0])));
        assert!(!p.is_solution(&ints(&[2, -1])));
        assert_eq!(p.delta(), int(1));
    }
}
