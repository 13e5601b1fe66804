//! Exhaustive enumeration of the integer points of a bounded system.
//!
//! The equality system is brought to reduced row echelon form first, with
//! pivots taken from the widest-range variables. Only the remaining free
//! variables are branched on; each pivot variable is then determined. Every
//! partial assignment is pruned by an interval test and a divisibility test
//! on each pivot row, so inconsistent or very thin systems terminate fast.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::FeasIlp;
use crate::exactmath::ExactInt;
use crate::{Error, Int, Rat, Result};

/// `delta·x[pivot] + Σ gamma[k]·x[free[k]] = beta`.
#[derive(Debug, Clone)]
struct PivotRow<T> {
    pivot: usize,
    delta: T,
    gamma: Vec<T>,
    beta: T,
}

#[derive(Debug, Clone)]
struct Reduced<T> {
    n: usize,
    free: Vec<usize>,
    rows: Vec<PivotRow<T>>,
    lo: Vec<T>,
    hi: Vec<T>,
}

/// Gauss-Jordan over the rationals, then rows scaled back to integers.
/// `None` when the equations are inconsistent.
fn reduce_system(ilp: &FeasIlp, upper: &[Int]) -> Option<Reduced<Int>> {
    let (m, n) = (ilp.num_rows(), ilp.num_vars());
    let mut rows: Vec<Vec<Rat>> = ilp
        .a
        .row_iter()
        .zip(&ilp.b)
        .map(|(r, b)| {
            r.iter()
                .chain(std::iter::once(b))
                .map(|x| Rat::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let ri = &upper[i] - &ilp.lower[i];
        let rj = &upper[j] - &ilp.lower[j];
        rj.cmp(&ri).then(i.cmp(&j))
    });
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for &c in &order {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rat::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..=n {
                    let v = &rows[r][k] * &f;
                    rows[i][k] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    free.sort_unstable();
    let prows = pivots
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let l = rows[i].iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
            let scale = |x: &Rat| (x * Rat::from_integer(l.clone())).to_integer();
            PivotRow {
                pivot: p,
                delta: l.clone(),
                gamma: free.iter().map(|&j| scale(&rows[i][j])).collect(),
                beta: scale(&rows[i][n]),
            }
        })
        .collect();
    Some(Reduced {
        n,
        free,
        rows: prows,
        lo: ilp.lower.clone(),
        hi: upper.to_vec(),
    })
}

impl Reduced<Int> {
    fn magnitude_bits(&self) -> u64 {
        let mb = self
            .lo
            .iter()
            .chain(&self.hi)
            .map(|x| x.magnitude().bits())
            .max()
            .unwrap_or(0);
        self.rows
            .iter()
            .map(|r| {
                let g = r
                    .gamma
                    .iter()
                    .chain([&r.delta, &r.beta])
                    .map(|x| x.magnitude().bits())
                    .max()
                    .unwrap_or(0);
                g + mb + 1 + (r.gamma.len() as u64 + 2).ilog2() as u64 + 1
            })
            .max()
            .unwrap_or(0)
    }

    fn convert<T: ExactInt>(&self, f: impl Fn(&Int) -> T) -> Reduced<T> {
        Reduced {
            n: self.n,
            free: self.free.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| PivotRow {
                    pivot: r.pivot,
                    delta: f(&r.delta),
                    gamma: r.gamma.iter().map(&f).collect(),
                    beta: f(&r.beta),
                })
                .collect(),
            lo: self.lo.iter().map(&f).collect(),
            hi: self.hi.iter().map(&f).collect(),
        }
    }
}

struct Search<'a, T, F> {
    sys: &'a Reduced<T>,
    /// per row, per level: bounds on Σ_{k ≥ level} gamma[k]·x[free[k]]
    suf_min: Vec<Vec<T>>,
    suf_max: Vec<Vec<T>>,
    /// per row, per level: gcd(delta, gamma[level..])
    suf_gcd: Vec<Vec<T>>,
    x: Vec<T>,
    rem: Vec<T>,
    nodes: u64,
    limit: u64,
    visit: F,
    to_int: fn(&T) -> Int,
}

impl<T: ExactInt, F: FnMut(&[Int]) -> ControlFlow<()>> Search<'_, T, F> {
    fn new(sys: &Reduced<T>, limit: u64, visit: F, to_int: fn(&T) -> Int) -> Search<'_, T, F> {
        let nf = sys.free.len();
        let mut suf_min = Vec::new();
        let mut suf_max = Vec::new();
        let mut suf_gcd = Vec::new();
        for r in &sys.rows {
            let mut mn = vec![T::zero(); nf + 1];
            let mut mx = vec![T::zero(); nf + 1];
            let mut g = vec![r.delta.clone(); nf + 1];
            for k in (0..nf).rev() {
                let j = sys.free[k];
                let a = r.gamma[k].clone() * sys.lo[j].clone();
                let b = r.gamma[k].clone() * sys.hi[j].clone();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                mn[k] = mn[k + 1].clone() + lo;
                mx[k] = mx[k + 1].clone() + hi;
                g[k] = g[k + 1].gcd(&r.gamma[k]);
            }
            suf_min.push(mn);
            suf_max.push(mx);
            suf_gcd.push(g);
        }
        Search {
            sys,
            suf_min,
            suf_max,
            suf_gcd,
            x: sys.lo.clone(),
            rem: sys.rows.iter().map(|r| r.beta.clone()).collect(),
            nodes: 0,
            limit,
            visit,
            to_int,
        }
    }

    fn viable(&self, level: usize) -> bool {
        self.sys.rows.iter().enumerate().all(|(i, r)| {
            let rem = &self.rem[i];
            if !(rem.clone() % self.suf_gcd[i][level].clone()).is_zero() {
                return false;
            }
            let lo = (rem.clone() - self.suf_max[i][level].clone())
                .max(r.delta.clone() * self.sys.lo[r.pivot].clone());
            let hi = (rem.clone() - self.suf_min[i][level].clone())
                .min(r.delta.clone() * self.sys.hi[r.pivot].clone());
            lo <= hi
        })
    }

    fn run(&mut self, level: usize) -> Result<ControlFlow<()>> {
        if !self.viable(level) {
            return Ok(ControlFlow::Continue(()));
        }
        if level == self.sys.free.len() {
            for (i, r) in self.sys.rows.iter().enumerate() {
                self.x[r.pivot] = self.rem[i].clone() / r.delta.clone();
            }
            let out: Vec<Int> = self.x.iter().map(self.to_int).collect();
            return Ok((self.visit)(&out));
        }
        let j = self.sys.free[level];
        let (lo, hi) = (self.sys.lo[j].clone(), self.sys.hi[j].clone());
        let saved = self.rem.clone();
        for (i, r) in self.sys.rows.iter().enumerate() {
            self.rem[i] = self.rem[i].clone() - r.gamma[level].clone() * lo.clone();
        }
        let mut t = lo;
        while t <= hi {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(Error::budget(
                    "feasible-set enumeration",
                    self.nodes,
                    self.limit,
                ));
            }
            self.x[j] = t.clone();
            if self.run(level + 1)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
            for (i, r) in self.sys.rows.iter().enumerate() {
                self.rem[i] = self.rem[i].clone() - r.gamma[level].clone();
            }
            t = t + T::one();
        }
        self.rem = saved;
        Ok(ControlFlow::Continue(()))
    }
}

fn i128_to_int(v: &i128) -> Int {
    Int::from(*v)
}

fn int_to_int(v: &Int) -> Int {
    v.clone()
}

/// Calls `visit` on every integer solution of `ilp` (which needs finite
/// upper bounds) until it breaks. `limit` caps the search nodes.
pub fn visit_feasible<F>(ilp: &FeasIlp, limit: u64, visit: F) -> Result<()>
where
    F: FnMut(&[Int]) -> ControlFlow<()>,
{
    ilp.validate()?;
    let Some(upper) = &ilp.upper else {
        return Err(Error::InvalidInput(
            "enumeration needs finite upper bounds".into(),
        ));
    };
    let Some(sys) = reduce_system(ilp, upper) else {
        return Ok(());
    };
    if sys.magnitude_bits() < 120 {
        let small = sys.convert(|x: &BigInt| x.to_i128().expect("fits by the magnitude check"));
        let _ = Search::new(&small, limit, visit, i128_to_int).run(0)?;
    } else {
        let _ = Search::new(&sys, limit, visit, int_to_int).run(0)?;
    }
    Ok(())
}

/// All integer solutions, in lexicographic order.
pub fn enumerate_feasible(ilp: &FeasIlp, limit: u64) -> Result<Vec<Vec<Int>>> {
    let mut out = Vec::new();
    visit_feasible(ilp, limit, |x| {
        out.push(x.to_vec());
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

/// Some solution, if one exists.
pub fn find_feasible(ilp: &FeasIlp, limit: u64) -> Result<Option<Vec<Int>>> {
    let mut found = None;
    visit_feasible(ilp, limit, |x| {
        found = Some(x.to_vec());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilpcore::solve_ilp;
    use crate::{int, ints, IntMatrix};
    use proptest::prelude::*;

    fn ilp(rows: &[Vec<i64>], b: &[i64], lower: &[i64], upper: &[i64]) -> FeasIlp {
        let n = upper.len();
        let mut p = FeasIlp::from_rows(
            &rows.iter().map(|r| ints(r)).collect::<Vec<_>>(),
            ints(b),
            n,
        )
        .unwrap();
        p.lower = ints(lower);
        p.with_upper(ints(upper)).unwrap()
    }

    /// Plain filter over the whole box.
    fn filter_box(rows: &[Vec<i64>], b: &[i64], lower: &[i64], upper: &[i64]) -> Vec<Vec<Int>> {
        let n = upper.len();
        let mut out = Vec::new();
        let mut x: Vec<i64> = lower.to_vec();
        loop {
            if rows
                .iter()
                .zip(b)
                .all(|(r, &bi)| r.iter().zip(&x).map(|(a, v)| a * v).sum::<i64>() == bi)
            {
                out.push(ints(&x));
            }
            let mut k = n;
            loop {
                if k == 0 {
                    out.sort();
                    return out;
                }
                k -= 1;
                if x[k] < upper[k] {
                    x[k] += 1;
                    break;
                }
                x[k] = lower[k];
            }
        }
    }

    #[test]
    fn small_examples() {
        let p = ilp(&[vec![1, 1]], &[1], &[0, 0], &[1, 1]);
        assert_eq!(
            enumerate_feasible(&p, 100).unwrap(),
            vec![ints(&[0, 1]), ints(&[1, 0])]
        );
        let p = ilp(&[vec![1, -1]], &[0], &[0, 0], &[2, 2]);
        assert_eq!(
            enumerate_feasible(&p, 100).unwrap(),
            vec![ints(&[0, 0]), ints(&[1, 1]), ints(&[2, 2])]
        );
    }

    #[test]
    fn inconsistent_and_parity_systems_stop_at_once() {
        let p = ilp(
            &[vec![1, 1, 1, 1], vec![1, 1, 1, 1]],
            &[3, 4],
            &[0; 4],
            &[1000; 4],
        );
        assert!(enumerate_feasible(&p, 10).unwrap().is_empty());
        let p = ilp(&[vec![2, 2, 2, 2]], &[5], &[0; 4], &[1000; 4]);
        assert!(enumerate_feasible(&p, 10).unwrap().is_empty());
        let p = ilp(&[vec![1, 1, 1, 1]], &[-1], &[0; 4], &[1000; 4]);
        assert!(enumerate_feasible(&p, 10).unwrap().is_empty());
    }

    #[test]
    fn budget_is_reported() {
        let p = FeasIlp::new(IntMatrix::zeros(0, 3), vec![])
            .unwrap()
            .with_upper(ints(&[9, 9, 9]))
            .unwrap();
        assert!(enumerate_feasible(&p, 500).unwrap_err().is_budget());
        assert_eq!(enumerate_feasible(&p, 2000).unwrap().len(), 1000);
    }

    #[test]
    fn huge_coefficients_take_the_bigint_path() {
        let big = 1i64 << 62;
        let p = ilp(&[vec![big, big]], &[big], &[0, 0], &[3, 3]);
        let mut q = p.clone();
        q.a = q.a.map(|x| x * int(1 << 40));
        q.b = q.b.iter().map(|x| x * int(1 << 40)).collect();
        assert_eq!(
            enumerate_feasible(&q, 100).unwrap(),
            vec![ints(&[0, 1]), ints(&[1, 0])]
        );
        assert!(find_feasible(&q, 100).unwrap().is_some());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn matches_box_filter(
            m in 0usize..=2, n in 1usize..=3,
            a in proptest::collection::vec(-2i64..=2, 6),
            b in proptest::collection::vec(-3i64..=6, 2),
            lower in proptest::collection::vec(-1i64..=1, 3),
            width in proptest::collection::vec(0i64..=3, 3),
        ) {
            let rows: Vec<Vec<i64>> = (0..m).map(|i| a[i * n..(i + 1) * n].to_vec()).collect();
            let lo = &lower[..n];
            let hi: Vec<i64> = lo.iter().zip(&width).map(|(l, w)| l + w).collect();
            let p = ilp(&rows, &b[..m], lo, &hi);
            let got = enumerate_feasible(&p, 1_000_000).unwrap();
            prop_assert_eq!(&got, &filter_box(&rows, &b[..m], lo, &hi));
            let bb = solve_ilp(&p, None, &ints(&hi), 100_000).unwrap();
            prop_assert_eq!(bb.is_none(), got.is_empty());
            if let Some(x) = bb {
                prop_assert!(got.contains(&x));
            }
        }

        #[test]
        fn branch_and_bound_finds_the_optimum(
            n in 1usize..=3,
            a in proptest::collection::vec(-2i64..=2, 6),
            b in proptest::collection::vec(-3i64..=6, 2),
            c in proptest::collection::vec(-3i64..=3, 3),
        ) {
            let rows: Vec<Vec<i64>> = (0..2).map(|i| a[i * n..(i + 1) * n].to_vec()).collect();
            let hi = vec![3i64; n];
            let p = ilp(&rows, &b, &vec![0; n], &hi);
            let all = enumerate_feasible(&p, 1_000_000).unwrap();
            let obj = ints(&c[..n]);
            let val = |x: &Vec<Int>| -> Int { x.iter().zip(&obj).map(|(a, b)| a * b).sum() };
            let got = solve_ilp(&p, Some(&obj), &ints(&hi), 100_000).unwrap();
            let again = solve_ilp(&p, Some(&obj), &ints(&hi), 100_000).unwrap();
            prop_assert_eq!(&got, &again);
            match got {
                None => prop_assert!(all.is_empty()),
                Some(x) => {
                    prop_assert!(p.is_solution(&x));
                    prop_assert_eq!(val(&x), all.iter().map(val).min().unwrap());
                }
            }
        }
    }
}
