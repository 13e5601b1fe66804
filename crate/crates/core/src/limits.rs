/// Enumeration budgets. Exceeding one turns into [`crate::Error::Budget`]
/// instead of an unbounded computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Points visited by the feasible-set enumerator.
    pub enumeration: u64,
    /// Difference vectors scanned per cone construction or equivalence check.
    pub cone: u64,
    /// Cells of a knapsack dynamic program.
    pub dp_cells: u64,
    /// Configurations of a scheduling instance.
    pub configurations: u64,
    /// Branch-and-bound nodes per solve.
    pub nodes: u64,
    /// Memoized states of the brute-force scheduler.
    pub states: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: 10_000_000,
            cone: 1_000_000,
            dp_cells: 1_000_000,
            configurations: 1_000_000,
            nodes: 1_000_000,
            states: 1_000_000,
        }
    }
}

impl Limits {
    /// The same limit for every category.
    pub fn uniform(limit: u64) -> Self {
        Limits {
            enumeration: limit,
            cone: limit,
            dp_cells: limit,
            configurations: limit,
            nodes: limit,
            states: limit,
        }
    }
}
