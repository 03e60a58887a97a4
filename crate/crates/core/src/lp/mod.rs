//! Bounded linear programming: problem containers, a primal simplex for
//! box-constrained LPs and a small branch-and-bound layer over binary
//! variables. Every optimization in this crate is expressed through this
//! module, and the SOS2 degradation cross-check runs on `solve_milp`.

mod branch;
mod simplex;

pub use branch::solve_milp;
pub use simplex::solve_lp;

use crate::error::{Error, Result};

/// Max constraint violation accepted in a returned point (inputs are scaled
/// to roughly O(1): dollars, kW, kWh).
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// How close a binary must be to 0 or 1 to count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Relative optimality gap for branch-and-bound pruning.
pub const RELATIVE_GAP_TOL: f64 = 1e-6;

/// Sparse row: `(variable index, coefficient)` pairs.
pub type SparseRow = Vec<(usize, f64)>;

/// `minimize c.x  s.t.  A_ub.x <= b_ub,  A_eq.x = b_eq,  lower <= x <= upper`,
/// with an optional set of binary variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub a_ub: Vec<SparseRow>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<SparseRow>,
    pub b_eq: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Indices of binary variables; each must have bounds within [0, 1].
    pub binaries: Vec<usize>,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.a_ub.len() + self.a_eq.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::invalid("bound vectors must match variable count"));
        }
        if self.a_ub.len() != self.b_ub.len() || self.a_eq.len() != self.b_eq.len() {
            return Err(Error::invalid("constraint matrix/rhs length mismatch"));
        }
        for (j, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid(format!(
                    "variable {j} must have finite bounds, got [{lo}, {hi}]"
                )));
            }
            if lo > hi {
                return Err(Error::invalid(format!(
                    "variable {j} has empty bound box [{lo}, {hi}]"
                )));
            }
        }
        for c in &self.objective {
            if !c.is_finite() {
                return Err(Error::invalid("objective coefficients must be finite"));
            }
        }
        for (row, rhs) in self
            .a_ub
            .iter()
            .zip(&self.b_ub)
            .chain(self.a_eq.iter().zip(&self.b_eq))
        {
            if !rhs.is_finite() {
                return Err(Error::invalid("constraint rhs must be finite"));
            }
            for &(j, v) in row {
                if j >= n {
                    return Err(Error::invalid(format!("coefficient on unknown variable {j}")));
                }
                if !v.is_finite() {
                    return Err(Error::invalid("constraint coefficients must be finite"));
                }
            }
        }
        for &j in &self.binaries {
            if j >= n {
                return Err(Error::invalid(format!("binary index {j} out of range")));
            }
            if self.lower[j] < -1e-12 || self.upper[j] > 1.0 + 1e-12 {
                return Err(Error::invalid(format!(
                    "binary variable {j} must have bounds within [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Max violation of rows and bounds at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (row, &rhs) in self.a_ub.iter().zip(&self.b_ub) {
            let lhs: f64 = row.iter().map(|&(j, v)| v * x[j]).sum();
            worst = worst.max(lhs - rhs);
        }
        for (row, &rhs) in self.a_eq.iter().zip(&self.b_eq) {
            let lhs: f64 = row.iter().map(|&(j, v)| v * x[j]).sum();
            worst = worst.max((lhs - rhs).abs());
        }
        for (j, &xj) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - xj).max(xj - self.upper[j]);
        }
        worst
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Outcome class of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solve result. `x` and `objective_value` are meaningful only when
/// `status == Optimal`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    pub x: Vec<f64>,
    pub objective_value: f64,
}

impl Solution {
    pub(crate) fn infeasible() -> Self {
        Solution {
            status: Status::Infeasible,
            x: Vec::new(),
            objective_value: f64::NAN,
        }
    }

    pub(crate) fn unbounded() -> Self {
        Solution {
            status: Status::Unbounded,
            x: Vec::new(),
            objective_value: f64::NEG_INFINITY,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Unwrap an optimal solution or convert the status into an error.
    pub fn into_optimal(self, context: &str) -> Result<Self> {
        match self.status {
            Status::Optimal => Ok(self),
            Status::Infeasible => Err(Error::infeasible(context)),
            Status::Unbounded => Err(Error::unbounded(context)),
        }
    }
}

/// Incremental construction of a [`LinearProgram`].
#[derive(Debug, Default, Clone)]
pub struct LpBuilder {
    lp: LinearProgram,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, lower: f64, upper: f64, cost: f64) -> usize {
        let id = self.lp.objective.len();
        self.lp.objective.push(cost);
        self.lp.lower.push(lower);
        self.lp.upper.push(upper);
        id
    }

    pub fn add_binary(&mut self, cost: f64) -> usize {
        let id = self.add_var(0.0, 1.0, cost);
        self.lp.binaries.push(id);
        id
    }

    pub fn add_le(&mut self, row: SparseRow, rhs: f64) {
        self.lp.a_ub.push(row);
        self.lp.b_ub.push(rhs);
    }

    pub fn add_ge(&mut self, row: SparseRow, rhs: f64) {
        let negated = row.into_iter().map(|(j, v)| (j, -v)).collect();
        self.add_le(negated, -rhs);
    }

    pub fn add_eq(&mut self, row: SparseRow, rhs: f64) {
        self.lp.a_eq.push(row);
        self.lp.b_eq.push(rhs);
    }

    pub fn num_vars(&self) -> usize {
        self.lp.objective.len()
    }

    pub fn build(self) -> LinearProgram {
        self.lp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_assembles_consistent_program() {
        let mut b = LpBuilder::new();
        let x = b.add_var(0.0, 10.0, 1.0);
        let y = b.add_var(-5.0, 5.0, -2.0);
        b.add_le(vec![(x, 1.0), (y, 1.0)], 4.0);
        b.add_ge(vec![(x, 1.0)], 1.0);
        b.add_eq(vec![(y, 2.0)], 3.0);
        let lp = b.build();
        lp.validate().unwrap();
        assert_eq!(lp.num_vars(), 2);
        assert_eq!(lp.a_ub.len(), 2);
        // ge became a negated le
        assert_eq!(lp.a_ub[1], vec![(x, -1.0)]);
        assert_eq!(lp.b_ub[1], -1.0);
        assert_eq!(lp.a_eq.len(), 1);
    }

    #[test]
    fn validate_rejects_bad_programs() {
        let mut lp = LinearProgram {
            objective: vec![1.0],
            lower: vec![0.0],
            upper: vec![f64::INFINITY],
            ..Default::default()
        };
        assert!(lp.validate().is_err(), "infinite bounds rejected");
        lp.upper = vec![-1.0];
        assert!(lp.validate().is_err(), "empty box rejected");
        lp.upper = vec![2.0];
        lp.binaries = vec![0];
        assert!(lp.validate().is_err(), "binary with bound above 1 rejected");
    }
}
