//! Depth-first branch-and-bound over the binary variables of a
//! [`LinearProgram`], bounding with the simplex relaxation.

use super::simplex::solve_relaxation;
use super::{LinearProgram, Solution, Status, INTEGRALITY_TOL, RELATIVE_GAP_TOL};
use crate::error::{Error, Result};

struct Node {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Solve a mixed-binary program to global optimality. Binaries are branched
/// most-fractional-first (ties by lowest index); nodes are pruned against
/// the incumbent with a relative gap of [`RELATIVE_GAP_TOL`].
pub fn solve_milp(lp: &LinearProgram) -> Result<Solution> {
    lp.validate()?;
    if lp.binaries.is_empty() {
        return solve_relaxation(lp);
    }

    let node_limit: usize = 2usize
        .saturating_pow(lp.binaries.len().min(24) as u32)
        .saturating_mul(4)
        .saturating_add(10_000);

    let mut stack = vec![Node {
        lower: lp.lower.clone(),
        upper: lp.upper.clone(),
    }];
    let mut incumbent: Option<Solution> = None;
    let mut explored = 0usize;
    let mut work = lp.clone();

    while let Some(node) = stack.pop() {
        explored += 1;
        if explored > node_limit {
            return Err(Error::Solver(format!(
                "branch-and-bound node limit {node_limit} exceeded"
            )));
        }
        work.lower = node.lower;
        work.upper = node.upper;
        let relaxed = solve_relaxation(&work)?;
        match relaxed.status {
            Status::Infeasible => continue,
            // binaries are boxed, so an unbounded ray lives in the
            // continuous variables and survives any binary fixing
            Status::Unbounded => return Ok(Solution::unbounded()),
            Status::Optimal => {}
        }
        if let Some(best) = &incumbent {
            let slack = RELATIVE_GAP_TOL * best.objective_value.abs().max(1.0);
            if relaxed.objective_value >= best.objective_value - slack {
                continue;
            }
        }

        // most fractional binary, ties by lowest index
        let mut branch_var: Option<(usize, f64)> = None;
        for &j in &lp.binaries {
            let v = relaxed.x[j];
            let frac = v.min(1.0 - v).max(0.0);
            if frac > INTEGRALITY_TOL && branch_var.map_or(true, |(_, f)| frac > f) {
                branch_var = Some((j, frac));
            }
        }

        match branch_var {
            None => {
                // integral within tolerance: candidate incumbent
                let better = incumbent
                    .as_ref()
                    .map_or(true, |b| relaxed.objective_value < b.objective_value);
                if better {
                    incumbent = Some(relaxed);
                }
            }
            Some((j, _)) => {
                let mut up = Node {
                    lower: work.lower.clone(),
                    upper: work.upper.clone(),
                };
                up.lower[j] = 1.0;
                up.upper[j] = 1.0;
                let mut down = Node {
                    lower: work.lower.clone(),
                    upper: work.upper.clone(),
                };
                down.lower[j] = 0.0;
                down.upper[j] = 0.0;
                // explore the down branch first
                stack.push(up);
                stack.push(down);
            }
        }
    }

    Ok(incumbent.unwrap_or_else(Solution::infeasible))
}
