//! Primal simplex for box-constrained LPs with upper/lower bounded
//! variables, two phases with artificial variables and an explicit dense
//! basis inverse that is periodically refactorized.
//!
//! The formulations in this crate keep every structural variable inside a
//! finite box, so only slack variables carry an infinite upper bound.

use super::{LinearProgram, Solution, Status, FEASIBILITY_TOL};
use crate::error::{Error, Result};

/// Reduced costs smaller than this are treated as zero.
const DUAL_TOL: f64 = 1e-9;
/// Pivot elements smaller than this are unusable.
const PIVOT_TOL: f64 = 1e-9;
/// A step shorter than this counts as degenerate.
const DEGEN_STEP: f64 = 1e-11;
/// Consecutive degenerate pivots before switching to Bland's rule.
const BLAND_TRIGGER: usize = 60;
/// Basis refactorization cadence, in pivots.
const REFACTOR_EVERY: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    m: usize,
    /// Sparse columns, structural then slack then artificial.
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Phase-2 objective (zero on slacks and artificials).
    cost: Vec<f64>,
    rhs: Vec<f64>,
    n_structural: usize,
    first_artificial: usize,
    basis: Vec<usize>,
    status: Vec<VarStatus>,
    x: Vec<f64>,
    /// Dense row-major basis inverse, m x m.
    binv: Vec<f64>,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m_ub = lp.a_ub.len();
        let m = m_ub + lp.a_eq.len();

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut rhs = Vec::with_capacity(m);
        for (r, (row, &b)) in lp.a_ub.iter().zip(&lp.b_ub).enumerate() {
            for &(j, v) in row {
                if v != 0.0 {
                    cols[j].push((r, v));
                }
            }
            rhs.push(b);
        }
        for (k, (row, &b)) in lp.a_eq.iter().zip(&lp.b_eq).enumerate() {
            for &(j, v) in row {
                if v != 0.0 {
                    cols[j].push((m_ub + k, v));
                }
            }
            rhs.push(b);
        }

        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        let mut cost = lp.objective.clone();
        let mut status = Vec::with_capacity(n + m);
        let mut x = Vec::with_capacity(n + m);

        // Nonbasic structural variables start on the finite bound with the
        // smaller magnitude (deterministic, keeps residuals small).
        for j in 0..n {
            if upper[j].abs() < lower[j].abs() {
                status.push(VarStatus::AtUpper);
                x.push(upper[j]);
            } else {
                status.push(VarStatus::AtLower);
                x.push(lower[j]);
            }
        }

        // Slacks for the <= rows.
        for r in 0..m_ub {
            cols.push(vec![(r, 1.0)]);
            lower.push(0.0);
            upper.push(f64::INFINITY);
            cost.push(0.0);
            status.push(VarStatus::AtLower);
            x.push(0.0);
        }

        let mut t = Tableau {
            m,
            cols,
            lower,
            upper,
            cost,
            rhs,
            n_structural: n,
            first_artificial: n + m_ub,
            basis: Vec::with_capacity(m),
            status,
            x,
            binv: Vec::new(),
        };

        // Row residuals at the chosen nonbasic point decide the starting
        // basis: a slack where its sign allows, an artificial otherwise.
        let mut residual = t.rhs.clone();
        for j in 0..n {
            let xj = t.x[j];
            if xj != 0.0 {
                for &(r, v) in &t.cols[j] {
                    residual[r] -= v * xj;
                }
            }
        }
        for r in 0..m {
            let is_ub_row = r < m_ub;
            if is_ub_row && residual[r] >= 0.0 {
                let slack = n + r;
                t.basis.push(slack);
                t.status[slack] = VarStatus::Basic;
                t.x[slack] = residual[r];
            } else {
                // artificial with a +/-1 entry so its value is |residual|
                let coeff = if residual[r] >= 0.0 { 1.0 } else { -1.0 };
                let art = t.cols.len();
                t.cols.push(vec![(r, coeff)]);
                t.lower.push(0.0);
                t.upper.push(f64::INFINITY);
                t.cost.push(0.0);
                t.status.push(VarStatus::Basic);
                t.x.push(residual[r].abs());
                t.basis.push(art);
            }
        }
        t
    }

    fn num_cols(&self) -> usize {
        self.cols.len()
    }

    /// Rebuild the dense basis inverse by Gauss-Jordan with partial
    /// pivoting, then recompute the basic values from scratch.
    fn refactorize(&mut self) -> Result<()> {
        let m = self.m;
        // work = [B | I], reduced in place
        let w = 2 * m;
        let mut work = vec![0.0f64; m * w];
        for (k, &j) in self.basis.iter().enumerate() {
            for &(r, v) in &self.cols[j] {
                work[r * w + k] = v;
            }
        }
        for r in 0..m {
            work[r * w + m + r] = 1.0;
        }
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = work[col * w + col].abs();
            for r in col + 1..m {
                let v = work[r * w + col].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < 1e-12 {
                return Err(Error::Solver("singular basis during refactorization".into()));
            }
            if piv_row != col {
                for c in 0..w {
                    work.swap(col * w + c, piv_row * w + c);
                }
            }
            let inv = 1.0 / work[col * w + col];
            for c in 0..w {
                work[col * w + c] *= inv;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = work[r * w + col];
                if f != 0.0 {
                    for c in 0..w {
                        work[r * w + c] -= f * work[col * w + c];
                    }
                }
            }
        }
        self.binv = vec![0.0; m * m];
        for r in 0..m {
            for c in 0..m {
                self.binv[r * m + c] = work[r * w + m + c];
            }
        }
        self.recompute_basic_values();
        Ok(())
    }

    /// x_B = B^-1 (rhs - N x_N), refreshing any accumulated drift.
    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut eff = self.rhs.clone();
        for j in 0..self.num_cols() {
            if self.status[j] == VarStatus::Basic {
                continue;
            }
            let xj = self.x[j];
            if xj != 0.0 {
                for &(r, v) in &self.cols[j] {
                    eff[r] -= v * xj;
                }
            }
        }
        for i in 0..m {
            let mut acc = 0.0;
            for r in 0..m {
                acc += self.binv[i * m + r] * eff[r];
            }
            self.x[self.basis[i]] = acc;
        }
    }

    /// Simplex multipliers for a cost vector restricted to the basis.
    fn duals(&self, cost_of: &dyn Fn(usize) -> f64) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            let c = cost_of(j);
            if c != 0.0 {
                for (r, yr) in y.iter_mut().enumerate() {
                    *yr += c * self.binv[k * m + r];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64], cost_of: &dyn Fn(usize) -> f64) -> f64 {
        let mut d = cost_of(j);
        for &(r, v) in &self.cols[j] {
            d -= y[r] * v;
        }
        d
    }

    /// B^-1 a_q.
    fn ftran(&self, q: usize) -> Vec<f64> {
        let m = self.m;
        let mut w = vec![0.0; m];
        for &(r, v) in &self.cols[q] {
            for i in 0..m {
                w[i] += self.binv[i * m + r] * v;
            }
        }
        w
    }

    /// Run the simplex loop with the given costs until optimal or unbounded.
    fn iterate(&mut self, cost_of: &dyn Fn(usize) -> f64, allow_enter: &dyn Fn(usize) -> bool) -> Result<PhaseOutcome> {
        let n_cols = self.num_cols();
        let max_iter = 200 * (self.m + n_cols) + 10_000;
        let mut pivots_since_refactor = 0usize;
        let mut degen_run = 0usize;
        let mut bland = false;

        for _ in 0..max_iter {
            let y = self.duals(cost_of);

            // entering variable
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..n_cols {
                if self.status[j] == VarStatus::Basic || !allow_enter(j) {
                    continue;
                }
                if self.upper[j] - self.lower[j] <= 0.0 {
                    continue; // fixed
                }
                let d = self.reduced_cost(j, &y, cost_of);
                let score = match self.status[j] {
                    VarStatus::AtLower if d < -DUAL_TOL => -d,
                    VarStatus::AtUpper if d > DUAL_TOL => d,
                    _ => continue,
                };
                if bland {
                    entering = Some((j, score));
                    break;
                }
                if entering.map_or(true, |(_, s)| score > s) {
                    entering = Some((j, score));
                }
            }
            let Some((q, _)) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };

            let dir = if self.status[q] == VarStatus::AtLower {
                1.0
            } else {
                -1.0
            };
            let w = self.ftran(q);

            // ratio test: step until a basic variable hits a bound or the
            // entering variable flips to its opposite bound
            let flip_limit = self.upper[q] - self.lower[q]; // may be inf
            let mut best_t = f64::INFINITY;
            let mut best_row: Option<usize> = None;
            let mut best_wabs = 0.0f64;
            for i in 0..self.m {
                let wi = w[i];
                if wi.abs() <= PIVOT_TOL {
                    continue;
                }
                let v = self.basis[i];
                let xv = self.x[v];
                let rate = -dir * wi;
                let limit = if rate > 0.0 {
                    let hi = self.upper[v];
                    if hi.is_finite() {
                        (hi - xv) / rate
                    } else {
                        continue;
                    }
                } else {
                    let lo = self.lower[v];
                    if lo.is_finite() {
                        (xv - lo) / (-rate)
                    } else {
                        continue;
                    }
                };
                let limit = limit.max(0.0);
                let better = if bland {
                    limit < best_t - 1e-12
                        || (limit < best_t + 1e-12
                            && best_row.map_or(true, |br| self.basis[i] < self.basis[br]))
                } else {
                    limit < best_t - 1e-12
                        || (limit < best_t + 1e-12 && wi.abs() > best_wabs)
                };
                if better {
                    best_t = limit.min(best_t);
                    best_row = Some(i);
                    best_wabs = wi.abs();
                }
            }

            let t = best_t.min(flip_limit);
            if !t.is_finite() {
                return Ok(PhaseOutcome::Unbounded);
            }
            degen_run = if t <= DEGEN_STEP { degen_run + 1 } else { 0 };
            bland = degen_run >= BLAND_TRIGGER;

            if flip_limit <= best_t {
                // bound flip, basis unchanged
                for i in 0..self.m {
                    self.x[self.basis[i]] -= dir * flip_limit * w[i];
                }
                self.status[q] = match self.status[q] {
                    VarStatus::AtLower => {
                        self.x[q] = self.upper[q];
                        VarStatus::AtUpper
                    }
                    _ => {
                        self.x[q] = self.lower[q];
                        VarStatus::AtLower
                    }
                };
                continue;
            }

            let r = best_row.expect("finite blocking step implies a blocking row");
            let leaving = self.basis[r];
            let rate = -dir * w[r];

            for i in 0..self.m {
                if i != r {
                    self.x[self.basis[i]] -= dir * t * w[i];
                }
            }
            self.x[q] += dir * t;
            self.status[leaving] = if rate > 0.0 {
                self.x[leaving] = self.upper[leaving];
                VarStatus::AtUpper
            } else {
                self.x[leaving] = self.lower[leaving];
                VarStatus::AtLower
            };

            // product-form update of the basis inverse
            let m = self.m;
            let piv = w[r];
            let inv = 1.0 / piv;
            for c in 0..m {
                self.binv[r * m + c] *= inv;
            }
            for i in 0..m {
                if i == r {
                    continue;
                }
                let f = w[i];
                if f != 0.0 {
                    for c in 0..m {
                        self.binv[i * m + c] -= f * self.binv[r * m + c];
                    }
                }
            }
            self.basis[r] = q;
            self.status[q] = VarStatus::Basic;

            pivots_since_refactor += 1;
            if pivots_since_refactor >= REFACTOR_EVERY {
                self.refactorize()?;
                pivots_since_refactor = 0;
            }
        }
        Err(Error::Solver("simplex iteration limit exceeded".into()))
    }

    fn infeasibility(&self) -> f64 {
        (self.first_artificial..self.num_cols())
            .map(|j| self.x[j])
            .sum()
    }

    /// Snap values sitting within tolerance of a bound onto the bound.
    fn snap_to_bounds(&mut self) {
        for j in 0..self.num_cols() {
            let lo = self.lower[j];
            let hi = self.upper[j];
            if lo.is_finite() && (self.x[j] - lo).abs() <= 1e-9 {
                self.x[j] = lo;
            } else if hi.is_finite() && (self.x[j] - hi).abs() <= 1e-9 {
                self.x[j] = hi;
            }
        }
    }
}

/// Solve a continuous LP (the binary set must be empty; `solve_milp`
/// handles the rest). Infeasible and unbounded problems are reported via
/// `Solution::status`, never clamped.
pub fn solve_lp(lp: &LinearProgram) -> Result<Solution> {
    lp.validate()?;
    if !lp.binaries.is_empty() {
        return Err(Error::invalid(
            "solve_lp expects an empty binary set; use solve_milp",
        ));
    }
    solve_relaxation(lp)
}

/// Solve ignoring integrality (used by solve_lp and the B&B layer).
pub(crate) fn solve_relaxation(lp: &LinearProgram) -> Result<Solution> {
    let mut t = Tableau::new(lp);
    t.refactorize()?;

    // Phase 1: drive artificial variables to zero.
    if t.infeasibility() > FEASIBILITY_TOL {
        let first_art = t.first_artificial;
        let phase1_cost = move |j: usize| if j >= first_art { 1.0 } else { 0.0 };
        let enter_any = |j: usize| j < first_art;
        match t.iterate(&phase1_cost, &enter_any)? {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::Unbounded => {
                return Err(Error::Solver(
                    "phase-1 objective reported unbounded; numerical breakdown".into(),
                ));
            }
        }
        t.refactorize()?;
        if t.infeasibility() > FEASIBILITY_TOL {
            return Ok(Solution::infeasible());
        }
    }

    // Pin artificials so they can never carry value again.
    for j in t.first_artificial..t.num_cols() {
        t.upper[j] = 0.0;
        if t.status[j] != VarStatus::Basic {
            t.x[j] = 0.0;
        }
    }

    // Phase 2: real objective.
    let cost = t.cost.clone();
    let first_art = t.first_artificial;
    let phase2_cost = move |j: usize| if j < cost.len() { cost[j] } else { 0.0 };
    let enter_real = |j: usize| j < first_art;
    let outcome = t.iterate(&phase2_cost, &enter_real)?;
    if matches!(outcome, PhaseOutcome::Unbounded) {
        return Ok(Solution::unbounded());
    }

    t.refactorize()?;
    t.snap_to_bounds();
    let x: Vec<f64> = t.x[..t.n_structural].to_vec();
    let violation = lp.violation(&x);
    if violation > FEASIBILITY_TOL {
        return Err(Error::Solver(format!(
            "solution violates constraints by {violation:.3e}"
        )));
    }
    let objective_value = lp.objective_at(&x);
    Ok(Solution {
        status: Status::Optimal,
        x,
        objective_value,
    })
}
