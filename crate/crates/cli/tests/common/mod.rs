//! Shared fixtures and independent oracles for the acceptance suite.

use std::path::{Path, PathBuf};

use peakshave::lp::LinearProgram;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Independent brute-force LP oracle: enumerate every choice of `n`
/// active constraints among {ub rows, eq rows, lower bounds, upper
/// bounds} (eq rows always active), solve the square system, keep the
/// best feasible point. Written against the problem definition only.
pub fn vertex_enumeration_optimum(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut required = 0usize;
    for (row, &rhs) in lp.a_eq.iter().zip(&lp.b_eq) {
        let mut dense = vec![0.0; n];
        for &(j, v) in row {
            dense[j] += v;
        }
        planes.push((dense, rhs));
        required += 1;
    }
    for (row, &rhs) in lp.a_ub.iter().zip(&lp.b_ub) {
        let mut dense = vec![0.0; n];
        for &(j, v) in row {
            dense[j] += v;
        }
        planes.push((dense, rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lp.lower[j]));
        planes.push((e, lp.upper[j]));
    }

    let mut best: Option<f64> = None;
    let mut chosen: Vec<usize> = (0..required).collect();
    visit(lp, &planes, required, &mut chosen, required, &mut best);
    best
}

fn visit(
    lp: &LinearProgram,
    planes: &[(Vec<f64>, f64)],
    required: usize,
    chosen: &mut Vec<usize>,
    start: usize,
    best: &mut Option<f64>,
) {
    let n = lp.num_vars();
    if chosen.len() == n {
        if let Some(x) = solve_square(planes, chosen, n) {
            if lp.violation(&x) < 1e-7 {
                let obj = lp.objective_at(&x);
                if best.map_or(true, |b| obj < b) {
                    *best = Some(obj);
                }
            }
        }
        return;
    }
    if chosen.len() > n {
        return;
    }
    for i in start..planes.len() {
        chosen.push(i);
        visit(lp, planes, required, chosen, i + 1, best);
        chosen.pop();
    }
}

fn solve_square(planes: &[(Vec<f64>, f64)], chosen: &[usize], n: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = chosen.iter().map(|&i| planes[i].0.clone()).collect();
    let mut rhs: Vec<f64> = chosen.iter().map(|&i| planes[i].1).collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .expect("finite coefficients")
        })?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = 1.0 / a[col][col];
        for c in 0..n {
            a[col][c] *= inv;
        }
        rhs[col] *= inv;
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for c in 0..n {
                        a[r][c] -= f * a[col][c];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some(rhs)
}
