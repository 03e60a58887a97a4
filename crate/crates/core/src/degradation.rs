//! Battery wear economics: the log-linear cycle-life law fitted from test
//! data, the cost of a single discharge, and the convex piecewise-linear
//! discharge-cost curve the optimizers price dispatch against.

use crate::error::{Error, Result};

/// Log-linear cycle-life law: `cycles(D) = 10^(a + b*D)` with `b < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleLifeFit {
    a: f64,
    b: f64,
}

impl CycleLifeFit {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid("fit coefficients must be finite"));
        }
        if b >= 0.0 {
            return Err(Error::invalid(format!(
                "cycle life must decay with depth: slope {b} is not negative"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Cycles to end of life when repeatedly discharged to `depth`.
    pub fn cycle_life(&self, depth: f64) -> Result<f64> {
        check_depth(depth)?;
        Ok(10f64.powf(self.a + self.b * depth))
    }
}

fn check_depth(depth: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&depth) {
        return Err(Error::invalid(format!("DoD {depth} outside [0, 1]")));
    }
    Ok(())
}

/// Least-squares fit of `log10(cycles)` against DoD.
pub fn fit_cycle_life(points: &[(f64, f64)]) -> Result<CycleLifeFit> {
    if points.len() < 2 {
        return Err(Error::invalid("need at least 2 cycle-life points"));
    }
    for &(d, n) in points {
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::invalid(format!("DoD {d} outside (0, 1]")));
        }
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid(format!("cycle count {n} must be positive")));
        }
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1.log10()).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1.log10()).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 * n * sxx.max(1.0) {
        return Err(Error::invalid(
            "cycle-life DoD values are all identical; slope is undetermined",
        ));
    }
    let b = (n * sxy - sx * sy) / det;
    let a = (sy - b * sx) / n;
    CycleLifeFit::new(a, b)
}

/// Cost of discharging from depth `d1` to depth `d2` (Eq-style positive
/// part): `capital * max(0, 1/cycles(d2) - 1/cycles(d1))`. Zero whenever
/// `d2 <= d1` (net charge) because charging is assumed wear-free.
pub fn discharge_cost(fit: &CycleLifeFit, capital: f64, d1: f64, d2: f64) -> Result<f64> {
    if capital < 0.0 {
        return Err(Error::invalid("capital cost must be >= 0"));
    }
    let inv1 = 1.0 / fit.cycle_life(d1)?;
    let inv2 = 1.0 / fit.cycle_life(d2)?;
    Ok(capital * (inv2 - inv1).max(0.0))
}

/// Convex piecewise-linear discharge-cost curve with uniform breakpoints:
/// `cost(D) = capital / cycles(D)` sampled at `D = j/segments`.
///
/// The chords between breakpoints have strictly increasing slopes (for
/// capital > 0), so the interpolant equals the max over the segment lines
/// and can be encoded as a binary-free epigraph inside an LP.
#[derive(Debug, Clone, PartialEq)]
pub struct DegradationCurve {
    dod_x: Vec<f64>,
    cost_y: Vec<f64>,
    segment_lines: Vec<(f64, f64)>,
}

impl DegradationCurve {
    /// Default number of segments for the piecewise approximation.
    pub const DEFAULT_SEGMENTS: usize = 10;

    pub fn build(fit: &CycleLifeFit, capital: f64, segments: usize) -> Result<Self> {
        if segments < 2 {
            return Err(Error::invalid("need at least 2 segments"));
        }
        if capital < 0.0 {
            return Err(Error::invalid("capital cost must be >= 0"));
        }
        let s = segments;
        let dod_x: Vec<f64> = (0..=s).map(|j| j as f64 / s as f64).collect();
        let cost_y: Vec<f64> = dod_x
            .iter()
            .map(|&d| Ok(capital / fit.cycle_life(d)?))
            .collect::<Result<_>>()?;
        let mut segment_lines = Vec::with_capacity(s);
        for j in 0..s {
            let slope = (cost_y[j + 1] - cost_y[j]) / (dod_x[j + 1] - dod_x[j]);
            let intercept = cost_y[j] - slope * dod_x[j];
            segment_lines.push((slope, intercept));
        }
        if capital > 0.0 {
            for w in segment_lines.windows(2) {
                debug_assert!(
                    w[1].0 > w[0].0,
                    "exponential-law chords must have increasing slopes"
                );
            }
        }
        Ok(Self {
            dod_x,
            cost_y,
            segment_lines,
        })
    }

    /// An all-zero curve (what a degradation-blind optimizer prices with).
    pub fn zero(fit: &CycleLifeFit, segments: usize) -> Result<Self> {
        Self::build(fit, 0.0, segments)
    }

    pub fn num_segments(&self) -> usize {
        self.segment_lines.len()
    }

    pub fn dod_breakpoints(&self) -> &[f64] {
        &self.dod_x
    }

    pub fn cost_breakpoints(&self) -> &[f64] {
        &self.cost_y
    }

    /// `(slope, intercept)` of each chord, in breakpoint order.
    pub fn segment_lines(&self) -> &[(f64, f64)] {
        &self.segment_lines
    }

    /// Piecewise-linear cost at `depth`: linear interpolation between the
    /// bracketing breakpoints (equal to the max over segment lines).
    pub fn pw_cost(&self, depth: f64) -> Result<f64> {
        check_depth(depth)?;
        let s = self.num_segments();
        let seg = ((depth * s as f64).floor() as usize).min(s - 1);
        let (slope, intercept) = self.segment_lines[seg];
        Ok(slope * depth + intercept)
    }

    /// Max over the segment lines; identical to `pw_cost` for the convex
    /// curve, kept separate because it is the form the LP epigraph uses.
    pub fn max_of_lines(&self, depth: f64) -> f64 {
        self.segment_lines
            .iter()
            .map(|(s, i)| s * depth + i)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Degradation charged to one day: cost at the deepest point reached
    /// minus cost at the day-start depth, never negative.
    pub fn day_cost(&self, max_dod: f64, initial_dod: f64) -> Result<f64> {
        let d = max_dod.max(initial_dod);
        Ok((self.pw_cost(d)? - self.pw_cost(initial_dod)?).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fit42() -> CycleLifeFit {
        CycleLifeFit::new(4.0, -2.0).unwrap()
    }

    #[test]
    fn exact_log_linear_points_recover_coefficients() {
        let pts = [
            (0.25, 10f64.powf(3.5)),
            (0.5, 10f64.powf(3.0)),
            (1.0, 10f64.powf(2.0)),
        ];
        let fit = fit_cycle_life(&pts).unwrap();
        assert_abs_diff_eq!(fit.a(), 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.b(), -2.0, epsilon = 1e-9);
    }

    #[test]
    fn two_points_determine_the_line() {
        let pts = [(0.2, 10f64.powf(3.6)), (1.0, 10f64.powf(2.0))];
        let fit = fit_cycle_life(&pts).unwrap();
        assert_abs_diff_eq!(fit.a(), 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.b(), -2.0, epsilon = 1e-9);
    }

    #[test]
    fn noisy_fit_matches_closed_form_normal_equations() {
        // Independent oracle: 2x2 normal equations assembled from scratch.
        let pts: [(f64, f64); 4] = [(0.2, 2900.0), (0.45, 1150.0), (0.8, 260.0), (1.0, 105.0)];
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &(x, n) in &pts {
            let y = n.log10();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let n = pts.len() as f64;
        let b_oracle = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let a_oracle = sy / n - b_oracle * sx / n;

        let fit = fit_cycle_life(&pts).unwrap();
        assert_abs_diff_eq!(fit.a(), a_oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.b(), b_oracle, epsilon = 1e-12);
        assert!(fit.b() < 0.0);
    }

    #[test]
    fn degenerate_and_invalid_points_rejected() {
        assert!(fit_cycle_life(&[(0.5, 1000.0), (0.5, 900.0)]).is_err());
        assert!(fit_cycle_life(&[(0.5, 1000.0)]).is_err());
        assert!(fit_cycle_life(&[(0.5, 1000.0), (0.7, -3.0)]).is_err());
        // increasing life with depth -> positive slope -> rejected
        assert!(fit_cycle_life(&[(0.2, 100.0), (0.9, 5000.0)]).is_err());
    }

    #[test]
    fn cycle_life_direct_values() {
        let f = fit42();
        assert_abs_diff_eq!(f.cycle_life(0.0).unwrap(), 1e4, epsilon = 1e-6);
        assert_abs_diff_eq!(f.cycle_life(0.5).unwrap(), 1e3, epsilon = 1e-9);
        assert_abs_diff_eq!(f.cycle_life(1.0).unwrap(), 100.0, epsilon = 1e-9);
        assert!(f.cycle_life(1.5).is_err());
        assert!(f.cycle_life(-0.1).is_err());
    }

    #[test]
    fn discharge_cost_full_swing_and_clamps() {
        let f = fit42();
        let c = discharge_cost(&f, 1000.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(c, 1000.0 * (1.0 / 100.0 - 1e-4), epsilon = 1e-9);
        assert_abs_diff_eq!(c, 9.90, epsilon = 1e-9);
        // charging direction and no-op cost nothing
        assert_eq!(discharge_cost(&f, 1000.0, 0.8, 0.3).unwrap(), 0.0);
        assert_eq!(discharge_cost(&f, 1000.0, 0.4, 0.4).unwrap(), 0.0);
        assert!(discharge_cost(&f, -5.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn two_segment_curve_breakpoints_and_chords() {
        let curve = DegradationCurve::build(&fit42(), 1000.0, 2).unwrap();
        assert_eq!(curve.dod_breakpoints(), &[0.0, 0.5, 1.0]);
        let cy = curve.cost_breakpoints();
        assert_abs_diff_eq!(cy[0], 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(cy[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cy[2], 10.0, epsilon = 1e-12);
        let lines = curve.segment_lines();
        assert_abs_diff_eq!(lines[0].0, 1.8, epsilon = 1e-12);
        assert_abs_diff_eq!(lines[1].0, 18.0, epsilon = 1e-12);
        assert!(lines[1].0 > lines[0].0);
    }

    #[test]
    fn pw_cost_interpolates_and_matches_max_of_lines() {
        let curve = DegradationCurve::build(&fit42(), 1000.0, 2).unwrap();
        // breakpoints are exact
        assert_abs_diff_eq!(curve.pw_cost(0.5).unwrap(), 1.0, epsilon = 1e-12);
        // midpoint of the first chord
        assert_abs_diff_eq!(curve.pw_cost(0.25).unwrap(), 0.55, epsilon = 1e-12);
        for i in 0..=100 {
            let d = i as f64 / 100.0;
            assert_abs_diff_eq!(
                curve.pw_cost(d).unwrap(),
                curve.max_of_lines(d),
                epsilon = 1e-12
            );
        }
        assert!(curve.pw_cost(1.01).is_err());
    }

    #[test]
    fn approximation_error_shrinks_as_segments_double() {
        // Dense-grid oracle: the exact curve is capital / cycle_life(D).
        let f = fit42();
        let capital = 1000.0;
        let max_dev = |s: usize| -> f64 {
            let curve = DegradationCurve::build(&f, capital, s).unwrap();
            (0..=1000)
                .map(|i| {
                    let d = i as f64 / 1000.0;
                    let exact = capital / f.cycle_life(d).unwrap();
                    (curve.pw_cost(d).unwrap() - exact).abs()
                })
                .fold(0.0, f64::max)
        };
        let devs: Vec<f64> = [2, 4, 8, 16, 32].iter().map(|&s| max_dev(s)).collect();
        for w in devs.windows(2) {
            assert!(w[1] < w[0], "deviation must shrink as S doubles: {devs:?}");
        }
        // the interpolant over-estimates a convex curve between breakpoints
        let curve = DegradationCurve::build(&f, capital, 4).unwrap();
        for i in 0..=200 {
            let d = i as f64 / 200.0;
            let exact = capital / f.cycle_life(d).unwrap();
            assert!(curve.pw_cost(d).unwrap() >= exact - 1e-9);
        }
    }

    #[test]
    fn zero_capital_curve_is_identically_zero() {
        let curve = DegradationCurve::zero(&fit42(), 10).unwrap();
        for i in 0..=10 {
            assert_eq!(curve.pw_cost(i as f64 / 10.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn day_cost_is_nonnegative_and_anchored_at_start_depth() {
        let curve = DegradationCurve::build(&fit42(), 1000.0, 10).unwrap();
        assert_eq!(curve.day_cost(0.0, 0.0).unwrap(), 0.0);
        assert!(curve.day_cost(0.7, 0.0).unwrap() > 0.0);
        // max_dod below the starting depth charges nothing
        assert_eq!(curve.day_cost(0.1, 0.3).unwrap(), 0.0);
    }
}
