//! LP formulations for cycle and single-day dispatch problems.
//!
//! Per-day decision block: split charge/discharge powers, an explicit
//! stored-energy variable per interval (recurrence as equality rows, box
//! limits as variable bounds, terminal reset as a fixed bound) and the
//! degradation cost in one of three encodings:
//!
//! - `MaxDod`: a per-day max-depth variable plus one epigraph row per
//!   curve segment. Binary-free, the compact form the optimizers solve.
//! - `PerInterval`: epigraph rows for every (interval, segment) pair,
//!   without the max-depth variable. Binary-free.
//! - `Sos2`: breakpoint weights restricted to two adjacent entries by
//!   binary activations. Requires `solve_milp`; kept as the cross-check
//!   oracle for the convex encodings.

use crate::degradation::DegradationCurve;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpBuilder, Solution};
use crate::model::{BatterySpec, BillingCycle, HvacParams};
use crate::tariff::TariffModel;

use super::{Bound, DispatchPlan, HvacSchedule};

/// Degradation-cost encoding for a day block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegEncoding {
    MaxDod,
    PerInterval,
    Sos2,
}

/// Variable ids of one day's decision block.
#[derive(Debug, Clone)]
pub struct DayBlock {
    pub charge: Vec<usize>,
    pub discharge: Vec<usize>,
    pub soe: Vec<usize>,
    pub c_deg: Option<usize>,
    pub max_dod: Option<usize>,
}

impl DayBlock {
    pub fn battery_power(&self, x: &[f64]) -> Vec<f64> {
        self.charge
            .iter()
            .zip(&self.discharge)
            .map(|(&c, &d)| x[c] - x[d])
            .collect()
    }

    pub fn soe_values(&self, x: &[f64]) -> Vec<f64> {
        self.soe.iter().map(|&j| x[j]).collect()
    }
}

pub(crate) struct DayBlockSpec<'a> {
    pub load: &'a [f64],
    /// $/kWh per slot; `None` drops the energy term from the objective.
    pub prices: Option<&'a [f64]>,
    pub dt: f64,
    /// Cap on the day's net load; emitted as rows only where it can bind.
    pub peak_cap: Option<f64>,
    /// `None` skips the degradation block entirely (costs are zero).
    pub curve: Option<&'a DegradationCurve>,
    pub encoding: DegEncoding,
}

/// Append one day's variables and constraints to `b`.
pub(crate) fn add_day_block(
    b: &mut LpBuilder,
    battery: &BatterySpec,
    spec: &DayBlockSpec<'_>,
) -> DayBlock {
    let h = spec.load.len();
    let dt = spec.dt;
    let eta = battery.round_trip_efficiency;
    let dead = battery.soe_max <= 0.0;
    let charge_hi = if dead { 0.0 } else { battery.p_max };
    let discharge_hi = if dead { 0.0 } else { -battery.p_min };

    let charge: Vec<usize> = (0..h)
        .map(|t| {
            let cost = spec.prices.map_or(0.0, |p| p[t] * dt);
            b.add_var(0.0, charge_hi, cost)
        })
        .collect();
    let discharge: Vec<usize> = (0..h)
        .map(|t| {
            let cost = spec.prices.map_or(0.0, |p| -p[t] * dt);
            b.add_var(0.0, discharge_hi, cost)
        })
        .collect();
    let soe: Vec<usize> = (0..h)
        .map(|t| {
            if t == h - 1 {
                // end-of-day reset to the starting state
                b.add_var(battery.soe_ini, battery.soe_ini, 0.0)
            } else {
                b.add_var(0.0, battery.soe_max, 0.0)
            }
        })
        .collect();

    for t in 0..h {
        let mut row = vec![
            (soe[t], 1.0),
            (charge[t], -dt * eta),
            (discharge[t], dt),
        ];
        let rhs = if t == 0 {
            battery.soe_ini
        } else {
            row.push((soe[t - 1], -1.0));
            0.0
        };
        b.add_eq(row, rhs);
    }

    if let Some(cap) = spec.peak_cap {
        for t in 0..h {
            let slack = cap - spec.load[t];
            if slack < charge_hi {
                b.add_le(vec![(charge[t], 1.0), (discharge[t], -1.0)], slack);
            }
        }
    }

    let (c_deg, max_dod) = match spec.curve {
        Some(curve) if !dead => add_degradation(b, battery, curve, &soe, spec.encoding),
        _ => (None, None),
    };

    DayBlock {
        charge,
        discharge,
        soe,
        c_deg,
        max_dod,
    }
}

fn add_degradation(
    b: &mut LpBuilder,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    soe: &[usize],
    encoding: DegEncoding,
) -> (Option<usize>, Option<usize>) {
    let dod_ini = battery.initial_dod();
    let pw0 = curve
        .pw_cost(dod_ini)
        .expect("initial DoD is inside [0, 1] by BatterySpec validation");
    let deg_hi = (curve.cost_breakpoints().last().copied().unwrap_or(0.0) - pw0).max(0.0);
    let smax = battery.soe_max;

    match encoding {
        DegEncoding::MaxDod => {
            let d = b.add_var(dod_ini, 1.0, 0.0);
            let c = b.add_var(0.0, deg_hi, 1.0);
            // d >= (soe_max - soe_t) / soe_max for every interval
            for &s in soe {
                b.add_ge(vec![(d, smax), (s, 1.0)], smax);
            }
            for &(slope, intercept) in curve.segment_lines() {
                b.add_ge(vec![(c, 1.0), (d, -slope)], intercept - pw0);
            }
            (Some(c), Some(d))
        }
        DegEncoding::PerInterval => {
            let c = b.add_var(0.0, deg_hi, 1.0);
            // c >= slope * dod_t + intercept - pw0 with
            // dod_t = 1 - soe_t / soe_max, for every interval and segment
            for &s in soe {
                for &(slope, intercept) in curve.segment_lines() {
                    b.add_ge(
                        vec![(c, 1.0), (s, slope / smax)],
                        slope + intercept - pw0,
                    );
                }
            }
            (Some(c), None)
        }
        DegEncoding::Sos2 => {
            let d = b.add_var(dod_ini, 1.0, 0.0);
            for &s in soe {
                b.add_ge(vec![(d, smax), (s, 1.0)], smax);
            }
            let nseg = curve.num_segments();
            let weights: Vec<usize> = (0..=nseg).map(|_| b.add_var(0.0, 1.0, 0.0)).collect();
            let actives: Vec<usize> = (0..nseg).map(|_| b.add_binary(0.0)).collect();
            b.add_eq(weights.iter().map(|&w| (w, 1.0)).collect(), 1.0);
            b.add_eq(actives.iter().map(|&a| (a, 1.0)).collect(), 1.0);
            // each weight may be nonzero only next to the active segment
            for (j, &w) in weights.iter().enumerate() {
                let mut row = vec![(w, 1.0)];
                if j > 0 {
                    row.push((actives[j - 1], -1.0));
                }
                if j < nseg {
                    row.push((actives[j], -1.0));
                }
                b.add_le(row, 0.0);
            }
            let dods = curve.dod_breakpoints();
            let costs = curve.cost_breakpoints();
            let mut depth_row: Vec<(usize, f64)> =
                weights.iter().enumerate().map(|(j, &w)| (w, dods[j])).collect();
            depth_row.push((d, -1.0));
            b.add_eq(depth_row, 0.0);

            let c = b.add_var(0.0, deg_hi, 1.0);
            let mut cost_row: Vec<(usize, f64)> =
                weights.iter().enumerate().map(|(j, &w)| (w, costs[j])).collect();
            cost_row.push((c, -1.0));
            b.add_eq(cost_row, pw0);
            (Some(c), Some(d))
        }
    }
}

/// A built cycle problem: the program itself, the energy cost of the fixed
/// loads (a constant the LP objective omits), and the variable layout
/// needed to read a plan back out of a solution.
#[derive(Debug, Clone)]
pub struct CycleProblem {
    pub lp: LinearProgram,
    pub constant_cost: f64,
    pub layout: CycleLayout,
}

#[derive(Debug, Clone)]
pub struct CycleLayout {
    pub days: Vec<DayBlock>,
    pub peak_var: usize,
    pub effective_loads: Vec<Vec<f64>>,
    pub hvac_pre: Vec<Vec<f64>>,
    pub hvac_post: Vec<Vec<f64>>,
    pub dt: f64,
}

/// Effective loads and the pre/post deltas for a fixed HVAC schedule.
pub(crate) fn apply_hvac(
    days: &[Vec<f64>],
    interval_minutes: u32,
    params: &HvacParams,
    schedule: HvacSchedule,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    if interval_minutes > 60 {
        return Err(Error::invalid(
            "HVAC windows are hourly; intervals longer than 60 min cannot align",
        ));
    }
    let pre_range = schedule.pre_start..schedule.pre_start + params.pre_hours;
    let post_range = schedule.post_start..schedule.post_start + params.post_hours;
    let mut eff = Vec::with_capacity(days.len());
    let mut pre = Vec::with_capacity(days.len());
    let mut post = Vec::with_capacity(days.len());
    for day in days {
        let mut e = Vec::with_capacity(day.len());
        let mut p = vec![0.0; day.len()];
        let mut q = vec![0.0; day.len()];
        for (t, &load) in day.iter().enumerate() {
            let hour = (t as u32 * interval_minutes) / 60;
            if pre_range.contains(&hour) {
                p[t] = load * params.pre_increase_pct / 100.0;
            } else if post_range.contains(&hour) {
                q[t] = -load * params.post_decrease_pct / 100.0;
            }
            e.push(load + p[t] + q[t]);
        }
        eff.push(e);
        pre.push(p);
        post.push(q);
    }
    Ok((eff, pre, post))
}

/// The dispatch problem over an arbitrary sequence of days sharing one
/// demand-priced peak: per-day battery blocks, a single peak epigraph
/// variable, and TOU energy costs. Day count is free (billing cycles use
/// a calendar month; tests use shorter horizons).
pub fn build_dispatch_problem(
    loads: &[Vec<f64>],
    prices: &[f64],
    dt: f64,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    demand_price: f64,
    encoding: DegEncoding,
) -> Result<CycleProblem> {
    battery.validate()?;
    if loads.is_empty() || loads.iter().any(|d| d.len() != prices.len()) {
        return Err(Error::invalid("each day must match the price vector length"));
    }

    let all = loads.iter().flatten().copied();
    let load_min = all.clone().fold(f64::INFINITY, f64::min);
    let load_max = all.fold(f64::NEG_INFINITY, f64::max);

    let mut b = LpBuilder::new();
    let peak_var = b.add_var(load_min + battery.p_min, load_max + battery.p_max, demand_price);

    let mut days = Vec::with_capacity(loads.len());
    let mut constant_cost = 0.0;
    for load in loads {
        let block = add_day_block(
            &mut b,
            battery,
            &DayBlockSpec {
                load,
                prices: Some(prices),
                dt,
                peak_cap: None,
                curve: Some(curve),
                encoding,
            },
        );
        // cycle peak epigraph: M >= load_t + charge_t - discharge_t
        for t in 0..load.len() {
            b.add_le(
                vec![
                    (block.charge[t], 1.0),
                    (block.discharge[t], -1.0),
                    (peak_var, -1.0),
                ],
                -load[t],
            );
        }
        constant_cost += load
            .iter()
            .zip(prices)
            .map(|(l, p)| l * p * dt)
            .sum::<f64>();
        days.push(block);
    }

    let zeros = vec![vec![0.0; prices.len()]; loads.len()];
    Ok(CycleProblem {
        lp: b.build(),
        constant_cost,
        layout: CycleLayout {
            days,
            peak_var,
            effective_loads: loads.to_vec(),
            hvac_pre: zeros.clone(),
            hvac_post: zeros,
            dt,
        },
    })
}

fn build_cycle(
    cycle: &BillingCycle,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    tariff: &TariffModel,
    bound: Bound,
    hvac: Option<(&HvacParams, HvacSchedule)>,
    encoding: DegEncoding,
) -> Result<CycleProblem> {
    let (eff_loads, hvac_pre, hvac_post) = match hvac {
        Some((params, schedule)) => {
            params.validate()?;
            apply_hvac(cycle.days(), cycle.interval_minutes(), params, schedule)?
        }
        None => {
            let zeros = vec![vec![0.0; cycle.slots_per_day()]; cycle.num_days()];
            (cycle.days().to_vec(), zeros.clone(), zeros)
        }
    };

    let prices = tariff.interval_energy_prices(cycle);
    let dt = cycle.interval_hours();
    let (p_lo, p_hi) = tariff.demand_price_bounds(cycle.month());
    let p_d = match bound {
        Bound::Hi => p_hi,
        Bound::Lo => p_lo,
    };

    let mut problem =
        build_dispatch_problem(&eff_loads, &prices, dt, battery, curve, p_d, encoding)?;
    problem.layout.hvac_pre = hvac_pre;
    problem.layout.hvac_post = hvac_post;
    Ok(problem)
}

/// The billing-cycle dispatch problem at one relaxed demand price, with the
/// degradation cost as a binary-free per-interval epigraph.
pub fn build_cycle_problem(
    cycle: &BillingCycle,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    tariff: &TariffModel,
    bound: Bound,
    hvac: Option<(&HvacParams, HvacSchedule)>,
) -> Result<CycleProblem> {
    build_cycle(cycle, battery, curve, tariff, bound, hvac, DegEncoding::PerInterval)
}

/// Same problem with the degradation curve encoded through adjacent-weight
/// (SOS2) binaries; solve with `solve_milp`. Cross-check oracle for the
/// convex encodings.
pub fn build_cycle_problem_sos2(
    cycle: &BillingCycle,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    tariff: &TariffModel,
    bound: Bound,
    hvac: Option<(&HvacParams, HvacSchedule)>,
) -> Result<CycleProblem> {
    build_cycle(cycle, battery, curve, tariff, bound, hvac, DegEncoding::Sos2)
}

impl CycleProblem {
    /// Read a dispatch plan out of an optimal solution of `self.lp`.
    pub fn extract_plan(
        &self,
        solution: &Solution,
        battery: &BatterySpec,
        curve: &DegradationCurve,
    ) -> Result<DispatchPlan> {
        let x = &solution.x;
        let mut battery_power = Vec::with_capacity(self.layout.days.len());
        let mut soe = Vec::with_capacity(self.layout.days.len());
        let mut per_day_degradation = Vec::with_capacity(self.layout.days.len());
        for block in &self.layout.days {
            let power = block.battery_power(x);
            let traj = block.soe_values(x);
            let max_dod = traj
                .iter()
                .map(|&s| battery.dod_of_soe(s))
                .fold(battery.initial_dod(), f64::max);
            per_day_degradation.push(curve.day_cost(max_dod, battery.initial_dod())?);
            battery_power.push(power);
            soe.push(traj);
        }
        Ok(DispatchPlan {
            battery_power,
            hvac_pre: self.layout.hvac_pre.clone(),
            hvac_post: self.layout.hvac_post.clone(),
            per_day_degradation,
            soe,
        })
    }

    /// Objective value including the fixed-load energy constant.
    pub fn total_objective(&self, solution: &Solution) -> f64 {
        solution.objective_value + self.constant_cost
    }
}
