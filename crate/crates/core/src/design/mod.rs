//! Perfect-foresight billing-cycle optimization: dispatch a battery (and
//! optionally HVAC pre/post-cooling) against a cycle of known loads, at
//! the upper and lower relaxed demand prices, then aggregate a year of
//! cycles into savings, payback time and salvage value.
//!
//! The cycle problem couples its days only through the single cycle-peak
//! variable. `optimize_cycle` exploits that: for a fixed peak cap the days
//! separate into independent small LPs, the capped value function is
//! convex in the cap, and a golden-section search over the cap recovers
//! the optimum. The per-day LPs inside one evaluation are embarrassingly
//! parallel. `build_cycle_problem` keeps the monolithic LP as the spec of
//! record, and tests hold the two routes (plus the SOS2 binary encoding)
//! to within solver tolerance of each other.

mod problem;

pub use problem::{
    build_cycle_problem, build_cycle_problem_sos2, build_dispatch_problem, CycleLayout,
    CycleProblem, DayBlock, DegEncoding,
};

use std::sync::Mutex;

use crate::degradation::DegradationCurve;
use crate::error::{Error, Result};
use crate::exec;
use crate::lp::{solve_lp, LpBuilder, Status};
use crate::model::{slice_cycles, BatterySpec, BillingCycle, HvacParams, LoadProfile};
use crate::tariff::{bill, verify_peak_window, BillBreakdown, TariffModel};

pub(crate) use problem::{add_day_block, apply_hvac, DayBlockSpec};

/// Which relaxed demand price a solve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Hi,
    Lo,
}

impl Bound {
    pub const BOTH: [Bound; 2] = [Bound::Hi, Bound::Lo];

    pub fn label(self) -> &'static str {
        match self {
            Bound::Hi => "hi",
            Bound::Lo => "lo",
        }
    }
}

/// A pair of values, one per relaxed demand-price bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerBound<T> {
    pub hi: T,
    pub lo: T,
}

impl<T> PerBound<T> {
    pub fn get(&self, bound: Bound) -> &T {
        match bound {
            Bound::Hi => &self.hi,
            Bound::Lo => &self.lo,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PerBound<U> {
        PerBound {
            hi: f(&self.hi),
            lo: f(&self.lo),
        }
    }
}

/// Fixed HVAC window placement: starting hours of the pre-cooling and
/// post-cooling windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HvacSchedule {
    pub pre_start: u32,
    pub post_start: u32,
}

/// A cycle's dispatch: per-day battery power and stored-energy trajectory,
/// the fixed HVAC deltas, and the degradation cost charged to each day.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchPlan {
    /// kW per day and interval; positive = charging.
    pub battery_power: Vec<Vec<f64>>,
    /// kW load increase during pre-cooling (>= 0).
    pub hvac_pre: Vec<Vec<f64>>,
    /// kW load decrease during post-cooling (<= 0).
    pub hvac_post: Vec<Vec<f64>>,
    /// $ per day: pw(max depth reached) - pw(depth at day start), >= 0.
    pub per_day_degradation: Vec<f64>,
    /// kWh at the end of each interval.
    pub soe: Vec<Vec<f64>>,
}

impl DispatchPlan {
    pub fn degradation_total(&self) -> f64 {
        self.per_day_degradation.iter().sum()
    }

    /// kWh moved through the battery on one day (|power| integrated).
    pub fn day_throughput_kwh(&self, day: usize, dt: f64) -> f64 {
        self.battery_power[day].iter().map(|p| p.abs() * dt).sum::<f64>()
    }
}

/// Tolerance for the physical dispatch invariants (power boxes, stored
/// energy range, end-of-day reset).
pub const PLAN_TOL: f64 = 1e-7;

/// Verify the battery-physics invariants of a plan: power inside
/// `[p_min, p_max]`, stored energy inside `[0, soe_max]` and consistent
/// with the power sequence, end-of-day reset to `soe_ini`, and per-day
/// degradation consistent with the trajectory.
pub fn check_plan(
    plan: &DispatchPlan,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    dt: f64,
) -> Result<()> {
    let eta = battery.round_trip_efficiency;
    for (day, (power, soe)) in plan.battery_power.iter().zip(&plan.soe).enumerate() {
        if power.len() != soe.len() {
            return Err(Error::invalid(format!(
                "day {day}: power and SoE length mismatch"
            )));
        }
        let mut prev = battery.soe_ini;
        let mut max_dod = battery.initial_dod();
        for (t, (&p, &s)) in power.iter().zip(soe).enumerate() {
            if p < battery.p_min - PLAN_TOL || p > battery.p_max + PLAN_TOL {
                return Err(Error::invalid(format!(
                    "day {day} slot {t}: power {p} outside [{}, {}]",
                    battery.p_min, battery.p_max
                )));
            }
            if s < -PLAN_TOL || s > battery.soe_max + PLAN_TOL {
                return Err(Error::invalid(format!(
                    "day {day} slot {t}: SoE {s} outside [0, {}]",
                    battery.soe_max
                )));
            }
            let delta = (s - prev) / dt;
            if (eta - 1.0).abs() < 1e-15 {
                if (delta - p).abs() > PLAN_TOL / dt {
                    return Err(Error::invalid(format!(
                        "day {day} slot {t}: SoE step {delta} inconsistent with power {p}"
                    )));
                }
            } else {
                // split the net power into a charge/discharge pair that
                // reproduces the SoE step and check it fits the ratings
                let pd = (eta * p - delta) / (1.0 - eta);
                let pc = p + pd;
                let tol = PLAN_TOL / dt;
                if pd < -tol || pc < -tol || pc > battery.p_max + tol || pd > -battery.p_min + tol
                {
                    return Err(Error::invalid(format!(
                        "day {day} slot {t}: no feasible charge/discharge split for power {p}, SoE step {delta}"
                    )));
                }
            }
            max_dod = max_dod.max(battery.dod_of_soe(s));
            prev = s;
        }
        if (prev - battery.soe_ini).abs() > PLAN_TOL {
            return Err(Error::invalid(format!(
                "day {day}: end-of-day SoE {prev} != soe_ini {}",
                battery.soe_ini
            )));
        }
        let expected = curve.day_cost(max_dod, battery.initial_dod())?;
        if (plan.per_day_degradation[day] - expected).abs() > 1e-6 * expected.abs().max(1.0) {
            return Err(Error::invalid(format!(
                "day {day}: reported degradation {} != trajectory degradation {expected}",
                plan.per_day_degradation[day]
            )));
        }
    }
    Ok(())
}

/// One optimized billing cycle.
#[derive(Debug, Clone)]
pub struct CycleOptimum {
    pub plan: DispatchPlan,
    /// Relaxed objective: energy + degradation + p_d x peak.
    pub objective: f64,
    /// Relaxed bill only (objective minus degradation).
    pub relaxed_bill: f64,
    pub degradation: f64,
    /// Peak of the dispatched net load, kW.
    pub peak_kw: f64,
    /// The dispatched net load re-priced exactly (hour-of-peak price).
    pub exact_bill: BillBreakdown,
    /// Whether the dispatched peak falls inside the tariff's peak window.
    pub verified: bool,
    /// The relaxed demand price used, $/kW.
    pub demand_price: f64,
    /// No-battery, no-HVAC bill under the same relaxed demand price.
    pub baseline_relaxed_bill: f64,
    pub hvac_schedule: Option<HvacSchedule>,
    /// Dispatched net load per day.
    pub net_days: Vec<Vec<f64>>,
}

pub(crate) struct DaySolve {
    pub(crate) cost: f64,
    pub(crate) power: Vec<f64>,
    pub(crate) soe: Vec<f64>,
}

/// Solve one day's dispatch under an optional cap on net load. Returns
/// `None` when the cap is unreachable for this day.
pub(crate) fn solve_day_dispatch(
    load: &[f64],
    prices: Option<&[f64]>,
    battery: &BatterySpec,
    curve: Option<&DegradationCurve>,
    dt: f64,
    cap: Option<f64>,
) -> Result<Option<DaySolve>> {
    let mut b = LpBuilder::new();
    let block = add_day_block(
        &mut b,
        battery,
        &DayBlockSpec {
            load,
            prices,
            dt,
            peak_cap: cap,
            curve,
            encoding: DegEncoding::MaxDod,
        },
    );
    let sol = solve_lp(&b.build())?;
    match sol.status {
        Status::Infeasible => Ok(None),
        Status::Unbounded => Err(Error::Solver(
            "day dispatch reported unbounded despite boxed variables".into(),
        )),
        Status::Optimal => Ok(Some(DaySolve {
            cost: sol.objective_value,
            power: block.battery_power(&sol.x),
            soe: block.soe_values(&sol.x),
        })),
    }
}

/// Optimal cost of dispatching one day under a cap on its net load:
/// TOU energy variation plus degradation, or `None` when the cap is
/// unreachable. This is the unit of work the cycle optimizer sweeps in
/// parallel; exposed for benchmarks and external experiments.
pub fn day_dispatch_cost(
    load: &[f64],
    prices: &[f64],
    battery: &BatterySpec,
    curve: Option<&DegradationCurve>,
    dt: f64,
    cap: Option<f64>,
) -> Result<Option<f64>> {
    Ok(solve_day_dispatch(load, Some(prices), battery, curve, dt, cap)?.map(|d| d.cost))
}

/// Smallest net-load peak this day can reach within battery limits.
pub(crate) fn min_achievable_peak(load: &[f64], battery: &BatterySpec, dt: f64) -> Result<f64> {
    let load_min = load.iter().copied().fold(f64::INFINITY, f64::min);
    let load_max = load.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut b = LpBuilder::new();
    let m = b.add_var(load_min + battery.p_min, load_max + battery.p_max, 1.0);
    let block = add_day_block(
        &mut b,
        battery,
        &DayBlockSpec {
            load,
            prices: None,
            dt,
            peak_cap: None,
            curve: None,
            encoding: DegEncoding::MaxDod,
        },
    );
    for t in 0..load.len() {
        b.add_le(
            vec![(block.charge[t], 1.0), (block.discharge[t], -1.0), (m, -1.0)],
            -load[t],
        );
    }
    let sol = solve_lp(&b.build())?.into_optimal("per-day minimum peak")?;
    Ok(sol.objective_value)
}

/// Golden-section minimization of a convex function, returning the best
/// evaluated point. Infeasible regions may return `f64::INFINITY`.
pub(crate) fn golden_min(a: f64, b: f64, max_iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut best = (f64::INFINITY, a);
    let eval = |x: f64, best: &mut (f64, f64)| -> f64 {
        let v = f(x);
        if v < best.0 {
            *best = (v, x);
        }
        v
    };
    let (mut lo, mut hi) = (a, b);
    eval(lo, &mut best);
    eval(hi, &mut best);
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = eval(x1, &mut best);
    let mut f2 = eval(x2, &mut best);
    for _ in 0..max_iters {
        if hi - lo < 1e-11 * hi.abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = eval(x1, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = eval(x2, &mut best);
        }
    }
    (best.1, best.0)
}

/// Iterations of the golden-section peak search. The interval shrinks by
/// the golden ratio per iteration, so this caps the relative interval at
/// well under 1e-12.
pub(crate) const PEAK_SEARCH_ITERS: usize = 80;

/// Optimize one billing cycle at one relaxed demand price, optionally with
/// a fixed HVAC window pair. The result carries the relaxed objective, the
/// exact re-priced bill of the dispatched net load, and the peak-window
/// verification flag.
pub fn optimize_cycle(
    cycle: &BillingCycle,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    tariff: &TariffModel,
    bound: Bound,
    hvac: Option<(&HvacParams, HvacSchedule)>,
) -> Result<CycleOptimum> {
    battery.validate()?;
    let dt = cycle.interval_hours();
    let prices = tariff.interval_energy_prices(cycle);
    let (p_lo, p_hi) = tariff.demand_price_bounds(cycle.month());
    let p_d = match bound {
        Bound::Hi => p_hi,
        Bound::Lo => p_lo,
    };

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

    // degradation-free curves need no rows at all
    let curve_opt =
        (curve.cost_breakpoints().last().copied().unwrap_or(0.0) > 0.0).then_some(curve);

    let n_days = eff_loads.len();
    let energy_const: f64 = eff_loads
        .iter()
        .map(|day| day.iter().zip(&prices).map(|(l, p)| l * p * dt).sum::<f64>())
        .sum();

    // search interval for the cycle peak cap
    let day_min_peaks = exec::try_map_range(n_days, |i| {
        min_achievable_peak(&eff_loads[i], battery, dt)
    })?;
    let cap_lo = day_min_peaks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cap_hi = eff_loads
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        + battery.p_max.max(0.0);
    let cap_hi = cap_hi.max(cap_lo);

    // capped value function: p_d * cap + sum of per-day optimal costs
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let eval_cap = |cap: f64| -> f64 {
        let costs = exec::map_range(n_days, |i| {
            solve_day_dispatch(&eff_loads[i], Some(&prices), battery, curve_opt, dt, Some(cap))
        });
        let mut total = p_d * cap;
        for c in costs {
            match c {
                Ok(Some(day)) => total += day.cost,
                Ok(None) => return f64::INFINITY,
                Err(e) => {
                    *failure.lock().unwrap() = Some(e);
                    return f64::INFINITY;
                }
            }
        }
        total
    };

    let (best_cap, best_val) = golden_min(cap_lo, cap_hi, PEAK_SEARCH_ITERS, eval_cap);
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    if !best_val.is_finite() {
        return Err(Error::infeasible(format!(
            "cycle {}-{:02} dispatch",
            cycle.year(),
            cycle.month()
        )));
    }

    // final pass at the chosen cap, extracting the plans
    let solves = exec::try_map_range(n_days, |i| {
        solve_day_dispatch(&eff_loads[i], Some(&prices), battery, curve_opt, dt, Some(best_cap))?
            .ok_or_else(|| Error::infeasible("day dispatch at optimized cap"))
    })?;

    let mut battery_power = Vec::with_capacity(n_days);
    let mut soe = Vec::with_capacity(n_days);
    let mut per_day_degradation = Vec::with_capacity(n_days);
    let mut net_days = Vec::with_capacity(n_days);
    let mut var_cost = 0.0;
    let mut peak_kw = f64::NEG_INFINITY;
    for (day, s) in solves.into_iter().enumerate() {
        let net: Vec<f64> = eff_loads[day]
            .iter()
            .zip(&s.power)
            .map(|(l, p)| l + p)
            .collect();
        peak_kw = net.iter().copied().fold(peak_kw, f64::max);
        let max_dod = s
            .soe
            .iter()
            .map(|&v| battery.dod_of_soe(v))
            .fold(battery.initial_dod(), f64::max);
        per_day_degradation.push(curve.day_cost(max_dod, battery.initial_dod())?);
        var_cost += s.cost;
        battery_power.push(s.power);
        soe.push(s.soe);
        net_days.push(net);
    }

    let plan = DispatchPlan {
        battery_power,
        hvac_pre,
        hvac_post,
        per_day_degradation,
        soe,
    };
    check_plan(&plan, battery, curve, dt)?;

    let degradation = plan.degradation_total();
    // the plan's own objective; <= the capped value because the realized
    // peak may sit strictly below the cap
    let objective = energy_const + var_cost + p_d * peak_kw;
    let relaxed_bill = objective - degradation;

    let net_cycle = cycle.with_days(net_days.clone())?;
    let exact_bill = bill(tariff, &net_cycle);
    let verified = verify_peak_window(tariff, &net_cycle);

    let baseline_peak = cycle.intervals().fold(f64::NEG_INFINITY, f64::max);
    let baseline_energy: f64 = cycle
        .days()
        .iter()
        .map(|day| day.iter().zip(&prices).map(|(l, p)| l * p * dt).sum::<f64>())
        .sum();
    let baseline_relaxed_bill = baseline_energy + p_d * baseline_peak;

    Ok(CycleOptimum {
        plan,
        objective,
        relaxed_bill,
        degradation,
        peak_kw,
        exact_bill,
        verified,
        demand_price: p_d,
        baseline_relaxed_bill,
        hvac_schedule: hvac.map(|(_, s)| s),
        net_days,
    })
}

/// Exhaustively evaluate the admissible HVAC window pairs (plus the
/// no-HVAC option), each with its own full cycle optimization, and return
/// the best. Ties keep the earliest (pre_start, post_start) pair; the
/// no-HVAC option wins ties against every pair.
pub fn enumerate_hvac_windows(
    cycle: &BillingCycle,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    tariff: &TariffModel,
    bound: Bound,
    params: &HvacParams,
) -> Result<CycleOptimum> {
    params.validate()?;
    let pairs = params.admissible_pairs();
    if pairs.is_empty() {
        return Err(Error::invalid(
            "no admissible HVAC window pair fits in 24 h with pre before post",
        ));
    }
    let mut best = optimize_cycle(cycle, battery, curve, tariff, bound, None)?;
    for (pre_start, post_start) in pairs {
        let schedule = HvacSchedule {
            pre_start,
            post_start,
        };
        let candidate =
            optimize_cycle(cycle, battery, curve, tariff, bound, Some((params, schedule)))?;
        let slack = 1e-9 * best.objective.abs().max(1.0);
        if candidate.objective < best.objective - slack {
            best = candidate;
        }
    }
    Ok(best)
}

/// One cycle's line in an assessment report.
#[derive(Debug, Clone)]
pub struct CycleAssessment {
    pub year: i32,
    pub month: u32,
    /// No-battery baseline bill at each relaxed demand price.
    pub baseline_bill: PerBound<f64>,
    /// Optimized relaxed objective (energy + degradation + demand term).
    pub objective: PerBound<f64>,
    /// Bill reduction vs baseline at the same relaxed price (gross, i.e.
    /// before subtracting degradation).
    pub gross_saving: PerBound<f64>,
    pub degradation: PerBound<f64>,
    pub exact_bill_total: PerBound<f64>,
    pub peak_kw: PerBound<f64>,
    pub verified: PerBound<bool>,
    pub hvac_schedule: PerBound<Option<HvacSchedule>>,
    pub plan: PerBound<DispatchPlan>,
}

impl CycleAssessment {
    pub fn net_saving(&self) -> PerBound<f64> {
        PerBound {
            hi: self.gross_saving.hi - self.degradation.hi,
            lo: self.gross_saving.lo - self.degradation.lo,
        }
    }
}

/// Whole-horizon assessment: one entry per billing cycle plus totals.
#[derive(Debug, Clone)]
pub struct AssessmentReport {
    pub cycles: Vec<CycleAssessment>,
    pub annual_gross_saving: PerBound<f64>,
    pub annual_degradation: PerBound<f64>,
    pub annual_net_saving: PerBound<f64>,
    /// False if any cycle's optimized peak fell outside the peak window.
    pub all_verified: PerBound<bool>,
}

/// Assess a load history cycle by cycle at both relaxed demand prices.
/// When `hvac` is given, the window pair is re-chosen per cycle and bound
/// by exhaustive enumeration.
pub fn annual_assessment(
    profile: &LoadProfile,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    tariff: &TariffModel,
    hvac: Option<&HvacParams>,
) -> Result<AssessmentReport> {
    let cycles = slice_cycles(profile)?;
    let assessed = exec::map_slice(&cycles, |cycle| -> Result<CycleAssessment> {
        let solve = |bound: Bound| -> Result<CycleOptimum> {
            match hvac {
                Some(params) => enumerate_hvac_windows(cycle, battery, curve, tariff, bound, params),
                None => optimize_cycle(cycle, battery, curve, tariff, bound, None),
            }
        };
        let hi = solve(Bound::Hi)?;
        let lo = solve(Bound::Lo)?;
        Ok(CycleAssessment {
            year: cycle.year(),
            month: cycle.month(),
            baseline_bill: PerBound {
                hi: hi.baseline_relaxed_bill,
                lo: lo.baseline_relaxed_bill,
            },
            objective: PerBound {
                hi: hi.objective,
                lo: lo.objective,
            },
            gross_saving: PerBound {
                hi: hi.baseline_relaxed_bill - hi.relaxed_bill,
                lo: lo.baseline_relaxed_bill - lo.relaxed_bill,
            },
            degradation: PerBound {
                hi: hi.degradation,
                lo: lo.degradation,
            },
            exact_bill_total: PerBound {
                hi: hi.exact_bill.total,
                lo: lo.exact_bill.total,
            },
            peak_kw: PerBound {
                hi: hi.peak_kw,
                lo: lo.peak_kw,
            },
            verified: PerBound {
                hi: hi.verified,
                lo: lo.verified,
            },
            hvac_schedule: PerBound {
                hi: hi.hvac_schedule,
                lo: lo.hvac_schedule,
            },
            plan: PerBound {
                hi: hi.plan,
                lo: lo.plan,
            },
        })
    });
    let cycles: Vec<CycleAssessment> = assessed.into_iter().collect::<Result<_>>()?;

    let mut report = AssessmentReport {
        annual_gross_saving: PerBound { hi: 0.0, lo: 0.0 },
        annual_degradation: PerBound { hi: 0.0, lo: 0.0 },
        annual_net_saving: PerBound { hi: 0.0, lo: 0.0 },
        all_verified: PerBound { hi: true, lo: true },
        cycles,
    };
    for c in &report.cycles {
        report.annual_gross_saving.hi += c.gross_saving.hi;
        report.annual_gross_saving.lo += c.gross_saving.lo;
        report.annual_degradation.hi += c.degradation.hi;
        report.annual_degradation.lo += c.degradation.lo;
        report.all_verified.hi &= c.verified.hi;
        report.all_verified.lo &= c.verified.lo;
    }
    report.annual_net_saving = PerBound {
        hi: report.annual_gross_saving.hi - report.annual_degradation.hi,
        lo: report.annual_gross_saving.lo - report.annual_degradation.lo,
    };
    Ok(report)
}

/// Payback time and battery salvage value derived from an assessment.
/// `payback_years = capital / (annual saving - annual degradation)`;
/// a non-positive net saving yields `None` rather than an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaybackReport {
    pub payback_years: PerBound<Option<f64>>,
    /// Fraction of battery cycle-life value left at payback, in [0, 1].
    pub salvage_fraction: PerBound<Option<f64>>,
}

pub fn payback(report: &AssessmentReport, battery: &BatterySpec) -> PaybackReport {
    let capital = battery.capital_total();
    let one = |bound: Bound| -> (Option<f64>, Option<f64>) {
        let net = *report.annual_net_saving.get(bound);
        let deg = *report.annual_degradation.get(bound);
        if net <= 0.0 {
            return (None, None);
        }
        let years = capital / net;
        let salvage = if battery.capital_cost_battery <= 0.0 || deg <= 0.0 {
            1.0
        } else {
            (1.0 - years * deg / battery.capital_cost_battery).clamp(0.0, 1.0)
        };
        (Some(years), Some(salvage))
    };
    let (hi_y, hi_s) = one(Bound::Hi);
    let (lo_y, lo_s) = one(Bound::Lo);
    PaybackReport {
        payback_years: PerBound { hi: hi_y, lo: lo_y },
        salvage_fraction: PerBound { hi: hi_s, lo: lo_s },
    }
}
