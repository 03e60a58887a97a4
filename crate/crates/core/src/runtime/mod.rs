//! Moving-horizon stochastic dispatch: one day at a time, without knowing
//! the billing cycle's eventual peak.
//!
//! Each morning the controller solves a two-stage program. First stage:
//! today's battery dispatch (today's load is taken as deterministic).
//! Second stage, per scenario: a recourse dispatch on one sampled future
//! peak day, with a per-scenario demand variable covering the historical
//! peak, today's peak and the scenario's own shaved peak. Future peak
//! magnitudes are drawn from a Gaussian KDE over historical daily peaks —
//! one draw per remaining day, keeping the max (the SAA of the
//! remaining-cycle maximum) — and pasted onto a reference day shape.
//!
//! Like the design phase, the solve reduces to a golden-section search
//! over a scalar (today's peak cap); the per-scenario recourse LPs inside
//! one evaluation run in parallel.

use std::sync::Mutex;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::degradation::DegradationCurve;
use crate::design::{
    add_day_block, check_plan, golden_min, min_achievable_peak, solve_day_dispatch, Bound,
    DayBlockSpec, DegEncoding, DispatchPlan,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::lp::LpBuilder;
use crate::model::{BatterySpec, BillingCycle};
use crate::tariff::{bill, find_peak, BillBreakdown, TariffModel};

/// Gaussian kernel density estimate over historical daily peak magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeModel {
    samples: Vec<f64>,
    bandwidth: f64,
}

impl KdeModel {
    /// Fit with Silverman's rule-of-thumb bandwidth `1.06 * sigma * n^(-1/5)`,
    /// falling back to `0.1 * |mean| + eps` for degenerate samples.
    pub fn fit(history: &[f64]) -> Result<Self> {
        if history.is_empty() {
            return Err(Error::invalid("KDE needs at least one sample"));
        }
        if history.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("KDE samples must be finite"));
        }
        let n = history.len() as f64;
        let mean = history.iter().sum::<f64>() / n;
        let sigma = if history.len() > 1 {
            (history.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let bandwidth = if sigma > 0.0 {
            1.06 * sigma * n.powf(-0.2)
        } else {
            0.1 * mean.abs() + 1e-9
        };
        Self::with_bandwidth(history.to_vec(), bandwidth)
    }

    pub fn with_bandwidth(samples: Vec<f64>, bandwidth: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("KDE needs at least one sample"));
        }
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::invalid("KDE bandwidth must be positive"));
        }
        Ok(Self { samples, bandwidth })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Mixture mean (equals the sample mean for Gaussian kernels).
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Density at `x`.
    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h * self.samples.len() as f64);
        self.samples
            .iter()
            .map(|&s| {
                let z = (x - s) / h;
                (-0.5 * z * z).exp()
            })
            .sum::<f64>()
            * norm
    }

    /// One draw: a uniformly chosen sample plus Gaussian kernel noise.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let idx = rng.random_range(0..self.samples.len());
        let normal = Normal::new(self.samples[idx], self.bandwidth)
            .expect("bandwidth validated at construction");
        normal.sample(rng)
    }
}

/// Equally weighted future-peak-day load scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    scenarios: Vec<Vec<f64>>,
}

impl ScenarioSet {
    pub fn new(scenarios: Vec<Vec<f64>>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::invalid("scenario set must not be empty"));
        }
        for (i, s) in scenarios.iter().enumerate() {
            if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::invalid(format!(
                    "scenario {i} has a negative or non-finite load"
                )));
            }
        }
        Ok(Self { scenarios })
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.scenarios.len() as f64
    }

    pub fn scenarios(&self) -> &[Vec<f64>] {
        &self.scenarios
    }
}

/// Draw one peak magnitude: the max of `draws` KDE samples, negatives
/// resampled (peaks are physical powers).
fn draw_peak<R: Rng>(kde: &KdeModel, draws: usize, rng: &mut R) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    for _ in 0..draws.max(1) {
        let mut m = kde.sample(rng);
        let mut tries = 0;
        while m < 0.0 && tries < 1000 {
            m = kde.sample(rng);
            tries += 1;
        }
        peak = peak.max(m.max(0.0));
    }
    peak
}

/// `n` scenarios, each `shape_day` rescaled so its maximum equals a drawn
/// peak magnitude. Deterministic for a fixed seed.
pub fn sample_scenarios(
    kde: &KdeModel,
    n: usize,
    shape_day: &[f64],
    seed: u64,
) -> Result<ScenarioSet> {
    sample_scenarios_horizon(kde, n, 1, shape_day, seed)
}

/// Like [`sample_scenarios`], but each scenario's magnitude is the max of
/// `draws_per_scenario` KDE draws: the sampled distribution of the highest
/// peak across that many remaining days.
pub fn sample_scenarios_horizon(
    kde: &KdeModel,
    n: usize,
    draws_per_scenario: usize,
    shape_day: &[f64],
    seed: u64,
) -> Result<ScenarioSet> {
    if n == 0 {
        return Err(Error::invalid("scenario count must be >= 1"));
    }
    let shape_max = shape_day.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(shape_max > 0.0) {
        return Err(Error::invalid("shape day must have a positive maximum"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenarios = (0..n)
        .map(|_| {
            let m = draw_peak(kde, draws_per_scenario, &mut rng);
            shape_day.iter().map(|v| v * m / shape_max).collect()
        })
        .collect();
    ScenarioSet::new(scenarios)
}

/// Controller state carried across the days of one billing cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeState {
    /// Highest realized net load so far this cycle, kW.
    pub historical_peak_kw: f64,
    /// Hour of day of that peak (earliest interval on ties).
    pub historical_peak_hour: Option<u32>,
    pub day_index: usize,
    pub cumulative_energy_cost: f64,
    pub cumulative_degradation: f64,
}

impl RuntimeState {
    pub fn cycle_start() -> Self {
        RuntimeState {
            historical_peak_kw: 0.0,
            historical_peak_hour: None,
            day_index: 0,
            cumulative_energy_cost: 0.0,
            cumulative_degradation: 0.0,
        }
    }
}

/// Tariff context for one operational day.
#[derive(Debug, Clone, Copy)]
pub struct DayContext<'a> {
    pub tariff: &'a TariffModel,
    pub month: u32,
    pub interval_minutes: u32,
    pub bound: Bound,
}

impl DayContext<'_> {
    fn demand_price(&self) -> f64 {
        let (lo, hi) = self.tariff.demand_price_bounds(self.month);
        match self.bound {
            Bound::Hi => hi,
            Bound::Lo => lo,
        }
    }

    fn dt(&self) -> f64 {
        f64::from(self.interval_minutes) / 60.0
    }

    fn slot_prices(&self, slots: usize) -> Vec<f64> {
        let season = self.tariff.season_for_month(self.month);
        (0..slots)
            .map(|t| season.energy_price[((t as u32 * self.interval_minutes) / 60) as usize])
            .collect()
    }
}

/// Golden-section iterations of the per-day peak-cap search. Shorter than
/// the design phase's: the interval still shrinks below 1e-9 relative,
/// far under anything the scenario sampling can resolve, and the day loop
/// runs hundreds of these.
const DAY_SEARCH_ITERS: usize = 48;

/// Today's dispatch and the expected objective it was chosen for.
#[derive(Debug, Clone)]
pub struct DayDecision {
    pub battery_power: Vec<f64>,
    pub soe: Vec<f64>,
    /// Degradation cost of today's trajectory.
    pub degradation: f64,
    /// Today's energy + degradation + expected future degradation and
    /// demand term, averaged over the scenarios.
    pub expected_objective: f64,
}

/// Recourse value of one scenario: optimal `C_deg + p_d * M` on the
/// scenario day, with `M` floored at `peak_floor` (historical peak and
/// today's cap) and covering the scenario's own net load.
fn scenario_recourse_cost(
    scen_load: &[f64],
    battery: &BatterySpec,
    curve: Option<&DegradationCurve>,
    dt: f64,
    demand_price: f64,
    peak_floor: f64,
) -> Result<(f64, f64)> {
    let load_max = scen_load.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // the floor already dominates the whole scenario day: idling is
    // optimal (the recourse day has no energy term, so dispatch could
    // only add degradation) and the LP can be skipped
    if peak_floor >= load_max {
        return Ok((demand_price * peak_floor, peak_floor));
    }
    let mut b = LpBuilder::new();
    let m = b.add_var(
        peak_floor,
        peak_floor.max(load_max + battery.p_max.max(0.0)),
        demand_price,
    );
    let block = add_day_block(
        &mut b,
        battery,
        &DayBlockSpec {
            load: scen_load,
            prices: None,
            dt,
            peak_cap: None,
            curve,
            encoding: DegEncoding::MaxDod,
        },
    );
    for t in 0..scen_load.len() {
        // slots that can never rise above the floor cannot define M
        if scen_load[t] + battery.p_max.max(0.0) <= peak_floor {
            continue;
        }
        b.add_le(
            vec![(block.charge[t], 1.0), (block.discharge[t], -1.0), (m, -1.0)],
            -scen_load[t],
        );
    }
    let sol = crate::lp::solve_lp(&b.build())?.into_optimal("scenario recourse")?;
    Ok((sol.objective_value, sol.x[m]))
}

/// Solve the two-stage day problem and return today's dispatch slice.
///
/// Today's load is treated as deterministic; the scenario set carries the
/// end-of-cycle peak uncertainty. The returned expected objective is the
/// plan's own value: today's energy and degradation plus the average over
/// scenarios of the recourse degradation and the demand term on
/// `max(historical peak, today's realized peak, scenario peak)`.
pub fn solve_day(
    state: &RuntimeState,
    today_load: &[f64],
    scenarios: &ScenarioSet,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    ctx: DayContext<'_>,
) -> Result<DayDecision> {
    battery.validate()?;
    let dt = ctx.dt();
    let p_d = ctx.demand_price();
    let prices = ctx.slot_prices(today_load.len());
    let hist = state.historical_peak_kw;
    let curve_opt =
        (curve.cost_breakpoints().last().copied().unwrap_or(0.0) > 0.0).then_some(curve);

    let energy_const: f64 = today_load.iter().zip(&prices).map(|(l, p)| l * p * dt).sum();

    let cap_lo = min_achievable_peak(today_load, battery, dt)?;
    let cap_hi =
        today_load.iter().copied().fold(f64::NEG_INFINITY, f64::max) + battery.p_max.max(0.0);
    let cap_hi = cap_hi.max(cap_lo);

    let scen = scenarios.scenarios();
    let weight = scenarios.weight();
    let failure: Mutex<Option<Error>> = Mutex::new(None);

    // Each scenario solved once at the base floor (the historical peak).
    // While the search floor stays at or below that solution's peak, the
    // floored problem has the same optimum, so the solve can be reused;
    // only floors above it need a fresh LP.
    let base: Vec<(f64, f64)> = exec::map_slice(scen, |s| {
        scenario_recourse_cost(s, battery, curve_opt, dt, p_d, hist)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let expected_recourse = |today_peak: f64| -> Result<f64> {
        let floor = hist.max(today_peak);
        let costs = exec::map_range(scen.len(), |i| -> Result<f64> {
            let (cost, peak) = base[i];
            if floor <= peak {
                Ok(cost)
            } else {
                Ok(scenario_recourse_cost(&scen[i], battery, curve_opt, dt, p_d, floor)?.0)
            }
        });
        let mut total = 0.0;
        for c in costs {
            total += weight * c?;
        }
        Ok(total)
    };

    let eval_cap = |cap: f64| -> f64 {
        let today = match solve_day_dispatch(today_load, Some(&prices), battery, curve_opt, dt, Some(cap))
        {
            Ok(Some(d)) => d,
            Ok(None) => return f64::INFINITY,
            Err(e) => {
                *failure.lock().unwrap() = Some(e);
                return f64::INFINITY;
            }
        };
        match expected_recourse(cap) {
            Ok(r) => today.cost + r,
            Err(e) => {
                *failure.lock().unwrap() = Some(e);
                f64::INFINITY
            }
        }
    };

    let (best_cap, best_val) = golden_min(cap_lo, cap_hi, DAY_SEARCH_ITERS, eval_cap);
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    if !best_val.is_finite() {
        return Err(Error::infeasible("runtime day dispatch"));
    }

    let today = solve_day_dispatch(today_load, Some(&prices), battery, curve_opt, dt, Some(best_cap))?
        .ok_or_else(|| Error::infeasible("runtime day dispatch at optimized cap"))?;
    let realized_peak = today_load
        .iter()
        .zip(&today.power)
        .map(|(l, p)| l + p)
        .fold(f64::NEG_INFINITY, f64::max);
    // re-evaluate at the plan's own peak (<= cap), which can only tighten
    let expected_objective = energy_const + today.cost + expected_recourse(realized_peak)?;

    let max_dod = today
        .soe
        .iter()
        .map(|&s| battery.dod_of_soe(s))
        .fold(battery.initial_dod(), f64::max);
    let degradation = curve.day_cost(max_dod, battery.initial_dod())?;

    Ok(DayDecision {
        battery_power: today.power,
        soe: today.soe,
        degradation,
        expected_objective,
    })
}

/// Where the controller's scenarios come from.
pub enum ScenarioSource<'a> {
    /// Sample fresh scenarios each day from a KDE over historical daily
    /// peaks, `count` per day, magnitudes drawn as the max over the
    /// remaining days of the cycle.
    Kde {
        model: &'a KdeModel,
        count: usize,
        shape_day: &'a [f64],
        seed: u64,
    },
    /// A fixed scenario set used every day (testing and what-if runs).
    Pinned(&'a [Vec<f64>]),
}

/// Forecast of the operational day handed to the controller.
pub enum ForecastSource {
    /// The actual day (the paper's assumption: intra-day forecasts are
    /// accurate).
    Actual,
    /// Actual day with multiplicative Gaussian noise per interval.
    Noisy { sigma_pct: f64, seed: u64 },
}

/// Per-day log entry of a cycle run.
#[derive(Debug, Clone)]
pub struct DayRecord {
    pub day: usize,
    pub expected_objective: f64,
    pub realized_energy_cost: f64,
    pub degradation: f64,
    pub historical_peak_after: f64,
    pub throughput_kwh: f64,
}

/// Outcome of running the controller through one billing cycle.
#[derive(Debug, Clone)]
pub struct CycleRunResult {
    /// The realized dispatch (HVAC deltas are zero in runtime).
    pub plan: DispatchPlan,
    pub net_days: Vec<Vec<f64>>,
    /// Exact bill of the realized net load.
    pub realized_bill: BillBreakdown,
    /// Realized energy + p_d x realized peak, at the run's bound.
    pub realized_relaxed_bill: f64,
    pub realized_degradation: f64,
    /// `realized_relaxed_bill + realized_degradation`.
    pub realized_total_relaxed: f64,
    /// No-battery bill at the same relaxed demand price.
    pub baseline_relaxed_bill: f64,
    pub records: Vec<DayRecord>,
    pub final_state: RuntimeState,
}

fn mix_seed(seed: u64, day: u64) -> u64 {
    // splitmix64 step keyed by the day index
    let mut z = seed ^ day.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Run the moving-horizon controller through a billing cycle of actual
/// loads. Decisions for day `i` see the forecast of day `i`, the realized
/// history before it, and sampled scenarios — never the actual loads of
/// later days. Dispatch is applied to the actual loads; the realized cycle
/// is priced exactly at the end.
pub fn run_cycle(
    cycle: &BillingCycle,
    battery: &BatterySpec,
    curve: &DegradationCurve,
    tariff: &TariffModel,
    bound: Bound,
    scenario_source: &ScenarioSource<'_>,
    forecast: &ForecastSource,
) -> Result<CycleRunResult> {
    battery.validate()?;
    let n_days = cycle.num_days();
    let dt = cycle.interval_hours();
    let ctx = DayContext {
        tariff,
        month: cycle.month(),
        interval_minutes: cycle.interval_minutes(),
        bound,
    };
    let prices = ctx.slot_prices(cycle.slots_per_day());
    let p_d = ctx.demand_price();

    let mut state = RuntimeState::cycle_start();
    let mut battery_power = Vec::with_capacity(n_days);
    let mut soe = Vec::with_capacity(n_days);
    let mut per_day_degradation = Vec::with_capacity(n_days);
    let mut net_days = Vec::with_capacity(n_days);
    let mut records = Vec::with_capacity(n_days);

    for day in 0..n_days {
        let actual = cycle.day(day);
        let forecast_today: Vec<f64> = match forecast {
            ForecastSource::Actual => actual.to_vec(),
            ForecastSource::Noisy { sigma_pct, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(*seed, day as u64));
                let normal = Normal::new(0.0, sigma_pct / 100.0)
                    .map_err(|e| Error::invalid(format!("forecast noise: {e}")))?;
                actual
                    .iter()
                    .map(|l| (l * (1.0 + normal.sample(&mut rng))).max(0.0))
                    .collect()
            }
        };

        let remaining = n_days - 1 - day;
        let scenarios = match scenario_source {
            ScenarioSource::Kde {
                model,
                count,
                shape_day,
                seed,
            } => {
                if remaining == 0 {
                    // no future left: a zero scenario reduces the demand
                    // term to max(historical, today)
                    ScenarioSet::new(vec![vec![0.0; cycle.slots_per_day()]])?
                } else {
                    sample_scenarios_horizon(
                        model,
                        *count,
                        remaining,
                        shape_day,
                        mix_seed(*seed, day as u64),
                    )?
                }
            }
            ScenarioSource::Pinned(s) => ScenarioSet::new(s.to_vec())?,
        };

        let decision = solve_day(&state, &forecast_today, &scenarios, battery, curve, ctx)?;

        // apply today's dispatch to the actual loads
        let net: Vec<f64> = actual
            .iter()
            .zip(&decision.battery_power)
            .map(|(l, p)| l + p)
            .collect();
        for (t, &v) in net.iter().enumerate() {
            if v > state.historical_peak_kw {
                state.historical_peak_kw = v;
                state.historical_peak_hour = Some(cycle.hour_of_interval(t));
            }
        }
        let energy_cost: f64 = net.iter().zip(&prices).map(|(l, p)| l * p * dt).sum();
        state.cumulative_energy_cost += energy_cost;
        state.cumulative_degradation += decision.degradation;
        state.day_index = day + 1;

        records.push(DayRecord {
            day,
            expected_objective: decision.expected_objective,
            realized_energy_cost: energy_cost,
            degradation: decision.degradation,
            historical_peak_after: state.historical_peak_kw,
            throughput_kwh: decision.battery_power.iter().map(|p| p.abs() * dt).sum(),
        });
        per_day_degradation.push(decision.degradation);
        battery_power.push(decision.battery_power);
        soe.push(decision.soe);
        net_days.push(net);
    }

    let zeros = vec![vec![0.0; cycle.slots_per_day()]; n_days];
    let plan = DispatchPlan {
        battery_power,
        hvac_pre: zeros.clone(),
        hvac_post: zeros,
        per_day_degradation,
        soe,
    };
    check_plan(&plan, battery, curve, dt)?;

    let net_cycle = cycle.with_days(net_days.clone())?;
    let realized_bill = bill(tariff, &net_cycle);
    let realized_peak = find_peak(&net_cycle).peak_kw;
    let realized_energy = state.cumulative_energy_cost;
    let realized_relaxed_bill = realized_energy + p_d * realized_peak;
    let realized_degradation = state.cumulative_degradation;

    let baseline_peak = cycle.intervals().fold(f64::NEG_INFINITY, f64::max);
    let baseline_energy: f64 = cycle
        .days()
        .iter()
        .map(|d| d.iter().zip(&prices).map(|(l, p)| l * p * dt).sum::<f64>())
        .sum();

    Ok(CycleRunResult {
        plan,
        net_days,
        realized_bill,
        realized_relaxed_bill,
        realized_degradation,
        realized_total_relaxed: realized_relaxed_bill + realized_degradation,
        baseline_relaxed_bill: baseline_energy + p_d * baseline_peak,
        records,
        final_state: state,
    })
}

#[cfg(test)]
mod tests;
