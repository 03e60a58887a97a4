//! The four subcommand implementations. Each takes the loaded RunConfig
//! plus CLI overrides, writes its tables/summaries under the output
//! directory, prints a short human summary to stdout, and warns on stderr
//! whenever an optimized peak lands outside the tariff's peak window.

use std::path::{Path, PathBuf};

use peakshave::degradation::DegradationCurve;
use peakshave::design::{
    annual_assessment, optimize_cycle, payback, AssessmentReport, Bound, DispatchPlan,
};
use peakshave::model::{slice_cycles, BatterySpec, BillingCycle};
use peakshave::runtime::{run_cycle, ForecastSource, KdeModel, ScenarioSource};
use peakshave::tariff::bill;
use serde::{Deserialize, Serialize};

use crate::ingest::{ingest_cycle_life_csv, ingest_load_csv};
use crate::report::{
    assessment_rows, fmt, ratio_convention, write_csv, write_toml, AssessmentSummary,
    ComparisonReport, ComparisonRow, OutPaths, ASSESSMENT_HEADER, COMPARISON_HEADER,
};
use crate::run_config::{BoundArg, RunConfig};
use crate::{CliError, CliResult};

/// Flags shared by every subcommand; `None` keeps the config file's value.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub bound: Option<BoundArg>,
    pub out: Option<PathBuf>,
}

fn apply_overrides(cfg: &mut RunConfig, ov: &Overrides) {
    if let Some(seed) = ov.seed {
        cfg.seed = seed;
    }
    if let Some(bound) = ov.bound {
        cfg.bound = bound;
    }
    if let Some(out) = &ov.out {
        cfg.out_dir = out.clone();
    }
}

fn splitmix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Serialize, Deserialize)]
struct FitSummary {
    intercept_a: f64,
    slope_b: f64,
    capital_cost_battery: f64,
    segments: usize,
    cost_at_full_discharge: f64,
}

/// `fit-degradation`: fit the cycle-life law and write the piecewise cost
/// curve. Points come from `--points` (a `dod,cycles` CSV) or from the
/// battery config.
pub fn cmd_fit_degradation(
    config_path: &Path,
    points: Option<&Path>,
    ov: &Overrides,
) -> CliResult<()> {
    let mut cfg = RunConfig::load(config_path)?;
    apply_overrides(&mut cfg, ov);
    let battery = cfg.battery()?;
    let pts: Vec<(f64, f64)> = match points {
        Some(p) => ingest_cycle_life_csv(p)?,
        None => battery.cycle_life_points.iter().map(|p| (p[0], p[1])).collect(),
    };
    let fit = peakshave::degradation::fit_cycle_life(&pts)?;
    let curve = DegradationCurve::build(&fit, battery.capital_cost_battery, battery.curve_segments)?;

    let out = OutPaths::new(&cfg.out_dir);
    let bp_rows: Vec<Vec<String>> = curve
        .dod_breakpoints()
        .iter()
        .zip(curve.cost_breakpoints())
        .map(|(d, c)| vec![fmt(d), fmt(c)])
        .collect();
    write_csv(&out.file("degradation_breakpoints.csv"), &["dod", "cost"], &bp_rows)?;
    let seg_rows: Vec<Vec<String>> = curve
        .segment_lines()
        .iter()
        .enumerate()
        .map(|(i, (s, b))| vec![fmt(i), fmt(s), fmt(b)])
        .collect();
    write_csv(
        &out.file("degradation_segments.csv"),
        &["segment", "slope", "intercept"],
        &seg_rows,
    )?;
    write_toml(
        &out.file("fit_summary.toml"),
        &FitSummary {
            intercept_a: fit.a(),
            slope_b: fit.b(),
            capital_cost_battery: battery.capital_cost_battery,
            segments: battery.curve_segments,
            cost_at_full_discharge: curve.pw_cost(1.0)?,
        },
    )?;
    println!(
        "fitted log10(cycles) = {:.6} + {:.6} * DoD over {} points; full-discharge cost ${:.2}",
        fit.a(),
        fit.b(),
        pts.len(),
        curve.pw_cost(1.0)?
    );
    println!("wrote {}", out.file("degradation_breakpoints.csv").display());
    Ok(())
}

/// `bill`: exact tariff bills of the raw load, cycle by cycle.
pub fn cmd_bill(config_path: &Path, ov: &Overrides) -> CliResult<()> {
    let mut cfg = RunConfig::load(config_path)?;
    apply_overrides(&mut cfg, ov);
    let tariff = cfg.tariff()?;
    let profile = ingest_load_csv(&cfg.load_csv)?;
    let cycles = slice_cycles(&profile)?;

    let mut rows = Vec::new();
    let mut total = 0.0;
    for c in &cycles {
        let b = bill(&tariff, c);
        total += b.total;
        rows.push(vec![
            fmt(c.year()),
            fmt(c.month()),
            fmt(b.energy_charge),
            fmt(b.demand_charge),
            fmt(b.peak_kw),
            fmt(b.peak_hour),
            fmt(b.total),
        ]);
    }
    let out = OutPaths::new(&cfg.out_dir);
    write_csv(
        &out.file("bills.csv"),
        &["year", "month", "energy_charge", "demand_charge", "peak_kw", "peak_hour", "total"],
        &rows,
    )?;
    println!(
        "{} cycles billed, total ${total:.2}; wrote {}",
        cycles.len(),
        out.file("bills.csv").display()
    );
    Ok(())
}

/// Re-price a plan's per-day degradation with a different cost curve
/// (used to expose what degradation-blind dispatch really costs).
pub fn reprice_degradation(
    plan: &DispatchPlan,
    battery: &BatterySpec,
    true_curve: &DegradationCurve,
) -> peakshave::Result<f64> {
    let mut total = 0.0;
    for soe_day in &plan.soe {
        let max_dod = soe_day
            .iter()
            .map(|&s| battery.dod_of_soe(s))
            .fold(battery.initial_dod(), f64::max);
        total += true_curve.day_cost(max_dod, battery.initial_dod())?;
    }
    Ok(total)
}

/// Swap an assessment's degradation figures for true-curve re-priced ones
/// (the plans themselves are untouched).
pub fn reprice_assessment(
    report: &mut AssessmentReport,
    battery: &BatterySpec,
    true_curve: &DegradationCurve,
) -> peakshave::Result<()> {
    let mut totals_hi = 0.0;
    let mut totals_lo = 0.0;
    for c in &mut report.cycles {
        c.degradation.hi = reprice_degradation(&c.plan.hi, battery, true_curve)?;
        c.degradation.lo = reprice_degradation(&c.plan.lo, battery, true_curve)?;
        totals_hi += c.degradation.hi;
        totals_lo += c.degradation.lo;
    }
    report.annual_degradation.hi = totals_hi;
    report.annual_degradation.lo = totals_lo;
    report.annual_net_saving.hi = report.annual_gross_saving.hi - totals_hi;
    report.annual_net_saving.lo = report.annual_gross_saving.lo - totals_lo;
    Ok(())
}

fn warn_unverified(report: &AssessmentReport) {
    for c in &report.cycles {
        for b in Bound::BOTH {
            if !c.verified.get(b) {
                eprintln!(
                    "warning: cycle {}-{:02} [{}]: optimized peak falls outside the peak window; the relaxed bounds do not bracket this cycle",
                    c.year,
                    c.month,
                    b.label()
                );
            }
        }
    }
}

/// The computational core of `assess`: annual assessment (optionally
/// degradation-blind with post-hoc repricing) plus payback.
pub fn assess_report(
    cfg: &RunConfig,
) -> CliResult<(AssessmentReport, peakshave::design::PaybackReport)> {
    let tariff = cfg.tariff()?;
    let battery_cfg = cfg.battery()?;
    let battery = battery_cfg.to_spec()?;
    let true_curve = battery_cfg.degradation_curve()?;
    let hvac = cfg.hvac.as_ref().map(|h| h.to_params()).transpose()?;
    let profile = ingest_load_csv(&cfg.load_csv)?;

    let solve_curve = if cfg.degradation_blind {
        DegradationCurve::zero(&battery_cfg.fit()?, battery_cfg.curve_segments)?
    } else {
        true_curve.clone()
    };
    let mut report = annual_assessment(&profile, &battery, &solve_curve, &tariff, hvac.as_ref())?;
    if cfg.degradation_blind {
        reprice_assessment(&mut report, &battery, &true_curve)?;
    }
    let pb = payback(&report, &battery);
    Ok((report, pb))
}

/// `assess`: design-phase annual assessment + payback at both relaxed
/// demand prices. With `degradation_blind` the optimizer prices wear at
/// zero and the report's degradation columns are re-priced post hoc with
/// the true curve.
pub fn cmd_assess(config_path: &Path, ov: &Overrides) -> CliResult<()> {
    let mut cfg = RunConfig::load(config_path)?;
    apply_overrides(&mut cfg, ov);
    let (report, pb) = assess_report(&cfg)?;
    warn_unverified(&report);

    let out = OutPaths::new(&cfg.out_dir);
    write_csv(
        &out.file("assessment.csv"),
        &ASSESSMENT_HEADER,
        &assessment_rows(&report, &cfg.bound.bounds()),
    )?;
    write_toml(
        &out.file("payback.toml"),
        &AssessmentSummary::new(&report, &pb, cfg.degradation_blind),
    )?;

    println!(
        "annual saving (hi/lo): {:.2}/{:.2}  degradation: {:.2}/{:.2}",
        report.annual_gross_saving.hi,
        report.annual_gross_saving.lo,
        report.annual_degradation.hi,
        report.annual_degradation.lo
    );
    match (pb.payback_years.hi, pb.payback_years.lo) {
        (Some(h), Some(l)) => println!("payback years (hi/lo): {h:.2}/{l:.2}"),
        _ => println!("payback: none (net saving is not positive)"),
    }
    println!("wrote {}", out.file("assessment.csv").display());
    Ok(())
}

/// Pull the daily peaks and the peak-day shape out of a history cycle.
fn history_stats(cycle: &BillingCycle) -> (Vec<f64>, Vec<f64>) {
    let mut peaks = Vec::with_capacity(cycle.num_days());
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, day) in cycle.days().iter().enumerate() {
        let p = day.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        peaks.push(p);
        if p > best.0 {
            best = (p, i);
        }
    }
    (peaks, cycle.day(best.1).to_vec())
}

/// One cycle's design-phase and runtime outcomes, kept for reporting and
/// for the acceptance suite's invariant checks.
pub struct CyclePair {
    pub bound: Bound,
    pub design: peakshave::design::CycleOptimum,
    pub run: peakshave::runtime::CycleRunResult,
    pub year: i32,
    pub month: u32,
}

/// The computational core of `runtime`: per cycle, the perfect-foresight
/// optimum and a moving-horizon run with KDE scenarios trained on the
/// same calendar month of the history year.
pub fn runtime_comparison(cfg: &RunConfig) -> CliResult<Vec<CyclePair>> {
    let tariff = cfg.tariff()?;
    let battery_cfg = cfg.battery()?;
    let battery = battery_cfg.to_spec()?;
    let curve = battery_cfg.degradation_curve()?;
    let history_path = cfg.history_csv.as_ref().ok_or_else(|| {
        CliError::validation("runtime needs history_csv in the config (KDE training data)")
    })?;
    let history = ingest_load_csv(history_path)?;
    let profile = ingest_load_csv(&cfg.load_csv)?;
    let cycles = slice_cycles(&profile)?;
    let history_cycles = slice_cycles(&history)?;

    let forecast = if cfg.forecast_noise_pct > 0.0 {
        ForecastSource::Noisy {
            sigma_pct: cfg.forecast_noise_pct,
            seed: splitmix(cfg.seed, 0xF0CA),
        }
    } else {
        ForecastSource::Actual
    };

    let mut pairs = Vec::new();
    for (ci, cycle) in cycles.iter().enumerate() {
        let hist = history_cycles
            .iter()
            .find(|h| h.month() == cycle.month())
            .ok_or_else(|| {
                CliError::validation(format!(
                    "history has no cycle for month {:02}",
                    cycle.month()
                ))
            })?;
        let (peaks, shape_day) = history_stats(hist);
        let kde = KdeModel::fit(&peaks)?;

        for bound in cfg.bound.bounds() {
            let design = optimize_cycle(cycle, &battery, &curve, &tariff, bound, None)?;
            let run = run_cycle(
                cycle,
                &battery,
                &curve,
                &tariff,
                bound,
                &ScenarioSource::Kde {
                    model: &kde,
                    count: cfg.scenario_count,
                    shape_day: &shape_day,
                    seed: splitmix(cfg.seed, ci as u64),
                },
                &forecast,
            )?;
            pairs.push(CyclePair {
                bound,
                design,
                run,
                year: cycle.year(),
                month: cycle.month(),
            });
        }
    }
    Ok(pairs)
}

/// `runtime`: run the moving-horizon controller over every cycle of the
/// load, with KDE peak scenarios trained on the same calendar month of
/// the history year, and compare against the design-phase optimum.
pub fn cmd_runtime(config_path: &Path, ov: &Overrides) -> CliResult<()> {
    let mut cfg = RunConfig::load(config_path)?;
    apply_overrides(&mut cfg, ov);
    let pairs = runtime_comparison(&cfg)?;

    let mut rows = Vec::new();
    let mut monthly = Vec::new();
    for p in &pairs {
        let design_net = p.design.baseline_relaxed_bill - p.design.objective;
        let runtime_net = p.run.baseline_relaxed_bill - p.run.realized_total_relaxed;
        rows.push(ComparisonRow {
            year: p.year,
            month: p.month,
            bound: p.bound.label().to_string(),
            design_net_saving: design_net,
            runtime_net_saving: runtime_net,
            ratio: ratio_convention(runtime_net, design_net),
            design_degradation: p.design.degradation,
            runtime_degradation: p.run.realized_degradation,
            baseline_relaxed_bill: p.design.baseline_relaxed_bill,
            design_objective: p.design.objective,
            runtime_total_relaxed: p.run.realized_total_relaxed,
            runtime_exact_bill: p.run.realized_bill.total,
        });
        monthly.push(vec![
            fmt(p.year),
            fmt(p.month),
            p.bound.label().to_string(),
            fmt(p.design.baseline_relaxed_bill),
            fmt(p.design.objective),
            fmt(p.run.realized_total_relaxed),
        ]);
    }

    let report = ComparisonReport::from_rows(rows);
    let out = OutPaths::new(&cfg.out_dir);
    write_csv(&out.file("comparison.csv"), &COMPARISON_HEADER, &report.csv_rows())?;
    write_csv(
        &out.file("monthly_costs.csv"),
        &["year", "month", "bound", "baseline_cost", "design_cost", "runtime_cost"],
        &monthly,
    )?;
    write_toml(&out.file("runtime_summary.toml"), &report)?;

    for a in &report.annual {
        println!(
            "[{}] design net saving {:.2}, runtime net saving {:.2}, ratio {:.3}",
            a.bound, a.design_net_saving, a.runtime_net_saving, a.ratio
        );
    }
    println!("wrote {}", out.file("comparison.csv").display());
    Ok(())
}
