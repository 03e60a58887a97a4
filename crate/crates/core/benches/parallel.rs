//! Parallel-vs-sequential benchmarks of the two data-parallel inner
//! loops: the per-day dispatch sweep inside one cycle-peak evaluation and
//! the per-scenario recourse batch inside one controller day.
//!
//! Build with default features for the rayon path; `--no-default-features`
//! turns `exec::map_range` into its sequential twin, so the pair of
//! benchmarks measures exactly what the `parallel` feature buys.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use peakshave::degradation::{CycleLifeFit, DegradationCurve};
use peakshave::design::{day_dispatch_cost, optimize_cycle, Bound};
use peakshave::exec;
use peakshave::model::BatterySpec;
use peakshave::runtime::{sample_scenarios, solve_day, DayContext, KdeModel, RuntimeState};
use peakshave::synth::{dominant_peak_month, random_cycle};
use peakshave::tariff::{SeasonSchedule, TariffModel, DEFAULT_PEAK_WINDOW};

fn battery() -> BatterySpec {
    BatterySpec {
        soe_max: 10.0,
        p_min: -10.0,
        p_max: 10.0,
        soe_ini: 10.0,
        capital_cost_battery: 2000.0,
        capital_cost_inverter: 0.0,
        cycle_life_points: vec![(0.25, 10f64.powf(3.5)), (0.5, 1e3), (1.0, 1e2)],
        round_trip_efficiency: 1.0,
    }
}

fn curve() -> DegradationCurve {
    DegradationCurve::build(&CycleLifeFit::new(4.0, -2.0).unwrap(), 2000.0, 10).unwrap()
}

fn tariff() -> TariffModel {
    let mut demand = [12.0; 24];
    for h in 7..=20 {
        demand[h] = 30.0;
    }
    demand[11] = 41.95;
    let mut energy = [0.06; 24];
    for h in 8..=20 {
        energy[h] = 0.17;
    }
    TariffModel::new(
        vec![SeasonSchedule {
            name: "all".into(),
            months: (1..=12).collect(),
            energy_price: energy,
            demand_price: demand,
        }],
        DEFAULT_PEAK_WINDOW,
    )
    .unwrap()
}

/// One full month optimization (golden-section peak search over 31
/// parallel day LPs), through whichever path the feature flag selects.
fn bench_cycle_optimization(c: &mut Criterion) {
    let cycle = dominant_peak_month(2025, 7, 60, 40.0, 80.0, 17, 5).unwrap();
    let b = battery();
    let crv = curve();
    let t = tariff();
    let mut group = c.benchmark_group("cycle_optimization");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    group.bench_function("optimize_cycle", |bench| {
        bench.iter(|| {
            let opt = optimize_cycle(&cycle, &b, &crv, &t, Bound::Hi, None).unwrap();
            black_box(opt.objective)
        })
    });
    group.finish();
}

/// The same batch of independent day LPs pushed through `exec::map_range`
/// (rayon under the default feature) and its always-sequential twin.
fn bench_day_sweep(c: &mut Criterion) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let month = random_cycle(&mut rng, 2025, 7, 60).unwrap();
    let b = battery();
    let crv = curve();
    let t = tariff();
    let prices = t.interval_energy_prices(&month);
    let days = month.days().to_vec();
    let cap = 200.0;

    let solve_one = |i: usize| {
        let cost = day_dispatch_cost(&days[i], &prices, &b, Some(&crv), 1.0, Some(cap))
            .unwrap()
            .expect("cap is generous");
        black_box(cost)
    };

    let mut group = c.benchmark_group("day_sweep_31_lps");
    group.sample_size(20).measurement_time(Duration::from_secs(15));
    group.bench_function("exec_map_range", |bench| {
        bench.iter(|| exec::map_range(days.len(), solve_one))
    });
    group.bench_function("sequential_twin", |bench| {
        bench.iter(|| exec::map_range_seq(days.len(), solve_one))
    });
    group.finish();
}

/// One controller day at 20 scenarios: scenario recourse solves fan out
/// over the pool inside `solve_day`.
fn bench_scenario_day(c: &mut Criterion) {
    let t = tariff();
    let b = battery();
    let crv = curve();
    let kde = KdeModel::fit(&[95.0, 105.0, 112.0, 99.0, 120.0]).unwrap();
    let shape: Vec<f64> = (0..24)
        .map(|h| 40.0 + 80.0 * (-((h as f64 - 15.0) / 2.0).powi(2)).exp())
        .collect();
    let scen = sample_scenarios(&kde, 20, &shape, 3).unwrap();
    let today = shape.clone();
    let ctx = DayContext {
        tariff: &t,
        month: 7,
        interval_minutes: 60,
        bound: Bound::Hi,
    };
    let state = RuntimeState::cycle_start();

    let mut group = c.benchmark_group("controller_day_20_scenarios");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    group.bench_function("solve_day", |bench| {
        bench.iter(|| {
            let d = solve_day(&state, &today, &scen, &b, &crv, ctx).unwrap();
            black_box(d.expected_objective)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_cycle_optimization, bench_day_sweep, bench_scenario_day);
criterion_main!(benches);
