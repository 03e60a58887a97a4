//! Regenerates everything under `data/`: two synthetic office-load years
//! (same generator, different seeds), the sample tariff and battery
//! configs, the cycle-life test points, and the run configs the README
//! refers to. All of it is synthetic.
//!
//! Run from the workspace root:
//!
//! ```text
//! cargo run -p peakshave-cli --example gen_sample_data
//! ```

use std::path::Path;

use peakshave::synth::{office_year, OfficeYearConfig};
use peakshave_cli::ingest::emit_load_csv;

fn year_config(year: i32, seed: u64) -> OfficeYearConfig {
    OfficeYearConfig {
        year,
        interval_minutes: 60,
        base_kw: 40.0,
        business_kw: 50.0,
        cooling_kw: 45.0,
        spike_kw: 22.0,
        spike_days_per_month: 2,
        noise_pct: 1.5,
        seed,
    }
}

const TARIFF: &str = r#"# Sample tariff (synthetic). Shapes follow a NYC-style commercial
# schedule: TOU energy prices plus a demand charge whose $/kW rate depends
# on the hour the billing cycle's peak occurs. Peak window 7:00-20:00.
peak_window = [7, 20]

[seasons.summer]
months = [6, 7, 8, 9]
energy_price = [0.06, 0.06, 0.06, 0.06, 0.06, 0.06, 0.06, 0.11, 0.17, 0.17, 0.17, 0.17, 0.17, 0.17, 0.17, 0.17, 0.17, 0.17, 0.17, 0.17, 0.17, 0.11, 0.06, 0.06]
demand_price = [12.0, 12.0, 12.0, 12.0, 12.0, 12.0, 12.0, 30.0, 30.0, 30.0, 41.95, 41.95, 41.95, 41.95, 38.0, 38.0, 38.0, 38.0, 33.0, 33.0, 33.0, 12.0, 12.0, 12.0]

[seasons.winter]
months = [1, 2, 3, 4, 5, 10, 11, 12]
energy_price = [0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.09, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.09, 0.05, 0.05]
demand_price = [9.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0, 21.0, 21.0, 21.0, 28.0, 28.0, 28.0, 28.0, 26.0, 26.0, 26.0, 26.0, 22.0, 22.0, 22.0, 9.0, 9.0, 9.0]
"#;

const BATTERY: &str = r#"# Sample battery (synthetic): 10 kWh pack with a 10 kW inverter. The
# cycle-life points lie on log10(cycles) = 4 - 2 * DoD.
soe_max_kwh = 10.0
p_min_kw = -10.0
p_max_kw = 10.0
soe_ini_kwh = 10.0
capital_cost_battery = 2000.0
capital_cost_inverter = 2288.0
round_trip_efficiency = 1.0
curve_segments = 10
cycle_life_points = [[0.25, 3162.2776601683795], [0.5, 1000.0], [1.0, 100.0]]
"#;

const CYCLE_LIFE: &str = "dod,cycles
0.25,3162.2776601683795
0.5,1000.0
1.0,100.0
";

const RUN_ASSESS: &str = r#"# Design-phase assessment of the 2025 sample year.
load_csv = "load_2025.csv"
tariff_config = "tariff_sample.toml"
battery_config = "battery_sample.toml"
seed = 7
bound = "both"
out_dir = "out/assess"
"#;

const RUN_ASSESS_HVAC: &str = r#"# Assessment with HVAC pre/post-cooling enabled. Pre-cooling candidates
# sit on the business-hours plateau so engaging HVAC outside the cooling
# season would create a new morning peak and is never chosen.
load_csv = "load_2025.csv"
tariff_config = "tariff_sample.toml"
battery_config = "battery_sample.toml"
seed = 7
bound = "both"
out_dir = "out/assess_hvac"

[hvac]
pre_hours = 2
pre_increase_pct = 10.0
post_hours = 4
post_decrease_pct = 10.0
candidate_pre_start_hours = [9, 10]
candidate_post_start_hours = [13, 14]
"#;

const RUN_RUNTIME: &str = r#"# Runtime controller on 2025, KDE trained on the 2024 history.
load_csv = "load_2025.csv"
history_csv = "load_2024.csv"
tariff_config = "tariff_sample.toml"
battery_config = "battery_sample.toml"
scenario_count = 20
seed = 7
bound = "both"
out_dir = "out/runtime"
"#;

fn main() {
    let data = Path::new("data");
    std::fs::create_dir_all(data).expect("create data dir");

    for (year, seed, name) in [(2024, 101, "load_2024.csv"), (2025, 202, "load_2025.csv")] {
        let profile = office_year(&year_config(year, seed)).expect("generate year");
        emit_load_csv(&profile, &data.join(name)).expect("write csv");
        let peak = profile.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("{name}: {} intervals, peak {peak:.1} kW", profile.values().len());
    }

    for (name, text) in [
        ("tariff_sample.toml", TARIFF),
        ("battery_sample.toml", BATTERY),
        ("cycle_life_points.csv", CYCLE_LIFE),
        ("run_assess.toml", RUN_ASSESS),
        ("run_assess_hvac.toml", RUN_ASSESS_HVAC),
        ("run_runtime.toml", RUN_RUNTIME),
    ] {
        std::fs::write(data.join(name), text).expect("write config");
        println!("{name}: written");
    }
}
