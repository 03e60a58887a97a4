//! Serde schemas for the on-disk configuration files. The CLI reads these
//! from TOML; the conversions validate and produce the domain types.
//!
//! Tariff file:
//!
//! ```toml
//! peak_window = [7, 20]
//! [seasons.summer]
//! months = [6, 7, 8, 9]
//! energy_price = [0.06, ...]   # 24 entries, $/kWh by hour
//! demand_price = [12.0, ...]   # 24 entries, $/kW by hour of the peak
//! ```
//!
//! Battery file:
//!
//! ```toml
//! soe_max_kwh = 10.0
//! p_min_kw = -10.0
//! p_max_kw = 10.0
//! soe_ini_kwh = 10.0
//! capital_cost_battery = 2500.0
//! capital_cost_inverter = 1788.0
//! round_trip_efficiency = 1.0       # optional, default 1.0
//! curve_segments = 10               # optional, default 10
//! cycle_life_points = [[0.25, 3162.28], [0.5, 1000.0], [1.0, 100.0]]
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::degradation::{fit_cycle_life, CycleLifeFit, DegradationCurve};
use crate::error::{Error, Result};
use crate::model::{BatterySpec, HvacParams};
use crate::tariff::{SeasonSchedule, TariffModel};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeasonConfig {
    pub months: Vec<u32>,
    pub energy_price: Vec<f64>,
    pub demand_price: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TariffConfig {
    pub peak_window: [u32; 2],
    pub seasons: BTreeMap<String, SeasonConfig>,
}

fn to_hourly(name: &str, kind: &str, v: &[f64]) -> Result<[f64; 24]> {
    <[f64; 24]>::try_from(v).map_err(|_| {
        Error::invalid(format!(
            "season '{name}': {kind} needs 24 hourly entries, got {}",
            v.len()
        ))
    })
}

impl TariffConfig {
    pub fn to_model(&self) -> Result<TariffModel> {
        let seasons = self
            .seasons
            .iter()
            .map(|(name, s)| {
                Ok(SeasonSchedule {
                    name: name.clone(),
                    months: s.months.clone(),
                    energy_price: to_hourly(name, "energy_price", &s.energy_price)?,
                    demand_price: to_hourly(name, "demand_price", &s.demand_price)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TariffModel::new(seasons, (self.peak_window[0], self.peak_window[1]))
    }

    pub fn from_model(model: &TariffModel) -> Self {
        TariffConfig {
            peak_window: [model.peak_window().0, model.peak_window().1],
            seasons: model
                .seasons()
                .iter()
                .map(|s| {
                    (
                        s.name.clone(),
                        SeasonConfig {
                            months: s.months.clone(),
                            energy_price: s.energy_price.to_vec(),
                            demand_price: s.demand_price.to_vec(),
                        },
                    )
                })
                .collect(),
        }
    }
}

fn default_efficiency() -> f64 {
    1.0
}

fn default_segments() -> usize {
    DegradationCurve::DEFAULT_SEGMENTS
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub soe_max_kwh: f64,
    pub p_min_kw: f64,
    pub p_max_kw: f64,
    pub soe_ini_kwh: f64,
    pub capital_cost_battery: f64,
    pub capital_cost_inverter: f64,
    #[serde(default = "default_efficiency")]
    pub round_trip_efficiency: f64,
    #[serde(default = "default_segments")]
    pub curve_segments: usize,
    pub cycle_life_points: Vec<[f64; 2]>,
}

impl BatteryConfig {
    pub fn to_spec(&self) -> Result<BatterySpec> {
        let spec = BatterySpec {
            soe_max: self.soe_max_kwh,
            p_min: self.p_min_kw,
            p_max: self.p_max_kw,
            soe_ini: self.soe_ini_kwh,
            capital_cost_battery: self.capital_cost_battery,
            capital_cost_inverter: self.capital_cost_inverter,
            cycle_life_points: self.cycle_life_points.iter().map(|p| (p[0], p[1])).collect(),
            round_trip_efficiency: self.round_trip_efficiency,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fit(&self) -> Result<CycleLifeFit> {
        let pts: Vec<(f64, f64)> = self.cycle_life_points.iter().map(|p| (p[0], p[1])).collect();
        fit_cycle_life(&pts)
    }

    /// Fit the cycle-life law and build the discharge-cost curve priced at
    /// the battery capital cost.
    pub fn degradation_curve(&self) -> Result<DegradationCurve> {
        DegradationCurve::build(&self.fit()?, self.capital_cost_battery, self.curve_segments)
    }
}

fn no_hours() -> Vec<u32> {
    Vec::new()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HvacConfig {
    pub pre_hours: u32,
    pub pre_increase_pct: f64,
    pub post_hours: u32,
    pub post_decrease_pct: f64,
    pub candidate_pre_start_hours: Vec<u32>,
    #[serde(default = "no_hours")]
    pub candidate_post_start_hours: Vec<u32>,
}

impl HvacConfig {
    pub fn to_params(&self) -> Result<HvacParams> {
        let params = HvacParams {
            pre_hours: self.pre_hours,
            pre_increase_pct: self.pre_increase_pct,
            post_hours: self.post_hours,
            post_decrease_pct: self.post_decrease_pct,
            candidate_pre_start_hours: self.candidate_pre_start_hours.clone(),
            candidate_post_start_hours: self.candidate_post_start_hours.clone(),
        };
        params.validate()?;
        Ok(params)
    }
}
