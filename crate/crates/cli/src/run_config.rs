//! The run configuration file shared by every subcommand.
//!
//! ```toml
//! load_csv = "load_2025.csv"
//! tariff_config = "tariff.toml"
//! battery_config = "battery.toml"
//! history_csv = "load_2024.csv"   # runtime: KDE training data
//! scenario_count = 20
//! seed = 7
//! bound = "both"                  # "hi" | "lo" | "both"
//! out_dir = "out"
//! degradation_blind = false       # assess: optimize with a zero cost curve
//! forecast_noise_pct = 0.0        # runtime: multiplicative forecast noise
//!
//! [hvac]                          # optional; enables pre/post-cooling
//! pre_hours = 2
//! pre_increase_pct = 10.0
//! post_hours = 3
//! post_decrease_pct = 10.0
//! candidate_pre_start_hours = [9, 10, 11]
//! candidate_post_start_hours = [13, 14, 15]
//! ```
//!
//! Relative paths resolve against the config file's directory.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use peakshave::config::{BatteryConfig, HvacConfig, TariffConfig};
use peakshave::design::Bound;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BoundArg {
    Hi,
    Lo,
    #[default]
    Both,
}

impl BoundArg {
    pub fn bounds(self) -> Vec<Bound> {
        match self {
            BoundArg::Hi => vec![Bound::Hi],
            BoundArg::Lo => vec![Bound::Lo],
            BoundArg::Both => vec![Bound::Hi, Bound::Lo],
        }
    }
}

fn default_scenarios() -> usize {
    20
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub load_csv: PathBuf,
    pub tariff_config: PathBuf,
    pub battery_config: PathBuf,
    pub history_csv: Option<PathBuf>,
    #[serde(default = "default_scenarios")]
    pub scenario_count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bound: BoundArg,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub degradation_blind: bool,
    #[serde(default)]
    pub forecast_noise_pct: f64,
    pub hvac: Option<HvacConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        if cfg.scenario_count < 1 {
            return Err(CliError::validation("scenario_count must be >= 1"));
        }
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.load_csv = resolve(base, &cfg.load_csv);
        cfg.tariff_config = resolve(base, &cfg.tariff_config);
        cfg.battery_config = resolve(base, &cfg.battery_config);
        cfg.history_csv = cfg.history_csv.as_ref().map(|p| resolve(base, p));
        Ok(cfg)
    }

    pub fn tariff(&self) -> CliResult<peakshave::tariff::TariffModel> {
        let cfg: TariffConfig = read_toml(&self.tariff_config)?;
        Ok(cfg.to_model()?)
    }

    pub fn battery(&self) -> CliResult<BatteryConfig> {
        read_toml(&self.battery_config)
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}
