//! Billing under a compound tariff: hourly TOU energy prices plus a demand
//! charge levied on the single highest-demand interval of the billing
//! cycle, at a price that depends on the hour the peak occurs.

use crate::error::{Error, Result};
use crate::model::BillingCycle;

/// Hourly price schedules for one season (a set of months).
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonSchedule {
    pub name: String,
    pub months: Vec<u32>,
    /// $/kWh by hour of day.
    pub energy_price: [f64; 24],
    /// $/kW by hour of day (the hour the cycle peak lands on).
    pub demand_price: [f64; 24],
}

/// The full tariff: a seasonal partition of the year plus the peak window
/// within which the relaxed demand-price bounds are taken.
#[derive(Debug, Clone, PartialEq)]
pub struct TariffModel {
    seasons: Vec<SeasonSchedule>,
    peak_window: (u32, u32),
}

/// Default peak window: 7 am through 8 pm inclusive.
pub const DEFAULT_PEAK_WINDOW: (u32, u32) = (7, 20);

impl TariffModel {
    pub fn new(seasons: Vec<SeasonSchedule>, peak_window: (u32, u32)) -> Result<Self> {
        if peak_window.0 > peak_window.1 || peak_window.1 > 23 {
            return Err(Error::invalid(format!(
                "peak window {peak_window:?} must be an hour range within 0-23"
            )));
        }
        let mut covered = [false; 13];
        for s in &seasons {
            if s.months.is_empty() {
                return Err(Error::invalid(format!("season '{}' has no months", s.name)));
            }
            for &m in &s.months {
                if !(1..=12).contains(&m) {
                    return Err(Error::invalid(format!("month {m} out of 1-12")));
                }
                if covered[m as usize] {
                    return Err(Error::invalid(format!("month {m} assigned to two seasons")));
                }
                covered[m as usize] = true;
            }
            for p in s.energy_price.iter().chain(s.demand_price.iter()) {
                if !p.is_finite() || *p < 0.0 {
                    return Err(Error::invalid(format!(
                        "season '{}' has a negative or non-finite price",
                        s.name
                    )));
                }
            }
        }
        if let Some(m) = (1..=12).find(|&m| !covered[m as usize]) {
            return Err(Error::invalid(format!("month {m} has no season")));
        }
        Ok(Self {
            seasons,
            peak_window,
        })
    }

    pub fn seasons(&self) -> &[SeasonSchedule] {
        &self.seasons
    }

    pub fn peak_window(&self) -> (u32, u32) {
        self.peak_window
    }

    pub fn season_for_month(&self, month: u32) -> &SeasonSchedule {
        self.seasons
            .iter()
            .find(|s| s.months.contains(&month))
            .expect("constructor guarantees every month has a season")
    }

    pub fn energy_price(&self, month: u32, hour: u32) -> f64 {
        self.season_for_month(month).energy_price[hour as usize]
    }

    pub fn demand_price(&self, month: u32, hour: u32) -> f64 {
        self.season_for_month(month).demand_price[hour as usize]
    }

    /// `(p_d_lo, p_d_hi)`: min and max demand price over the peak window for
    /// the season containing `month`. These are the relaxed prices the
    /// optimizers solve with.
    pub fn demand_price_bounds(&self, month: u32) -> (f64, f64) {
        let season = self.season_for_month(month);
        let (a, b) = self.peak_window;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for h in a..=b {
            let p = season.demand_price[h as usize];
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo, hi)
    }

    /// Hourly energy prices for a cycle day, expanded per interval.
    pub fn interval_energy_prices(&self, cycle: &BillingCycle) -> Vec<f64> {
        let season = self.season_for_month(cycle.month());
        (0..cycle.slots_per_day())
            .map(|slot| season.energy_price[cycle.hour_of_interval(slot) as usize])
            .collect()
    }
}

/// Location and magnitude of a cycle's metered peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakInfo {
    pub peak_kw: f64,
    /// Index into the flattened cycle, earliest interval on ties.
    pub interval_index: usize,
    pub hour: u32,
}

/// A fully priced cycle: energy charge, demand charge and the peak that
/// set it. `total` is always their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BillBreakdown {
    pub energy_charge: f64,
    pub demand_charge: f64,
    pub peak_kw: f64,
    pub peak_interval_index: usize,
    pub peak_hour: u32,
    pub total: f64,
}

/// Locate the cycle-wide maximum interval, breaking ties by the earliest
/// interval.
pub fn find_peak(cycle: &BillingCycle) -> PeakInfo {
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0usize;
    for (i, v) in cycle.intervals().enumerate() {
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    PeakInfo {
        peak_kw: best,
        interval_index: best_idx,
        hour: cycle.hour_of_interval(best_idx),
    }
}

/// TOU energy charge of a cycle of net loads: sum of price x power x
/// interval length over every interval.
pub fn energy_charge(tariff: &TariffModel, cycle: &BillingCycle) -> f64 {
    let season = tariff.season_for_month(cycle.month());
    let dt = cycle.interval_hours();
    let h = cycle.slots_per_day();
    let mut total = 0.0;
    for day in cycle.days() {
        for (slot, kw) in day.iter().enumerate() {
            let hour = ((slot % h) as u32 * cycle.interval_minutes()) / 60;
            total += season.energy_price[hour as usize] * kw * dt;
        }
    }
    total
}

/// Demand charge of a cycle of net loads: the cycle-wide peak priced at the
/// demand price of the hour it occurs.
pub fn demand_charge_exact(tariff: &TariffModel, cycle: &BillingCycle) -> (f64, PeakInfo) {
    let peak = find_peak(cycle);
    let price = tariff.demand_price(cycle.month(), peak.hour);
    (price * peak.peak_kw, peak)
}

/// True iff the cycle peak (earliest-interval tie break) falls inside the
/// tariff's peak window. Relaxed-bound objectives are only valid bounds
/// when this holds.
pub fn verify_peak_window(tariff: &TariffModel, cycle: &BillingCycle) -> bool {
    let peak = find_peak(cycle);
    let (a, b) = tariff.peak_window();
    (a..=b).contains(&peak.hour)
}

/// Full bill for a cycle of net loads.
pub fn bill(tariff: &TariffModel, cycle: &BillingCycle) -> BillBreakdown {
    let energy = energy_charge(tariff, cycle);
    let (demand, peak) = demand_charge_exact(tariff, cycle);
    BillBreakdown {
        energy_charge: energy,
        demand_charge: demand,
        peak_kw: peak.peak_kw,
        peak_interval_index: peak.interval_index,
        peak_hour: peak.hour,
        total: energy + demand,
    }
}
