//! Domain types shared by every module: interval load series, calendar
//! billing cycles, battery ratings and HVAC pre/post-cooling parameters.
//!
//! Sign convention for battery power: positive = charging (adds to net
//! load and to stored energy), negative = discharging.

use chrono::{Datelike, NaiveDateTime, Timelike};

use crate::error::{Error, Result};

pub const MINUTES_PER_DAY: u32 = 24 * 60;

/// A timestamped series of non-negative building power readings (kW) at a
/// uniform interval, covering whole days only.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    start: NaiveDateTime,
    interval_minutes: u32,
    values: Vec<f64>,
}

impl LoadProfile {
    /// Default metering interval, 15 minutes (96 slots per day).
    pub const DEFAULT_INTERVAL_MINUTES: u32 = 15;

    pub fn new(start: NaiveDateTime, interval_minutes: u32, values: Vec<f64>) -> Result<Self> {
        if interval_minutes == 0 || MINUTES_PER_DAY % interval_minutes != 0 {
            return Err(Error::invalid(format!(
                "interval of {interval_minutes} min does not divide a day evenly"
            )));
        }
        let slots = (MINUTES_PER_DAY / interval_minutes) as usize;
        if values.is_empty() || values.len() % slots != 0 {
            return Err(Error::invalid(format!(
                "{} values is not a whole number of {slots}-slot days",
                values.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::invalid(format!(
                "load value at interval {i} is {v}; readings must be finite and >= 0"
            )));
        }
        Ok(Self {
            start,
            interval_minutes,
            values,
        })
    }

    pub fn start(&self) -> NaiveDateTime {
        self.start
    }

    pub fn interval_minutes(&self) -> u32 {
        self.interval_minutes
    }

    /// Slots per day, H.
    pub fn slots_per_day(&self) -> usize {
        (MINUTES_PER_DAY / self.interval_minutes) as usize
    }

    pub fn num_days(&self) -> usize {
        self.values.len() / self.slots_per_day()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The load slice of day `day` (0-based from the profile start).
    pub fn day(&self, day: usize) -> &[f64] {
        let h = self.slots_per_day();
        &self.values[day * h..(day + 1) * h]
    }
}

/// One calendar month of per-day load slices. `days.len()` always equals
/// the calendar length of the month and every slice has H entries.
#[derive(Debug, Clone, PartialEq)]
pub struct BillingCycle {
    year: i32,
    month: u32,
    interval_minutes: u32,
    days: Vec<Vec<f64>>,
}

impl BillingCycle {
    pub fn new(year: i32, month: u32, interval_minutes: u32, days: Vec<Vec<f64>>) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::invalid(format!("month {month} out of 1-12")));
        }
        if interval_minutes == 0 || MINUTES_PER_DAY % interval_minutes != 0 {
            return Err(Error::invalid(format!(
                "interval of {interval_minutes} min does not divide a day evenly"
            )));
        }
        let expected = days_in_month(year, month) as usize;
        if days.len() != expected {
            return Err(Error::invalid(format!(
                "{year}-{month:02} has {expected} days, got {}",
                days.len()
            )));
        }
        let h = (MINUTES_PER_DAY / interval_minutes) as usize;
        if let Some(d) = days.iter().position(|d| d.len() != h) {
            return Err(Error::invalid(format!(
                "day {d} has {} slots, expected {h}",
                days[d].len()
            )));
        }
        Ok(Self {
            year,
            month,
            interval_minutes,
            days,
        })
    }

    /// Same calendar position, different per-interval values. Used to bill
    /// the net load that results from a dispatch.
    pub fn with_days(&self, days: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.year, self.month, self.interval_minutes, days)
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u32 {
        self.month
    }

    pub fn interval_minutes(&self) -> u32 {
        self.interval_minutes
    }

    pub fn slots_per_day(&self) -> usize {
        (MINUTES_PER_DAY / self.interval_minutes) as usize
    }

    pub fn num_days(&self) -> usize {
        self.days.len()
    }

    pub fn days(&self) -> &[Vec<f64>] {
        &self.days
    }

    pub fn day(&self, i: usize) -> &[f64] {
        &self.days[i]
    }

    /// Iterate every interval of the cycle in time order.
    pub fn intervals(&self) -> impl Iterator<Item = f64> + '_ {
        self.days.iter().flat_map(|d| d.iter().copied())
    }

    pub fn num_intervals(&self) -> usize {
        self.days.len() * self.slots_per_day()
    }

    /// Hour of day (0-23) at which the interval with the given cycle-wide
    /// index starts. Intervals are priced at their starting hour.
    pub fn hour_of_interval(&self, index: usize) -> u32 {
        let slot = index % self.slots_per_day();
        (slot as u32 * self.interval_minutes) / 60
    }

    /// Interval length as a fraction of an hour.
    pub fn interval_hours(&self) -> f64 {
        f64::from(self.interval_minutes) / 60.0
    }
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    let (ny, nm) = if month == 12 {
        (year + 1, 1)
    } else {
        (year, month + 1)
    };
    let first = chrono::NaiveDate::from_ymd_opt(year, month, 1).expect("valid month");
    let next = chrono::NaiveDate::from_ymd_opt(ny, nm, 1).expect("valid month");
    (next - first).num_days() as u32
}

/// Split a profile into calendar-month billing cycles.
///
/// The profile must begin at midnight on the first day of a month and
/// cover whole months; partial leading or trailing months are rejected
/// rather than silently truncated.
pub fn slice_cycles(profile: &LoadProfile) -> Result<Vec<BillingCycle>> {
    let start = profile.start();
    if start.day() != 1 || start.hour() != 0 || start.minute() != 0 || start.second() != 0 {
        return Err(Error::invalid(format!(
            "profile starts at {start}; billing cycles require midnight on the first of a month"
        )));
    }

    let h = profile.slots_per_day();
    let total_days = profile.num_days();
    let mut cycles = Vec::new();
    let mut year = start.year();
    let mut month = start.month();
    let mut day_cursor = 0usize;

    while day_cursor < total_days {
        let len = days_in_month(year, month) as usize;
        if day_cursor + len > total_days {
            return Err(Error::invalid(format!(
                "profile ends inside {year}-{month:02}: {} of {len} days present",
                total_days - day_cursor
            )));
        }
        let days: Vec<Vec<f64>> = (0..len)
            .map(|d| profile.day(day_cursor + d).to_vec())
            .collect();
        cycles.push(BillingCycle::new(
            year,
            month,
            profile.interval_minutes(),
            days,
        )?);
        day_cursor += len;
        if month == 12 {
            year += 1;
            month = 1;
        } else {
            month += 1;
        }
    }
    debug_assert_eq!(day_cursor * h, profile.values().len());
    Ok(cycles)
}

/// Elementwise net load of one day: building load plus battery power plus
/// HVAC delta. Charging (positive battery power) increases net load.
pub fn net_load(day_load: &[f64], battery_power: &[f64], hvac_delta: &[f64]) -> Result<Vec<f64>> {
    if day_load.len() != battery_power.len() || day_load.len() != hvac_delta.len() {
        return Err(Error::invalid(format!(
            "length mismatch: load {} / battery {} / hvac {}",
            day_load.len(),
            battery_power.len(),
            hvac_delta.len()
        )));
    }
    Ok(day_load
        .iter()
        .zip(battery_power)
        .zip(hvac_delta)
        .map(|((l, b), h)| l + b + h)
        .collect())
}

/// Battery ratings and economics. Power limits follow the charging-positive
/// convention: `p_min <= 0 <= p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatterySpec {
    /// Usable energy capacity, kWh.
    pub soe_max: f64,
    /// Most negative (discharge) power, kW. Must be <= 0.
    pub p_min: f64,
    /// Most positive (charge) power, kW. Must be >= 0.
    pub p_max: f64,
    /// Stored energy at the start of every day, kWh.
    pub soe_ini: f64,
    pub capital_cost_battery: f64,
    pub capital_cost_inverter: f64,
    /// Experimental (depth-of-discharge, cycles-to-end-of-life) points.
    pub cycle_life_points: Vec<(f64, f64)>,
    /// One-way efficiency applied to charging power; 1.0 = lossless.
    pub round_trip_efficiency: f64,
}

impl BatterySpec {
    pub fn validate(&self) -> Result<()> {
        if !self.soe_max.is_finite() || self.soe_max < 0.0 {
            return Err(Error::invalid("soe_max must be finite and >= 0"));
        }
        if !(self.p_min <= 0.0 && 0.0 <= self.p_max) {
            return Err(Error::invalid(format!(
                "power bounds must satisfy p_min <= 0 <= p_max, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        if !(0.0..=self.soe_max).contains(&self.soe_ini) {
            return Err(Error::invalid(format!(
                "soe_ini {} outside [0, {}]",
                self.soe_ini, self.soe_max
            )));
        }
        if self.capital_cost_battery < 0.0 || self.capital_cost_inverter < 0.0 {
            return Err(Error::invalid("capital costs must be >= 0"));
        }
        if !(self.round_trip_efficiency > 0.0 && self.round_trip_efficiency <= 1.0) {
            return Err(Error::invalid("round_trip_efficiency must be in (0, 1]"));
        }
        if self.cycle_life_points.len() < 2 {
            return Err(Error::invalid("need at least 2 cycle-life points"));
        }
        for w in self.cycle_life_points.windows(2) {
            let ((d0, n0), (d1, n1)) = (w[0], w[1]);
            if !(d1 > d0) || !(n1 < n0) {
                return Err(Error::invalid(
                    "cycle-life points must have strictly increasing DoD and strictly decreasing cycles",
                ));
            }
        }
        for &(d, n) in &self.cycle_life_points {
            if !(0.0..=1.0).contains(&d) || !(n > 0.0) {
                return Err(Error::invalid(format!(
                    "cycle-life point ({d}, {n}) outside DoD [0,1] / cycles > 0"
                )));
            }
        }
        Ok(())
    }

    pub fn capital_total(&self) -> f64 {
        self.capital_cost_battery + self.capital_cost_inverter
    }

    /// Depth of discharge at the daily starting state.
    pub fn initial_dod(&self) -> f64 {
        if self.soe_max == 0.0 {
            0.0
        } else {
            (self.soe_max - self.soe_ini) / self.soe_max
        }
    }

    /// Depth of discharge for a stored-energy level.
    pub fn dod_of_soe(&self, soe: f64) -> f64 {
        if self.soe_max == 0.0 {
            0.0
        } else {
            (self.soe_max - soe) / self.soe_max
        }
    }
}

/// HVAC pre-cooling / post-cooling parameters. Pre-cooling raises load by
/// `pre_increase_pct` percent for `pre_hours` hours; post-cooling lowers it
/// by `post_decrease_pct` percent for `post_hours` hours. The pre window
/// must end before the post window starts.
#[derive(Debug, Clone, PartialEq)]
pub struct HvacParams {
    pub pre_hours: u32,
    pub pre_increase_pct: f64,
    pub post_hours: u32,
    pub post_decrease_pct: f64,
    /// Allowed starting hours for the pre-cooling window.
    pub candidate_pre_start_hours: Vec<u32>,
    /// Allowed starting hours for the post-cooling window. Empty means
    /// every hour that fits after the pre window.
    pub candidate_post_start_hours: Vec<u32>,
}

impl HvacParams {
    pub fn validate(&self) -> Result<()> {
        if self.pre_hours < 1 || self.post_hours < 1 {
            return Err(Error::invalid("pre_hours and post_hours must be >= 1"));
        }
        if !(0.0..=100.0).contains(&self.pre_increase_pct)
            || !(0.0..=100.0).contains(&self.post_decrease_pct)
        {
            return Err(Error::invalid("HVAC percentages must be in [0, 100]"));
        }
        if self.candidate_pre_start_hours.is_empty() {
            return Err(Error::invalid("candidate pre-cooling start hours are empty"));
        }
        if self
            .candidate_pre_start_hours
            .iter()
            .chain(&self.candidate_post_start_hours)
            .any(|&h| h > 23)
        {
            return Err(Error::invalid("candidate start hours must be in 0-23"));
        }
        Ok(())
    }

    /// All admissible (pre_start, post_start) pairs: windows fit in the day,
    /// do not overlap, and pre-cooling ends before post-cooling starts.
    /// Sorted by (pre_start, post_start).
    pub fn admissible_pairs(&self) -> Vec<(u32, u32)> {
        let post_candidates: Vec<u32> = if self.candidate_post_start_hours.is_empty() {
            (0..24).collect()
        } else {
            let mut v = self.candidate_post_start_hours.clone();
            v.sort_unstable();
            v.dedup();
            v
        };
        let mut pre = self.candidate_pre_start_hours.clone();
        pre.sort_unstable();
        pre.dedup();

        let mut pairs = Vec::new();
        for &p in &pre {
            if p + self.pre_hours > 24 {
                continue;
            }
            for &q in &post_candidates {
                if q >= p + self.pre_hours && q + self.post_hours <= 24 {
                    pairs.push((p, q));
                }
            }
        }
        pairs
    }
}
