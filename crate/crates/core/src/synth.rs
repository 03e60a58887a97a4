//! Deterministic synthetic commercial-building loads: office-shaped days
//! with seasonal cooling, weekday/weekend structure, heat-wave spike days
//! and mild noise. Used by the experiment harness, the benches and the
//! sample dataset shipped in `data/`; all of it is generated, not metered.

use chrono::{Datelike, NaiveDate, Weekday};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::model::{days_in_month, BillingCycle, LoadProfile, MINUTES_PER_DAY};

/// Shape of the synthetic office year.
#[derive(Debug, Clone)]
pub struct OfficeYearConfig {
    pub year: i32,
    pub interval_minutes: u32,
    /// Overnight floor, kW.
    pub base_kw: f64,
    /// Weekday business-hours lift, kW.
    pub business_kw: f64,
    /// Peak cooling bump on a full-season weekday, kW.
    pub cooling_kw: f64,
    /// Extra bump on heat-wave days, kW.
    pub spike_kw: f64,
    /// Heat-wave days per summer month (June through September).
    pub spike_days_per_month: usize,
    /// Multiplicative noise sigma, percent.
    pub noise_pct: f64,
    pub seed: u64,
}

impl Default for OfficeYearConfig {
    fn default() -> Self {
        OfficeYearConfig {
            year: 2024,
            interval_minutes: 60,
            base_kw: 40.0,
            business_kw: 50.0,
            cooling_kw: 45.0,
            spike_kw: 22.0,
            spike_days_per_month: 2,
            noise_pct: 1.5,
            seed: 1,
        }
    }
}

/// Cooling intensity of a month: full in the cooling season, a trace of
/// equipment load otherwise.
fn season_factor(month: u32) -> f64 {
    if (6..=9).contains(&month) {
        1.0
    } else {
        0.02
    }
}

/// Business-hours occupancy profile of an hour (0..=1).
fn occupancy(hour: f64) -> f64 {
    if hour < 6.0 || hour >= 22.0 {
        0.0
    } else if hour < 9.0 {
        (hour - 6.0) / 3.0
    } else if hour < 18.0 {
        1.0
    } else {
        (22.0 - hour) / 4.0
    }
}

/// Afternoon cooling shape, peaked between 14:00 and 15:30.
fn cooling_shape(hour: f64) -> f64 {
    let center = 14.75;
    let width = 1.9;
    (-((hour - center) / width).powi(2)).exp()
}

/// One deterministic synthetic calendar year of office load.
pub fn office_year(cfg: &OfficeYearConfig) -> Result<LoadProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, (cfg.noise_pct / 100.0).max(1e-12)).expect("finite sigma");
    let slots = (MINUTES_PER_DAY / cfg.interval_minutes) as usize;
    let mut values = Vec::new();

    for month in 1..=12 {
        let ndays = days_in_month(cfg.year, month);
        // pick the month's heat-wave days among weekdays
        let weekdays: Vec<u32> = (1..=ndays)
            .filter(|&d| {
                let wd = NaiveDate::from_ymd_opt(cfg.year, month, d).unwrap().weekday();
                wd != Weekday::Sat && wd != Weekday::Sun
            })
            .collect();
        let mut spikes = Vec::new();
        if (6..=9).contains(&month) && !weekdays.is_empty() {
            let mut pool = weekdays.clone();
            for _ in 0..cfg.spike_days_per_month.min(pool.len()) {
                let i = rng.random_range(0..pool.len());
                spikes.push(pool.swap_remove(i));
            }
        }
        for day in 1..=ndays {
            let date = NaiveDate::from_ymd_opt(cfg.year, month, day).unwrap();
            let weekend = matches!(date.weekday(), Weekday::Sat | Weekday::Sun);
            let spike = spikes.contains(&day);
            let spike_scale = if spike {
                1.0 + rng.random_range(-0.08..0.08)
            } else {
                rng.random_range(0.82..0.98)
            };
            for slot in 0..slots {
                let hour = slot as f64 * f64::from(cfg.interval_minutes) / 60.0;
                let mut kw = cfg.base_kw;
                if !weekend {
                    kw += cfg.business_kw * occupancy(hour);
                    let mut cooling = cfg.cooling_kw * season_factor(month) * spike_scale;
                    if spike {
                        cooling += cfg.spike_kw;
                    }
                    kw += cooling * cooling_shape(hour) * occupancy(hour).min(1.0);
                } else {
                    kw += 0.25 * cfg.business_kw * occupancy(hour);
                }
                kw *= 1.0 + noise.sample(&mut rng);
                values.push(kw.max(0.0));
            }
        }
    }

    let start = NaiveDate::from_ymd_opt(cfg.year, 1, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap();
    LoadProfile::new(start, cfg.interval_minutes, values)
}

/// A single month with one dominant peak day: near-flat weekday structure
/// everywhere except `spike_day` (1-based), whose afternoon rises well
/// above everything else.
pub fn dominant_peak_month(
    year: i32,
    month: u32,
    interval_minutes: u32,
    base_kw: f64,
    spike_extra_kw: f64,
    spike_day: u32,
    seed: u64,
) -> Result<BillingCycle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = (MINUTES_PER_DAY / interval_minutes) as usize;
    let ndays = days_in_month(year, month);
    let mut days = Vec::with_capacity(ndays as usize);
    for day in 1..=ndays {
        let mut vals = Vec::with_capacity(slots);
        for slot in 0..slots {
            let hour = slot as f64 * f64::from(interval_minutes) / 60.0;
            let mut kw = base_kw + 20.0 * occupancy(hour);
            kw += rng.random_range(0.0..2.0);
            if day == spike_day {
                kw += spike_extra_kw * cooling_shape(hour);
            }
            vals.push(kw);
        }
        days.push(vals);
    }
    BillingCycle::new(year, month, interval_minutes, days)
}

/// A randomized one-month cycle for property-style checks: office-shaped
/// days with randomized magnitudes and an in-window afternoon peak.
pub fn random_cycle<R: Rng>(
    rng: &mut R,
    year: i32,
    month: u32,
    interval_minutes: u32,
) -> Result<BillingCycle> {
    let slots = (MINUTES_PER_DAY / interval_minutes) as usize;
    let ndays = days_in_month(year, month);
    let base = rng.random_range(20.0..50.0);
    let business = rng.random_range(20.0..60.0);
    let cooling = rng.random_range(10.0..70.0);
    let mut days = Vec::with_capacity(ndays as usize);
    for _ in 0..ndays {
        let day_scale = rng.random_range(0.75..1.25);
        let mut vals = Vec::with_capacity(slots);
        for slot in 0..slots {
            let hour = slot as f64 * f64::from(interval_minutes) / 60.0;
            let kw = base
                + business * occupancy(hour) * day_scale
                + cooling * cooling_shape(hour) * day_scale
                + rng.random_range(0.0..3.0);
            vals.push(kw);
        }
        days.push(vals);
    }
    BillingCycle::new(year, month, interval_minutes, days)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::slice_cycles;

    #[test]
    fn office_year_is_deterministic_and_sliceable() {
        let cfg = OfficeYearConfig::default();
        let a = office_year(&cfg).unwrap();
        let b = office_year(&cfg).unwrap();
        assert_eq!(a, b);
        let cycles = slice_cycles(&a).unwrap();
        assert_eq!(cycles.len(), 12);
        // 2024 is a leap year
        assert_eq!(cycles[1].num_days(), 29);
    }

    #[test]
    fn summer_peaks_exceed_winter_peaks_and_sit_in_window() {
        let a = office_year(&OfficeYearConfig::default()).unwrap();
        let cycles = slice_cycles(&a).unwrap();
        let july = crate::tariff::find_peak(&cycles[6]);
        let jan = crate::tariff::find_peak(&cycles[0]);
        assert!(july.peak_kw > jan.peak_kw + 20.0);
        assert!((7..=20).contains(&july.hour));
        assert!(july.peak_kw > 120.0 && july.peak_kw < 200.0, "{}", july.peak_kw);
    }

    #[test]
    fn different_seeds_move_the_details_not_the_shape() {
        let a = office_year(&OfficeYearConfig::default()).unwrap();
        let b = office_year(&OfficeYearConfig {
            seed: 2,
            ..OfficeYearConfig::default()
        })
        .unwrap();
        assert_ne!(a, b);
        let pa = slice_cycles(&a).unwrap();
        let pb = slice_cycles(&b).unwrap();
        for (ca, cb) in pa.iter().zip(&pb) {
            let ka = crate::tariff::find_peak(ca).peak_kw;
            let kb = crate::tariff::find_peak(cb).peak_kw;
            assert!((ka - kb).abs() < 0.25 * ka, "{ka} vs {kb}");
        }
    }

    #[test]
    fn dominant_peak_month_has_one_clear_peak_day() {
        let cycle = dominant_peak_month(2025, 7, 60, 30.0, 80.0, 17, 3).unwrap();
        let day_peaks: Vec<f64> = cycle
            .days()
            .iter()
            .map(|d| d.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let spike = day_peaks[16];
        for (i, p) in day_peaks.iter().enumerate() {
            if i != 16 {
                assert!(spike > p + 40.0, "day {i} too close to the spike");
            }
        }
    }
}
