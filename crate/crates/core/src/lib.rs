//! Life-cycle economics and dispatch optimization for a behind-the-meter
//! battery (optionally with HVAC pre/post-cooling) under a compound tariff:
//! hourly TOU energy prices plus a demand charge priced by the hour at
//! which the billing cycle's peak occurs.
//!
//! The crate has two optimization entry points:
//!
//! - [`design`]: perfect-foresight assessment of a whole load history,
//!   solved once per billing cycle at the upper and lower relaxed demand
//!   prices, aggregated into annual savings, payback time and salvage
//!   value.
//! - [`runtime`]: a moving-horizon controller that dispatches one day at a
//!   time without knowing the cycle's eventual peak, hedging with
//!   KDE-sampled future peak-day scenarios (sample average approximation).
//!
//! Both run on the bounded simplex in [`lp`]; degradation enters the
//! objectives through the convex piecewise-linear cost curve in
//! [`degradation`]. Billing-cycle arithmetic and exact bills live in
//! [`model`] and [`tariff`]. Per-cycle and per-scenario subproblems are
//! data-parallel and spread over rayon when the `parallel` feature
//! (default) is enabled; disabling it produces the same results serially.

pub mod config;
pub mod degradation;
pub mod design;
pub mod error;
pub mod exec;
pub mod lp;
pub mod model;
pub mod runtime;
pub mod synth;
pub mod tariff;

pub use error::{Error, Result};
