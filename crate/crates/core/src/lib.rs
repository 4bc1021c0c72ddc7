//! Serial-monopoly transaction pricing with quasi-patient users.
//!
//! Each round a myopic block producer posts the price maximizing
//! `p * min(s, D_t(p))`, where `D_t` is the daily demand `Q` plus a fraction
//! `delta` of the demand left unserved so far. The crate simulates that
//! dynamic exactly for piecewise-linear demand, computes the analytic bounds
//! on the minimum price that eventually gets admitted, and checks simulated
//! trajectories against them.
//!
//! ```
//! use smlab_core::{demand::DemandCurve, engine::{run, SimConfig}};
//!
//! let cfg = SimConfig::new(DemandCurve::linear(1.0, 1.0)?, 1.0, 0.5, 3)?;
//! let prices: Vec<f64> = run(&cfg)?.iter().map(|r| r.price).collect();
//! assert_eq!(prices[0], 0.5);
//! assert!(prices[1] < prices[0]);
//! assert_eq!(prices[2], 0.5); // jumps back to the monopoly price
//! # Ok::<(), smlab_core::Error>(())
//! ```

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bounds;
pub mod demand;
pub mod engine;
mod error;
pub mod format;
pub mod revenue;

pub use error::{Error, Result};
