//! Pitch estimation from inertial measurements.
//!
//! The crate simulates a pitching body, synthesizes accelerometer and
//! gyroscope readings corrupted by white noise and a gyroscope bias random
//! walk, and recovers pitch with four estimators:
//!
//! - accelerometer tilt ([`attitude::pitch_from_accel`]),
//! - gyro integration ([`attitude::integrate_gyro`]),
//! - a complementary blend whose weight follows the dynamic acceleration
//!   ([`filters::complementary_step`]),
//! - a two-state pitch/bias Kalman filter ([`filters::KalmanModel`]).
//!
//! ```
//! use attitude_fusion::{sim, estimate::{self, EstimatorKind}};
//!
//! let run = sim::simulate(&Default::default(), &sim::NoiseConfig { seed: 3, ..Default::default() })?;
//! let est = estimate::run_estimator(&run.noisy, EstimatorKind::Complementary, &Default::default())?;
//! let rmse = estimate::rmse(&est, &run.truth)?;
//! assert!(rmse < 0.1);
//! # Ok::<(), attitude_fusion::Error>(())
//! ```

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attitude;
pub mod config;
mod error;
pub mod estimate;
pub mod filters;
pub mod io;
pub mod pipeline;
pub mod series;
pub mod sim;

pub use attitude::{ImuSample, Vec3, GRAVITY};
pub use error::{Error, Result};
