//! Frame conventions, angle arithmetic and the two primitive pitch observers.
//!
//! Body frame: x forward, y to the right wing, z down through the floor of the
//! body such that a level body at rest reads specific force `(0, 0, +g)`.
//! Pitch is a rotation about the body y-axis, positive nose-up. With pitch
//! `θ` and no dynamic acceleration the accelerometer reads
//! `(g·sinθ, 0, g·cosθ)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Standard gravity used throughout the crate (m/s²).
pub const GRAVITY: f64 = 9.81;

const TWO_PI: f64 = 2.0 * PI;

/// A three-component vector. Specific force in m/s² or angular rate in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;

    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

/// One timestamped body-frame reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    /// Seconds since the start of the series.
    pub t: f64,
    /// Specific force, m/s².
    pub accel: Vec3,
    /// Angular rate, rad/s.
    pub gyro: Vec3,
}

/// Maps `theta` onto its representative in `(-π, π]`.
///
/// Values already inside the interval are returned unchanged, which makes the
/// map exactly idempotent.
pub fn wrap_angle(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    if theta > -PI && theta <= PI {
        return Ok(theta);
    }
    let r = theta.rem_euclid(TWO_PI);
    Ok(if r > PI { r - TWO_PI } else { r })
}

/// Pitch from the direction of the gravity reaction in the accelerometer
/// reading: `atan2(a_x, hypot(a_y, a_z))`, always in `[-π/2, π/2]`.
pub fn pitch_from_accel(accel: Vec3) -> Result<f64> {
    if !accel.is_finite() {
        return Err(Error::NonFinite("accelerometer reading"));
    }
    if accel == Vec3::ZERO {
        return Err(Error::IndeterminateOrientation);
    }
    Ok(accel.x.atan2(accel.y.hypot(accel.z)))
}

/// One explicit Euler step of the pitch angle under body rate `omega_y`.
pub fn integrate_gyro(prev_pitch: f64, omega_y: f64, dt: f64) -> Result<f64> {
    check_dt(dt)?;
    if !omega_y.is_finite() {
        return Err(Error::NonFinite("angular rate"));
    }
    wrap_angle(prev_pitch + omega_y * dt)
}

pub(crate) fn check_dt(dt: f64) -> Result<()> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::NonPositiveTimestep(dt));
    }
    if !dt.is_finite() {
        return Err(Error::NonFinite("timestep"));
    }
    Ok(())
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn level_body_reads_zero_pitch() {
        assert_eq!(pitch_from_accel(Vec3::new(0.0, 0.0, 9.81)).unwrap(), 0.0);
    }

    #[test]
    fn vertical_body_reads_quarter_turn() {
        assert_eq!(
            pitch_from_accel(Vec3::new(9.81, 0.0, 0.0)).unwrap(),
            PI / 2.0
        );
        assert_eq!(
            pitch_from_accel(Vec3::new(-9.81, 0.0, 0.0)).unwrap(),
            -PI / 2.0
        );
    }

    #[test]
    fn thirty_degrees() {
        // Rounded readings from the 30° gravity projection.
        let p = pitch_from_accel(Vec3::new(4.905, 0.0, 8.4957)).unwrap();
        assert_abs_diff_eq!(p, 0.5236, epsilon = 1e-4);
        let th = PI / 6.0;
        let p = pitch_from_accel(Vec3::new(GRAVITY * th.sin(), 0.0, GRAVITY * th.cos())).unwrap();
        assert_abs_diff_eq!(p, th, epsilon = 1e-12);
    }

    #[test]
    fn zero_vector_is_indeterminate() {
        assert!(matches!(
            pitch_from_accel(Vec3::ZERO),
            Err(Error::IndeterminateOrientation)
        ));
        assert!(pitch_from_accel(Vec3::new(f64::NAN, 0.0, 1.0)).is_err());
    }

    #[test]
    fn euler_steps() {
        assert_abs_diff_eq!(
            integrate_gyro(0.0, 0.1, 0.01).unwrap(),
            0.001,
            epsilon = 1e-12
        );
        assert_eq!(integrate_gyro(0.5, 0.0, 0.01).unwrap(), 0.5);
        let mut p = 0.0;
        for _ in 0..500 {
            p = integrate_gyro(p, 0.1, 0.01).unwrap();
        }
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn bad_timestep() {
        assert!(matches!(
            integrate_gyro(0.0, 0.1, 0.0),
            Err(Error::NonPositiveTimestep(_))
        ));
        assert!(integrate_gyro(0.0, 0.1, -0.01).is_err());
        assert!(integrate_gyro(0.0, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_angle(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(wrap_angle(1.5 * PI).unwrap(), -PI / 2.0, epsilon = 1e-12);
        assert_eq!(wrap_angle(-PI).unwrap(), PI);
        assert_eq!(wrap_angle(PI).unwrap(), PI);
        assert_abs_diff_eq!(wrap_angle(7.0 * PI).unwrap(), PI, epsilon = 1e-12);
        assert!(wrap_angle(f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent_and_in_range(x in -1e6f64..1e6) {
            let w = wrap_angle(x).unwrap();
            prop_assert!(w > -PI && w <= PI);
            prop_assert_eq!(wrap_angle(w).unwrap(), w);
        }

        #[test]
        fn accel_pitch_scale_invariant(
            x in -20.0f64..20.0, y in -20.0f64..20.0, z in 0.1f64..20.0,
            e in -8i32..8, k in 0.01f64..100.0,
        ) {
            let a = Vec3::new(x, y, z);
            let p = pitch_from_accel(a).unwrap();
            // power-of-two scaling is exact in binary floating point
            prop_assert_eq!(pitch_from_accel(a.scale(2f64.powi(e))).unwrap(), p);
            prop_assert!((pitch_from_accel(a.scale(k)).unwrap() - p).abs() <= 1e-12);
            prop_assert!(p.abs() <= PI / 2.0);
        }

        #[test]
        fn accel_pitch_inverts_gravity_projection(th in -1.5707f64..1.5707) {
            let a = Vec3::new(GRAVITY * th.sin(), 0.0, GRAVITY * th.cos());
            prop_assert!((pitch_from_accel(a).unwrap() - th).abs() <= 1e-12);
        }

        #[test]
        fn euler_step_additive_over_subdivision(
            p in -1.0f64..1.0, w in -5.0f64..5.0, dt in 1e-4f64..0.1,
        ) {
            let one = integrate_gyro(p, w, dt).unwrap();
            let half = integrate_gyro(p, w, dt / 2.0).unwrap();
            let two = integrate_gyro(half, w, dt / 2.0).unwrap();
            prop_assert!((one - two).abs() <= 1e-12);
        }
    }
}
