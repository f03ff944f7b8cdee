//! Complementary blend and a two-state linear Kalman filter for pitch.
//!
//! The Kalman filter tracks `[pitch, gyro_bias]`. The bias-corrected gyro
//! rate drives the prediction and the accelerometer tilt is the measurement:
//!
//! ```text
//! x_k = F·x_{k-1} + B·ω_y + w,   F = [[1, -dt], [0, 1]],  B = [dt, 0]ᵀ
//! z_k = H·x_k + v,               H = [1, 0]
//! ```

use nalgebra::{Matrix2, RowVector2, Vector2};

use crate::attitude::{
    check_dt, integrate_gyro, pitch_from_accel, wrap_angle, ImuSample, Vec3, GRAVITY,
};
use crate::error::{Error, Result};

/// Weighting schedule for the complementary blend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaConfig {
    /// Specific force of a level body at rest, m/s².
    pub g: f64,
    /// Deviation `|g - a_z|` (m/s²) at which the gyroscope takes full weight.
    pub accel_scale: f64,
}

impl Default for GammaConfig {
    fn default() -> Self {
        Self {
            g: GRAVITY,
            accel_scale: GRAVITY / 2.0,
        }
    }
}

impl GammaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.accel_scale > 0.0) || !self.accel_scale.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "gamma.accel_scale must be > 0, got {}",
                self.accel_scale
            )));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "gamma.g must be finite, got {}",
                self.g
            )));
        }
        Ok(())
    }
}

/// Gyroscope weight in `[0, 1]`: `clamp(|g - a_z| / accel_scale, 0, 1)`.
///
/// Zero when the z reading equals gravity (body at rest, trust the
/// accelerometer); grows with dynamic acceleration along z.
pub fn gamma(accel: Vec3, cfg: &GammaConfig) -> Result<f64> {
    if !accel.is_finite() {
        return Err(Error::NonFinite("accelerometer reading"));
    }
    Ok(((cfg.g - accel.z).abs() / cfg.accel_scale).clamp(0.0, 1.0))
}

/// `pitch_acc·(1 - γ) + pitch_gyro·γ`.
pub fn blend(pitch_acc: f64, pitch_gyro: f64, gamma: f64) -> f64 {
    pitch_acc * (1.0 - gamma) + pitch_gyro * gamma
}

pub fn complementary_step(
    prev_pitch: f64,
    sample: &ImuSample,
    dt: f64,
    cfg: &GammaConfig,
) -> Result<f64> {
    let pitch_acc = pitch_from_accel(sample.accel)?;
    let pitch_gyro = integrate_gyro(prev_pitch, sample.gyro.y, dt)?;
    let weight = gamma(sample.accel, cfg)?;
    Ok(blend(pitch_acc, pitch_gyro, weight))
}

/// State and noise model of the pitch/bias Kalman filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanModel {
    /// `[pitch (rad), gyro_bias (rad/s)]`
    pub x: Vector2<f64>,
    pub p: Matrix2<f64>,
    /// Process noise added per prediction.
    pub q: Matrix2<f64>,
    /// Variance of the tilt measurement, rad².
    pub r: f64,
}

const H: RowVector2<f64> = RowVector2::new(1.0, 0.0);

impl KalmanModel {
    pub fn pitch(&self) -> f64 {
        self.x[0]
    }

    pub fn bias(&self) -> f64 {
        self.x[1]
    }

    pub fn transition(dt: f64) -> Matrix2<f64> {
        Matrix2::new(1.0, -dt, 0.0, 1.0)
    }

    pub fn predict(&self, gyro_y: f64, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        if !gyro_y.is_finite() {
            return Err(Error::NonFinite("angular rate"));
        }
        let f = Self::transition(dt);
        let pitch = wrap_angle(self.x[0] + (gyro_y - self.x[1]) * dt)?;
        let p = f * self.p * f.transpose() + self.q;
        Ok(Self {
            x: Vector2::new(pitch, self.x[1]),
            p: symmetrize(p),
            ..*self
        })
    }

    pub fn update(&self, pitch_measurement: f64) -> Result<Self> {
        if !(self.r > 0.0) {
            return Err(Error::NonPositiveMeasurementNoise(self.r));
        }
        if !pitch_measurement.is_finite() {
            return Err(Error::NonFinite("pitch measurement"));
        }
        let s = (H * self.p * H.transpose())[0] + self.r;
        let k = self.p * H.transpose() / s;
        let innovation = wrap_angle(pitch_measurement - self.x[0])?;
        let mut x = self.x + k * innovation;
        x[0] = wrap_angle(x[0])?;
        let p = (Matrix2::identity() - k * H) * self.p;
        Ok(Self {
            x,
            p: symmetrize(p),
            ..*self
        })
    }
}

fn symmetrize(p: Matrix2<f64>) -> Matrix2<f64> {
    (p + p.transpose()) * 0.5
}

/// Tuning of the Kalman baseline, expressed as sensor noise densities so the
/// discrete matrices follow the sample period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanParams {
    /// White gyro noise, rad/s.
    pub gyro_noise: f64,
    /// Bias random-walk intensity, rad/s/√s.
    pub bias_walk: f64,
    /// Standard deviation of the accelerometer tilt, rad.
    pub tilt_noise: f64,
    pub initial_pitch_var: f64,
    pub initial_bias_var: f64,
}

/// Lower bound on the tilt measurement variance so a noise-free setup still
/// has a well-defined gain.
pub const MIN_TILT_VARIANCE: f64 = 1e-10;

impl KalmanParams {
    /// Tuning matched to a sensor noise model. The tilt noise is the
    /// accelerometer noise propagated through the tilt formula at level
    /// attitude, `σ_a / g`.
    pub fn from_noise(noise: &crate::sim::NoiseConfig) -> Self {
        Self {
            gyro_noise: noise.sigma_gyro,
            bias_walk: noise.sigma_rw,
            tilt_noise: noise.sigma_accel / GRAVITY,
            initial_pitch_var: 0.1,
            initial_bias_var: 0.01,
        }
    }

    /// `Q = diag(σ_g²·dt², σ_rw²·dt)`
    pub fn process_noise(&self, dt: f64) -> Matrix2<f64> {
        Matrix2::new(
            self.gyro_noise.powi(2) * dt * dt,
            0.0,
            0.0,
            self.bias_walk.powi(2) * dt,
        )
    }

    pub fn measurement_noise(&self) -> f64 {
        self.tilt_noise.powi(2).max(MIN_TILT_VARIANCE)
    }

    pub fn initial_model(&self, pitch: f64, dt: f64) -> KalmanModel {
        KalmanModel {
            x: Vector2::new(pitch, 0.0),
            p: Matrix2::new(self.initial_pitch_var, 0.0, 0.0, self.initial_bias_var),
            q: self.process_noise(dt),
            r: self.measurement_noise(),
        }
    }
}

impl Default for KalmanParams {
    fn default() -> Self {
        Self::from_noise(&crate::sim::NoiseConfig::default())
    }
}
