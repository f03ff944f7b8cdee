//! Ground-truth trajectory, ideal IMU synthesis and the sensor noise model.
//!
//! The simulated body oscillates in pitch, `θ(t) = A·sin(2π·f·t)`, with no
//! translational acceleration. Ideal readings are corrupted by independent
//! white noise on every axis plus a gyroscope bias that follows a random walk,
//! `b_k = b_{k-1} + σ_rw·√dt·n_k`, `b_0 = 0`.
//!
//! Noise draws come from ChaCha8 seeded with [`NoiseConfig::seed`], one
//! stream per channel in this order: accel x, accel y, accel z, gyro x,
//! gyro y, gyro z, bias. The bias stream yields the x, y, z increments of each
//! step in that order.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::attitude::{check_dt, ImuSample, Vec3, GRAVITY};
use crate::error::{Error, Result};
use crate::series::uniform_step;

/// Random-walk intensity (rad/s/√s) chosen so that, with the other defaults,
/// the median gyro-only pitch drift after 5 s is 0.3 rad. Produced by
/// `cargo run --release --example calibrate_rw`.
pub const DEFAULT_SIGMA_RW: f64 = 0.0684;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    /// Peak pitch, rad.
    pub amplitude: f64,
    /// Oscillation frequency, Hz.
    pub frequency: f64,
    /// Seconds.
    pub duration: f64,
    /// Sample period, seconds.
    pub dt: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            amplitude: 0.8,
            frequency: 0.08,
            duration: 5.0,
            dt: 0.01,
        }
    }
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("trajectory.dt must be > 0, got {}", self.dt));
        }
        if !(self.duration >= self.dt) || !self.duration.is_finite() {
            return bad(format!(
                "trajectory.duration must be >= dt ({}), got {}",
                self.dt, self.duration
            ));
        }
        if !(0.0..PI / 2.0).contains(&self.amplitude) {
            return bad(format!(
                "trajectory.amplitude must lie in [0, pi/2), got {}",
                self.amplitude
            ));
        }
        if !(self.frequency >= 0.0) || !self.frequency.is_finite() {
            return bad(format!(
                "trajectory.frequency must be >= 0, got {}",
                self.frequency
            ));
        }
        Ok(())
    }

    /// `floor(duration / dt) + 1`, tolerant of decimal round-off in the ratio.
    pub fn sample_count(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// White accelerometer noise per axis, m/s².
    pub sigma_accel: f64,
    /// White gyroscope noise per axis, rad/s.
    pub sigma_gyro: f64,
    /// Gyroscope bias random-walk intensity, rad/s/√s.
    pub sigma_rw: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            sigma_accel: 0.5,
            sigma_gyro: 0.02,
            sigma_rw: DEFAULT_SIGMA_RW,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self {
            sigma_accel: 0.0,
            sigma_gyro: 0.0,
            sigma_rw: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("noise.sigma_accel", self.sigma_accel),
            ("noise.sigma_gyro", self.sigma_gyro),
            ("noise.sigma_rw", self.sigma_rw),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthSample {
    pub t: f64,
    /// rad
    pub pitch: f64,
    /// rad/s
    pub pitch_rate: f64,
    /// Body-frame acceleration excluding gravity, m/s².
    pub linear_accel: Vec3,
}

pub fn generate_trajectory(cfg: &TrajectoryConfig) -> Result<Vec<GroundTruthSample>> {
    cfg.validate()?;
    let omega = 2.0 * PI * cfg.frequency;
    Ok((0..cfg.sample_count())
        .map(|k| {
            let t = k as f64 * cfg.dt;
            GroundTruthSample {
                t,
                pitch: cfg.amplitude * (omega * t).sin(),
                pitch_rate: cfg.amplitude * omega * (omega * t).cos(),
                linear_accel: Vec3::ZERO,
            }
        })
        .collect())
}

/// Noise-free readings for a truth series: gyro `(0, θ', 0)` and the gravity
/// reaction `(g·sinθ, 0, g·cosθ)` plus any linear acceleration.
pub fn ideal_imu(truth: &[GroundTruthSample]) -> Result<Vec<ImuSample>> {
    let times: Vec<f64> = truth.iter().map(|s| s.t).collect();
    uniform_step(&times)?;
    Ok(truth
        .iter()
        .map(|s| ImuSample {
            t: s.t,
            accel: Vec3::new(GRAVITY * s.pitch.sin(), 0.0, GRAVITY * s.pitch.cos())
                + s.linear_accel,
            gyro: Vec3::new(0.0, s.pitch_rate, 0.0),
        })
        .collect())
}

/// One Euler–Maruyama step of the bias random walk.
pub fn bias_walk_step(prev_bias: f64, sigma_rw: f64, dt: f64, draw: f64) -> Result<f64> {
    check_dt(dt)?;
    if !(sigma_rw >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sigma_rw must be >= 0, got {sigma_rw}"
        )));
    }
    Ok(prev_bias + sigma_rw * dt.sqrt() * draw)
}

struct NoiseStreams {
    accel: [ChaCha8Rng; 3],
    gyro: [ChaCha8Rng; 3],
    bias: ChaCha8Rng,
}

impl NoiseStreams {
    fn new(seed: u64) -> Self {
        let stream = |i: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            rng
        };
        Self {
            accel: [stream(0), stream(1), stream(2)],
            gyro: [stream(3), stream(4), stream(5)],
            bias: stream(6),
        }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn perturb(v: Vec3, sigma: f64, rngs: &mut [ChaCha8Rng; 3]) -> Vec3 {
    let draws = [
        normal(&mut rngs[0]),
        normal(&mut rngs[1]),
        normal(&mut rngs[2]),
    ];
    if sigma == 0.0 {
        return v;
    }
    Vec3::new(
        v.x + sigma * draws[0],
        v.y + sigma * draws[1],
        v.z + sigma * draws[2],
    )
}

/// Corrupts `samples` with white accelerometer and gyroscope noise and a
/// gyroscope bias random walk. Timestamps and order are preserved; the result
/// depends only on the inputs and `cfg.seed`.
pub fn add_noise(samples: &[ImuSample], cfg: &NoiseConfig) -> Result<Vec<ImuSample>> {
    cfg.validate()?;
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let dt = uniform_step(&times)?;

    let mut rng = NoiseStreams::new(cfg.seed);
    let mut bias = Vec3::ZERO;
    let mut out = Vec::with_capacity(samples.len());
    for (k, s) in samples.iter().enumerate() {
        if k > 0 {
            // dt is Some whenever there is more than one sample
            let dt = dt.expect("spacing of a multi-sample series");
            bias = Vec3::new(
                bias_walk_step(bias.x, cfg.sigma_rw, dt, normal(&mut rng.bias))?,
                bias_walk_step(bias.y, cfg.sigma_rw, dt, normal(&mut rng.bias))?,
                bias_walk_step(bias.z, cfg.sigma_rw, dt, normal(&mut rng.bias))?,
            );
        }
        let accel = perturb(s.accel, cfg.sigma_accel, &mut rng.accel);
        let mut gyro = perturb(s.gyro, cfg.sigma_gyro, &mut rng.gyro);
        if cfg.sigma_rw != 0.0 {
            gyro = gyro + bias;
        }
        out.push(ImuSample {
            t: s.t,
            accel,
            gyro,
        });
    }
    Ok(out)
}

/// Truth, ideal readings and noisy readings of one simulated run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub truth: Vec<GroundTruthSample>,
    pub ideal: Vec<ImuSample>,
    pub noisy: Vec<ImuSample>,
}

pub fn simulate(traj: &TrajectoryConfig, noise: &NoiseConfig) -> Result<Simulation> {
    let truth = generate_trajectory(traj)?;
    let ideal = ideal_imu(&truth)?;
    let noisy = add_noise(&ideal, noise)?;
    Ok(Simulation {
        truth,
        ideal,
        noisy,
    })
}
