//! Running estimators over a sample series and scoring them against truth.

use std::fmt;
use std::str::FromStr;

use crate::attitude::{integrate_gyro, pitch_from_accel, ImuSample};
use crate::error::{Error, Result};
use crate::filters::{complementary_step, GammaConfig, KalmanModel, KalmanParams};
use crate::series::uniform_step;
use crate::sim::GroundTruthSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    Complementary,
    GyroOnly,
    AccelOnly,
    Kalman,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Complementary,
        EstimatorKind::GyroOnly,
        EstimatorKind::AccelOnly,
        EstimatorKind::Kalman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Complementary => "complementary",
            EstimatorKind::GyroOnly => "gyro_only",
            EstimatorKind::AccelOnly => "accel_only",
            EstimatorKind::Kalman => "kalman",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownEstimator(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimatorParams {
    pub gamma: GammaConfig,
    pub kalman: KalmanParams,
    /// Overrides the tilt of the first sample as the starting pitch.
    pub initial_pitch: Option<f64>,
}

/// Pitch estimates of one estimator, aligned with its input samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSeries {
    pub estimator: String,
    pub times: Vec<f64>,
    pub pitch: Vec<f64>,
}

impl EstimateSeries {
    pub fn len(&self) -> usize {
        self.pitch.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pitch.is_empty()
    }
}

pub fn run_estimator(
    samples: &[ImuSample],
    kind: EstimatorKind,
    params: &EstimatorParams,
) -> Result<EstimateSeries> {
    let pitch = match kind {
        EstimatorKind::Kalman => kalman_track(samples, params)?
            .iter()
            .map(KalmanModel::pitch)
            .collect(),
        EstimatorKind::AccelOnly => {
            uniform_step(&times_of(samples))?;
            samples
                .iter()
                .enumerate()
                .map(|(k, s)| pitch_from_accel(s.accel).map_err(Error::at(k)))
                .collect::<Result<_>>()?
        }
        EstimatorKind::GyroOnly => recur(samples, params, |prev, s, dt| {
            integrate_gyro(prev, s.gyro.y, dt)
        })?,
        EstimatorKind::Complementary => {
            params.gamma.validate()?;
            recur(samples, params, |prev, s, dt| {
                complementary_step(prev, s, dt, &params.gamma)
            })?
        }
    };
    Ok(EstimateSeries {
        estimator: kind.name().to_owned(),
        times: times_of(samples),
        pitch,
    })
}

/// Kalman filter state after every sample. The first state is seeded from
/// the initial pitch with zero bias; every later sample is a predict with
/// its gyro rate followed by an update with its accelerometer tilt.
pub fn kalman_track(samples: &[ImuSample], params: &EstimatorParams) -> Result<Vec<KalmanModel>> {
    let (init, dt) = start(samples, params)?;
    let mut model = params.kalman.initial_model(init, dt.unwrap_or(1.0));
    let mut out = Vec::with_capacity(samples.len());
    out.push(model);
    for (k, s) in samples.iter().enumerate().skip(1) {
        let dt = dt.expect("spacing of a multi-sample series");
        let step = || -> Result<KalmanModel> {
            let predicted = model.predict(s.gyro.y, dt)?;
            predicted.update(pitch_from_accel(s.accel)?)
        };
        model = step().map_err(Error::at(k))?;
        out.push(model);
    }
    Ok(out)
}

fn times_of(samples: &[ImuSample]) -> Vec<f64> {
    samples.iter().map(|s| s.t).collect()
}

fn start(samples: &[ImuSample], params: &EstimatorParams) -> Result<(f64, Option<f64>)> {
    let dt = uniform_step(&times_of(samples))?;
    let init = match params.initial_pitch {
        Some(p) => p,
        None => pitch_from_accel(samples[0].accel).map_err(Error::at(0))?,
    };
    Ok((init, dt))
}

fn recur<F>(samples: &[ImuSample], params: &EstimatorParams, mut step: F) -> Result<Vec<f64>>
where
    F: FnMut(f64, &ImuSample, f64) -> Result<f64>,
{
    let (init, dt) = start(samples, params)?;
    let mut out = Vec::with_capacity(samples.len());
    out.push(init);
    let mut prev = init;
    for (k, s) in samples.iter().enumerate().skip(1) {
        let dt = dt.expect("spacing of a multi-sample series");
        prev = step(prev, s, dt).map_err(Error::at(k))?;
        out.push(prev);
    }
    Ok(out)
}

/// Scores of one estimate series against truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub rmse: f64,
    pub final_drift: f64,
    pub max_abs_error: f64,
}

fn errors<'a>(
    estimates: &'a EstimateSeries,
    truth: &'a [GroundTruthSample],
) -> Result<impl Iterator<Item = f64> + 'a> {
    if estimates.len() != truth.len() || estimates.times.len() != estimates.len() {
        return Err(Error::LengthMismatch {
            estimates: estimates.len(),
            truth: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptySeries);
    }
    for (index, (&te, s)) in estimates.times.iter().zip(truth).enumerate() {
        if (te - s.t).abs() > 1e-9 * s.t.abs().max(1.0) {
            return Err(Error::TimestampMismatch {
                index,
                estimate: te,
                truth: s.t,
            });
        }
    }
    Ok(estimates.pitch.iter().zip(truth).map(|(e, s)| e - s.pitch))
}

pub fn rmse(estimates: &EstimateSeries, truth: &[GroundTruthSample]) -> Result<f64> {
    let n = truth.len() as f64;
    let sum_sq: f64 = errors(estimates, truth)?.map(|e| e * e).sum();
    Ok((sum_sq / n).sqrt())
}

/// Absolute pitch error at the last timestamp.
pub fn final_drift(estimates: &EstimateSeries, truth: &[GroundTruthSample]) -> Result<f64> {
    Ok(errors(estimates, truth)?
        .last()
        .map(f64::abs)
        .unwrap_or(0.0))
}

pub fn max_abs_error(estimates: &EstimateSeries, truth: &[GroundTruthSample]) -> Result<f64> {
    Ok(errors(estimates, truth)?.fold(0.0, |m, e| m.max(e.abs())))
}

pub fn evaluate(estimates: &EstimateSeries, truth: &[GroundTruthSample]) -> Result<Metrics> {
    Ok(Metrics {
        rmse: rmse(estimates, truth)?,
        final_drift: final_drift(estimates, truth)?,
        max_abs_error: max_abs_error(estimates, truth)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attitude::Vec3;
    use crate::sim::{generate_trajectory, ideal_imu, TrajectoryConfig};
    use approx::assert_abs_diff_eq;

    fn truth_series(pitch: &[f64]) -> Vec<GroundTruthSample> {
        pitch
            .iter()
            .enumerate()
            .map(|(k, &p)| GroundTruthSample {
                t: k as f64 * 0.1,
                pitch: p,
                pitch_rate: 0.0,
                linear_accel: Vec3::ZERO,
            })
            .collect()
    }

    fn series(truth: &[GroundTruthSample], offset: f64) -> EstimateSeries {
        EstimateSeries {
            estimator: "test".into(),
            times: truth.iter().map(|s| s.t).collect(),
            pitch: truth.iter().map(|s| s.pitch + offset).collect(),
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in EstimatorKind::ALL {
            assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!(matches!(
            "madgwick".parse::<EstimatorKind>(),
            Err(Error::UnknownEstimator(_))
        ));
    }

    #[test]
    fn metrics_of_exact_and_offset_estimates() {
        let truth = truth_series(&[0.1, -0.2, 0.3, 0.05]);
        let m = evaluate(&series(&truth, 0.0), &truth).unwrap();
        assert_eq!((m.rmse, m.final_drift, m.max_abs_error), (0.0, 0.0, 0.0));

        let m = evaluate(&series(&truth, 0.3), &truth).unwrap();
        assert_abs_diff_eq!(m.rmse, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(m.final_drift, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(
            final_drift(&series(&truth, -0.3), &truth).unwrap(),
            0.3,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rmse_matches_elementwise_reference() {
        let truth = truth_series(&[0.12, -0.4, 0.33, 0.0, 0.9, -1.1, 0.25, 0.5, -0.05, 0.7]);
        let est = [0.1, -0.35, 0.4, 0.02, 0.8, -1.0, 0.3, 0.45, 0.0, 0.71];
        let mut s = series(&truth, 0.0);
        s.pitch = est.to_vec();
        let mut acc = 0.0;
        for i in 0..10 {
            let d = est[i] - truth[i].pitch;
            acc += d * d;
        }
        let reference = (acc / 10.0).sqrt();
        assert_abs_diff_eq!(rmse(&s, &truth).unwrap(), reference, epsilon = 1e-12);
    }

    #[test]
    fn mismatched_series_rejected() {
        let truth = truth_series(&[0.0, 0.1, 0.2]);
        let s = series(&truth[..2], 0.0);
        assert!(matches!(
            rmse(&s, &truth),
            Err(Error::LengthMismatch { .. })
        ));
        let mut s = series(&truth, 0.0);
        s.times[1] += 0.05;
        assert!(matches!(
            final_drift(&s, &truth),
            Err(Error::TimestampMismatch { index: 1, .. })
        ));
    }

    fn noise_free() -> (Vec<GroundTruthSample>, Vec<ImuSample>) {
        let truth = generate_trajectory(&TrajectoryConfig::default()).unwrap();
        let imu = ideal_imu(&truth).unwrap();
        (truth, imu)
    }

    #[test]
    fn gyro_only_is_euler_recurrence() {
        let (_, imu) = noise_free();
        let est = run_estimator(&imu, EstimatorKind::GyroOnly, &Default::default()).unwrap();
        let mut p = pitch_from_accel(imu[0].accel).unwrap();
        assert_eq!(est.pitch[0], p);
        for (s, e) in imu.iter().zip(&est.pitch).skip(1) {
            p = integrate_gyro(p, s.gyro.y, 0.01).unwrap();
            assert!((e - p).abs() <= 1e-12);
        }
    }

    #[test]
    fn accel_only_recovers_truth() {
        let (truth, imu) = noise_free();
        let est = run_estimator(&imu, EstimatorKind::AccelOnly, &Default::default()).unwrap();
        assert!(max_abs_error(&est, &truth).unwrap() <= 1e-9);
        assert_eq!(est.times, truth.iter().map(|s| s.t).collect::<Vec<_>>());
    }

    #[test]
    fn zero_accel_mid_series_fails_at_index() {
        let (_, mut imu) = noise_free();
        imu[17].accel = Vec3::ZERO;
        for kind in [
            EstimatorKind::AccelOnly,
            EstimatorKind::Complementary,
            EstimatorKind::Kalman,
        ] {
            match run_estimator(&imu, kind, &Default::default()) {
                Err(Error::AtStep { index, source }) => {
                    assert_eq!(index, 17);
                    assert!(matches!(*source, Error::IndeterminateOrientation));
                }
                other => panic!("{kind}: {other:?}"),
            }
        }
        // gyro integration never consults the accelerometer after the start
        assert!(run_estimator(&imu, EstimatorKind::GyroOnly, &Default::default()).is_ok());
    }

    #[test]
    fn single_sample_series() {
        let (_, imu) = noise_free();
        for kind in EstimatorKind::ALL {
            let est = run_estimator(&imu[..1], kind, &Default::default()).unwrap();
            assert_eq!(est.pitch.len(), 1);
        }
        assert!(run_estimator(&[], EstimatorKind::GyroOnly, &Default::default()).is_err());
    }

    #[test]
    fn explicit_initial_pitch() {
        let (_, imu) = noise_free();
        let params = EstimatorParams {
            initial_pitch: Some(0.25),
            ..Default::default()
        };
        let est = run_estimator(&imu, EstimatorKind::GyroOnly, &params).unwrap();
        assert_eq!(est.pitch[0], 0.25);
    }
}
