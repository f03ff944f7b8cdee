//! Run configuration in flat `key = value` form.
//!
//! ```text
//! # comments start with '#'
//! trajectory.amplitude = 0.3
//! noise.seed = 7
//! estimators = complementary, gyro_only
//! ```
//!
//! Keys not present keep their defaults. Unknown or repeated keys are errors.

use std::collections::HashSet;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::estimate::{EstimatorKind, EstimatorParams};
use crate::filters::{GammaConfig, KalmanParams};
use crate::sim::{NoiseConfig, TrajectoryConfig};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {message}")]
    InvalidValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trajectory: TrajectoryConfig,
    pub noise: NoiseConfig,
    pub gamma: GammaConfig,
    pub estimators: Vec<EstimatorKind>,
    /// Directory receiving CSV traces and reports.
    pub output_dir: PathBuf,
    /// Number of consecutive seeds evaluated by the experiment, starting at
    /// `noise.seed`.
    pub runs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            trajectory: TrajectoryConfig::default(),
            noise: NoiseConfig::default(),
            gamma: GammaConfig::default(),
            estimators: EstimatorKind::ALL.to_vec(),
            output_dir: PathBuf::from("out"),
            runs: 1,
        }
    }
}

impl RunConfig {
    pub fn estimator_params(&self) -> EstimatorParams {
        EstimatorParams {
            gamma: self.gamma,
            kalman: KalmanParams::from_noise(&self.noise),
            initial_pitch: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let wrap = |e: crate::Error| ConfigError::Invalid(e.to_string());
        self.trajectory.validate().map_err(wrap)?;
        self.noise.validate().map_err(wrap)?;
        self.gamma.validate().map_err(wrap)?;
        if self.estimators.is_empty() {
            return Err(ConfigError::Invalid(
                "at least one estimator must be selected".into(),
            ));
        }
        if self.runs == 0 {
            return Err(ConfigError::Invalid(
                "experiment.runs must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        parse_config(s)
    }
}

fn number<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::InvalidValue {
        line,
        key: key.to_owned(),
        message: format!("`{value}`: {e}"),
    })
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = match content.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => (k.trim(), v.trim()),
            _ => {
                return Err(ConfigError::Syntax {
                    line,
                    text: raw.trim().to_owned(),
                })
            }
        };
        if !seen.insert(key.to_owned()) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_owned(),
            });
        }
        let f = || number::<f64>(line, key, value);
        match key {
            "trajectory.amplitude" => cfg.trajectory.amplitude = f()?,
            "trajectory.frequency" => cfg.trajectory.frequency = f()?,
            "trajectory.duration" => cfg.trajectory.duration = f()?,
            "trajectory.dt" => cfg.trajectory.dt = f()?,
            "noise.sigma_accel" => cfg.noise.sigma_accel = f()?,
            "noise.sigma_gyro" => cfg.noise.sigma_gyro = f()?,
            "noise.sigma_rw" => cfg.noise.sigma_rw = f()?,
            "noise.seed" => cfg.noise.seed = number(line, key, value)?,
            "gamma.g" => cfg.gamma.g = f()?,
            "gamma.accel_scale" => cfg.gamma.accel_scale = f()?,
            "estimators" => {
                cfg.estimators = value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|e: crate::Error| ConfigError::InvalidValue {
                                line,
                                key: key.to_owned(),
                                message: e.to_string(),
                            })
                    })
                    .collect::<Result<_, _>>()?;
            }
            "output.dir" => cfg.output_dir = PathBuf::from(value),
            "experiment.runs" => cfg.runs = number(line, key, value)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_owned(),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(
            parse_config("# nothing\n\n   \n").unwrap(),
            RunConfig::default()
        );
    }

    #[test]
    fn parses_every_key() {
        let text = "\
trajectory.amplitude = 0.4   # rad
trajectory.frequency = 0.5
trajectory.duration = 2
trajectory.dt = 0.005
noise.sigma_accel = 0.1
noise.sigma_gyro = 0.01
noise.sigma_rw = 0.03
noise.seed = 18446744073709551615
gamma.g = 9.8
gamma.accel_scale = 2
estimators = kalman, gyro_only
output.dir = runs/a b
experiment.runs = 12
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.trajectory.amplitude, 0.4);
        assert_eq!(cfg.trajectory.dt, 0.005);
        assert_eq!(cfg.noise.seed, u64::MAX);
        assert_eq!(cfg.noise.sigma_rw, 0.03);
        assert_eq!(cfg.gamma.accel_scale, 2.0);
        assert_eq!(
            cfg.estimators,
            vec![EstimatorKind::Kalman, EstimatorKind::GyroOnly]
        );
        assert_eq!(cfg.output_dir, PathBuf::from("runs/a b"));
        assert_eq!(cfg.runs, 12);
    }

    #[test]
    fn errors_name_line_and_key() {
        let err = parse_config("noise.seed = 1\nnoise.sigma_gyro = fast\n").unwrap_err();
        assert!(
            matches!(&err, ConfigError::InvalidValue { line: 2, key, .. } if key == "noise.sigma_gyro")
        );
        assert!(err.to_string().contains("noise.sigma_gyro"));

        let err = parse_config("\n\nnoise.sigma = 1\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                line: 3,
                key: "noise.sigma".into()
            }
        );
        assert!(matches!(
            parse_config("just words").unwrap_err(),
            ConfigError::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("gamma.g =").unwrap_err(),
            ConfigError::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("noise.seed = 1\nnoise.seed = 2").unwrap_err(),
            ConfigError::DuplicateKey { line: 2, .. }
        ));
        assert!(matches!(
            parse_config("estimators = kalman, ekf").unwrap_err(),
            ConfigError::InvalidValue { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("noise.seed = -3").unwrap_err(),
            ConfigError::InvalidValue { line: 1, .. }
        ));
    }

    #[test]
    fn semantic_validation() {
        let err = parse_config("trajectory.dt = 0").unwrap_err();
        assert!(err.to_string().contains("trajectory.dt"), "{err}");
        let err = parse_config("gamma.accel_scale = 0").unwrap_err();
        assert!(err.to_string().contains("gamma.accel_scale"), "{err}");
        let err = parse_config("noise.sigma_rw = -1").unwrap_err();
        assert!(err.to_string().contains("noise.sigma_rw"), "{err}");
        assert!(parse_config("experiment.runs = 0").is_err());
        assert!(parse_config("trajectory.amplitude = nan").is_err());
    }

    proptest! {
        #[test]
        fn parser_never_panics(text in "\\PC{0,200}") {
            let _ = parse_config(&text);
        }

        #[test]
        fn parser_never_panics_on_key_like_lines(
            lines in prop::collection::vec(("[a-z._]{0,24}", "[ =]{0,3}", "[-0-9.eE a-z,]{0,12}"), 0..12)
        ) {
            let text: String = lines.iter().map(|(k, s, v)| format!("{k}{s}{v}\n")).collect();
            let _ = parse_config(&text);
        }
    }
}
