use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Numerical and data errors raised by the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("indeterminate orientation: zero accelerometer vector gives no gravity reference")]
    IndeterminateOrientation,

    #[error("non-positive timestep: {0}")]
    NonPositiveTimestep(f64),

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    #[error("empty sample series")]
    EmptySeries,

    #[error("non-uniform sample spacing at index {index}: step {step} differs from {dt}")]
    NonUniformSpacing { index: usize, step: f64, dt: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("measurement noise variance must be positive, got {0}")]
    NonPositiveMeasurementNoise(f64),

    #[error("unknown estimator `{0}` (expected complementary, gyro_only, accel_only or kalman)")]
    UnknownEstimator(String),

    #[error("series length mismatch: {estimates} estimates vs {truth} truth samples")]
    LengthMismatch { estimates: usize, truth: usize },

    #[error("timestamp mismatch at index {index}: {estimate} vs {truth}")]
    TimestampMismatch {
        index: usize,
        estimate: f64,
        truth: f64,
    },

    #[error("step {index}: {source}")]
    AtStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(index: usize) -> impl FnOnce(Error) -> Error {
        move |e| Error::AtStep {
            index,
            source: Box::new(e),
        }
    }
}
