//! Helpers for uniformly sampled time series.

use crate::error::{Error, Result};

/// Returns the common spacing of `times`, or `None` for a single sample.
///
/// Timestamps must be finite, non-negative and strictly increasing with a
/// constant step. Each step may deviate from the nominal spacing by a relative
/// `1e-6` plus a few ulps of the timestamp, which absorbs decimal round-off in
/// CSV files.
pub fn uniform_step(times: &[f64]) -> Result<Option<f64>> {
    let (first, last) = match times {
        [] => return Err(Error::EmptySeries),
        [t] => {
            check_time(*t)?;
            return Ok(None);
        }
        [first, .., last] => (*first, *last),
    };
    check_time(first)?;
    check_time(last)?;
    let dt = (last - first) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::NonUniformSpacing {
            index: 1,
            step: times[1] - times[0],
            dt,
        });
    }
    for (i, w) in times.windows(2).enumerate() {
        let step = w[1] - w[0];
        let tol = 1e-6 * dt + 4.0 * f64::EPSILON * w[1].abs();
        if !step.is_finite() || (step - dt).abs() > tol {
            return Err(Error::NonUniformSpacing {
                index: i + 1,
                step,
                dt,
            });
        }
    }
    Ok(Some(dt))
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::NonFinite("timestamp"));
    }
    if t < 0.0 {
        return Err(Error::InvalidConfig(format!("negative timestamp {t}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing() {
        let t: Vec<f64> = (0..501).map(|k| k as f64 * 0.01).collect();
        let dt = uniform_step(&t).unwrap().unwrap();
        assert!((dt - 0.01).abs() < 1e-15);
        assert_eq!(uniform_step(&[0.3]).unwrap(), None);
    }

    #[test]
    fn rejects_bad_series() {
        assert!(matches!(uniform_step(&[]), Err(Error::EmptySeries)));
        assert!(matches!(
            uniform_step(&[0.0, 0.01, 0.03, 0.04]),
            Err(Error::NonUniformSpacing { .. })
        ));
        assert!(uniform_step(&[0.0, 0.0]).is_err());
        assert!(uniform_step(&[0.02, 0.01, 0.0]).is_err());
        assert!(uniform_step(&[0.0, f64::NAN, 0.02]).is_err());
        assert!(uniform_step(&[-0.01, 0.0]).is_err());
    }
}
