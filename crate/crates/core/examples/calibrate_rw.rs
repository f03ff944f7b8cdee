//! Finds the gyro bias random-walk intensity at which the median gyro-only
//! pitch drift after the default 5 s run equals a target.
//!
//!     cargo run --release --example calibrate_rw -- [target_rad] [seeds]

use attitude_fusion::config::RunConfig;
use attitude_fusion::estimate::EstimatorKind;
use attitude_fusion::pipeline::{median, monte_carlo};

fn median_drift(sigma_rw: f64, seeds: usize) -> f64 {
    let mut cfg = RunConfig::default();
    cfg.noise.sigma_rw = sigma_rw;
    cfg.estimators = vec![EstimatorKind::GyroOnly];
    // seeds disjoint from the 0..100 block used in tests
    let runs = monte_carlo(&cfg, 1_000_000, seeds).expect("simulation");
    let drifts: Vec<f64> = runs
        .iter()
        .map(|r| r.get(EstimatorKind::GyroOnly).unwrap().final_drift)
        .collect();
    median(&drifts)
}

fn main() {
    let mut args = std::env::args().skip(1);
    let target: f64 = args.next().map_or(0.3, |a| a.parse().expect("target"));
    let seeds: usize = args.next().map_or(20_000, |a| a.parse().expect("seeds"));

    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if median_drift(mid, seeds) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = 0.5 * (lo + hi);
    println!("sigma_rw = {sigma:.6}");
    println!("median drift = {:.6}", median_drift(sigma, seeds));
}
