#![no_main]

use attitude_fusion::estimate::{run_estimator, EstimatorKind};
use attitude_fusion::io::read_imu_csv;
use libfuzzer_sys::fuzz_target;

// Decoded IMU files go straight into the estimators; none of them may panic.
fuzz_target!(|data: &[u8]| {
    let Ok(samples) = read_imu_csv(data) else {
        return;
    };
    for kind in EstimatorKind::ALL {
        if let Ok(est) = run_estimator(&samples, kind, &Default::default()) {
            assert_eq!(est.len(), samples.len());
        }
    }
});
