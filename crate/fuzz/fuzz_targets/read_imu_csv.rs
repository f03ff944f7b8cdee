#![no_main]

use attitude_fusion::io::{read_imu_csv, write_imu_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(samples) = read_imu_csv(data) else {
        return;
    };
    let mut buf = Vec::new();
    write_imu_csv(&mut buf, &samples).unwrap();
    assert_eq!(read_imu_csv(buf.as_slice()).unwrap(), samples);
});
