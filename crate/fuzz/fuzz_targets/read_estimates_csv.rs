#![no_main]

use attitude_fusion::io::read_estimates_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(series) = read_estimates_csv(data, "fuzz") {
        assert_eq!(series.times.len(), series.pitch.len());
    }
});
