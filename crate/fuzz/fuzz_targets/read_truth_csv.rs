#![no_main]

use attitude_fusion::io::read_truth_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_truth_csv(data);
});
