#![no_main]

use attitude_fusion::config::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(cfg) = parse_config(data) {
        // anything the parser accepts must also validate
        assert!(cfg.validate().is_ok());
    }
});
