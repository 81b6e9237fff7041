#![no_main]

use libfuzzer_sys::fuzz_target;
use twinphase::config::RunConfig;
use twinphase::experiment::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(rc) = RunConfig::parse_str(s) {
        if let Ok(cfg) = ExperimentConfig::from_run_config(&rc) {
            let _ = cfg.params();
        }
    }
});
