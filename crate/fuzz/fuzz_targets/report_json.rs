#![no_main]

use libfuzzer_sys::fuzz_target;
use twinphase::experiment::ExperimentReport;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(report) = ExperimentReport::from_json(s) {
        let json = report.to_json().expect("serializes");
        let again = ExperimentReport::from_json(&json).expect("re-parses");
        assert_eq!(again.to_json().expect("serializes"), json);
    }
});
