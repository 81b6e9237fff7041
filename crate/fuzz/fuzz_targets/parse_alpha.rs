#![no_main]

use libfuzzer_sys::fuzz_target;
use twinphase::config::RealSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = RealSpec::parse(s) {
        // Display must parse back to the same spec.
        let again = RealSpec::parse(&spec.to_string()).expect("display round-trips");
        assert_eq!(again, spec);
        let _ = spec.value();
    }
});
