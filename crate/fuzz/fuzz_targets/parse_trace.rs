#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(trace) = iag::parse_trace(text) {
        let round = iag::parse_trace(&iag::serialize_trace(&trace)).unwrap();
        assert_eq!(round, trace);
    }
});
