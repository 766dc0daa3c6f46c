#![no_main]

use libfuzzer_sys::fuzz_target;

use iag::Pattern;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(pattern) = Pattern::parse(text) {
        // ASCII rendering, grid conversion, and (when small enough)
        // the integer key must all round-trip.
        assert_eq!(Pattern::parse(&pattern.to_string()).unwrap(), pattern);
        assert_eq!(Pattern::from_grid(&pattern.to_grid()).unwrap(), pattern);
        if let Ok(key) = pattern.key() {
            let back = Pattern::from_key(key, pattern.rows(), pattern.cols()).unwrap();
            assert_eq!(back, pattern);
        }
    }
});
