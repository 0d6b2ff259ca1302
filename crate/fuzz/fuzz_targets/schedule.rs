#![no_main]

use libfuzzer_sys::fuzz_target;
use rsplit::io::parse_schedule;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_schedule(text) {
        assert!(s.factor > 0.0 && s.factor < 1.0);
        assert_eq!(parse_schedule(&s.to_string()).unwrap(), s);
    }
});
