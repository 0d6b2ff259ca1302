#![no_main]

use libfuzzer_sys::fuzz_target;
use rsplit::io::parse_trace_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(trace) = parse_trace_csv(text) {
        let again = parse_trace_csv(&trace.to_csv()).expect("written trace reparses");
        assert_eq!(again.len(), trace.len());
    }
});
