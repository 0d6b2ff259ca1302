#![no_main]

use libfuzzer_sys::fuzz_target;
use rsplit::io::{parse_instance_header, write_instance_header};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = parse_instance_header(text) {
        assert_eq!(parse_instance_header(&write_instance_header(&h)).unwrap(), h);
    }
});
