#![no_main]

use libfuzzer_sys::fuzz_target;
use rsplit::io::{read_hadamard_stack, write_hadamard_stack};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((n, signs)) = read_hadamard_stack(text) {
        assert!(n.is_power_of_two());
        assert!(signs.iter().all(|s| s.len() == n && s.iter().all(|&v| v == 1.0 || v == -1.0)));
        assert_eq!(read_hadamard_stack(&write_hadamard_stack(n, &signs)).unwrap(), (n, signs));
    }
});
