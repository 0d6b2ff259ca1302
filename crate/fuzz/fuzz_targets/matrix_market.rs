#![no_main]

use libfuzzer_sys::fuzz_target;
use rsplit::io::{read_matrix_market, write_matrix_market_array};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((m, _)) = read_matrix_market(text) {
        // a sparse header can declare millions of cells; keep the round trip cheap
        if m.len() <= 1 << 16 && m.iter().all(|v| v.is_finite()) {
            let (back, _) = read_matrix_market(&write_matrix_market_array(&m)).expect("written matrix reparses");
            assert_eq!(back, m);
        }
    }
});
