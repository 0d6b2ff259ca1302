#![no_main]

use libfuzzer_sys::fuzz_target;
use rsplit::io::{read_pgm, write_pgm};

fuzz_target!(|data: &[u8]| {
    if let Ok((img, enc)) = read_pgm(data) {
        assert_eq!(img.pixels.len(), img.width * img.height);
        assert!(img.pixels.iter().all(|&p| p <= img.maxval));
        let (back, _) = read_pgm(&write_pgm(&img, enc)).expect("written image reparses");
        assert_eq!(back, img);
    }
});
