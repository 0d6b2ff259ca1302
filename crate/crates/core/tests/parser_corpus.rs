//! Replays the checked-in fuzz corpus and random byte strings through every
//! parser with the same round-trip checks as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use rsplit::io::*;

fn check(target: &str, data: &[u8]) {
    if target == "pgm" {
        if let Ok((img, enc)) = read_pgm(data) {
            assert_eq!(img.pixels.len(), img.width * img.height);
            assert!(img.pixels.iter().all(|&p| p <= img.maxval));
            assert_eq!(read_pgm(&write_pgm(&img, enc)).unwrap().0, img);
        }
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    match target {
        "matrix_market" => {
            if let Ok((m, _)) = read_matrix_market(text) {
                if m.len() <= 1 << 16 && m.iter().all(|v| v.is_finite()) {
                    assert_eq!(read_matrix_market(&write_matrix_market_array(&m)).unwrap().0, m);
                    assert_eq!(read_matrix_market(&write_matrix_market_coordinate(&m)).unwrap().0, m);
                }
            }
        }
        "hadamard_stack" => {
            if let Ok((n, signs)) = read_hadamard_stack(text) {
                assert!(n.is_power_of_two());
                assert!(signs.iter().all(|s| s.len() == n && s.iter().all(|&v| v == 1.0 || v == -1.0)));
                assert_eq!(read_hadamard_stack(&write_hadamard_stack(n, &signs)).unwrap(), (n, signs));
            }
        }
        "trace_csv" => {
            if let Ok(t) = parse_trace_csv(text) {
                assert_eq!(parse_trace_csv(&t.to_csv()).unwrap().len(), t.len());
            }
        }
        "instance_header" => {
            if let Ok(h) = parse_instance_header(text) {
                assert_eq!(parse_instance_header(&write_instance_header(&h)).unwrap(), h);
            }
        }
        "schedule" => {
            if let Ok(s) = parse_schedule(text) {
                assert!(s.factor > 0.0 && s.factor < 1.0);
                assert_eq!(parse_schedule(&s.to_string()).unwrap(), s);
            }
        }
        "partition" => {
            if let Ok(l) = parse_partition(text) {
                assert_eq!(parse_partition(&write_partition(&l)).unwrap(), l);
            }
        }
        other => panic!("no checks for corpus directory {other}"),
    }
}

const TARGETS: [&str; 7] = ["matrix_market", "hadamard_stack", "pgm", "trace_csv", "instance_header", "schedule", "partition"];

#[test]
fn corpus_seeds_replay() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut accepted = 0;
    for target in TARGETS {
        let mut seeds: Vec<_> = fs::read_dir(root.join(target)).unwrap().map(|e| e.unwrap().path()).collect();
        seeds.sort();
        assert!(!seeds.is_empty(), "{target} has no seeds");
        for p in seeds {
            let data = fs::read(&p).unwrap();
            check(target, &data);
            accepted += 1;
        }
    }
    assert!(accepted >= TARGETS.len() * 3);
}

#[test]
fn corpus_has_valid_and_invalid_seeds() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let text = |t: &str, f: &str| fs::read_to_string(root.join(t).join(f)).unwrap();
    assert!(read_matrix_market(&text("matrix_market", "coordinate")).is_ok());
    assert!(read_matrix_market(&text("matrix_market", "complex_rejected")).is_err());
    assert!(read_hadamard_stack(&text("hadamard_stack", "not_power_of_two")).is_err());
    assert!(read_pgm(&fs::read(root.join("pgm/binary_2x2")).unwrap()).is_ok());
    assert!(read_pgm(&fs::read(root.join("pgm/truncated")).unwrap()).is_err());
    assert!(parse_trace_csv(&text("trace_csv", "lad_head")).is_ok());
    assert!(parse_trace_csv(&text("trace_csv", "bad_header")).is_err());
    assert!(parse_schedule(&text("schedule", "factor_one")).is_err());
    assert!(parse_instance_header(&text("instance_header", "missing_equals")).is_err());
    assert!(parse_partition(&text("partition", "bad")).is_err());
}

fn mutated(seed: &'static [u8]) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 0..6).prop_map(move |edits| {
        let mut v = seed.to_vec();
        for (i, b) in edits {
            if !v.is_empty() {
                let k = i.index(v.len());
                v[k] = b;
            }
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_bytes_never_panic(data in prop::collection::vec(any::<u8>(), 0..256), t in 0usize..7) {
        check(TARGETS[t], &data);
    }

    #[test]
    fn mutated_matrix_market(data in mutated(b"%%MatrixMarket matrix coordinate real general\n3 3 2\n1 1 4.0\n3 2 -1\n")) {
        check("matrix_market", &data);
    }

    #[test]
    fn mutated_pgm(data in mutated(b"P2\n3 2\n255\n0 128 255\n10 20 30\n")) {
        check("pgm", &data);
    }

    #[test]
    fn mutated_signs(data in mutated(b"4\n2\n1 -1 1 1\n-1 -1 1 -1\n")) {
        check("hadamard_stack", &data);
    }

    #[test]
    fn mutated_trace(data in mutated(b"iter,objective,optimality,gap,inner_iters,ms\n0,1.0,NaN,0.5,0,0.0\n1,0.5,0.1,0.2,3,0.0\n")) {
        check("trace_csv", &data);
    }
}
