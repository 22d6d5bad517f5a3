//! External-interface checks: field serialization round-trips and the fhat
//! table cache format.

use std::sync::Arc;

use proptest::prelude::*;

use glpin_core::cell::{FhatPoint, FhatTable};
use glpin_core::field::{ComplexField2D, ScalarField2D};
use glpin_core::grid::Grid2D;
use glpin_core::C64;

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("glpin_iface_tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scalar_binary_roundtrip_preserves_values(
        seed in 0u64..1000,
        n in 8usize..24,
    ) {
        let g = Arc::new(Grid2D::unit_square(n).unwrap());
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let f = ScalarField2D::from_fn(g, |_, _| next() * 100.0).unwrap();
        let p = tmp(&format!("s_{seed}_{n}.bin"));
        f.write_binary(&p).unwrap();
        let f2 = ScalarField2D::read_binary(&p).unwrap();
        prop_assert_eq!(f.values, f2.values);
        prop_assert_eq!(f2.grid.nx, n);
    }

    #[test]
    fn complex_binary_roundtrip_preserves_values(
        seed in 0u64..1000,
        n in 8usize..20,
    ) {
        let g = Arc::new(Grid2D::unit_square(n).unwrap());
        let mut state = seed.wrapping_add(99);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let f = ComplexField2D::from_fn(g, |_, _| C64::new(next(), next())).unwrap();
        let p = tmp(&format!("c_{seed}_{n}.bin"));
        f.write_binary(&p).unwrap();
        let f2 = ComplexField2D::read_binary(&p).unwrap();
        prop_assert_eq!(f.values, f2.values);
    }

    #[test]
    fn csv_roundtrip_within_print_precision(
        seed in 0u64..1000,
        n in 8usize..20,
    ) {
        let g = Arc::new(Grid2D::unit_square(n).unwrap());
        let mut state = seed.wrapping_add(7);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let f = ScalarField2D::from_fn(g, |_, _| next() * 10.0).unwrap();
        let p = tmp(&format!("s_{seed}_{n}.csv"));
        f.write_csv(&p).unwrap();
        let f2 = ScalarField2D::read_csv(&p).unwrap();
        prop_assert_eq!(f2.grid.nx, n);
        for (a, b) in f.values.iter().zip(&f2.values) {
            prop_assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }
}

#[test]
fn binary_header_is_sixteen_bytes() {
    let g = Arc::new(Grid2D::unit_square(8).unwrap());
    let f = ScalarField2D::constant(g, 2.5);
    let p = tmp("hdr.bin");
    f.write_binary(&p).unwrap();
    let bytes = std::fs::read(&p).unwrap();
    assert_eq!(bytes.len(), 16 + 8 * 64);
    assert_eq!(&bytes[0..4], b"GLF1");
    assert_eq!(u16::from_le_bytes(bytes[4..6].try_into().unwrap()), 8);
    assert_eq!(u16::from_le_bytes(bytes[6..8].try_into().unwrap()), 8);
    let h = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    assert!((h - 0.125).abs() < 1e-15);
}

#[test]
fn fhat_table_csv_roundtrip() {
    let table = FhatTable {
        points: vec![
            FhatPoint { b: 0.1, value: 0.11, r_used: 20.0, bound: 1e-3, capped: false },
            FhatPoint { b: 0.4, value: 0.3, r_used: 30.0, bound: 2e-3, capped: false },
            FhatPoint { b: 1.0, value: 0.5, r_used: 0.0, bound: 0.0, capped: false },
        ],
    };
    let p = tmp("fhat.csv");
    table.write_csv(&p).unwrap();
    let t2 = FhatTable::read_csv(&p).unwrap();
    assert_eq!(t2.points.len(), 3);
    for (a, b) in table.points.iter().zip(&t2.points) {
        assert!((a.b - b.b).abs() < 1e-15);
        assert!((a.value - b.value).abs() < 1e-15);
    }
    // interpolation conventions survive the round trip
    assert_eq!(t2.eval(2.0), 0.5);
    assert!((t2.eval(0.25) - 0.205).abs() < 1e-12);
}

#[test]
fn corrupt_binary_rejected() {
    let p = tmp("bad.bin");
    std::fs::write(&p, b"NOPE0000000000000000").unwrap();
    assert!(ScalarField2D::read_binary(&p).is_err());
}
