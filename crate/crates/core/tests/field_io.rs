mod common;

use std::io::Cursor;

use common::*;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use spdflow::geometry::{spd_check, vech_upper, SpdMatrix, Vech};
use spdflow::io::{
    add_noise, add_noise_with, decode_field, encode_field, export_glyphs, generate_synthetic, glyph,
    quarter_turn_z, read_field, read_field_strict, write_field, write_glyphs, NoiseModel, Pattern,
    SyntheticSpec, GLYPH_HEADER,
};
use spdflow::linalg;
use spdflow::{Dims, Error, TensorField};

fn spec(pattern: Pattern, extents: &[usize]) -> SyntheticSpec {
    SyntheticSpec {
        pattern,
        dims: Dims::new(extents).unwrap(),
        spacing: vec![1.0; extents.len()],
    }
}

fn diag311() -> SpdMatrix {
    SpdMatrix::diagonal(3.0, 1.0, 1.0).unwrap()
}

fn encoded(field: &TensorField) -> Vec<u8> {
    let mut buf = Vec::new();
    encode_field(field, &mut buf).unwrap();
    buf
}

#[test]
fn constant_pattern() {
    let f = generate_synthetic(&spec(Pattern::Constant { tensor: diag311() }, &[5, 4, 3])).unwrap();
    assert!(f.data().iter().all(|v| *v == diag311().vech()));
}

#[test]
fn two_region_interface_spans_grid_height() {
    let (nx, ny) = (10, 7);
    let f = generate_synthetic(&spec(Pattern::two_region(diag311()).unwrap(), &[nx, ny])).unwrap();
    let turned = quarter_turn_z() * diag311().matrix() * quarter_turn_z().transpose();
    let dims = *f.dims();
    let mut interface = 0;
    for y in 0..ny {
        for x in 0..nx {
            let v = f.get(dims.index([x, y, 0]));
            let expected = if x < nx / 2 { diag311().vech() } else { vech_upper(&turned) };
            assert_eq!(*v, expected);
            if x + 1 < nx && f.get(dims.index([x + 1, y, 0])) != v {
                interface += 1;
            }
        }
    }
    assert_eq!(interface, ny);
}

#[test]
fn smooth_rotation_preserves_spectrum() {
    let p = SpdMatrix::diagonal(4.0, 2.0, 0.5).unwrap();
    let f = generate_synthetic(&spec(Pattern::SmoothRotation { tensor: p, rate: 0.17 }, &[8, 8])).unwrap();
    for i in 0..f.len() {
        let (values, _) = linalg::sym_eigen(&f.matrix(i));
        assert!((values - Vector3::new(0.5, 2.0, 4.0)).abs().max() < 1e-13);
    }
}

#[test]
fn crossing_pattern_is_spd() {
    let f = generate_synthetic(&spec(Pattern::Crossing { tensor: diag311(), width: 3 }, &[12, 12])).unwrap();
    assert!((0..f.len()).all(|i| spd_check(&f.matrix(i)).is_spd));
    let bad = spec(Pattern::Crossing { tensor: diag311(), width: 0 }, &[12, 12]);
    assert!(generate_synthetic(&bad).is_err());
}

#[test]
fn zero_noise_is_bitwise_identity() {
    let f = random_field(&[4, 4, 3], 1);
    assert_eq!(add_noise(&f, 0.0, 7).unwrap(), f);
}

#[test]
fn noise_is_deterministic_per_seed() {
    let f = random_field(&[6, 5], 2);
    assert_eq!(add_noise(&f, 0.4, 99).unwrap(), add_noise(&f, 0.4, 99).unwrap());
    assert_ne!(add_noise(&f, 0.4, 99).unwrap(), add_noise(&f, 0.4, 100).unwrap());
}

#[test]
fn noise_is_unbiased_in_the_tangent_space() {
    let p = SpdMatrix::new(Matrix3::new(2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.7)).unwrap();
    let field = TensorField::constant(Dims::new(&[3, 3]).unwrap(), &[1.0, 1.0], &p).unwrap();
    let inv_root = linalg::inv_sqrtm(p.matrix());
    let samples = 10_000;
    let sigma = 0.3;
    let mut mean = Vech::zeros();
    for seed in 0..samples {
        let noisy = add_noise(&field, sigma, seed).unwrap();
        let w = linalg::logm(&linalg::symmetrize(&(inv_root * noisy.matrix(0) * inv_root)));
        mean += vech_upper(&linalg::symmetrize(&w));
    }
    mean /= samples as f64;
    assert!(mean.abs().max() < 1e-2, "{mean}");
}

#[test]
fn additive_noise_stays_spd() {
    let f = random_field(&[6, 6], 3);
    let noisy = add_noise_with(&f, 0.2, 5, NoiseModel::Additive).unwrap();
    assert!((0..noisy.len()).all(|i| spd_check(&noisy.matrix(i)).is_spd));
    assert!(add_noise(&f, -1.0, 0).is_err());
}

#[test]
fn truncated_payload_rejected() {
    let f = random_field(&[3, 4], 4);
    let mut bytes = encoded(&f);
    bytes.pop();
    match decode_field(Cursor::new(bytes)) {
        Err(Error::Format(msg)) => assert!(msg.contains("truncated payload"), "{msg}"),
        other => panic!("expected a format error, got {other:?}"),
    }
}

#[test]
fn header_fields_are_named_in_errors() {
    let f = random_field(&[3, 4], 5);
    let text = encoded(&f);
    let cases = [
        ("vech6:[11,22,33,12,23,13]", "vech6:[11,12,13,22,23,33]", "ordering"),
        ("dims 3 4", "dims 3 x", "dims"),
        ("spacing 1 1", "spacing 1", "spacing"),
        ("version 1", "version 9", "version"),
        ("SPDF", "SPDX", "magic"),
    ];
    for (from, to, field) in cases {
        let header_len = text.windows(4).position(|w| w == b"end\n").unwrap() + 4;
        let header = String::from_utf8(text[..header_len].to_vec()).unwrap();
        let mut bytes = header.replacen(from, to, 1).into_bytes();
        bytes.extend_from_slice(&text[header_len..]);
        match decode_field(Cursor::new(bytes)) {
            Err(Error::Format(msg)) => assert!(msg.starts_with(field), "{field}: {msg}"),
            other => panic!("{field}: expected a format error, got {other:?}"),
        }
    }
}

#[test]
fn file_round_trip_and_strict_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.spdf");
    let f = random_field(&[5, 4, 3], 6);
    write_field(&f, &path).unwrap();
    assert_eq!(read_field(&path).unwrap(), f);
    assert_eq!(read_field_strict(&path).unwrap(), f);

    let mut data = f.data().to_vec();
    data[3] = Vech::new(1.0, -1.0, 1.0, 0.0, 0.0, 0.0);
    let bad = TensorField::from_raw(*f.dims(), f.spacing(), data).unwrap();
    write_field(&bad, &path).unwrap();
    assert_eq!(read_field(&path).unwrap(), bad);
    assert!(read_field_strict(&path).is_err());
    assert!(matches!(read_field(dir.path().join("missing")), Err(Error::Io(_))));
}

#[test]
fn glyph_conventions() {
    let g = glyph(&SpdMatrix::identity(), [0.0; 3]);
    assert_eq!(g.axes, Vector3::new(1.0, 1.0, 1.0));
    assert_eq!(g.frame, Matrix3::identity());

    let g = glyph(&SpdMatrix::diagonal(4.0, 1.0, 1.0).unwrap(), [0.0; 3]);
    assert!((g.axes - Vector3::new(0.25, 1.0, 1.0)).abs().max() < 1e-15);
    assert!((g.frame.column(0) - Vector3::x()).abs().max() < 1e-15);

    let mut rng = rng(8);
    for _ in 0..50 {
        let p = random_spd_in(&mut rng, 0.2, 5.0);
        let r = random_rotation(&mut rng);
        let turned = spd_of(&(r * p.matrix() * r.transpose()));
        let (a, b) = (glyph(&p, [0.0; 3]), glyph(&turned, [0.0; 3]));
        assert!((a.axes - b.axes).abs().max() <= 1e-12 * a.axes.max());
        assert!((b.frame.determinant() - 1.0).abs() < 1e-12);
        let rotated = r * a.frame;
        for c in 0..3 {
            let dot = rotated.column(c).dot(&b.frame.column(c));
            assert!((dot.abs() - 1.0).abs() < 1e-8, "column {c}: {dot}");
        }
    }
}

#[test]
fn glyph_table_rows_and_determinism() {
    let f = random_field(&[4, 3, 3], 9);
    let mut first = Vec::new();
    write_glyphs(&f, &mut first).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], GLYPH_HEADER);
    assert_eq!(lines.len(), f.len() + 1);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 15));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("glyphs.csv");
    export_glyphs(&f, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn encode_decode_round_trip(seed in any::<u64>(), nx in 3usize..6, ny in 3usize..6, nz in 0usize..5,
                                hx in 0.1f64..3.0, hy in 0.1f64..3.0) {
        let extents: Vec<usize> = if nz < 3 { vec![nx, ny] } else { vec![nx, ny, nz] };
        let f = random_field(&extents, seed);
        let spacing = [hx, hy, 0.5][..extents.len()].to_vec();
        let f = TensorField::new(*f.dims(), &spacing, f.data().to_vec()).unwrap();
        let back = decode_field(Cursor::new(encoded(&f))).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn noise_output_is_spd(seed in any::<u64>(), sigma in 0.0f64..2.0) {
        let f = random_field(&[4, 4], seed ^ 0x5eed);
        let noisy = add_noise(&f, sigma, seed).unwrap();
        for i in 0..noisy.len() {
            prop_assert!(noisy.spd(i).is_ok());
        }
    }
}
