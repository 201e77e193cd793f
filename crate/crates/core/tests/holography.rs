mod common;

use std::f64::consts::PI;

use microholo::field::{
    center_spectrum, centered_position, dft2, total_power, uncenter_spectrum, ComplexField, Direction, ScanGrid,
};
use microholo::hologram::{combine_ports, record, subtract_background, Hologram, HologramMeta, Port};
use microholo::io::{parse_scene, X_STRIPS_SCENE};
use microholo::reconstruct::{backpropagate, wrapped_phase};
use microholo::reference::{synthesize_reference, validate_offset, ReferenceWaveSpec};
use microholo::spectral::{
    default_radius, extract_minus_one, extract_plus_one, hologram_spectrum, locate_orders, OrderMap,
};
use microholo::wave::{asm_propagate, simulate_scattered_field, PropagationMode, PropagationParams, SceneSpec};
use microholo::HoloError;
use num_complex::Complex64;
use proptest::prelude::*;

use common::{band_limited, max_abs_diff};

const INTEGER_STEP: f64 = 2.0 * PI * 13.0 / 40.0;

fn grid40() -> ScanGrid {
    ScanGrid::new(40, 40, 5.0, 5.0).unwrap()
}

fn meta(spec: ReferenceWaveSpec) -> HologramMeta {
    HologramMeta {
        frequency_ghz: 9.1,
        z0_mm: 25.0,
        reference: spec,
    }
}

fn two_port(object: &ComplexField, spec: ReferenceWaveSpec) -> Hologram {
    let r = synthesize_reference(&spec);
    let m = meta(spec);
    combine_ports(
        &record(object, &r, Port::Sum, m).unwrap(),
        &record(object, &r, Port::Difference, m).unwrap(),
    )
    .unwrap()
}

fn spatial(baseband: &ComplexField) -> ComplexField {
    dft2(&uncenter_spectrum(baseband), Direction::Inverse)
}

fn correlation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let inner: Complex64 = a.iter().zip(b).map(|(p, q)| p * q.conj()).sum();
    let na: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|c| c.norm_sqr()).sum();
    inner.norm() / (na * nb).sqrt()
}

#[test]
fn integer_carrier_reference_is_a_single_bin() {
    let spec = ReferenceWaveSpec::new(grid40(), 1.5, INTEGER_STEP).unwrap();
    let r = synthesize_reference(&spec);
    assert!(r.samples().iter().all(|c| (c.norm() - 1.5).abs() < 1e-12));
    let s = center_spectrum(&dft2(&r, Direction::Forward));
    let peak = (centered_position(40, -13), centered_position(40, -13));
    for y in 0..40 {
        for x in 0..40 {
            let v = s.at(x, y).norm();
            if (x, y) == peak {
                assert!((v - 1.5 * 1600.0).abs() < 1e-8);
            } else {
                assert!(v < 1e-9, "leak {v} at ({x}, {y})");
            }
        }
    }
}

#[test]
fn diagonal_phase_advance() {
    let spec = ReferenceWaveSpec::new(grid40(), 1.0, 2.0 * PI / 3.0).unwrap();
    let r = synthesize_reference(&spec);
    let expected = Complex64::from_polar(1.0, -4.0 * PI / 3.0);
    for (x, y) in [(0, 0), (5, 9), (38, 2)] {
        assert!((r.at(x + 1, y + 1) / r.at(x, y) - expected).norm() < 1e-12);
    }
}

proptest! {
    #[test]
    fn offset_check_is_monotone_in_step(a in 0.1..6.2f64, b in 0.1..6.2f64, dx in 1.0..10.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let g = ScanGrid::new(32, 32, dx, dx).unwrap();
        let k = 0.19;
        let r_lo = validate_offset(&ReferenceWaveSpec::new(g, 1.0, lo).unwrap(), k);
        let r_hi = validate_offset(&ReferenceWaveSpec::new(g, 1.0, hi).unwrap(), k);
        prop_assert!(!r_lo.separates_orders || r_hi.separates_orders);
        prop_assert!(!r_hi.below_nyquist || r_lo.below_nyquist);
    }

    #[test]
    fn coarser_spacing_never_helps_separation(d1 in 1.0..10.0f64, d2 in 1.0..10.0f64) {
        let (fine, coarse) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let check = |d: f64| {
            let g = ScanGrid::new(16, 16, d, d).unwrap();
            validate_offset(&ReferenceWaveSpec::new(g, 1.0, 2.0 * PI / 3.0).unwrap(), 0.19).separates_orders
        };
        prop_assert!(!check(coarse) || check(fine));
    }

    #[test]
    fn wrapped_phase_is_congruent_and_in_range(theta in -50.0..50.0f64, amp in 0.01..10.0f64) {
        let g = ScanGrid::new(2, 2, 1.0, 1.0).unwrap();
        let e = ComplexField::from_fn(g, |_, _| Complex64::from_polar(amp, theta)).unwrap();
        let p = wrapped_phase(&e).at(0, 0);
        prop_assert!(p > -PI && p <= PI);
        let k = ((theta - p) / (2.0 * PI)).round();
        prop_assert!((theta - p - 2.0 * PI * k).abs() < 1e-9);
    }

    #[test]
    fn extraction_never_adds_energy(seed in 0u64..500, radius in 1usize..12) {
        let spec = ReferenceWaveSpec::new(grid40(), 1.0, 2.0 * PI / 3.0).unwrap();
        let h = two_port(&band_limited(grid40(), 5.0, seed), spec);
        let s = hologram_spectrum(&h);
        let map = locate_orders(&s, &spec).unwrap();
        let out = extract_plus_one(&s, &map, radius.min(map.plus_one_distance() - 1)).unwrap();
        prop_assert!(total_power(&out) <= total_power(&s) * (1.0 + 1e-12));
    }
}

#[test]
fn recording_identities() {
    let spec = ReferenceWaveSpec::new(grid40(), 1.3, 2.0 * PI / 3.0).unwrap();
    let r = synthesize_reference(&spec);
    let o = band_limited(grid40(), 6.0, 3);
    let m = meta(spec);
    let sum = record(&o, &r, Port::Sum, m).unwrap();
    let diff = record(&o, &r, Port::Difference, m).unwrap();
    for i in 0..o.samples().len() {
        let (oi, ri) = (o.samples()[i], r.samples()[i]);
        let parallelogram = 2.0 * (oi.norm_sqr() + ri.norm_sqr());
        assert!((sum.data().samples()[i] + diff.data().samples()[i] - parallelogram).abs() < 1e-12);
        let four_terms = oi.norm_sqr() + ri.norm_sqr() + (oi * ri.conj() + oi.conj() * ri).re;
        assert!((sum.data().samples()[i] - four_terms).abs() < 1e-12);
    }

    let turn = Complex64::from_polar(1.0, 0.7);
    let rotated = record(&o.scale(turn).unwrap(), &r.scale(turn).unwrap(), Port::Sum, m).unwrap();
    let worst = rotated
        .data()
        .samples()
        .iter()
        .zip(sum.data().samples())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-12);

    let background = record(&ComplexField::zeros(grid40()), &r, Port::Sum, m).unwrap();
    let single = subtract_background(&sum, &background).unwrap();
    for i in 0..o.samples().len() {
        let (oi, ri) = (o.samples()[i], r.samples()[i]);
        let expect = oi.norm_sqr() + 2.0 * (oi * ri.conj()).re;
        assert!((single.data().samples()[i] - expect).abs() < 1e-12);
    }
}

#[test]
fn real_hologram_spectrum_is_conjugate_symmetric() {
    let spec = ReferenceWaveSpec::new(grid40(), 1.0, 2.0 * PI / 3.0).unwrap();
    let s = hologram_spectrum(&two_port(&band_limited(grid40(), 5.0, 8), spec));
    let peak = s.samples().iter().map(|c| c.norm()).fold(0.0, f64::max);
    for ky in -19i64..20 {
        for kx in -19i64..20 {
            let a = s.at(centered_position(40, kx), centered_position(40, ky));
            let b = s.at(centered_position(40, -kx), centered_position(40, -ky));
            assert!((a - b.conj()).norm() < 1e-12 * peak);
        }
    }
}

#[test]
fn orders_found_near_prediction() {
    let spec = ReferenceWaveSpec::new(grid40(), 1.0, 2.0 * PI / 3.0).unwrap();
    let params = PropagationParams::new(9.1, PropagationMode::Monostatic).unwrap();
    let scene = SceneSpec::new(parse_scene(X_STRIPS_SCENE).unwrap(), 25.0).unwrap();
    let o = simulate_scattered_field(&scene, &params, None).unwrap();
    let map = locate_orders(&hologram_spectrum(&two_port(&o, spec)), &spec).unwrap();
    for axis in 0..2 {
        assert!((map.predicted_plus_one[axis] - 40.0 / 3.0).abs() < 1e-12);
        assert!((map.plus_one[axis] as f64 - map.predicted_plus_one[axis]).abs() <= 1.0);
        assert_eq!(map.minus_one[axis], -map.plus_one[axis]);
    }
    assert_eq!(default_radius(&map, &grid40()), 6);
}

#[test]
fn aliased_carrier_is_reported() {
    let g = ScanGrid::new(40, 40, 5.0, 5.0).unwrap();
    let spec = ReferenceWaveSpec::new(g, 1.0, 3.5).unwrap();
    let s = hologram_spectrum(&two_port(&band_limited(g, 3.0, 1), spec));
    assert!(matches!(locate_orders(&s, &spec), Err(HoloError::Aliased(_))));
}

#[test]
fn constant_object_demodulates_to_dc() {
    let spec = ReferenceWaveSpec::new(grid40(), 1.0, INTEGER_STEP).unwrap();
    let c = Complex64::new(0.3, -0.4);
    let o = ComplexField::from_fn(grid40(), |_, _| c).unwrap();
    let s = hologram_spectrum(&two_port(&o, spec));
    let map = locate_orders(&s, &spec).unwrap();
    assert_eq!(map.plus_one, [13, 13]);
    let base = extract_plus_one(&s, &map, 6).unwrap();
    let dc = (20, 20);
    assert!((base.at(dc.0, dc.1) - c * 2.0 * 1600.0).norm() < 1e-9);
    for y in 0..40 {
        for x in 0..40 {
            if (x, y) != dc {
                assert!(base.at(x, y).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn extracted_order_tracks_object() {
    let o = band_limited(grid40(), 4.0, 21);
    for (step, floor) in [(INTEGER_STEP, 0.999_999), (2.0 * PI / 3.0, 0.99)] {
        let spec = ReferenceWaveSpec::new(grid40(), 1.0, step).unwrap();
        let s = hologram_spectrum(&two_port(&o, spec));
        let map = locate_orders(&s, &spec).unwrap();
        let base = extract_plus_one(&s, &map, default_radius(&map, &grid40())).unwrap();
        let rho = correlation(spatial(&base).samples(), o.samples());
        assert!(rho >= floor, "step {step}: correlation {rho}");
    }
}

#[test]
fn minus_one_is_the_conjugate_image() {
    let spec = ReferenceWaveSpec::new(grid40(), 1.0, 2.0 * PI / 3.0).unwrap();
    let s = hologram_spectrum(&two_port(&band_limited(grid40(), 4.0, 5), spec));
    let map = locate_orders(&s, &spec).unwrap();
    let plus = spatial(&extract_plus_one(&s, &map, 6).unwrap());
    let minus = spatial(&extract_minus_one(&s, &map, 6).unwrap());
    assert!(max_abs_diff(minus.samples(), plus.conj().samples()) < 1e-10);
}

#[test]
fn empty_object_gives_empty_order() {
    let spec = ReferenceWaveSpec::new(grid40(), 1.0, 2.0 * PI / 3.0).unwrap();
    let s = hologram_spectrum(&two_port(&ComplexField::zeros(grid40()), spec));
    let map = OrderMap {
        dc: [0, 0],
        plus_one: [13, 13],
        minus_one: [-13, -13],
        predicted_plus_one: [40.0 / 3.0, 40.0 / 3.0],
    };
    let base = extract_plus_one(&s, &map, 6).unwrap();
    assert!(base.samples().iter().all(|c| c.norm() == 0.0));
}

#[test]
fn window_reaching_dc_is_rejected() {
    let spec = ReferenceWaveSpec::new(grid40(), 1.0, 2.0 * PI / 3.0).unwrap();
    let s = hologram_spectrum(&two_port(&band_limited(grid40(), 4.0, 5), spec));
    let map = locate_orders(&s, &spec).unwrap();
    let d = map.plus_one_distance();
    assert!(matches!(
        extract_plus_one(&s, &map, d),
        Err(HoloError::WindowOverlapsDc { radius, distance }) if radius == d && distance == d
    ));
    assert!(extract_plus_one(&s, &map, d - 1).is_ok());
    assert!(extract_plus_one(&s, &map, 0).is_err());
}

#[test]
fn full_chain_recovers_band_limited_object() {
    let spec = ReferenceWaveSpec::new(grid40(), 2.0, INTEGER_STEP).unwrap();
    let params = PropagationParams::new(9.1, PropagationMode::Monostatic).unwrap();
    let object = band_limited(grid40(), 4.0, 77);
    let scene = SceneSpec::new(object.clone(), 25.0).unwrap();
    let field = simulate_scattered_field(&scene, &params, None).unwrap();
    let s = hologram_spectrum(&two_port(&field, spec));
    let map = locate_orders(&s, &spec).unwrap();
    let base = extract_plus_one(&s, &map, 6)
        .unwrap()
        .scale(Complex64::new(1.0 / (2.0 * spec.e0()), 0.0))
        .unwrap();
    let back = backpropagate(&base, 25.0, &params).unwrap();
    let target = asm_propagate(&object, 0.0, &params);
    assert!(max_abs_diff(back.samples(), target.samples()) < 1e-10);
    assert!(backpropagate(&base, -1.0, &params).is_err());
}
