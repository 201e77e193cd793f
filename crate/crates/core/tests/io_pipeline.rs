use std::fs;

use microholo::config::{FilterRadius, NoiseConfig, PipelineConfig, PortStrategy};
use microholo::field::{ComplexField, RealField, ScanGrid};
use microholo::hologram::{add_noise, record, HologramMeta, Port};
use microholo::io::{
    decode_grid, encode_grid, export_grayscale, read_complex_grid, read_grid, read_real_grid, to_gray_levels,
    write_complex_grid, write_real_grid, GrayMapping, GridData,
};
use microholo::pipeline::{execute, run_pipeline};
use microholo::reference::{synthesize_reference, ReferenceWaveSpec};
use microholo::HoloError;
use num_complex::Complex64;
use proptest::prelude::*;

fn offset_of(err: HoloError) -> u64 {
    match err {
        HoloError::GridFormat { offset, .. } => offset,
        other => panic!("expected a grid format error, got {other:?}"),
    }
}

proptest! {
    #[test]
    fn grid_files_round_trip_bit_for_bit(
        values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 12),
        dx in 0.01..100.0f64,
    ) {
        let g = ScanGrid::new(3, 4, dx, dx * 1.5).unwrap();
        let real = RealField::new(g, values.clone()).unwrap();
        let back = decode_grid(&encode_grid(&GridData::Real(real.clone()))).unwrap();
        let GridData::Real(back) = back else { panic!("dtype changed") };
        prop_assert_eq!(back.grid(), real.grid());
        for (a, b) in back.samples().iter().zip(real.samples()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }

        let cplx = ComplexField::from_fn(g, |x, y| {
            Complex64::new(values[g.index(x, y)], -values[11 - g.index(x, y)])
        }).unwrap();
        let bytes = encode_grid(&GridData::Complex(cplx.clone()));
        prop_assert_eq!(encode_grid(&decode_grid(&bytes).unwrap()), bytes);
    }
}

#[test]
fn files_on_disk_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = ScanGrid::new(5, 3, 2.5, 5.0).unwrap();
    let real = RealField::from_fn(g, |x, y| x as f64 * 0.1 - y as f64 / 3.0).unwrap();
    let cplx = ComplexField::from_fn(g, |x, y| Complex64::new(x as f64, -(y as f64) * 1e-300)).unwrap();
    write_real_grid(dir.path().join("r.grid"), &real).unwrap();
    write_complex_grid(dir.path().join("c.grid"), &cplx).unwrap();
    assert_eq!(read_real_grid(dir.path().join("r.grid")).unwrap(), real);
    assert_eq!(read_complex_grid(dir.path().join("c.grid")).unwrap(), cplx);
    assert_eq!(read_complex_grid(dir.path().join("r.grid")).unwrap(), real.to_complex());
    assert!(read_real_grid(dir.path().join("c.grid")).is_err());
    assert!(matches!(read_grid(dir.path().join("missing.grid")), Err(HoloError::Io { .. })));
}

#[test]
fn header_layout_is_fixed() {
    let g = ScanGrid::new(2, 3, 5.0, 4.0).unwrap();
    let bytes = encode_grid(&GridData::Real(RealField::constant(g, 1.0).unwrap()));
    assert_eq!(&bytes[0..4], b"HGRD");
    assert_eq!(&bytes[4..8], &[1, 0, 1, 0]);
    assert_eq!(&bytes[8..16], &[2, 0, 0, 0, 3, 0, 0, 0]);
    assert_eq!(&bytes[16..24], &5.0f64.to_le_bytes());
    assert_eq!(&bytes[24..32], &4.0f64.to_le_bytes());
    assert_eq!(bytes.len(), 32 + 6 * 8);
}

#[test]
fn corrupt_files_report_offsets() {
    let g = ScanGrid::new(4, 3, 5.0, 5.0).unwrap();
    let bytes = encode_grid(&GridData::Real(RealField::constant(g, 2.0).unwrap()));
    assert_eq!(offset_of(decode_grid(&bytes[..20]).unwrap_err()), 20);
    assert_eq!(offset_of(decode_grid(&bytes[..32 + 5 * 8 + 3]).unwrap_err()), 72);
    assert_eq!(offset_of(decode_grid(&bytes[..32]).unwrap_err()), 32);
    let mut long = bytes.clone();
    long.push(0);
    assert_eq!(offset_of(decode_grid(&long).unwrap_err()), bytes.len() as u64);

    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert_eq!(offset_of(decode_grid(&bad).unwrap_err()), 0);
    let mut bad = bytes.clone();
    bad[6] = 9;
    assert_eq!(offset_of(decode_grid(&bad).unwrap_err()), 6);
    let mut bad = bytes.clone();
    bad[40..48].copy_from_slice(&f64::NAN.to_le_bytes());
    assert_eq!(offset_of(decode_grid(&bad).unwrap_err()), 40);
}

#[test]
fn gray_export_endpoints() {
    let g = ScanGrid::new(3, 2, 1.0, 1.0).unwrap();
    let ramp = RealField::new(g, vec![-2.0, 0.0, 1.0, 4.0, 1.0, 0.0]).unwrap();
    let levels = to_gray_levels(&ramp, GrayMapping::MinMax);
    assert_eq!(levels[0], 0);
    assert_eq!(levels[3], 255);
    assert_eq!(levels[2], 128);
    let phase = RealField::new(g, vec![std::f64::consts::PI, 0.0, -std::f64::consts::PI + 1e-9, 0.0, 0.0, 0.0]).unwrap();
    let p = to_gray_levels(&phase, GrayMapping::Phase);
    assert_eq!((p[0], p[1], p[2]), (255, 128, 0));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ramp.png");
    export_grayscale(&ramp, GrayMapping::MinMax, &path).unwrap();
    let png = fs::read(&path).unwrap();
    assert_eq!(&png[1..4], b"PNG");
}

#[test]
fn noise_matches_requested_snr() {
    let g = ScanGrid::new(40, 40, 5.0, 5.0).unwrap();
    let spec = ReferenceWaveSpec::new(g, 1.0, 2.0 * std::f64::consts::PI / 3.0).unwrap();
    let meta = HologramMeta { frequency_ghz: 9.1, z0_mm: 25.0, reference: spec };
    let o = ComplexField::from_fn(g, |x, y| Complex64::new(0.2 * ((x + y) % 3) as f64, 0.1)).unwrap();
    let clean = record(&o, &synthesize_reference(&spec), Port::Sum, meta).unwrap();
    let signal = clean.data().sum_sqr() / 1600.0;
    let mut measured = Vec::new();
    for seed in 0..8 {
        let noisy = add_noise(&clean, 20.0, seed).unwrap();
        let noise = noisy.data().zip_with(clean.data(), |a, b| a - b).unwrap().sum_sqr() / 1600.0;
        let snr_db = 10.0 * (signal / noise).log10();
        assert!((snr_db - 20.0).abs() < 0.5, "seed {seed}: {snr_db} dB");
        measured.push(snr_db);
    }
}

#[test]
fn empty_scene_runs_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("empty.scene");
    fs::write(&scene, "grid 40 40 5 5\n").unwrap();
    let config = PipelineConfig {
        scene: Some(scene),
        ..PipelineConfig::default()
    };
    let run = execute(&config).unwrap();
    assert!(run.report.warnings.iter().any(|w| w.contains("no object energy")));
    assert!(run.reconstruction.amplitude.samples().iter().all(|&v| v.abs() < 1e-12));
    assert_eq!(run.report.mask_energy_fraction, None);
}

#[test]
fn coarse_spacing_aborts_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = PipelineConfig::default();
    config.grid.dx_mm = 8.0;
    config.grid.dy_mm = 8.0;
    config.output_dir = dir.path().join("out");
    let err = run_pipeline(&config).unwrap_err().to_string();
    assert!(err.contains("validate"), "{err}");
    assert!(err.contains("2k = 0.38144"), "{err}");
    assert!(!config.output_dir.exists());
}

#[test]
fn both_port_strategies_reconstruct_the_x() {
    for strategy in [PortStrategy::TwoPort, PortStrategy::SinglePortBackground] {
        let config = PipelineConfig {
            port_strategy: strategy,
            ..PipelineConfig::default()
        };
        let run = execute(&config).unwrap();
        let fraction = run.report.mask_energy_fraction.unwrap();
        assert!(fraction >= 0.6, "{strategy:?}: {fraction}");
        assert_eq!(run.report.filter.radius_bins, 6);
    }
}

#[test]
fn configured_radius_and_noise_are_reported() {
    let config = PipelineConfig {
        filter_radius: FilterRadius::Bins(4),
        noise: Some(NoiseConfig { snr_db: 25.0, seed: 9 }),
        ..PipelineConfig::default()
    };
    let run = execute(&config).unwrap();
    assert_eq!(run.report.filter.radius_bins, 4);
    assert_eq!(run.report.filter.radius_rule, "configured");
    assert_eq!(run.report.noise_seed, Some(9));
    let records = run.report.to_records();
    for line in records.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("record").is_some(), "{line}");
    }
    assert!(run.report.to_text().contains("radius"));
}

#[test]
fn config_round_trips_through_toml() {
    let config = PipelineConfig {
        filter_radius: FilterRadius::Bins(5),
        noise: Some(NoiseConfig { snr_db: 20.0, seed: 3 }),
        ..PipelineConfig::default()
    };
    assert_eq!(PipelineConfig::from_toml(&config.to_toml()).unwrap(), config);
    assert!(PipelineConfig::from_toml("frequency_ghz = 9.1\nbogus = 1\n").is_err());
    let partial = PipelineConfig::from_toml("z0_mm = 30.0\nfilter_radius = \"auto\"\n").unwrap();
    assert_eq!(partial.z0_mm, 30.0);
    assert_eq!(partial.filter_radius, FilterRadius::Auto);
}
