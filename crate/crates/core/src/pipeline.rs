//! End-to-end run: scene → scattered field → holograms → +1 order → object
//! plane → enhancement, with a report of every numeric choice made.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Acquisition, FilterRadius, PipelineConfig, PortStrategy};
use crate::enhance::{enhance, structural_fidelity_check};
use crate::error::{HoloError, Result};
use crate::field::{total_power, ComplexField, RealField, ScanGrid};
use crate::hologram::{add_noise, combine_ports, record, subtract_background, Hologram, HologramMeta, Port};
use crate::io::{
    export_grayscale, parse_scene, read_scene, write_complex_grid, write_real_grid, GrayMapping,
    X_STRIPS_SCENE,
};
use crate::metrics::QualityReport;
use crate::reconstruct::{reconstruct, ReconstructionResult};
use crate::reference::{synthesize_reference, OffsetReport, ReferenceWaveSpec};
use crate::spectral::{default_radius, extract_plus_one, hologram_spectrum, locate_orders, OrderMap};
use crate::wave::{simulate_scattered_field, SceneSpec};

/// Window and demodulation choices made by the filter stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterDecision {
    pub radius_bins: usize,
    pub radius_rule: &'static str,
    /// Integer-bin shift that moved the +1 order to DC.
    pub integer_shift_bins: [i64; 2],
    /// Fractional carrier removed by a phase ramp before the integer shift.
    pub residual_carrier_bins: [f64; 2],
    pub residual_correction_applied: bool,
    /// Divisor mapping the demodulated order back to object-field units
    /// (`2·E0` for port differencing, `E0` for background subtraction).
    pub demodulation_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub offset: OffsetReport,
    pub orders: OrderMap,
    pub filter: FilterDecision,
    pub port_strategy: PortStrategy,
    pub noise_snr_db: Option<f64>,
    pub noise_seed: Option<u64>,
    /// Share of reconstructed |e|² inside the scene support dilated by one pixel.
    pub mask_energy_fraction: Option<f64>,
    pub amplitude_quality: Option<QualityReport>,
    pub enhanced_quality: Option<QualityReport>,
    pub structural_fidelity: f64,
    pub warnings: Vec<String>,
}

/// In-memory products of a run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: PipelineReport,
    pub scene: SceneSpec,
    pub object_field: ComplexField,
    /// Port recordings as measured (sum/difference or sum/background).
    pub recordings: Vec<(String, Hologram)>,
    pub hologram: Hologram,
    pub spectrum: ComplexField,
    pub reconstruction: ReconstructionResult,
    /// Enhanced amplitude, floored at zero after interpolation ringing.
    pub enhanced_amplitude: RealField,
}

/// 8-neighbour dilation of a boolean mask.
pub fn dilate(mask: &[bool], grid: &ScanGrid) -> Vec<bool> {
    let (nx, ny) = (grid.nx() as isize, grid.ny() as isize);
    let mut out = vec![false; mask.len()];
    for y in 0..ny {
        for x in 0..nx {
            if !mask[(y * nx + x) as usize] {
                continue;
            }
            for oy in -1..=1 {
                for ox in -1..=1 {
                    let (tx, ty) = (x + ox, y + oy);
                    if tx >= 0 && tx < nx && ty >= 0 && ty < ny {
                        out[(ty * nx + tx) as usize] = true;
                    }
                }
            }
        }
    }
    out
}

/// Fraction of `Σ amplitude²` falling on `mask`; `None` when there is no energy.
pub fn energy_fraction(amplitude: &RealField, mask: &[bool]) -> Option<f64> {
    let total = amplitude.sum_sqr();
    if total == 0.0 {
        return None;
    }
    let inside: f64 = amplitude
        .samples()
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(a, _)| a * a)
        .sum();
    Some(inside / total)
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

/// Output of the spectrum, order-location and filter stages.
#[derive(Debug, Clone)]
pub struct Demodulated {
    /// Centred hologram spectrum.
    pub spectrum: ComplexField,
    pub orders: OrderMap,
    pub filter: FilterDecision,
    /// Centred baseband spectrum in object-field units.
    pub baseband: ComplexField,
}

/// `2·E0` when the ports are differenced, `E0` after background subtraction.
pub fn demodulation_gain(strategy: PortStrategy, e0: f64) -> f64 {
    match strategy {
        PortStrategy::TwoPort => 2.0 * e0,
        PortStrategy::SinglePortBackground => e0,
    }
}

/// Locates the +1 order of a combined hologram, windows it, moves it to DC
/// and divides out the demodulation gain.
pub fn demodulate(
    hologram: &Hologram,
    reference: &ReferenceWaveSpec,
    radius: FilterRadius,
    gain: f64,
) -> Result<Demodulated> {
    let spectrum = hologram_spectrum(hologram);
    let orders = stage("orders", locate_orders(&spectrum, reference))?;
    let (radius, rule) = match radius {
        FilterRadius::Auto => (default_radius(&orders, reference.grid()), "auto"),
        FilterRadius::Bins(r) => (r, "configured"),
    };
    let baseband = stage("filter", extract_plus_one(&spectrum, &orders, radius))?;
    let baseband = stage("filter", baseband.scale(Complex64::new(1.0 / gain, 0.0)))?;
    let residual = [
        orders.predicted_plus_one[0] - orders.plus_one[0] as f64,
        orders.predicted_plus_one[1] - orders.plus_one[1] as f64,
    ];
    let filter = FilterDecision {
        radius_bins: radius,
        radius_rule: rule,
        integer_shift_bins: orders.plus_one,
        residual_carrier_bins: residual,
        residual_correction_applied: residual != [0.0, 0.0],
        demodulation_gain: gain,
    };
    Ok(Demodulated {
        spectrum,
        orders,
        filter,
        baseband,
    })
}

/// Loads the configured scene (or the built-in crossed strips).
pub fn load_scene(config: &PipelineConfig, grid: &ScanGrid) -> Result<SceneSpec> {
    let reflectivity = match &config.scene {
        Some(path) => read_scene(path)?,
        None => parse_scene(X_STRIPS_SCENE)?,
    };
    reflectivity
        .grid()
        .ensure_same(grid, "scene grid vs configured grid")?;
    SceneSpec::new(reflectivity, config.z0_mm)
}

/// Runs every stage without touching the filesystem (except reading inputs).
pub fn execute(config: &PipelineConfig) -> Result<PipelineRun> {
    let Acquisition {
        grid,
        reference,
        params,
        offset,
    } = stage("validate", config.acquisition())?;
    let scene = stage("scene", load_scene(config, &grid))?;
    execute_scene(config, &scene, Acquisition { grid, reference, params, offset })
}

/// As [`execute`], with an already-built scene.
pub fn execute_scene(config: &PipelineConfig, scene: &SceneSpec, acq: Acquisition) -> Result<PipelineRun> {
    let mut warnings = Vec::new();
    stage("scene", scene.grid().ensure_same(&acq.grid, "scene grid vs configured grid"))?;
    if total_power(scene.reflectivity()) == 0.0 {
        warnings.push("no object energy: the scene reflectivity is zero everywhere".to_string());
    }

    let object_field = stage("simulate", simulate_scattered_field(scene, &acq.params, None))?;
    let reference_field = synthesize_reference(&acq.reference);
    let meta = HologramMeta {
        frequency_ghz: acq.params.frequency_ghz(),
        z0_mm: scene.z0_mm(),
        reference: acq.reference,
    };

    let (snr_db, seed) = match config.noise {
        Some(n) => (n.snr_db, n.seed),
        None => (f64::INFINITY, 0),
    };
    let noisy = |h: Hologram, s: u64| stage("noise", add_noise(&h, snr_db, s));
    let empty = ComplexField::zeros(acq.grid);

    let sum = noisy(stage("record", record(&object_field, &reference_field, Port::Sum, meta))?, seed)?;
    let gain = demodulation_gain(config.port_strategy, acq.reference.e0());
    let (second_name, second, hologram) = match config.port_strategy {
        PortStrategy::TwoPort => {
            let diff = noisy(
                stage("record", record(&object_field, &reference_field, Port::Difference, meta))?,
                seed.wrapping_add(1),
            )?;
            let combined = stage("combine", combine_ports(&sum, &diff))?;
            ("difference", diff, combined)
        }
        PortStrategy::SinglePortBackground => {
            let background = noisy(
                stage("record", record(&empty, &reference_field, Port::Sum, meta))?,
                seed.wrapping_add(1),
            )?;
            let subtracted = stage("background", subtract_background(&sum, &background))?;
            ("background", background, subtracted)
        }
    };

    let Demodulated {
        spectrum,
        orders,
        filter,
        baseband,
    } = demodulate(&hologram, &acq.reference, config.filter_radius, gain)?;

    let reconstruction = stage("reconstruct", reconstruct(&baseband, scene.z0_mm(), &acq.params))?;
    // Wrapped phase is never enhanced: interpolation would smear the ±π jumps.
    let enhanced_amplitude = stage(
        "enhance",
        enhance(&reconstruction.amplitude, &config.enhancer).and_then(|e| e.map(|v| v.max(0.0))),
    )?;

    let window = config.metrics.speckle_window;
    let amplitude = &reconstruction.amplitude;
    let (lo, hi) = amplitude.range();
    let dynamic_range = if hi > lo { hi - lo } else { 1.0 };
    let amplitude_quality = match QualityReport::evaluate(amplitude, None, window, dynamic_range) {
        Ok(q) => Some(q),
        Err(HoloError::UndefinedMetric(why)) => {
            warnings.push(format!("amplitude quality undefined: {why}"));
            None
        }
        Err(e) => return Err(e.in_stage("metrics")),
    };
    let enhanced_quality = match QualityReport::evaluate(&enhanced_amplitude, None, window, dynamic_range) {
        Ok(q) => Some(q),
        Err(HoloError::UndefinedMetric(why)) => {
            warnings.push(format!("enhanced quality undefined: {why}"));
            None
        }
        Err(e) => return Err(e.in_stage("metrics")),
    };
    let structural_fidelity = stage(
        "metrics",
        structural_fidelity_check(amplitude, &enhanced_amplitude),
    )?;

    let mask = dilate(&scene.support(), &acq.grid);
    let mask_energy_fraction = energy_fraction(amplitude, &mask);
    if mask_energy_fraction.is_none() && warnings.is_empty() {
        warnings.push("no object energy: the reconstructed amplitude is zero".to_string());
    }

    let report = PipelineReport {
        offset: acq.offset,
        orders,
        filter,
        port_strategy: config.port_strategy,
        noise_snr_db: config.noise.map(|n| n.snr_db),
        noise_seed: config.noise.map(|n| n.seed),
        mask_energy_fraction,
        amplitude_quality,
        enhanced_quality,
        structural_fidelity,
        warnings,
    };
    Ok(PipelineRun {
        report,
        scene: scene.clone(),
        object_field,
        recordings: vec![("sum".to_string(), sum), (second_name.to_string(), second)],
        hologram,
        spectrum,
        reconstruction,
        enhanced_amplitude,
    })
}

fn record_line(kind: &str, value: impl Serialize) -> String {
    let mut v = serde_json::to_value(value).expect("report values serialize");
    match &mut v {
        Value::Object(map) => {
            map.insert("record".to_string(), json!(kind));
        }
        other => {
            *other = json!({ "record": kind, "value": other.clone() });
        }
    }
    v.to_string()
}

impl PipelineReport {
    /// One JSON object per line, each tagged with a `record` field.
    pub fn to_records(&self) -> String {
        let mut lines = vec![
            record_line("offset", self.offset),
            record_line("orders", self.orders),
            record_line("filter", self.filter),
            record_line(
                "acquisition",
                json!({
                    "port_strategy": self.port_strategy,
                    "noise_snr_db": self.noise_snr_db,
                    "noise_seed": self.noise_seed,
                }),
            ),
            record_line(
                "reconstruction",
                json!({ "mask_energy_fraction": self.mask_energy_fraction }),
            ),
        ];
        if let Some(q) = self.amplitude_quality {
            lines.push(record_line("quality-amplitude", q));
        }
        if let Some(q) = self.enhanced_quality {
            lines.push(record_line("quality-enhanced", q));
        }
        lines.push(record_line(
            "fidelity",
            json!({ "structural_fidelity": self.structural_fidelity }),
        ));
        for w in &self.warnings {
            lines.push(record_line("warning", json!({ "message": w })));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let o = &self.offset;
        let _ = writeln!(s, "[offset]");
        let _ = writeln!(s, "kr_x = {:.6} rad/mm", o.kr_x);
        let _ = writeln!(s, "kr_y = {:.6} rad/mm", o.kr_y);
        let _ = writeln!(s, "two_k = {:.6} rad/mm", o.two_k);
        let _ = writeln!(s, "nyquist = ({:.6}, {:.6}) rad/mm", o.nyquist_x, o.nyquist_y);
        let _ = writeln!(s, "spacing = ({}, {}) mm, lambda/6 = {:.4} mm", o.dx, o.dy, o.lambda_over_six_mm);
        let _ = writeln!(s, "passed = {}", o.passed);

        let m = &self.orders;
        let _ = writeln!(s, "\n[orders]");
        let _ = writeln!(s, "dc = {:?}", m.dc);
        let _ = writeln!(s, "plus_one = {:?}", m.plus_one);
        let _ = writeln!(s, "minus_one = {:?}", m.minus_one);
        let _ = writeln!(
            s,
            "predicted_plus_one = ({:.4}, {:.4})",
            m.predicted_plus_one[0], m.predicted_plus_one[1]
        );

        let f = &self.filter;
        let _ = writeln!(s, "\n[filter]");
        let _ = writeln!(s, "radius_bins = {} ({})", f.radius_bins, f.radius_rule);
        let _ = writeln!(s, "integer_shift_bins = {:?}", f.integer_shift_bins);
        let _ = writeln!(
            s,
            "residual_carrier_bins = ({:.4}, {:.4})",
            f.residual_carrier_bins[0], f.residual_carrier_bins[1]
        );
        let _ = writeln!(s, "residual_correction_applied = {}", f.residual_correction_applied);
        let _ = writeln!(s, "demodulation_gain = {}", f.demodulation_gain);

        let _ = writeln!(s, "\n[acquisition]");
        let _ = writeln!(s, "port_strategy = {:?}", self.port_strategy);
        match self.noise_snr_db {
            Some(db) => {
                let _ = writeln!(s, "noise = {db} dB (seed {})", self.noise_seed.unwrap_or(0));
            }
            None => {
                let _ = writeln!(s, "noise = none");
            }
        }

        let _ = writeln!(s, "\n[reconstruction]");
        match self.mask_energy_fraction {
            Some(v) => {
                let _ = writeln!(s, "mask_energy_fraction = {v:.6}");
            }
            None => {
                let _ = writeln!(s, "mask_energy_fraction = undefined");
            }
        }

        for (title, q) in [
            ("quality.amplitude", &self.amplitude_quality),
            ("quality.enhanced", &self.enhanced_quality),
        ] {
            let _ = writeln!(s, "\n[{title}]");
            match q {
                Some(q) => {
                    let _ = writeln!(s, "speckle_index = {:.6}", q.speckle_index);
                    let _ = writeln!(s, "snr = {}", q.snr);
                    let _ = writeln!(s, "window = {}", q.window);
                    let _ = writeln!(s, "excluded_pixels = {}", q.excluded_pixels);
                }
                None => {
                    let _ = writeln!(s, "undefined");
                }
            }
        }
        let _ = writeln!(s, "\n[fidelity]");
        let _ = writeln!(s, "structural_fidelity = {:.6}", self.structural_fidelity);

        if !self.warnings.is_empty() {
            let _ = writeln!(s, "\n[warnings]");
            for w in &self.warnings {
                let _ = writeln!(s, "- {w}");
            }
        }
        s
    }
}

fn log_magnitude(spectrum: &ComplexField) -> RealField {
    RealField::new(
        *spectrum.grid(),
        spectrum.samples().iter().map(|c| c.norm().ln_1p()).collect(),
    )
    .expect("log magnitude of finite spectrum is finite")
}

/// Writes grid files, PNGs and both report forms into `dir`; returns the paths written.
pub fn write_artifacts(run: &PipelineRun, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| HoloError::io(dir, e))?;
    let mut written = Vec::new();
    let mut path = |name: &str| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };

    for (name, h) in &run.recordings {
        write_real_grid(path(&format!("hologram_{name}.grid")), h.data())?;
    }
    write_complex_grid(path("object_field.grid"), &run.object_field)?;
    write_real_grid(path("hologram.grid"), run.hologram.data())?;
    let magnitude = RealField::new(
        *run.spectrum.grid(),
        run.spectrum.samples().iter().map(|c| c.norm()).collect(),
    )?;
    write_real_grid(path("spectrum_magnitude.grid"), &magnitude)?;
    write_complex_grid(path("reconstructed_field.grid"), &run.reconstruction.field)?;
    write_real_grid(path("amplitude.grid"), &run.reconstruction.amplitude)?;
    write_real_grid(path("phase.grid"), &run.reconstruction.wrapped_phase)?;
    write_real_grid(path("enhanced_amplitude.grid"), &run.enhanced_amplitude)?;

    export_grayscale(run.hologram.data(), GrayMapping::MinMax, path("hologram.png"))?;
    export_grayscale(&log_magnitude(&run.spectrum), GrayMapping::MinMax, path("spectrum.png"))?;
    export_grayscale(&run.reconstruction.amplitude, GrayMapping::MinMax, path("amplitude.png"))?;
    export_grayscale(&run.reconstruction.wrapped_phase, GrayMapping::Phase, path("phase.png"))?;
    export_grayscale(&run.enhanced_amplitude, GrayMapping::MinMax, path("enhanced_amplitude.png"))?;

    let text = path("report.txt");
    fs::write(&text, run.report.to_text()).map_err(|e| HoloError::io(&text, e))?;
    let records = path("report.jsonl");
    fs::write(&records, run.report.to_records()).map_err(|e| HoloError::io(&records, e))?;
    Ok(written)
}

/// Executes the configured run and writes its artifacts to `config.output_dir`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineRun> {
    let run = execute(config)?;
    stage("write", write_artifacts(&run, &config.output_dir))?;
    Ok(run)
}
