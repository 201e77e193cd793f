use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::enhance::{Enhancer, EnhancerKind};
use crate::error::{HoloError, Result};
use crate::field::ScanGrid;
use crate::reference::{validate_offset, OffsetReport, ReferenceWaveSpec};
use crate::wave::{PropagationMode, PropagationParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub dx_mm: f64,
    pub dy_mm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PortStrategy {
    /// Record both hybrid-tee ports and difference them.
    #[default]
    TwoPort,
    /// Record the sum port and subtract an object-free background recording.
    SinglePortBackground,
}

/// Filter window radius in bins: `"auto"` or an explicit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterRadius {
    #[default]
    Auto,
    Bins(usize),
}

impl Serialize for FilterRadius {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FilterRadius::Auto => s.serialize_str("auto"),
            FilterRadius::Bins(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for FilterRadius {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Bins(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Bins(n) => Ok(FilterRadius::Bins(n)),
            Raw::Word(w) if w == "auto" => Ok(FilterRadius::Auto),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected \"auto\" or a bin count, got {w:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub snr_db: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub speckle_window: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            speckle_window: crate::metrics::DEFAULT_WINDOW,
        }
    }
}

/// Full parameter set of a simulate → record → reconstruct → enhance run.
/// Defaults are the 9.1 GHz, 40×40 × 5 mm, 2π/3-step, 25 mm standoff setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub frequency_ghz: f64,
    pub grid: GridConfig,
    pub z0_mm: f64,
    pub phase_step_rad: f64,
    pub e0: f64,
    pub propagation_mode: PropagationMode,
    pub port_strategy: PortStrategy,
    pub filter_radius: FilterRadius,
    pub enhancer: Enhancer,
    pub noise: Option<NoiseConfig>,
    pub metrics: MetricsConfig,
    /// Scene text file; the built-in crossed-strip scene when absent.
    pub scene: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            frequency_ghz: 9.1,
            grid: GridConfig {
                nx: 40,
                ny: 40,
                dx_mm: 5.0,
                dy_mm: 5.0,
            },
            z0_mm: 25.0,
            phase_step_rad: 2.0 * PI / 3.0,
            e0: 1.0,
            propagation_mode: PropagationMode::Monostatic,
            port_strategy: PortStrategy::TwoPort,
            filter_radius: FilterRadius::Auto,
            enhancer: Enhancer::default(),
            noise: None,
            metrics: MetricsConfig::default(),
            scene: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Derived acquisition objects of a validated configuration.
#[derive(Debug, Clone, Copy)]
pub struct Acquisition {
    pub grid: ScanGrid,
    pub reference: ReferenceWaveSpec,
    pub params: PropagationParams,
    pub offset: OffsetReport,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HoloError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Loads a TOML config, resolving relative paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| HoloError::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        config.check_paths()?;
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(scene) = self.scene.as_mut() {
            fix(scene);
        }
        fix(&mut self.output_dir);
        if let EnhancerKind::External { residual_path } = &mut self.enhancer.kind {
            fix(residual_path);
        }
    }

    /// Input files must exist before any stage runs.
    pub fn check_paths(&self) -> Result<()> {
        let mut inputs: Vec<&Path> = Vec::new();
        if let Some(scene) = &self.scene {
            inputs.push(scene);
        }
        if let EnhancerKind::External { residual_path } = &self.enhancer.kind {
            inputs.push(residual_path);
        }
        for p in inputs {
            if !p.is_file() {
                return Err(HoloError::Config(format!("input file {} not found", p.display())));
            }
        }
        Ok(())
    }

    pub fn scan_grid(&self) -> Result<ScanGrid> {
        ScanGrid::new(self.grid.nx, self.grid.ny, self.grid.dx_mm, self.grid.dy_mm)
    }

    /// Builds the reference and propagation parameters and runs the offset
    /// check; a failed check is an error naming `kr` and `2k`.
    pub fn acquisition(&self) -> Result<Acquisition> {
        let grid = self.scan_grid()?;
        let reference = ReferenceWaveSpec::new(grid, self.e0, self.phase_step_rad)?;
        let params = PropagationParams::new(self.frequency_ghz, self.propagation_mode)?;
        if !(self.z0_mm.is_finite() && self.z0_mm > 0.0) {
            return Err(HoloError::InvalidParameter(format!(
                "z0 must be positive, got {} mm",
                self.z0_mm
            )));
        }
        self.enhancer.validate()?;
        let offset = validate_offset(&reference, params.k());
        if !offset.passed {
            let mut why = Vec::new();
            if !offset.separates_orders {
                why.push(format!(
                    "kr = ({:.5}, {:.5}) rad/mm < 2k = {:.5} rad/mm",
                    offset.kr_x, offset.kr_y, offset.two_k
                ));
            }
            if !offset.below_nyquist {
                why.push(format!(
                    "kr = ({:.5}, {:.5}) rad/mm exceeds Nyquist ({:.5}, {:.5}) rad/mm",
                    offset.kr_x, offset.kr_y, offset.nyquist_x, offset.nyquist_y
                ));
            }
            return Err(HoloError::InvalidParameter(format!(
                "reference offset check failed: {}",
                why.join("; ")
            )));
        }
        Ok(Acquisition {
            grid,
            reference,
            params,
            offset,
        })
    }
}
