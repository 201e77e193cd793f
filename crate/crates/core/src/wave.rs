//! Forward model: scene reflectivity to scattered field at the recording plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::field::{dft2, ComplexField, Direction, RealField, ScanGrid, SpectralGrid};

/// Speed of light in mm/ns, so that GHz maps directly to rad/mm.
pub const SPEED_OF_LIGHT_MM_PER_NS: f64 = 299.792458;

/// Free-space wavenumber `2πf/c` in rad/mm for a frequency in GHz.
pub fn wavenumber(frequency_ghz: f64) -> Result<f64> {
    if !(frequency_ghz.is_finite() && frequency_ghz > 0.0) {
        return Err(HoloError::InvalidParameter(format!(
            "frequency must be positive, got {frequency_ghz} GHz"
        )));
    }
    Ok(2.0 * PI * frequency_ghz / SPEED_OF_LIGHT_MM_PER_NS)
}

/// Transmit/receive antenna separation giving both beams a common footprint
/// on a plane `ds` mm away: `da = 2·ds·tan(beam_angle)`.
pub fn antenna_separation(ds_mm: f64, beam_angle_deg: f64) -> Result<f64> {
    if !(ds_mm.is_finite() && ds_mm > 0.0) {
        return Err(HoloError::InvalidParameter(format!(
            "antenna-to-object distance must be positive, got {ds_mm} mm"
        )));
    }
    if !(beam_angle_deg > 0.0 && beam_angle_deg < 90.0) {
        return Err(HoloError::InvalidParameter(format!(
            "beam angle must lie in (0, 90) degrees, got {beam_angle_deg}"
        )));
    }
    Ok(2.0 * ds_mm * beam_angle_deg.to_radians().tan())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaGeometry {
    pub ds_mm: f64,
    pub beam_angle_deg: f64,
    pub separation_mm: f64,
}

impl AntennaGeometry {
    pub fn new(ds_mm: f64, beam_angle_deg: f64) -> Result<Self> {
        Ok(Self {
            ds_mm,
            beam_angle_deg,
            separation_mm: antenna_separation(ds_mm, beam_angle_deg)?,
        })
    }

    /// Slant path from either antenna to the shared spot; equal for both by construction.
    pub fn slant_range_mm(&self) -> f64 {
        self.ds_mm.hypot(self.separation_mm / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PropagationMode {
    /// Round trip: the propagation constant is `2k`.
    #[default]
    Monostatic,
    OneWay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationParams {
    frequency_ghz: f64,
    k: f64,
    mode: PropagationMode,
}

impl PropagationParams {
    pub fn new(frequency_ghz: f64, mode: PropagationMode) -> Result<Self> {
        Ok(Self {
            frequency_ghz,
            k: wavenumber(frequency_ghz)?,
            mode,
        })
    }

    pub fn frequency_ghz(&self) -> f64 {
        self.frequency_ghz
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn mode(&self) -> PropagationMode {
        self.mode
    }

    /// Radius of the propagating disc in k-space.
    pub fn kappa(&self) -> f64 {
        match self.mode {
            PropagationMode::Monostatic => 2.0 * self.k,
            PropagationMode::OneWay => self.k,
        }
    }

    pub fn wavelength_mm(&self) -> f64 {
        2.0 * PI / self.k
    }
}

/// Angular-spectrum propagation by `distance_mm` (negative propagates backwards).
///
/// Each plane-wave component is multiplied by `exp(-j·z·√(κ² − kx² − ky²))`;
/// evanescent components are dropped.
pub fn asm_propagate(
    field: &ComplexField,
    distance_mm: f64,
    params: &PropagationParams,
) -> ComplexField {
    let grid = *field.grid();
    let spectral = SpectralGrid::new(grid);
    let kappa_sq = params.kappa() * params.kappa();
    let spectrum = dft2(field, Direction::Forward);

    let mut data = spectrum.into_samples();
    for n in 0..grid.ny() {
        for m in 0..grid.nx() {
            let (kx, ky) = spectral.unshifted(m, n);
            let kz_sq = kappa_sq - kx * kx - ky * ky;
            let bin = &mut data[n * grid.nx() + m];
            if kz_sq < 0.0 {
                *bin = Complex64::new(0.0, 0.0);
            } else {
                *bin *= Complex64::from_polar(1.0, -distance_mm * kz_sq.sqrt());
            }
        }
    }
    dft2(&ComplexField::from_parts(grid, data), Direction::Inverse)
}

/// Planar reflectivity map placed `z0_mm` in front of the scan aperture.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    reflectivity: ComplexField,
    z0_mm: f64,
}

impl SceneSpec {
    pub fn new(reflectivity: ComplexField, z0_mm: f64) -> Result<Self> {
        if !(z0_mm.is_finite() && z0_mm > 0.0) {
            return Err(HoloError::InvalidParameter(format!(
                "standoff z0 must be positive, got {z0_mm} mm"
            )));
        }
        Ok(Self {
            reflectivity,
            z0_mm,
        })
    }

    pub fn grid(&self) -> &ScanGrid {
        self.reflectivity.grid()
    }

    pub fn reflectivity(&self) -> &ComplexField {
        &self.reflectivity
    }

    pub fn z0_mm(&self) -> f64 {
        self.z0_mm
    }

    /// Pixels with non-zero reflectivity.
    pub fn support(&self) -> Vec<bool> {
        self.reflectivity
            .samples()
            .iter()
            .map(|c| c.re != 0.0 || c.im != 0.0)
            .collect()
    }
}

/// Scattered object field at the recording plane under unit plane-wave
/// illumination, optionally weighted by a non-negative beam footprint.
pub fn simulate_scattered_field(
    scene: &SceneSpec,
    params: &PropagationParams,
    gain_taper: Option<&RealField>,
) -> Result<ComplexField> {
    let field = asm_propagate(scene.reflectivity(), scene.z0_mm(), params);
    match gain_taper {
        None => Ok(field),
        Some(taper) => {
            taper.grid().ensure_same(scene.grid(), "gain taper vs scene")?;
            if let Some(i) = taper.samples().iter().position(|&g| g < 0.0) {
                return Err(HoloError::InvalidParameter(format!(
                    "gain taper is negative at sample {i}"
                )));
            }
            let samples = field
                .samples()
                .iter()
                .zip(taper.samples())
                .map(|(&c, &g)| c * g)
                .collect();
            ComplexField::new(*field.grid(), samples)
        }
    }
}
