//! Angular-spectrum back-propagation to the object plane, amplitude and wrapped phase.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HoloError, Result};
use crate::field::{dft2, uncenter_spectrum, ComplexField, Direction, RealField, SpectralGrid};
use crate::wave::PropagationParams;

/// Propagates a centred baseband spectrum from the recording plane back to
/// the object plane `z0_mm` away. The kernel is the conjugate of the one
/// [`crate::wave::asm_propagate`] applies for `+z0_mm`, so the two compose to
/// the identity on propagating content.
pub fn backpropagate(
    baseband: &ComplexField,
    z0_mm: f64,
    params: &PropagationParams,
) -> Result<ComplexField> {
    if !(z0_mm.is_finite() && z0_mm >= 0.0) {
        return Err(HoloError::InvalidParameter(format!(
            "reconstruction distance must be non-negative, got {z0_mm} mm"
        )));
    }
    let grid = *baseband.grid();
    let spectral = SpectralGrid::new(grid);
    let kappa_sq = params.kappa() * params.kappa();
    let mut data = uncenter_spectrum(baseband).into_samples();
    if z0_mm > 0.0 {
        for n in 0..grid.ny() {
            for m in 0..grid.nx() {
                let (kx, ky) = spectral.unshifted(m, n);
                let kz_sq = kappa_sq - kx * kx - ky * ky;
                let bin = &mut data[n * grid.nx() + m];
                if kz_sq < 0.0 {
                    *bin = Complex64::new(0.0, 0.0);
                } else {
                    *bin *= Complex64::from_polar(1.0, z0_mm * kz_sq.sqrt());
                }
            }
        }
    }
    Ok(dft2(&ComplexField::from_parts(grid, data), Direction::Inverse))
}

pub fn amplitude_image(e: &ComplexField) -> RealField {
    RealField::from_parts(*e.grid(), e.samples().iter().map(|c| c.norm()).collect())
}

/// Four-quadrant phase in `(−π, π]`; exactly-zero samples map to 0.
pub fn wrapped_phase(e: &ComplexField) -> RealField {
    let phase = e
        .samples()
        .iter()
        .map(|c| {
            if c.re == 0.0 && c.im == 0.0 {
                0.0
            } else {
                let p = c.im.atan2(c.re);
                if p <= -PI {
                    PI
                } else {
                    p
                }
            }
        })
        .collect();
    RealField::from_parts(*e.grid(), phase)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub field: ComplexField,
    pub amplitude: RealField,
    pub wrapped_phase: RealField,
    pub z0_mm: f64,
    pub params: PropagationParams,
}

/// Back-propagates a baseband spectrum and derives amplitude and phase images.
pub fn reconstruct(
    baseband: &ComplexField,
    z0_mm: f64,
    params: &PropagationParams,
) -> Result<ReconstructionResult> {
    let field = backpropagate(baseband, z0_mm, params)?;
    Ok(ReconstructionResult {
        amplitude: amplitude_image(&field),
        wrapped_phase: wrapped_phase(&field),
        field,
        z0_mm,
        params: *params,
    })
}
