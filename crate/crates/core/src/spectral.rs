//! Hologram spectrum, diffraction-order location and +1 order demodulation.
//!
//! Bin coordinates are signed frequency indices in a centred spectrum: DC is
//! `(0, 0)` and the `+1` order (the `O·R*` term) sits at `+Δφ·N/(2π)` per axis
//! under the forward `exp(-j…)` transform.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::field::{
    center_spectrum, centered_position, dft2, uncenter_spectrum, ComplexField, Direction, ScanGrid,
};
use crate::hologram::Hologram;
use crate::reference::ReferenceWaveSpec;

/// Half-width of the search box around the predicted +1 order.
const SEARCH_HALF_WIDTH: i64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderMap {
    pub dc: [i64; 2],
    pub plus_one: [i64; 2],
    pub minus_one: [i64; 2],
    pub predicted_plus_one: [f64; 2],
}

impl OrderMap {
    /// Chebyshev distance of the +1 order from DC, in bins.
    pub fn plus_one_distance(&self) -> usize {
        self.plus_one[0].unsigned_abs().max(self.plus_one[1].unsigned_abs()) as usize
    }
}

/// Wraps a signed bin index into the representable band of an `n`-point axis.
fn wrap_signed(n: usize, k: i64) -> i64 {
    centered_position(n, k) as i64 - (n / 2) as i64
}

/// Centred spectrum of a real hologram.
pub fn hologram_spectrum(h: &Hologram) -> ComplexField {
    center_spectrum(&dft2(&h.data().to_complex(), Direction::Forward))
}

pub fn locate_orders(spectrum: &ComplexField, reference: &ReferenceWaveSpec) -> Result<OrderMap> {
    let grid = *spectrum.grid();
    grid.ensure_same(reference.grid(), "spectrum vs reference spec")?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let (px, py) = reference.carrier_bins();
    if px > nx as f64 / 2.0 || py > ny as f64 / 2.0 {
        return Err(HoloError::Aliased(format!(
            "+1 order predicted at ({px:.3}, {py:.3}) bins, beyond Nyquist ({}, {})",
            nx / 2,
            ny / 2
        )));
    }

    let (cx, cy) = (px.round() as i64, py.round() as i64);
    let mut best: Option<([i64; 2], f64)> = None;
    for oy in -SEARCH_HALF_WIDTH..=SEARCH_HALF_WIDTH {
        for ox in -SEARCH_HALF_WIDTH..=SEARCH_HALF_WIDTH {
            let kx = wrap_signed(nx, cx + ox);
            let ky = wrap_signed(ny, cy + oy);
            if kx.abs() <= 1 && ky.abs() <= 1 {
                continue;
            }
            let mag = spectrum
                .at(centered_position(nx, kx), centered_position(ny, ky))
                .norm();
            if best.is_none_or(|(_, m)| mag > m) {
                best = Some(([kx, ky], mag));
            }
        }
    }
    let plus_one = best
        .map(|(bin, _)| bin)
        .ok_or_else(|| HoloError::Aliased("+1 order search box lies entirely on DC".into()))?;
    Ok(OrderMap {
        dc: [0, 0],
        plus_one,
        minus_one: [wrap_signed(nx, -plus_one[0]), wrap_signed(ny, -plus_one[1])],
        predicted_plus_one: [px, py],
    })
}

/// Default window radius: `⌊min(|+1|∞ − 1, N/6)⌋` with `N` the smaller grid side.
pub fn default_radius(map: &OrderMap, grid: &ScanGrid) -> usize {
    let n = grid.nx().min(grid.ny());
    map.plus_one_distance().saturating_sub(1).min(n / 6).max(1)
}

/// Removes the fractional carrier `predicted − center` with a spatial phase
/// ramp, then keeps a hard circular window of `radius` bins around `center`
/// and shifts it to DC. Input and output are centred spectra.
pub fn extract_order(
    spectrum: &ComplexField,
    center: [i64; 2],
    predicted: [f64; 2],
    radius: usize,
) -> ComplexField {
    let grid = *spectrum.grid();
    let (nx, ny) = (grid.nx(), grid.ny());

    let residual = [predicted[0] - center[0] as f64, predicted[1] - center[1] as f64];
    let spectrum = if residual == [0.0, 0.0] {
        spectrum.clone()
    } else {
        let spatial = dft2(&uncenter_spectrum(spectrum), Direction::Inverse);
        let (fx, fy) = (residual[0] / nx as f64, residual[1] / ny as f64);
        let corrected: Vec<Complex64> = spatial
            .samples()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let (m, n) = grid.coords(i);
                c * Complex64::from_polar(1.0, -2.0 * PI * (fx * m as f64 + fy * n as f64))
            })
            .collect();
        center_spectrum(&dft2(
            &ComplexField::from_parts(grid, corrected),
            Direction::Forward,
        ))
    };

    let r_sq = (radius * radius) as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for py in 0..ny {
        let ky = py as i64 - (ny / 2) as i64;
        let dy = wrap_signed(ny, ky - center[1]);
        for px in 0..nx {
            let kx = px as i64 - (nx / 2) as i64;
            let dx = wrap_signed(nx, kx - center[0]);
            if dx * dx + dy * dy <= r_sq {
                let target = centered_position(ny, dy) * nx + centered_position(nx, dx);
                out[target] = spectrum.samples()[py * nx + px];
            }
        }
    }
    ComplexField::from_parts(grid, out)
}

/// Demodulated +1 order as a centred baseband spectrum.
pub fn extract_plus_one(spectrum: &ComplexField, map: &OrderMap, radius: usize) -> Result<ComplexField> {
    let distance = map.plus_one_distance();
    if radius == 0 || radius >= distance {
        return Err(HoloError::WindowOverlapsDc { radius, distance });
    }
    Ok(extract_order(
        spectrum,
        map.plus_one,
        map.predicted_plus_one,
        radius,
    ))
}

/// The mirror image of [`extract_plus_one`] at the −1 order.
pub fn extract_minus_one(spectrum: &ComplexField, map: &OrderMap, radius: usize) -> Result<ComplexField> {
    let distance = map.plus_one_distance();
    if radius == 0 || radius >= distance {
        return Err(HoloError::WindowOverlapsDc { radius, distance });
    }
    Ok(extract_order(
        spectrum,
        map.minus_one,
        [-map.predicted_plus_one[0], -map.predicted_plus_one[1]],
        radius,
    ))
}
