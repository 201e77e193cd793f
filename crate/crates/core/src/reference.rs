//! Synthesized reference wave `R = E0·exp(-j·kr·(x + y))`, realised by
//! stepping the reference phase by a fixed increment per scan sample.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::field::{ComplexField, ScanGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceWaveSpec {
    grid: ScanGrid,
    e0: f64,
    phase_step_x: f64,
    phase_step_y: f64,
}

fn check_step(step: f64, axis: &str) -> Result<()> {
    if !(step > 0.0 && step < 2.0 * PI) {
        return Err(HoloError::InvalidParameter(format!(
            "phase step along {axis} must lie in (0, 2π), got {step} rad"
        )));
    }
    Ok(())
}

impl ReferenceWaveSpec {
    /// Same phase increment along both scan axes.
    pub fn new(grid: ScanGrid, e0: f64, phase_step: f64) -> Result<Self> {
        Self::with_steps(grid, e0, phase_step, phase_step)
    }

    pub fn with_steps(grid: ScanGrid, e0: f64, phase_step_x: f64, phase_step_y: f64) -> Result<Self> {
        if !(e0.is_finite() && e0 > 0.0) {
            return Err(HoloError::InvalidParameter(format!(
                "reference amplitude must be positive, got {e0}"
            )));
        }
        check_step(phase_step_x, "x")?;
        check_step(phase_step_y, "y")?;
        Ok(Self {
            grid,
            e0,
            phase_step_x,
            phase_step_y,
        })
    }

    pub fn grid(&self) -> &ScanGrid {
        &self.grid
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn phase_steps(&self) -> (f64, f64) {
        (self.phase_step_x, self.phase_step_y)
    }

    /// Offset wave vector `(Δφx/dx, Δφy/dy)` in rad/mm.
    pub fn offset_wave_vector(&self) -> (f64, f64) {
        (
            self.phase_step_x / self.grid.dx(),
            self.phase_step_y / self.grid.dy(),
        )
    }

    /// Carrier position in (fractional) DFT bins, `Δφ·N/(2π)` per axis.
    pub fn carrier_bins(&self) -> (f64, f64) {
        (
            self.phase_step_x * self.grid.nx() as f64 / (2.0 * PI),
            self.phase_step_y * self.grid.ny() as f64 / (2.0 * PI),
        )
    }
}

pub fn synthesize_reference(spec: &ReferenceWaveSpec) -> ComplexField {
    let (sx, sy) = spec.phase_steps();
    let e0 = spec.e0();
    let grid = *spec.grid();
    let samples = (0..grid.ny())
        .flat_map(|n| {
            (0..grid.nx()).map(move |m| Complex64::from_polar(e0, -(sx * m as f64 + sy * n as f64)))
        })
        .collect();
    ComplexField::from_parts(grid, samples)
}

/// Outcome of the carrier-offset sampling check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetReport {
    pub kr_x: f64,
    pub kr_y: f64,
    pub two_k: f64,
    pub nyquist_x: f64,
    pub nyquist_y: f64,
    /// One-way λ/6 in mm, listed next to the configured spacing for comparison.
    pub lambda_over_six_mm: f64,
    pub dx: f64,
    pub dy: f64,
    pub separates_orders: bool,
    pub below_nyquist: bool,
    pub passed: bool,
}

impl std::fmt::Display for OffsetReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "kr = ({:.5}, {:.5}) rad/mm, 2k = {:.5} rad/mm, Nyquist = ({:.5}, {:.5}) rad/mm: {}",
            self.kr_x,
            self.kr_y,
            self.two_k,
            self.nyquist_x,
            self.nyquist_y,
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// Checks `kr ≥ 2k` (inclusive) and `kr ≤ π/d` on both axes.
pub fn validate_offset(spec: &ReferenceWaveSpec, k: f64) -> OffsetReport {
    let (kr_x, kr_y) = spec.offset_wave_vector();
    let two_k = 2.0 * k;
    let (dx, dy) = (spec.grid().dx(), spec.grid().dy());
    let nyquist_x = PI / dx;
    let nyquist_y = PI / dy;
    let separates_orders = kr_x >= two_k && kr_y >= two_k;
    let below_nyquist = kr_x <= nyquist_x && kr_y <= nyquist_y;
    OffsetReport {
        kr_x,
        kr_y,
        two_k,
        nyquist_x,
        nyquist_y,
        lambda_over_six_mm: 2.0 * PI / (6.0 * k),
        dx,
        dy,
        separates_orders,
        below_nyquist,
        passed: separates_orders && below_nyquist,
    }
}
