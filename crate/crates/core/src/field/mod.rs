//! Sampled aperture grids and the complex/real fields that live on them.
//!
//! Samples are stored row-major with x as the fastest axis: sample `(x, y)`
//! lives at index `y * nx + x`.

mod spectral;
mod transform;

pub use spectral::{centered_position, signed_frequency_index, SpectralGrid};
pub use transform::{center_spectrum, dft2, total_power, uncenter_spectrum, Direction};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};

/// Uniformly sampled 2D scan aperture. Spacings are in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

impl ScanGrid {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(HoloError::InvalidGrid(format!(
                "pixel counts must be at least 2, got {nx}x{ny}"
            )));
        }
        if !(dx.is_finite() && dx > 0.0 && dy.is_finite() && dy > 0.0) {
            return Err(HoloError::InvalidGrid(format!(
                "spacings must be finite and positive, got dx={dx}, dy={dy}"
            )));
        }
        Ok(Self { nx, ny, dx, dy })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical aperture extent `(nx*dx, ny*dy)` in mm.
    pub fn extent(&self) -> (f64, f64) {
        (self.nx as f64 * self.dx, self.ny as f64 * self.dy)
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.nx && y < self.ny);
        y * self.nx + x
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.nx, index / self.nx)
    }

    /// Physical position (mm) of sample `(x, y)` measured from the aperture centre.
    pub fn position(&self, x: usize, y: usize) -> (f64, f64) {
        (
            (x as f64 - (self.nx as f64 - 1.0) / 2.0) * self.dx,
            (y as f64 - (self.ny as f64 - 1.0) / 2.0) * self.dy,
        )
    }

    /// Same pixel counts and bit-identical spacings.
    pub fn same_as(&self, other: &ScanGrid) -> bool {
        self == other
    }

    pub(crate) fn ensure_same(&self, other: &ScanGrid, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(HoloError::GridMismatch(format!(
                "{what}: {}x{} @ ({}, {}) mm vs {}x{} @ ({}, {}) mm",
                self.nx, self.ny, self.dx, self.dy, other.nx, other.ny, other.dx, other.dy
            )))
        }
    }
}

fn check_count(grid: &ScanGrid, actual: usize) -> Result<()> {
    if actual != grid.len() {
        return Err(HoloError::SampleCount {
            nx: grid.nx,
            ny: grid.ny,
            actual,
        });
    }
    Ok(())
}

/// Complex scalar wavefield sampled on a [`ScanGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: ScanGrid,
    samples: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: ScanGrid, samples: Vec<Complex64>) -> Result<Self> {
        check_count(&grid, samples.len())?;
        if let Some(index) = samples
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            let (x, y) = grid.coords(index);
            return Err(HoloError::NonFinite { index, x, y });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: ScanGrid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Builds a field by evaluating `f(x, y)` at every sample.
    pub fn from_fn(grid: ScanGrid, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut samples = Vec::with_capacity(grid.len());
        for y in 0..grid.ny {
            for x in 0..grid.nx {
                samples.push(f(x, y));
            }
        }
        Self::new(grid, samples)
    }

    /// Caller guarantees the count and finiteness invariants.
    pub(crate) fn from_parts(grid: ScanGrid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &ScanGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        self.samples[self.grid.index(x, y)]
    }

    /// Applies a samplewise map; the result is re-validated.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<ComplexField> {
        ComplexField::new(self.grid, self.samples.iter().map(|&c| f(c)).collect())
    }

    pub fn scale(&self, factor: Complex64) -> Result<ComplexField> {
        self.map(|c| c * factor)
    }

    pub fn conj(&self) -> ComplexField {
        Self::from_parts(self.grid, self.samples.iter().map(|c| c.conj()).collect())
    }

    pub fn norm_sqr(&self) -> RealField {
        RealField::from_parts(self.grid, self.samples.iter().map(|c| c.norm_sqr()).collect())
    }

    /// Samplewise combination of two fields on the same grid.
    pub fn zip_with(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexField> {
        self.grid.ensure_same(&other.grid, "complex field operands")?;
        ComplexField::new(
            self.grid,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn real_part(&self) -> RealField {
        RealField::from_parts(self.grid, self.samples.iter().map(|c| c.re).collect())
    }
}

/// Real-valued samples on a [`ScanGrid`] (holograms, amplitude and phase images).
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: ScanGrid,
    samples: Vec<f64>,
}

impl RealField {
    pub fn new(grid: ScanGrid, samples: Vec<f64>) -> Result<Self> {
        check_count(&grid, samples.len())?;
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            let (x, y) = grid.coords(index);
            return Err(HoloError::NonFinite { index, x, y });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: ScanGrid) -> Self {
        Self::from_parts(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: ScanGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    pub fn from_fn(grid: ScanGrid, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut samples = Vec::with_capacity(grid.len());
        for y in 0..grid.ny {
            for x in 0..grid.nx {
                samples.push(f(x, y));
            }
        }
        Self::new(grid, samples)
    }

    pub(crate) fn from_parts(grid: ScanGrid, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &ScanGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.samples[self.grid.index(x, y)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<RealField> {
        RealField::new(self.grid, self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<RealField> {
        self.grid.ensure_same(&other.grid, "real field operands")?;
        RealField::new(
            self.grid,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// `(min, max)` over all samples.
    pub fn range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn sum_sqr(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField::from_parts(
            self.grid,
            self.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }
}
