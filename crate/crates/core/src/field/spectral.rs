use std::f64::consts::PI;

use super::ScanGrid;

/// Signed frequency index of unshifted DFT bin `m` on an `n`-point axis.
///
/// Even `n` yields `[-n/2, n/2)`, odd `n` yields `[-(n-1)/2, (n-1)/2]`.
pub fn signed_frequency_index(n: usize, m: usize) -> i64 {
    debug_assert!(m < n);
    if m < n - n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Array position of signed frequency index `k` in a centred spectrum.
/// Indices outside the representable band wrap around.
pub fn centered_position(n: usize, k: i64) -> usize {
    (k + (n / 2) as i64).rem_euclid(n as i64) as usize
}

/// Angular spatial frequencies (rad/mm) of a [`ScanGrid`] in centred order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    grid: ScanGrid,
    kx: Vec<f64>,
    ky: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(grid: ScanGrid) -> Self {
        let axis = |n: usize, d: f64| -> Vec<f64> {
            let step = 2.0 * PI / (n as f64 * d);
            (0..n)
                .map(|p| (p as i64 - (n / 2) as i64) as f64 * step)
                .collect()
        };
        Self {
            kx: axis(grid.nx(), grid.dx()),
            ky: axis(grid.ny(), grid.dy()),
            grid,
        }
    }

    pub fn grid(&self) -> &ScanGrid {
        &self.grid
    }

    /// Centred-order x frequencies.
    pub fn kx(&self) -> &[f64] {
        &self.kx
    }

    pub fn ky(&self) -> &[f64] {
        &self.ky
    }

    /// Bin spacing `2π/(N·d)` along each axis.
    pub fn bin_width(&self) -> (f64, f64) {
        (
            2.0 * PI / (self.grid.nx() as f64 * self.grid.dx()),
            2.0 * PI / (self.grid.ny() as f64 * self.grid.dy()),
        )
    }

    /// `(kx, ky)` of unshifted DFT bin `(m, n)`.
    pub fn unshifted(&self, m: usize, n: usize) -> (f64, f64) {
        let (bx, by) = self.bin_width();
        (
            signed_frequency_index(self.grid.nx(), m) as f64 * bx,
            signed_frequency_index(self.grid.ny(), n) as f64 * by,
        )
    }
}
