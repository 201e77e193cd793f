//! Speckle-index SNR and windowed SSIM.
//!
//! Both metrics use uniform square windows with symmetric-reflection
//! boundaries (`…, 1, 0 | 0, 1, …`).

use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::field::RealField;

pub const DEFAULT_WINDOW: usize = 7;
pub const K1: f64 = 0.01;
pub const K2: f64 = 0.03;

fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let r = if i < 0 {
        -i - 1
    } else if i >= n {
        2 * n - i - 1
    } else {
        i
    };
    r as usize
}

fn check_window(img: &RealField, window: usize) -> Result<()> {
    let g = img.grid();
    if window < 3 || window.is_multiple_of(2) || window > g.nx().min(g.ny()) {
        return Err(HoloError::InvalidParameter(format!(
            "metric window must be odd, at least 3 and at most {}, got {window}",
            g.nx().min(g.ny())
        )));
    }
    Ok(())
}

/// Windowed first and second moments of one or two images.
///
/// Sums are accumulated relative to the window's first sample so that flat
/// windows give an exactly-zero variance.
struct WindowMoments {
    mean_x: f64,
    mean_y: f64,
    var_x: f64,
    var_y: f64,
    cov: f64,
}

fn for_each_window(x: &RealField, y: &RealField, window: usize, mut f: impl FnMut(WindowMoments)) {
    let g = *x.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let r = (window / 2) as isize;
    let count = (window * window) as f64;
    let (xs, ys) = (x.samples(), y.samples());
    for py in 0..ny as isize {
        for px in 0..nx as isize {
            let origin = reflect(py - r, ny) * nx + reflect(px - r, nx);
            let (x0, y0) = (xs[origin], ys[origin]);
            let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for wy in -r..=r {
                let row = reflect(py + wy, ny) * nx;
                for wx in -r..=r {
                    let i = row + reflect(px + wx, nx);
                    let (dx, dy) = (xs[i] - x0, ys[i] - y0);
                    sx += dx;
                    sy += dy;
                    sxx += dx * dx;
                    syy += dy * dy;
                    sxy += dx * dy;
                }
            }
            let (mx, my) = (sx / count, sy / count);
            f(WindowMoments {
                mean_x: x0 + mx,
                mean_y: y0 + my,
                var_x: (sxx / count - mx * mx).max(0.0),
                var_y: (syy / count - my * my).max(0.0),
                cov: sxy / count - mx * my,
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeckleStats {
    pub speckle_index: f64,
    pub valid_pixels: usize,
    /// Pixels whose local mean is zero and were left out of the average.
    pub excluded_pixels: usize,
}

pub fn speckle_stats(img: &RealField, window: usize) -> Result<SpeckleStats> {
    check_window(img, window)?;
    if let Some(i) = img.samples().iter().position(|&v| v < 0.0) {
        return Err(HoloError::InvalidParameter(format!(
            "speckle index needs a non-negative image, sample {i} is negative"
        )));
    }
    let (mut total, mut valid, mut excluded) = (0.0, 0usize, 0usize);
    for_each_window(img, img, window, |m| {
        if m.mean_x > 0.0 {
            total += m.var_x.sqrt() / m.mean_x;
            valid += 1;
        } else {
            excluded += 1;
        }
    });
    if valid == 0 {
        return Err(HoloError::UndefinedMetric(
            "speckle index of an all-zero image".into(),
        ));
    }
    Ok(SpeckleStats {
        speckle_index: total / valid as f64,
        valid_pixels: valid,
        excluded_pixels: excluded,
    })
}

/// Mean over pixels of local `√var / mean`.
pub fn speckle_index(img: &RealField, window: usize) -> Result<f64> {
    speckle_stats(img, window).map(|s| s.speckle_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Snr {
    Finite(f64),
    /// Speckle index is exactly zero.
    Unbounded,
}

impl Snr {
    pub fn from_speckle_index(si: f64) -> Self {
        if si == 0.0 {
            Snr::Unbounded
        } else {
            Snr::Finite(1.0 / si)
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Snr::Finite(v) => Some(*v),
            Snr::Unbounded => None,
        }
    }
}

impl std::fmt::Display for Snr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Snr::Finite(v) => write!(f, "{v:.6}"),
            Snr::Unbounded => f.write_str("unbounded"),
        }
    }
}

pub fn snr(img: &RealField, window: usize) -> Result<Snr> {
    speckle_index(img, window).map(Snr::from_speckle_index)
}

/// SSIM stabilisers `((K1·L)², (K2·L)²)`.
pub fn stabilizers(dynamic_range: f64) -> (f64, f64) {
    ((K1 * dynamic_range).powi(2), (K2 * dynamic_range).powi(2))
}

/// Mean of the local SSIM map.
pub fn ssim(x: &RealField, y: &RealField, window: usize, dynamic_range: f64) -> Result<f64> {
    x.grid().ensure_same(y.grid(), "ssim operands")?;
    check_window(x, window)?;
    if !(dynamic_range.is_finite() && dynamic_range > 0.0) {
        return Err(HoloError::InvalidParameter(format!(
            "dynamic range must be positive, got {dynamic_range}"
        )));
    }
    let (c1, c2) = stabilizers(dynamic_range);
    let mut total = 0.0;
    for_each_window(x, y, window, |m| {
        total += ((2.0 * m.mean_x * m.mean_y + c1) * (2.0 * m.cov + c2))
            / ((m.mean_x * m.mean_x + m.mean_y * m.mean_y + c1) * (m.var_x + m.var_y + c2));
    });
    Ok(total / x.samples().len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub speckle_index: f64,
    pub snr: Snr,
    pub ssim: Option<f64>,
    pub window: usize,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub excluded_pixels: usize,
}

impl QualityReport {
    /// Speckle/SNR of `img`, plus SSIM against `reference` when given.
    pub fn evaluate(
        img: &RealField,
        reference: Option<&RealField>,
        window: usize,
        dynamic_range: f64,
    ) -> Result<Self> {
        let stats = speckle_stats(img, window)?;
        let (ssim_value, c1, c2) = match reference {
            Some(r) => {
                let (c1, c2) = stabilizers(dynamic_range);
                (Some(ssim(r, img, window, dynamic_range)?), Some(c1), Some(c2))
            }
            None => (None, None, None),
        };
        Ok(Self {
            speckle_index: stats.speckle_index,
            snr: Snr::from_speckle_index(stats.speckle_index),
            ssim: ssim_value,
            window,
            c1,
            c2,
            excluded_pixels: stats.excluded_pixels,
        })
    }
}
