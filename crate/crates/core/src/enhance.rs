//! Resolution enhancement: an interpolated upscale plus an additive
//! high-frequency residual, either estimated in place or loaded from a file
//! produced by an external model.
//!
//! Upscaling is pixel-area aligned: output pixel `i` samples the input at
//! `(i + 0.5)/f − 0.5`, so block-averaging an upscale returns to the input
//! grid without a sub-pixel shift.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::field::{RealField, ScanGrid};
use crate::io::read_real_grid;
use crate::metrics::{ssim, DEFAULT_WINDOW};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnhancerKind {
    Bicubic,
    ResidualSharpen { residual_gain: f64 },
    External { residual_path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enhancer {
    #[serde(flatten)]
    pub kind: EnhancerKind,
    pub scale_factor: usize,
}

impl Default for Enhancer {
    fn default() -> Self {
        Self {
            kind: EnhancerKind::ResidualSharpen { residual_gain: 1.0 },
            scale_factor: 4,
        }
    }
}

impl Enhancer {
    pub fn validate(&self) -> Result<()> {
        if self.scale_factor < 1 {
            return Err(HoloError::InvalidParameter(
                "scale factor must be at least 1".into(),
            ));
        }
        if let EnhancerKind::ResidualSharpen { residual_gain } = self.kind {
            if !(residual_gain.is_finite() && residual_gain >= 0.0) {
                return Err(HoloError::InvalidParameter(format!(
                    "residual gain must be non-negative, got {residual_gain}"
                )));
            }
        }
        Ok(())
    }
}

/// Keys cubic convolution kernel, `a = -0.5`.
fn keys(t: f64) -> f64 {
    const A: f64 = -0.5;
    let t = t.abs();
    if t <= 1.0 {
        (A + 2.0) * t * t * t - (A + 3.0) * t * t + 1.0
    } else if t < 2.0 {
        A * t * t * t - 5.0 * A * t * t + 8.0 * A * t - 4.0 * A
    } else {
        0.0
    }
}

/// Sample `j` of `line`, linearly extrapolated past either end.
fn sample_extended(line: &[f64], j: isize) -> f64 {
    let last = line.len() as isize - 1;
    if j < 0 {
        line[0] + j as f64 * (line[1] - line[0])
    } else if j > last {
        line[last as usize] + (j - last) as f64 * (line[last as usize] - line[last as usize - 1])
    } else {
        line[j as usize]
    }
}

fn upscale_line(line: &[f64], factor: usize, out: &mut Vec<f64>) {
    let f = factor as f64;
    for i in 0..line.len() * factor {
        let pos = (i as f64 + 0.5) / f - 0.5;
        let base = pos.floor();
        let t = pos - base;
        let j = base as isize;
        out.push(
            (-1..=2)
                .map(|o| sample_extended(line, j + o) * keys(t - o as f64))
                .sum(),
        );
    }
}

fn upscaled_grid(grid: &ScanGrid, factor: usize) -> Result<ScanGrid> {
    ScanGrid::new(
        grid.nx() * factor,
        grid.ny() * factor,
        grid.dx() / factor as f64,
        grid.dy() / factor as f64,
    )
}

/// Separable bicubic upscale by an integer factor.
pub fn upscale_bicubic(img: &RealField, factor: usize) -> Result<RealField> {
    if factor < 1 {
        return Err(HoloError::InvalidParameter(
            "upscale factor must be at least 1".into(),
        ));
    }
    let g = *img.grid();
    let out_grid = upscaled_grid(&g, factor)?;
    let (nx, ny) = (g.nx(), g.ny());
    let wide = nx * factor;

    let mut rows = Vec::with_capacity(wide * ny);
    for y in 0..ny {
        upscale_line(&img.samples()[y * nx..(y + 1) * nx], factor, &mut rows);
    }
    let mut out = vec![0.0; wide * ny * factor];
    let mut column = Vec::with_capacity(ny);
    let mut expanded = Vec::with_capacity(ny * factor);
    for x in 0..wide {
        column.clear();
        column.extend((0..ny).map(|y| rows[y * wide + x]));
        expanded.clear();
        upscale_line(&column, factor, &mut expanded);
        for (y, v) in expanded.iter().enumerate() {
            out[y * wide + x] = *v;
        }
    }
    RealField::new(out_grid, out)
}

/// Pixel replication by an integer factor.
pub fn upscale_nearest(img: &RealField, factor: usize) -> Result<RealField> {
    if factor < 1 {
        return Err(HoloError::InvalidParameter(
            "upscale factor must be at least 1".into(),
        ));
    }
    let out_grid = upscaled_grid(img.grid(), factor)?;
    RealField::from_fn(out_grid, |x, y| img.at(x / factor, y / factor))
}

/// Averages `fx × fy` blocks.
pub fn block_average(img: &RealField, fx: usize, fy: usize) -> Result<RealField> {
    let g = img.grid();
    if fx == 0 || fy == 0 || !g.nx().is_multiple_of(fx) || !g.ny().is_multiple_of(fy) {
        return Err(HoloError::GridMismatch(format!(
            "{}x{} is not divisible into {fx}x{fy} blocks",
            g.nx(),
            g.ny()
        )));
    }
    let out_grid = ScanGrid::new(
        g.nx() / fx,
        g.ny() / fy,
        g.dx() * fx as f64,
        g.dy() * fy as f64,
    )?;
    let norm = (fx * fy) as f64;
    RealField::from_fn(out_grid, |x, y| {
        let mut acc = 0.0;
        for by in 0..fy {
            for bx in 0..fx {
                acc += img.at(x * fx + bx, y * fy + by);
            }
        }
        acc / norm
    })
}

/// 3×3 uniform low-pass with symmetric-reflection edges.
fn box3(img: &RealField) -> RealField {
    let g = *img.grid();
    let (nx, ny) = (g.nx() as isize, g.ny() as isize);
    let clampr = |i: isize, n: isize| -> usize {
        if i < 0 {
            (-i - 1) as usize
        } else if i >= n {
            (2 * n - i - 1) as usize
        } else {
            i as usize
        }
    };
    let s = img.samples();
    let mut out = Vec::with_capacity(s.len());
    for y in 0..ny {
        for x in 0..nx {
            let mut acc = 0.0;
            for oy in -1..=1 {
                let row = clampr(y + oy, ny) * nx as usize;
                for ox in -1..=1 {
                    acc += s[row + clampr(x + ox, nx)];
                }
            }
            out.push(acc / 9.0);
        }
    }
    RealField::from_parts(g, out)
}

pub fn enhance(img: &RealField, enhancer: &Enhancer) -> Result<RealField> {
    enhancer.validate()?;
    let up = upscale_bicubic(img, enhancer.scale_factor)?;
    match &enhancer.kind {
        EnhancerKind::Bicubic => Ok(up),
        EnhancerKind::ResidualSharpen { residual_gain } => {
            let low = box3(&up);
            let (lo, hi) = up.range();
            up.zip_with(&low, |u, l| (u + residual_gain * (u - l)).clamp(lo, hi))
        }
        EnhancerKind::External { residual_path } => {
            let residual = read_real_grid(residual_path)?;
            residual
                .grid()
                .ensure_same(up.grid(), "external residual vs upscaled image")?;
            up.zip_with(&residual, |u, r| u + r)
        }
    }
}

/// Largest odd SSIM window that fits the grid, capped at the default.
fn fitting_window(grid: &ScanGrid) -> usize {
    let limit = grid.nx().min(grid.ny()).min(DEFAULT_WINDOW);
    if limit.is_multiple_of(2) {
        limit - 1
    } else {
        limit
    }
}

/// Block-averages `enhanced` back onto the grid of `original` and scores the
/// pair with SSIM. The dynamic range is that of `original` (1 if flat).
pub fn structural_fidelity_check(original: &RealField, enhanced: &RealField) -> Result<f64> {
    let (go, ge) = (original.grid(), enhanced.grid());
    if ge.nx() % go.nx() != 0 || ge.ny() % go.ny() != 0 {
        return Err(HoloError::GridMismatch(format!(
            "enhanced grid {}x{} is not an integer multiple of {}x{}",
            ge.nx(),
            ge.ny(),
            go.nx(),
            go.ny()
        )));
    }
    let down = block_average(enhanced, ge.nx() / go.nx(), ge.ny() / go.ny())?;
    let down = RealField::new(*go, down.into_samples())?;
    let (lo, hi) = original.range();
    let range = if hi > lo { hi - lo } else { 1.0 };
    ssim(original, &down, fitting_window(go), range)
}
