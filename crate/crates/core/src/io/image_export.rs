use std::path::Path;

use image::GrayImage;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::RealField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrayMapping {
    /// `[min, max] → [0, 255]`; a flat field maps to 128.
    MinMax,
    /// `(−π, π] → [0, 255]`.
    Phase,
}

pub fn to_gray_levels(field: &RealField, mapping: GrayMapping) -> Vec<u8> {
    let quantize = |t: f64| (t * 255.0).round().clamp(0.0, 255.0) as u8;
    match mapping {
        GrayMapping::MinMax => {
            let (lo, hi) = field.range();
            if hi <= lo {
                return vec![128; field.samples().len()];
            }
            field
                .samples()
                .iter()
                .map(|&v| quantize((v - lo) / (hi - lo)))
                .collect()
        }
        GrayMapping::Phase => field
            .samples()
            .iter()
            .map(|&v| quantize((v + std::f64::consts::PI) / (2.0 * std::f64::consts::PI)))
            .collect(),
    }
}

/// Writes an 8-bit grayscale PNG, one pixel per sample, grid row `y` as image row `y`.
pub fn export_grayscale(field: &RealField, mapping: GrayMapping, path: impl AsRef<Path>) -> Result<()> {
    let g = field.grid();
    let img = GrayImage::from_raw(g.nx() as u32, g.ny() as u32, to_gray_levels(field, mapping))
        .expect("buffer length matches grid");
    img.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}
