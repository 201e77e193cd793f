//! Binary grid files.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "HGRD"
//!      4     2  version (u16, currently 1)
//!      6     1  dtype: 1 = real, 2 = complex (re, im interleaved)
//!      7     1  reserved, 0
//!      8     4  nx (u32)
//!     12     4  ny (u32)
//!     16     8  dx in mm (f64)
//!     24     8  dy in mm (f64)
//!     32     …  nx·ny·(1|2) f64 values, row-major, x fastest
//! ```
//! All fields little-endian.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{HoloError, Result};
use crate::field::{ComplexField, RealField, ScanGrid};

pub const MAGIC: [u8; 4] = *b"HGRD";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;

const DTYPE_REAL: u8 = 1;
const DTYPE_COMPLEX: u8 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum GridData {
    Real(RealField),
    Complex(ComplexField),
}

impl GridData {
    pub fn grid(&self) -> &ScanGrid {
        match self {
            GridData::Real(f) => f.grid(),
            GridData::Complex(f) => f.grid(),
        }
    }
}

fn parse_err(offset: usize, reason: impl Into<String>) -> HoloError {
    HoloError::GridFormat {
        offset: offset as u64,
        reason: reason.into(),
    }
}

pub fn encode_grid(data: &GridData) -> Vec<u8> {
    let grid = data.grid();
    let (dtype, width) = match data {
        GridData::Real(_) => (DTYPE_REAL, 1),
        GridData::Complex(_) => (DTYPE_COMPLEX, 2),
    };
    let mut out = Vec::with_capacity(HEADER_LEN + grid.len() * width * 8);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(dtype);
    out.push(0);
    out.extend_from_slice(&(grid.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.ny() as u32).to_le_bytes());
    out.extend_from_slice(&grid.dx().to_le_bytes());
    out.extend_from_slice(&grid.dy().to_le_bytes());
    match data {
        GridData::Real(f) => f
            .samples()
            .iter()
            .for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        GridData::Complex(f) => f.samples().iter().for_each(|c| {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }),
    }
    out
}

fn f64_at(bytes: &[u8], offset: usize) -> f64 {
    f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap())
}

fn u32_at(bytes: &[u8], offset: usize) -> u32 {
    u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap())
}

pub fn decode_grid(bytes: &[u8]) -> Result<GridData> {
    if bytes.len() < HEADER_LEN {
        return Err(parse_err(
            bytes.len(),
            format!("truncated header: {} of {HEADER_LEN} bytes", bytes.len()),
        ));
    }
    if bytes[0..4] != MAGIC {
        return Err(parse_err(0, "bad magic"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(parse_err(4, format!("unsupported version {version}")));
    }
    let width = match bytes[6] {
        DTYPE_REAL => 1,
        DTYPE_COMPLEX => 2,
        other => return Err(parse_err(6, format!("unknown dtype tag {other}"))),
    };
    if bytes[7] != 0 {
        return Err(parse_err(7, "reserved byte is not zero"));
    }
    let nx = u32_at(bytes, 8) as usize;
    let ny = u32_at(bytes, 12) as usize;
    if nx < 2 {
        return Err(parse_err(8, format!("nx = {nx} is below 2")));
    }
    if ny < 2 {
        return Err(parse_err(12, format!("ny = {ny} is below 2")));
    }
    let dx = f64_at(bytes, 16);
    if !(dx.is_finite() && dx > 0.0) {
        return Err(parse_err(16, format!("dx = {dx} is not positive")));
    }
    let dy = f64_at(bytes, 24);
    if !(dy.is_finite() && dy > 0.0) {
        return Err(parse_err(24, format!("dy = {dy} is not positive")));
    }
    let grid = ScanGrid::new(nx, ny, dx, dy)?;

    let expected = nx
        .checked_mul(ny)
        .and_then(|n| n.checked_mul(width * 8))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| parse_err(8, "grid dimensions overflow"))?;
    if bytes.len() < expected {
        let complete = (bytes.len() - HEADER_LEN) / 8;
        return Err(parse_err(
            HEADER_LEN + complete * 8,
            format!(
                "truncated payload: expected {expected} bytes, found {}",
                bytes.len()
            ),
        ));
    }
    if bytes.len() > expected {
        return Err(parse_err(
            expected,
            format!("{} trailing bytes after payload", bytes.len() - expected),
        ));
    }

    let values: Vec<f64> = (0..grid.len() * width)
        .map(|i| f64_at(bytes, HEADER_LEN + i * 8))
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(parse_err(HEADER_LEN + i * 8, "non-finite sample"));
    }
    Ok(if width == 1 {
        GridData::Real(RealField::new(grid, values)?)
    } else {
        let samples = values
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        GridData::Complex(ComplexField::new(grid, samples)?)
    })
}

pub fn write_grid(path: impl AsRef<Path>, data: &GridData) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_grid(data)).map_err(|e| HoloError::io(path, e))
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<GridData> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| HoloError::io(path, e))?;
    decode_grid(&bytes)
}

pub fn read_real_grid(path: impl AsRef<Path>) -> Result<RealField> {
    match read_grid(path)? {
        GridData::Real(f) => Ok(f),
        GridData::Complex(_) => Err(parse_err(6, "expected a real grid, found complex")),
    }
}

/// Reads a complex grid; real grids are promoted.
pub fn read_complex_grid(path: impl AsRef<Path>) -> Result<ComplexField> {
    Ok(match read_grid(path)? {
        GridData::Real(f) => f.to_complex(),
        GridData::Complex(f) => f,
    })
}

pub fn write_real_grid(path: impl AsRef<Path>, field: &RealField) -> Result<()> {
    write_grid(path, &GridData::Real(field.clone()))
}

pub fn write_complex_grid(path: impl AsRef<Path>, field: &ComplexField) -> Result<()> {
    write_grid(path, &GridData::Complex(field.clone()))
}
