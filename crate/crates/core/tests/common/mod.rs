//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use microholo::field::{ComplexField, RealField, ScanGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct O(N⁴) forward DFT, unscaled, `exp(-j2π(km/M + ln/N))`.
pub fn brute_dft(f: &ComplexField) -> Vec<Complex64> {
    let g = f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = vec![Complex64::new(0.0, 0.0); nx * ny];
    for l in 0..ny {
        for k in 0..nx {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..ny {
                for m in 0..nx {
                    let phase = -2.0 * PI * ((k * m) as f64 / nx as f64 + (l * n) as f64 / ny as f64);
                    acc += f.at(m, n) * Complex64::from_polar(1.0, phase);
                }
            }
            out[l * nx + k] = acc;
        }
    }
    out
}

/// Rayleigh–Sommerfeld (first kind) field at `(x, y, z)` of a point source
/// of strength `area` at the origin, for `exp(-jkr)` outgoing waves.
pub fn rayleigh_sommerfeld(k: f64, area: f64, x: f64, y: f64, z: f64) -> Complex64 {
    let r = (x * x + y * y + z * z).sqrt();
    let obliquity = Complex64::new(1.0 / r, k);
    Complex64::from_polar(area * z / (2.0 * PI * r * r), -k * r) * obliquity
}

/// Sliding-window speckle index with reflected borders, computed with the
/// textbook two-pass mean and variance.
pub fn brute_speckle_index(img: &RealField, window: usize) -> f64 {
    let g = img.grid();
    let (nx, ny) = (g.nx() as isize, g.ny() as isize);
    let r = (window / 2) as isize;
    let reflect = |i: isize, n: isize| if i < 0 { -i - 1 } else if i >= n { 2 * n - i - 1 } else { i };
    let mut total = 0.0;
    let mut count = 0;
    for y in 0..ny {
        for x in 0..nx {
            let mut vals = Vec::new();
            for wy in -r..=r {
                for wx in -r..=r {
                    vals.push(img.at(reflect(x + wx, nx) as usize, reflect(y + wy, ny) as usize));
                }
            }
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
            if mean > 0.0 {
                total += var.sqrt() / mean;
                count += 1;
            }
        }
    }
    total / count as f64
}

pub fn checkerboard(n: usize, lo: f64, hi: f64) -> RealField {
    let g = ScanGrid::new(n, n, 1.0, 1.0).unwrap();
    RealField::from_fn(g, |x, y| if (x + y) % 2 == 0 { lo } else { hi }).unwrap()
}

/// Random complex field whose centred spectrum is confined to a disc of
/// `radius` bins around DC.
pub fn band_limited(grid: ScanGrid, radius: f64, seed: u64) -> ComplexField {
    use microholo::field::{dft2, uncenter_spectrum, Direction};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = move || rng.random_range(-0.5..0.5);
    let (cx, cy) = ((grid.nx() / 2) as f64, (grid.ny() / 2) as f64);
    let spectrum = ComplexField::from_fn(grid, |x, y| {
        let (a, b) = (next(), next());
        if (x as f64 - cx).hypot(y as f64 - cy) <= radius {
            Complex64::new(a, b)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .unwrap();
    dft2(&uncenter_spectrum(&spectrum), Direction::Inverse)
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

pub fn l2(a: &[Complex64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative L2 amplitude error of one-way ASM against the Rayleigh–Sommerfeld
/// sum for a single-pixel source on a 64×64 × 5 mm grid, over the central
/// 16×16 samples.
pub fn asm_point_source_error(frequency_ghz: f64, z_mm: f64) -> f64 {
    use microholo::wave::{asm_propagate, PropagationMode, PropagationParams};
    let n = 64;
    let d = 5.0;
    let g = ScanGrid::new(n, n, d, d).unwrap();
    let c = n / 2;
    let source = ComplexField::from_fn(g, |x, y| {
        if (x, y) == (c, c) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
    })
    .unwrap();
    let params = PropagationParams::new(frequency_ghz, PropagationMode::OneWay).unwrap();
    let asm = asm_propagate(&source, z_mm, &params);
    let (mut num, mut den) = (0.0, 0.0);
    for y in c - 8..c + 8 {
        for x in c - 8..c + 8 {
            let (px, py) = ((x as f64 - c as f64) * d, (y as f64 - c as f64) * d);
            let rs = rayleigh_sommerfeld(params.k(), d * d, px, py, z_mm).norm();
            num += (asm.at(x, y).norm() - rs).powi(2);
            den += rs * rs;
        }
    }
    (num / den).sqrt()
}
