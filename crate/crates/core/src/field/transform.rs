use num_complex::Complex64;
use rustfft::FftPlanner;

use super::ComplexField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Unscaled, `exp(-j 2π mk/N)` kernel.
    Forward,
    /// Scaled by `1/(nx·ny)`.
    Inverse,
}

/// Separable 2D DFT. The output is in natural (unshifted) bin order.
pub fn dft2(field: &ComplexField, direction: Direction) -> ComplexField {
    let grid = *field.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = match direction {
        Direction::Forward => (planner.plan_fft_forward(nx), planner.plan_fft_forward(ny)),
        Direction::Inverse => (planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny)),
    };

    let mut data = field.samples().to_vec();
    row_fft.process(&mut data);

    let mut column = vec![Complex64::new(0.0, 0.0); ny];
    for x in 0..nx {
        for (y, c) in column.iter_mut().enumerate() {
            *c = data[y * nx + x];
        }
        col_fft.process(&mut column);
        for (y, c) in column.iter().enumerate() {
            data[y * nx + x] = *c;
        }
    }

    if direction == Direction::Inverse {
        let scale = 1.0 / (nx * ny) as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }
    ComplexField::from_parts(grid, data)
}

fn roll(field: &ComplexField, shift_x: usize, shift_y: usize) -> ComplexField {
    let grid = *field.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let src = field.samples();
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for y in 0..ny {
        let ty = (y + shift_y) % ny;
        for x in 0..nx {
            out[ty * nx + (x + shift_x) % nx] = src[y * nx + x];
        }
    }
    ComplexField::from_parts(grid, out)
}

/// Moves bin `m` to position `(m + ⌊n/2⌋) mod n` on each axis, so DC lands at the centre.
pub fn center_spectrum(spec: &ComplexField) -> ComplexField {
    let g = spec.grid();
    roll(spec, g.nx() / 2, g.ny() / 2)
}

/// Inverse of [`center_spectrum`]; identical to it for even sizes.
pub fn uncenter_spectrum(spec: &ComplexField) -> ComplexField {
    let g = spec.grid();
    roll(spec, g.nx() - g.nx() / 2, g.ny() - g.ny() / 2)
}

/// `Σ|s|²` over all samples.
pub fn total_power(field: &ComplexField) -> f64 {
    field.samples().iter().map(|c| c.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScanGrid;

    #[test]
    fn impulse_has_flat_spectrum() {
        let g = ScanGrid::new(8, 8, 1.0, 1.0).unwrap();
        let f = ComplexField::from_fn(g, |x, y| {
            if x == 0 && y == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let s = dft2(&f, Direction::Forward);
        for c in s.samples() {
            assert_eq!(*c, Complex64::new(1.0, 0.0));
        }
        assert_eq!(total_power(&f), 1.0);
        assert_eq!(total_power(&ComplexField::zeros(g)), 0.0);
    }

    #[test]
    fn dc_moves_to_centre() {
        let g = ScanGrid::new(8, 8, 1.0, 1.0).unwrap();
        let mut s = vec![Complex64::new(0.0, 0.0); 64];
        s[0] = Complex64::new(3.0, -1.0);
        let c = center_spectrum(&ComplexField::new(g, s).unwrap());
        assert_eq!(c.at(4, 4), Complex64::new(3.0, -1.0));
        assert_eq!(c.samples().iter().filter(|v| v.norm() > 0.0).count(), 1);
    }

    #[test]
    fn odd_centering_has_explicit_inverse() {
        let g = ScanGrid::new(5, 7, 1.0, 1.0).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x as f64, y as f64)).unwrap();
        assert_eq!(uncenter_spectrum(&center_spectrum(&f)), f);
        assert_ne!(center_spectrum(&center_spectrum(&f)), f);
    }
}
