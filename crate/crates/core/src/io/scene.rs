//! Plain-text scene files.
//!
//! ```text
//! # comment
//! grid <nx> <ny> <dx> <dy>
//! data                                  # optional dense block:
//! <re> <im> ...                         #   nx·ny pairs, x fastest
//! rect <cx> <cy> <width> <height> <angle_deg> [<re> <im>]
//! disk <cx> <cy> <radius> [<re> <im>]
//! ```
//! Positions are millimetres from the aperture centre; angles rotate the
//! rectangle's width axis counter-clockwise from +x. Shapes paint pixels
//! whose centres fall inside them, later lines overwriting earlier ones.
//! Reflectivity defaults to `1 0`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{HoloError, Result};
use crate::field::{ComplexField, ScanGrid};

/// Boundary slack for pixel-centre containment tests, in mm.
const EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Rect {
        cx: f64,
        cy: f64,
        width: f64,
        height: f64,
        angle_deg: f64,
    },
    Disk {
        cx: f64,
        cy: f64,
        radius: f64,
    },
}

impl Shape {
    pub fn contains(&self, px: f64, py: f64) -> bool {
        match *self {
            Shape::Rect {
                cx,
                cy,
                width,
                height,
                angle_deg,
            } => {
                let (s, c) = angle_deg.to_radians().sin_cos();
                let (dx, dy) = (px - cx, py - cy);
                let u = dx * c + dy * s;
                let v = -dx * s + dy * c;
                u.abs() <= width / 2.0 + EDGE_EPS && v.abs() <= height / 2.0 + EDGE_EPS
            }
            Shape::Disk { cx, cy, radius } => (px - cx).hypot(py - cy) <= radius + EDGE_EPS,
        }
    }
}

fn paint(samples: &mut [Complex64], grid: &ScanGrid, shape: &Shape, value: Complex64) {
    for y in 0..grid.ny() {
        for x in 0..grid.nx() {
            let (px, py) = grid.position(x, y);
            if shape.contains(px, py) {
                samples[grid.index(x, y)] = value;
            }
        }
    }
}

struct Tokens<'a> {
    line: usize,
    parts: std::str::SplitWhitespace<'a>,
}

impl Tokens<'_> {
    fn err(&self, reason: impl Into<String>) -> HoloError {
        HoloError::SceneFormat {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn number(&mut self, what: &str) -> Result<f64> {
        let tok = self
            .parts
            .next()
            .ok_or_else(|| self.err(format!("missing {what}")))?;
        let v: f64 = tok
            .parse()
            .map_err(|_| self.err(format!("{what}: `{tok}` is not a number")))?;
        if !v.is_finite() {
            return Err(self.err(format!("{what} must be finite")));
        }
        Ok(v)
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let tok = self
            .parts
            .next()
            .ok_or_else(|| self.err(format!("missing {what}")))?;
        tok.parse()
            .map_err(|_| self.err(format!("{what}: `{tok}` is not a pixel count")))
    }

    fn reflectivity(&mut self) -> Result<Complex64> {
        match self.parts.next() {
            None => Ok(Complex64::new(1.0, 0.0)),
            Some(tok) => {
                let re: f64 = tok
                    .parse()
                    .map_err(|_| self.err(format!("reflectivity `{tok}` is not a number")))?;
                let im = self.number("imaginary reflectivity")?;
                if !re.is_finite() {
                    return Err(self.err("reflectivity must be finite"));
                }
                Ok(Complex64::new(re, im))
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.parts.next() {
            None => Ok(()),
            Some(tok) => Err(self.err(format!("unexpected trailing token `{tok}`"))),
        }
    }
}

pub fn parse_scene(text: &str) -> Result<ComplexField> {
    let mut grid: Option<ScanGrid> = None;
    let mut samples: Vec<Complex64> = Vec::new();
    let mut dense: Option<Vec<f64>> = None;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = Tokens {
            line: line_no,
            parts: content.split_whitespace(),
        };

        if let Some(buf) = dense.as_mut() {
            for tok in content.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| toks.err(format!("`{tok}` is not a number")))?;
                if !v.is_finite() {
                    return Err(toks.err("reflectivity must be finite"));
                }
                buf.push(v);
            }
            let g = grid.expect("dense block requires a grid");
            if buf.len() >= 2 * g.len() {
                if buf.len() > 2 * g.len() {
                    return Err(toks.err(format!("dense block has more than {} pairs", g.len())));
                }
                samples = buf.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
                dense = None;
            }
            continue;
        }

        let Some(keyword) = toks.parts.next() else {
            continue;
        };
        match (keyword, grid) {
            ("grid", None) => {
                let nx = toks.count("nx")?;
                let ny = toks.count("ny")?;
                let dx = toks.number("dx")?;
                let dy = toks.number("dy")?;
                toks.finish()?;
                let g = ScanGrid::new(nx, ny, dx, dy).map_err(|e| toks.err(e.to_string()))?;
                samples = vec![Complex64::new(0.0, 0.0); g.len()];
                grid = Some(g);
            }
            ("grid", Some(_)) => return Err(toks.err("duplicate grid line")),
            (_, None) => return Err(toks.err("the first statement must be `grid`")),
            ("data", Some(_)) => {
                toks.finish()?;
                dense = Some(Vec::new());
            }
            ("rect", Some(g)) => {
                let shape = Shape::Rect {
                    cx: toks.number("cx")?,
                    cy: toks.number("cy")?,
                    width: toks.number("width")?,
                    height: toks.number("height")?,
                    angle_deg: toks.number("angle")?,
                };
                let value = toks.reflectivity()?;
                toks.finish()?;
                paint(&mut samples, &g, &shape, value);
            }
            ("disk", Some(g)) => {
                let shape = Shape::Disk {
                    cx: toks.number("cx")?,
                    cy: toks.number("cy")?,
                    radius: toks.number("radius")?,
                };
                let value = toks.reflectivity()?;
                toks.finish()?;
                paint(&mut samples, &g, &shape, value);
            }
            (other, Some(_)) => return Err(toks.err(format!("unknown statement `{other}`"))),
        }
    }

    if let Some(buf) = dense {
        return Err(HoloError::SceneFormat {
            line: last_line,
            reason: format!(
                "dense block ended after {} values",
                buf.len()
            ),
        });
    }
    let grid = grid.ok_or(HoloError::SceneFormat {
        line: last_line,
        reason: "no grid line".into(),
    })?;
    ComplexField::new(grid, samples)
}

pub fn read_scene(path: impl AsRef<Path>) -> Result<ComplexField> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| HoloError::io(path, e))?;
    parse_scene(&text)
}

/// Dense text form of a reflectivity map; round-trips through [`parse_scene`].
pub fn format_scene_dense(field: &ComplexField) -> String {
    let g = field.grid();
    let mut out = format!("grid {} {} {:?} {:?}\ndata\n", g.nx(), g.ny(), g.dx(), g.dy());
    for row in field.samples().chunks(g.nx()) {
        let line: Vec<String> = row.iter().map(|c| format!("{:?} {:?}", c.re, c.im)).collect();
        let _ = writeln!(out, "{}", line.join("  "));
    }
    out
}

/// Two 185 mm × 25 mm strips crossed at the aperture centre.
pub const X_STRIPS_SCENE: &str = "\
# two copper strips crossed in an X
grid 40 40 5 5
rect 0 0 185 25 45
rect 0 0 185 25 -45
";
