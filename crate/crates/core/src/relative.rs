//! Relative extremal function of a compact set E inside a disc B of the
//! plane, by obstacle-constrained harmonic relaxation.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::Sandwich;
use crate::point::Point;
use crate::set_geometry::{sample, SetSpec};

pub const OMEGA: f64 = 1.9;
pub const MAX_SWEEPS: usize = 1_000_000;
pub const DEFAULT_TOL: f64 = 1e-8;
const COARSEST: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Free,
    Set,
    Outside,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelativeField {
    pub grid_n: usize,
    pub center: Complex64,
    pub radius: f64,
    /// Cell width.
    pub step: f64,
    /// Row-major values, row `j` at `im = center.im − radius + (j + ½)·step`.
    pub values: Vec<f64>,
    pub kinds: Vec<CellKind>,
    pub sweeps: usize,
    /// Max discrete-Laplacian residual over free cells.
    pub residual: f64,
    pub tol: f64,
}

impl RelativeField {
    pub fn cell_center(&self, i: usize, j: usize) -> Complex64 {
        let lo = self.center - Complex64::new(self.radius, self.radius);
        lo + Complex64::new((i as f64 + 0.5) * self.step, (j as f64 + 0.5) * self.step)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid_n + i]
    }

    pub fn kind(&self, i: usize, j: usize) -> CellKind {
        self.kinds[j * self.grid_n + i]
    }

    /// Grid CSV with header `re_z,im_z,value,cell`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_z,im_z,value,cell\n");
        for j in 0..self.grid_n {
            for i in 0..self.grid_n {
                let z = self.cell_center(i, j);
                let kind = match self.kind(i, j) {
                    CellKind::Free => "free",
                    CellKind::Set => "set",
                    CellKind::Outside => "outside",
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    crate::io::fmt_f64(z.re),
                    crate::io::fmt_f64(z.im),
                    crate::io::fmt_f64(self.value(i, j)),
                    kind
                );
            }
        }
        out
    }

    /// Marching-squares level curves as an SVG document.
    pub fn contour_svg(&self, levels: &[f64]) -> String {
        let size = 512.0;
        let scale = size / (self.grid_n as f64);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
        );
        let _ = writeln!(
            svg,
            "<circle cx=\"{h}\" cy=\"{h}\" r=\"{h}\" fill=\"none\" stroke=\"black\"/>",
            h = size / 2.0
        );
        for (k, &level) in levels.iter().enumerate() {
            let hue = 240.0 * (1.0 - k as f64 / levels.len().max(1) as f64);
            let _ = write!(
                svg,
                "<path data-level=\"{level}\" fill=\"none\" stroke=\"hsl({hue:.0},80%,45%)\" d=\""
            );
            for (a, b) in self.contour_segments(level) {
                let _ = write!(
                    svg,
                    "M{:.3} {:.3}L{:.3} {:.3}",
                    a[0] * scale,
                    size - a[1] * scale,
                    b[0] * scale,
                    size - b[1] * scale
                );
            }
            svg.push_str("\"/>\n");
        }
        svg.push_str("</svg>\n");
        svg
    }

    /// Level-set segments in grid coordinates (cell centers at `i + ½`).
    pub fn contour_segments(&self, level: f64) -> Vec<([f64; 2], [f64; 2])> {
        let n = self.grid_n;
        let mut segs = Vec::new();
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let corners = [
                    ([i as f64 + 0.5, j as f64 + 0.5], self.value(i, j)),
                    ([i as f64 + 1.5, j as f64 + 0.5], self.value(i + 1, j)),
                    ([i as f64 + 1.5, j as f64 + 1.5], self.value(i + 1, j + 1)),
                    ([i as f64 + 0.5, j as f64 + 1.5], self.value(i, j + 1)),
                ];
                let mut cuts = Vec::with_capacity(4);
                for e in 0..4 {
                    let (p, a) = corners[e];
                    let (q, b) = corners[(e + 1) % 4];
                    if (a < level) != (b < level) {
                        let t = (level - a) / (b - a);
                        cuts.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                    }
                }
                for pair in cuts.chunks(2) {
                    if pair.len() == 2 {
                        segs.push((pair[0], pair[1]));
                    }
                }
            }
        }
        segs
    }
}

/// Relative extremal function of `e` in the disc `b`.
pub fn relative_extremal_1c(e: &SetSpec, b: &SetSpec, grid_n: usize, tol: f64) -> Result<RelativeField> {
    let (center, radius) = match b {
        SetSpec::ComplexBall { center, radius } if center.len() == 1 => (center[0], *radius),
        _ => return Err(Error::InvalidArgument("B must be a disc in C^1".into())),
    };
    if e.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: e.dim(),
        });
    }
    if grid_n < 64 {
        return Err(Error::InvalidArgument("grid_n must be at least 64".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let samples = sample(e, (8 * grid_n).max(1000), 0)?;
    if samples
        .points
        .iter()
        .any(|p| (p.coords()[0] - center).norm() > radius + crate::set_geometry::MEMBERSHIP_TOL)
    {
        return Err(Error::InvalidArgument("E is not contained in B".into()));
    }
    let reach = samples.points.iter().map(|p| (p.coords()[0] - center).norm()).fold(0.0, f64::max);
    if reach > radius - radius / grid_n as f64
        && classify(e, &samples.points, center, radius, grid_n).contains(&CellKind::Free)
    {
        return Err(Error::InvalidArgument("E touches the boundary of B".into()));
    }
    solve_level(e, &samples.points, center, radius, grid_n, tol)
}

fn classify(e: &SetSpec, samples: &[Point], center: Complex64, radius: f64, n: usize) -> Vec<CellKind> {
    let step = 2.0 * radius / n as f64;
    let lo = center - Complex64::new(radius, radius);
    let mut kinds = vec![CellKind::Free; n * n];
    let mut any_set = false;
    for j in 0..n {
        for i in 0..n {
            let z = lo + Complex64::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step);
            kinds[j * n + i] = if (z - center).norm() >= radius {
                CellKind::Outside
            } else if e.contains(&Point::c1(z)).unwrap_or(false) {
                any_set = true;
                CellKind::Set
            } else {
                CellKind::Free
            };
        }
    }
    if !any_set {
        // thin sets: mark the cells their samples fall in
        for p in samples {
            let w = (p.coords()[0] - lo) / step;
            let (i, j) = (w.re.floor() as isize, w.im.floor() as isize);
            if (0..n as isize).contains(&i) && (0..n as isize).contains(&j) {
                let k = j as usize * n + i as usize;
                if kinds[k] == CellKind::Free {
                    kinds[k] = CellKind::Set;
                }
            }
        }
    }
    kinds
}

fn solve_level(
    e: &SetSpec,
    samples: &[Point],
    center: Complex64,
    radius: f64,
    n: usize,
    tol: f64,
) -> Result<RelativeField> {
    let kinds = classify(e, samples, center, radius, n);
    let mut values: Vec<f64> = kinds
        .iter()
        .map(|k| match k {
            CellKind::Set => 0.0,
            _ => 1.0,
        })
        .collect();
    if n >= 2 * COARSEST && n % 2 == 0 {
        // warm start from the half-resolution solution
        let coarse = solve_level(e, samples, center, radius, n / 2, tol)?;
        for j in 0..n {
            for i in 0..n {
                if kinds[j * n + i] == CellKind::Free {
                    values[j * n + i] = coarse.sample_grid((i as f64 + 0.5) / 2.0 - 0.5, (j as f64 + 0.5) / 2.0 - 0.5);
                }
            }
        }
    }
    let mut sweeps = 0;
    loop {
        let mut max_update: f64 = 0.0;
        for color in 0..2 {
            for j in 1..n - 1 {
                let start = 1 + (j + color + 1) % 2;
                let mut i = start;
                while i < n - 1 {
                    let k = j * n + i;
                    if kinds[k] == CellKind::Free {
                        let avg = 0.25 * (values[k - 1] + values[k + 1] + values[k - n] + values[k + n]);
                        let delta = OMEGA * (avg - values[k]);
                        values[k] += delta;
                        max_update = max_update.max(delta.abs());
                    }
                    i += 2;
                }
            }
        }
        sweeps += 1;
        if max_update < tol {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NonConvergence {
                iterations: sweeps,
                last_update: max_update,
            });
        }
    }
    for v in values.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    let mut residual: f64 = 0.0;
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let k = j * n + i;
            if kinds[k] == CellKind::Free {
                let lap = values[k - 1] + values[k + 1] + values[k - n] + values[k + n] - 4.0 * values[k];
                residual = residual.max(0.25 * lap.abs());
            }
        }
    }
    Ok(RelativeField {
        grid_n: n,
        center,
        radius,
        step: 2.0 * radius / n as f64,
        values,
        kinds,
        sweeps,
        residual,
        tol,
    })
}

impl RelativeField {
    /// Bilinear interpolation in grid index coordinates (cell centers at
    /// integers), clamped to the grid.
    fn sample_grid(&self, x: f64, y: f64) -> f64 {
        let n = self.grid_n;
        let x = x.clamp(0.0, (n - 1) as f64);
        let y = y.clamp(0.0, (n - 1) as f64);
        let (i, j) = ((x.floor() as usize).min(n - 2), (y.floor() as usize).min(n - 2));
        let (fx, fy) = (x - i as f64, y - j as f64);
        let v = |a: usize, b: usize| self.value(a, b);
        (1.0 - fx) * (1.0 - fy) * v(i, j) + fx * (1.0 - fy) * v(i + 1, j) + (1.0 - fx) * fy * v(i, j + 1) + fx * fy * v(i + 1, j + 1)
    }

    /// Field value at `z` by bilinear interpolation.
    pub fn interpolate(&self, z: Complex64) -> f64 {
        let lo = self.center - Complex64::new(self.radius, self.radius);
        let w = (z - lo) / self.step;
        self.sample_grid(w.re - 0.5, w.im - 0.5)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoSidedBound {
    pub m_hat: f64,
    pub big_m_hat: f64,
    pub ratio: f64,
    pub points: usize,
    pub threshold: f64,
}

/// Measured constants `m̂ ≤ lower/field ≤ M̂` over free grid cells with
/// field above `threshold`, visiting every `stride`-th cell per axis.
pub fn two_sided_bound(field: &RelativeField, sandwich: &Sandwich, threshold: f64, stride: usize) -> Result<TwoSidedBound> {
    let stride = stride.max(1);
    let mut zs = Vec::new();
    let mut hs = Vec::new();
    for j in (0..field.grid_n).step_by(stride) {
        for i in (0..field.grid_n).step_by(stride) {
            let v = field.value(i, j);
            if field.kind(i, j) == CellKind::Free && v > threshold {
                zs.push(Point::c1(field.cell_center(i, j)));
                hs.push(v);
            }
        }
    }
    if zs.is_empty() {
        return Err(Error::InvalidArgument("no grid cell above the threshold".into()));
    }
    let est = sandwich.estimate_many(&zs)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (e, h) in est.iter().zip(&hs) {
        let r = e.lower / h;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(TwoSidedBound {
        m_hat: lo,
        big_m_hat: hi,
        ratio: hi / lo,
        points: zs.len(),
        threshold,
    })
}
