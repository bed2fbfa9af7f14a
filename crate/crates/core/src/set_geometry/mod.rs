//! Compact sets in C^n (n ≤ 2): declarative description, membership,
//! deterministic sampling and the closed-form extremal functions.

mod closed_form;
mod lattice;
mod sampling;

pub use closed_form::{exact_extremal, halfdisc_harmonic_measure, real_ball_extremal};
pub use lattice::{halton, sphere3_spiral};
pub use sampling::{sample, SampleCloud, BOUNDARY_FRACTION, MAX_SAMPLE_COUNT};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Boundary tolerance for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Description of a compact set. Serialized with a `"kind"` tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SetSpec {
    Interval {
        a: f64,
        b: f64,
    },
    ComplexBall {
        center: Vec<Complex64>,
        radius: f64,
    },
    RealBall {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        axes: Vec<[f64; 2]>,
    },
    ConvexHull {
        vertices: Vec<Point>,
    },
    Cusp(Cusp),
    AffineImage {
        inner: Box<SetSpec>,
        matrix: Vec<Vec<Complex64>>,
        offset: Vec<Complex64>,
    },
    Union {
        parts: Vec<SetSpec>,
    },
    BallIntersection {
        inner: Box<SetSpec>,
        center: Vec<Complex64>,
        radius: f64,
    },
}

/// Cusp set `⋃_{0≤t≤1} D(h(t), M t^m)` in R^n, `D(p, s)` the closed cube of
/// half-side `s` centered at `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cusp {
    /// Coefficients of each coordinate of `h`, lowest degree first.
    pub h: Vec<Vec<f64>>,
    #[serde(rename = "M")]
    pub scale: f64,
    #[serde(rename = "m")]
    pub exponent: u32,
    #[serde(default)]
    pub degree_bound: usize,
    #[serde(default)]
    pub h0: Vec<f64>,
    /// `Σ_ℓ ‖h^{(ℓ)}(0)‖`.
    #[serde(default)]
    pub coeff_sum: f64,
}

impl Cusp {
    pub fn new(h: Vec<Vec<f64>>, scale: f64, exponent: u32) -> Result<Self> {
        let mut c = Cusp {
            h,
            scale,
            exponent,
            degree_bound: 0,
            h0: Vec::new(),
            coeff_sum: 0.0,
        };
        c.normalize()?;
        Ok(c)
    }

    fn normalize(&mut self) -> Result<()> {
        if self.h.is_empty() || self.h.len() > 2 {
            return Err(Error::InvalidSpec("cusp map must have 1 or 2 coordinates".into()));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::InvalidSpec("cusp M must be positive".into()));
        }
        if self.exponent == 0 {
            return Err(Error::InvalidSpec("cusp m must be a positive integer".into()));
        }
        if self.h.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("non-finite cusp coefficient".into()));
        }
        let deg = self
            .h
            .iter()
            .map(|c| c.iter().rposition(|&x| x != 0.0).unwrap_or(0))
            .max()
            .unwrap_or(0);
        self.degree_bound = self.degree_bound.max(deg);
        self.h0 = self.h.iter().map(|c| c.first().copied().unwrap_or(0.0)).collect();
        let mut sum = 0.0;
        let mut fact = 1.0;
        for l in 0..=deg {
            if l > 0 {
                fact *= l as f64;
            }
            let v: f64 = self
                .h
                .iter()
                .map(|c| c.get(l).copied().unwrap_or(0.0).powi(2))
                .sum::<f64>()
                .sqrt();
            sum += fact * v;
        }
        self.coeff_sum = sum;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.h
            .iter()
            .map(|c| c.iter().rev().fold(0.0, |acc, &a| acc * t + a))
            .collect()
    }

    pub fn half_width(&self, t: f64) -> f64 {
        self.scale * t.powi(self.exponent as i32)
    }

    /// `min_t ‖x − h(t)‖_∞ − M t^m` over `t` in `[lo, hi]`.
    fn margin(&self, x: &[f64], lo: f64, hi: f64) -> f64 {
        let g = |t: f64| {
            let p = self.eval(t);
            let d = x
                .iter()
                .zip(&p)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            d - self.half_width(t)
        };
        const SCAN: usize = 2048;
        let mut vals: Vec<(f64, usize)> = (0..=SCAN)
            .map(|k| (g(lo + (hi - lo) * k as f64 / SCAN as f64), k))
            .collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best = vals[0].0;
        // golden-section polish around the three best grid cells
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        for &(_, k) in vals.iter().take(3) {
            let step = (hi - lo) / SCAN as f64;
            let mut a = (lo + step * k as f64 - step).max(lo);
            let mut b = (lo + step * k as f64 + step).min(hi);
            let mut c = b - inv_phi * (b - a);
            let mut d = a + inv_phi * (b - a);
            let (mut gc, mut gd) = (g(c), g(d));
            for _ in 0..80 {
                if gc < gd {
                    b = d;
                    d = c;
                    gd = gc;
                    c = b - inv_phi * (b - a);
                    gc = g(c);
                } else {
                    a = c;
                    c = d;
                    gc = gd;
                    d = a + inv_phi * (b - a);
                    gd = g(d);
                }
            }
            best = best.min(gc).min(gd).min(g(a)).min(g(b));
        }
        best
    }
}

impl SetSpec {
    pub fn interval(a: f64, b: f64) -> Self {
        SetSpec::Interval { a, b }
    }

    pub fn disc(center: Complex64, radius: f64) -> Self {
        SetSpec::ComplexBall {
            center: vec![center],
            radius,
        }
    }

    pub fn ball_intersection(inner: SetSpec, center: &Point, radius: f64) -> Self {
        SetSpec::BallIntersection {
            inner: Box::new(inner),
            center: center.coords().to_vec(),
            radius,
        }
    }

    /// Parse a JSON document, fill derived cusp fields and validate.
    pub fn from_json(s: &str) -> Result<Self> {
        let mut spec: SetSpec = serde_json::from_str(s)?;
        spec.normalize()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("SetSpec serializes")
    }

    /// Fill derived fields and check invariants.
    pub fn normalize(&mut self) -> Result<()> {
        match self {
            SetSpec::Cusp(c) => c.normalize()?,
            SetSpec::AffineImage { inner, .. } | SetSpec::BallIntersection { inner, .. } => {
                inner.normalize()?
            }
            SetSpec::Union { parts } => {
                for p in parts.iter_mut() {
                    p.normalize()?;
                }
            }
            _ => {}
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        fn finite(mut xs: impl Iterator<Item = f64>) -> bool {
            xs.all(|x| x.is_finite())
        }
        match self {
            SetSpec::Interval { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return bad("interval requires a < b");
                }
            }
            SetSpec::ComplexBall { center, radius } => {
                if center.is_empty() || center.len() > 2 {
                    return bad("ball dimension must be 1 or 2");
                }
                if !(*radius > 0.0 && radius.is_finite())
                    || !finite(&mut center.iter().flat_map(|c| [c.re, c.im]))
                {
                    return bad("ball radius must be positive");
                }
            }
            SetSpec::RealBall { center, radius } => {
                if center.is_empty() || center.len() > 2 {
                    return bad("ball dimension must be 1 or 2");
                }
                if !(*radius > 0.0 && radius.is_finite()) || !finite(&mut center.iter().copied())
                {
                    return bad("ball radius must be positive");
                }
            }
            SetSpec::Box { axes } => {
                if axes.is_empty() || axes.len() > 2 {
                    return bad("box dimension must be 1 or 2");
                }
                if axes.iter().any(|[lo, hi]| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
                    return bad("box axes require lo < hi");
                }
            }
            SetSpec::ConvexHull { vertices } => {
                let Some(first) = vertices.first() else {
                    return bad("convex hull needs vertices");
                };
                let n = first.dim();
                if n > 2 || vertices.iter().any(|v| v.dim() != n) {
                    return bad("hull vertices must share dimension 1 or 2");
                }
                if n == 2 && !vertices.iter().all(Point::is_real) {
                    return Err(Error::Unsupported("complex convex hulls in C^2".into()));
                }
                if self.hull_polygon().map_or(false, |p| p.len() < 3) && !self.hull_is_segment() {
                    return bad("hull has empty interior");
                }
            }
            SetSpec::Cusp(c) => {
                if c.h.is_empty() || c.scale <= 0.0 || c.exponent == 0 {
                    return bad("cusp requires h, M > 0, m ≥ 1");
                }
            }
            SetSpec::AffineImage {
                inner,
                matrix,
                offset,
            } => {
                inner.validate()?;
                let n = inner.dim();
                if matrix.len() != n || matrix.iter().any(|r| r.len() != n) || offset.len() != n {
                    return bad("affine map shape must match the inner dimension");
                }
                if affine_det(matrix).norm() < 1e-14 {
                    return bad("affine map is not invertible");
                }
            }
            SetSpec::Union { parts } => {
                let Some(first) = parts.first() else {
                    return bad("union must be nonempty");
                };
                for p in parts {
                    p.validate()?;
                    if p.dim() != first.dim() {
                        return bad("union parts must share dimension");
                    }
                }
            }
            SetSpec::BallIntersection {
                inner,
                center,
                radius,
            } => {
                inner.validate()?;
                if center.len() != inner.dim() {
                    return bad("ball center dimension must match the inner set");
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    return bad("ball radius must be positive");
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            SetSpec::Interval { .. } => 1,
            SetSpec::ComplexBall { center, .. } => center.len(),
            SetSpec::RealBall { center, .. } => center.len(),
            SetSpec::Box { axes } => axes.len(),
            SetSpec::ConvexHull { vertices } => vertices.first().map_or(0, Point::dim),
            SetSpec::Cusp(c) => c.dim(),
            SetSpec::AffineImage { inner, .. } | SetSpec::BallIntersection { inner, .. } => {
                inner.dim()
            }
            SetSpec::Union { parts } => parts.first().map_or(0, SetSpec::dim),
        }
    }

    /// Whether the set lies in R^n + i·0.
    pub fn is_real(&self) -> bool {
        match self {
            SetSpec::Interval { .. } | SetSpec::RealBall { .. } | SetSpec::Box { .. } => true,
            SetSpec::Cusp(_) => true,
            SetSpec::ComplexBall { .. } => false,
            SetSpec::ConvexHull { vertices } => vertices.iter().all(Point::is_real),
            SetSpec::AffineImage {
                inner,
                matrix,
                offset,
            } => {
                inner.is_real()
                    && matrix.iter().flatten().chain(offset).all(|c| c.im == 0.0)
            }
            SetSpec::Union { parts } => parts.iter().all(SetSpec::is_real),
            SetSpec::BallIntersection { inner, .. } => inner.is_real(),
        }
    }

    /// Closed-set membership with tolerance [`MEMBERSHIP_TOL`].
    pub fn contains(&self, p: &Point) -> Result<bool> {
        p.check_dim(self.dim())?;
        Ok(self.contains_unchecked(p))
    }

    pub(crate) fn contains_unchecked(&self, p: &Point) -> bool {
        let tol = MEMBERSHIP_TOL;
        let z = p.coords();
        let real = || z.iter().all(|c| c.im.abs() <= tol);
        match self {
            SetSpec::Interval { a, b } => real() && z[0].re >= a - tol && z[0].re <= b + tol,
            SetSpec::ComplexBall { center, radius } => {
                let d2: f64 = z.iter().zip(center).map(|(a, c)| (a - c).norm_sqr()).sum();
                d2.sqrt() <= radius + tol
            }
            SetSpec::RealBall { center, radius } => {
                let d2: f64 = z.iter().zip(center).map(|(a, c)| (a.re - c).powi(2)).sum();
                real() && d2.sqrt() <= radius + tol
            }
            SetSpec::Box { axes } => {
                real()
                    && z
                        .iter()
                        .zip(axes)
                        .all(|(c, [lo, hi])| c.re >= lo - tol && c.re <= hi + tol)
            }
            SetSpec::ConvexHull { vertices } => {
                let n = vertices[0].dim();
                if n == 1 && vertices.iter().all(Point::is_real) {
                    let (lo, hi) = real_range(vertices.iter().map(|v| v.coords()[0].re));
                    return real() && z[0].re >= lo - tol && z[0].re <= hi + tol;
                }
                let q = if n == 1 {
                    [z[0].re, z[0].im]
                } else {
                    if !real() {
                        return false;
                    }
                    [z[0].re, z[1].re]
                };
                match self.hull_polygon() {
                    Some(poly) if poly.len() >= 3 => polygon_contains(&poly, q, tol),
                    _ => segment_hull_contains(&self.hull_points(), q, tol),
                }
            }
            SetSpec::Cusp(c) => {
                if !real() {
                    return false;
                }
                let x: Vec<f64> = z.iter().map(|c| c.re).collect();
                c.margin(&x, 0.0, 1.0) <= tol
            }
            SetSpec::AffineImage {
                inner,
                matrix,
                offset,
            } => match affine_preimage(matrix, offset, z) {
                Some(w) => inner.contains_unchecked(&Point::from_coords(w)),
                None => false,
            },
            SetSpec::Union { parts } => parts.iter().any(|s| s.contains_unchecked(p)),
            SetSpec::BallIntersection {
                inner,
                center,
                radius,
            } => {
                let d2: f64 = z.iter().zip(center).map(|(a, c)| (a - c).norm_sqr()).sum();
                d2.sqrt() <= radius + tol && inner.contains_unchecked(p)
            }
        }
    }

    /// Euclidean diameter. Exact for primitives; for composite sets the
    /// maximal pairwise distance of a sample cloud (approximate).
    pub fn diameter(&self) -> Result<f64> {
        Ok(match self {
            SetSpec::Interval { a, b } => b - a,
            SetSpec::ComplexBall { radius, .. } | SetSpec::RealBall { radius, .. } => 2.0 * radius,
            SetSpec::Box { axes } => axes.iter().map(|[lo, hi]| (hi - lo).powi(2)).sum::<f64>().sqrt(),
            SetSpec::ConvexHull { vertices } => max_pairwise(vertices),
            _ => {
                let cloud = sample(self, 1500, 0)?;
                max_pairwise(&cloud.points)
            }
        })
    }

    fn hull_points(&self) -> Vec<[f64; 2]> {
        match self {
            SetSpec::ConvexHull { vertices } => vertices
                .iter()
                .map(|v| {
                    let c = v.coords();
                    if c.len() == 1 {
                        [c[0].re, c[0].im]
                    } else {
                        [c[0].re, c[1].re]
                    }
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Counter-clockwise hull polygon of planar hull vertices.
    pub(crate) fn hull_polygon(&self) -> Option<Vec<[f64; 2]>> {
        match self {
            SetSpec::ConvexHull { vertices } => {
                if vertices[0].dim() == 1 && vertices.iter().all(Point::is_real) {
                    return None;
                }
                Some(convex_hull(self.hull_points()))
            }
            _ => None,
        }
    }

    fn hull_is_segment(&self) -> bool {
        match self {
            SetSpec::ConvexHull { vertices } => {
                vertices[0].dim() == 1 && vertices.iter().all(Point::is_real)
            }
            _ => false,
        }
    }
}

fn real_range(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn max_pairwise(points: &[Point]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(p.dist(q));
        }
    }
    best
}

pub(crate) fn affine_det(m: &[Vec<Complex64>]) -> Complex64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => Complex64::new(0.0, 0.0),
    }
}

pub(crate) fn affine_apply(m: &[Vec<Complex64>], b: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .zip(b)
        .map(|(row, bi)| row.iter().zip(w).map(|(a, x)| a * x).sum::<Complex64>() + bi)
        .collect()
}

fn affine_preimage(m: &[Vec<Complex64>], b: &[Complex64], z: &[Complex64]) -> Option<Vec<Complex64>> {
    let det = affine_det(m);
    if det.norm() == 0.0 {
        return None;
    }
    let y: Vec<Complex64> = z.iter().zip(b).map(|(a, c)| a - c).collect();
    let mut w = match m.len() {
        1 => vec![y[0] / m[0][0]],
        _ => vec![
            (m[1][1] * y[0] - m[0][1] * y[1]) / det,
            (m[0][0] * y[1] - m[1][0] * y[0]) / det,
        ],
    };
    // real inputs should stay on the real slice
    for c in &mut w {
        if c.im.abs() < 1e-15 * (1.0 + c.re.abs()) {
            c.im = 0.0;
        }
    }
    Some(w)
}

/// Andrew's monotone chain; returns the hull counter-clockwise without
/// repeating the first vertex.
pub(crate) fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub(crate) fn polygon_contains(poly: &[[f64; 2]], q: [f64; 2], tol: f64) -> bool {
    (0..poly.len()).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let cross = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]);
        cross >= -tol * len
    })
}

fn segment_hull_contains(pts: &[[f64; 2]], q: [f64; 2], tol: f64) -> bool {
    let hull = convex_hull(pts.to_vec());
    match hull.len() {
        0 => false,
        1 => (hull[0][0] - q[0]).hypot(hull[0][1] - q[1]) <= tol,
        _ => {
            let (a, b) = (hull[0], hull[hull.len() - 1]);
            let ab = [b[0] - a[0], b[1] - a[1]];
            let l2 = ab[0] * ab[0] + ab[1] * ab[1];
            let t = (((q[0] - a[0]) * ab[0] + (q[1] - a[1]) * ab[1]) / l2).clamp(0.0, 1.0);
            (a[0] + t * ab[0] - q[0]).hypot(a[1] + t * ab[1] - q[1]) <= tol
        }
    }
}
