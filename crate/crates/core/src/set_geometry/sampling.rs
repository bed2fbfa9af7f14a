//! Deterministic point clouds on compact sets, densified near the boundary.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::lattice::{halton, sphere3_spiral, sunflower};
use super::{affine_apply, polygon_contains, Cusp, SetSpec};
use crate::error::{Error, Result};
use crate::point::Point;

/// Share of every cloud placed on (or within one spacing of) the boundary.
pub const BOUNDARY_FRACTION: f64 = 0.3;
/// Resource guard on requested and internally generated cloud sizes.
pub const MAX_SAMPLE_COUNT: usize = 10_000_000;
const DEDUP_TOL: f64 = 1e-12;
/// Ring sizes are multiples of this so small regular polygons are subsets.
const RING_MULTIPLE: usize = 120;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleCloud {
    pub points: Vec<Point>,
    pub seed: u64,
    /// Target spacing `h` of the construction.
    pub density_parameter: f64,
    pub bounding_radius: f64,
    pub boundary_fraction: f64,
    /// Content digest of the point list.
    pub id: String,
}

impl SampleCloud {
    /// Wrap an explicit point list (all points must be distinct).
    pub fn from_points(points: Vec<Point>, seed: u64, density_parameter: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty cloud".into()));
        }
        let n = points[0].dim();
        for p in &points {
            p.check_dim(n)?;
        }
        let points = dedup(points);
        Ok(Self::finish(points, seed, density_parameter))
    }

    fn finish(points: Vec<Point>, seed: u64, density_parameter: f64) -> Self {
        let bounding_radius = bounding_radius(&points);
        let id = cloud_digest(&points);
        SampleCloud {
            points,
            seed,
            density_parameter,
            bounding_radius,
            boundary_fraction: BOUNDARY_FRACTION,
            id,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn is_real(&self) -> bool {
        self.points.iter().all(Point::is_real)
    }

    /// Union with extra points (kept after the existing ones).
    pub fn extended(&self, extra: Vec<Point>, density_parameter: f64) -> Self {
        let mut pts = self.points.clone();
        pts.extend(extra);
        Self::finish(dedup(pts), self.seed, density_parameter)
    }
}

/// Deterministic cloud of at least `target_count` points of `spec`.
pub fn sample(spec: &SetSpec, target_count: usize, seed: u64) -> Result<SampleCloud> {
    if target_count < 4 {
        return Err(Error::InvalidArgument("target_count must be at least 4".into()));
    }
    if target_count > MAX_SAMPLE_COUNT {
        return Err(Error::ResourceGuard(target_count));
    }
    spec.validate()?;
    let mut request = target_count;
    for _ in 0..12 {
        let raw = generate(spec, request, seed)?;
        let pts: Vec<Point> = raw
            .points
            .into_iter()
            .filter(|p| spec.contains_unchecked(p))
            .collect();
        let pts = dedup(pts);
        if pts.len() >= target_count {
            return Ok(SampleCloud::finish(pts, seed, raw.h));
        }
        request = request * 3 / 2 + 4;
        if request > MAX_SAMPLE_COUNT {
            break;
        }
    }
    Err(Error::Degenerate(format!(
        "could not place {target_count} points in the set"
    )))
}

struct Raw {
    points: Vec<Point>,
    h: f64,
}

fn generate(spec: &SetSpec, t: usize, seed: u64) -> Result<Raw> {
    if t > MAX_SAMPLE_COUNT {
        return Err(Error::ResourceGuard(t));
    }
    match spec {
        SetSpec::Interval { a, b } => Ok(interval_grid(*a, *b, t)),
        SetSpec::RealBall { center, radius } if center.len() == 1 => {
            Ok(interval_grid(center[0] - radius, center[0] + radius, t))
        }
        SetSpec::Box { axes } if axes.len() == 1 => Ok(interval_grid(axes[0][0], axes[0][1], t)),
        SetSpec::ComplexBall { center, radius } if center.len() == 1 => {
            let (pts, h) = disc_points(t, *radius, seed);
            let c = center[0];
            Ok(Raw {
                points: pts
                    .into_iter()
                    .map(|[x, y]| Point::c1(c + Complex64::new(x, y)))
                    .collect(),
                h,
            })
        }
        SetSpec::RealBall { center, radius } => {
            let (pts, h) = disc_points(t, *radius, seed);
            Ok(Raw {
                points: pts
                    .into_iter()
                    .map(|[x, y]| Point::real(&[center[0] + x, center[1] + y]))
                    .collect(),
                h,
            })
        }
        SetSpec::ComplexBall { center, radius } => Ok(ball4_points(center, *radius, t, seed)),
        SetSpec::Box { axes } => Ok(box_points(axes, t)),
        SetSpec::ConvexHull { vertices } => {
            if vertices[0].dim() == 1 && vertices.iter().all(Point::is_real) {
                let (lo, hi) = vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, v| {
                    (acc.0.min(v.coords()[0].re), acc.1.max(v.coords()[0].re))
                });
                return Ok(interval_grid(lo, hi, t));
            }
            let poly = spec.hull_polygon().unwrap_or_default();
            if poly.len() < 3 {
                return Err(Error::Degenerate("hull has empty interior".into()));
            }
            let complex = vertices[0].dim() == 1;
            let (pts, h) = polygon_points(&poly, t, seed);
            Ok(Raw {
                points: pts.into_iter().map(|q| planar_point(q, complex)).collect(),
                h,
            })
        }
        SetSpec::Cusp(c) => Ok(cusp_points(c, 0.0, 1.0, t)),
        SetSpec::AffineImage {
            inner,
            matrix,
            offset,
        } => {
            let raw = generate(inner, t, seed)?;
            let gain = matrix
                .iter()
                .flatten()
                .map(|c| c.norm_sqr())
                .sum::<f64>()
                .sqrt();
            Ok(Raw {
                points: raw
                    .points
                    .iter()
                    .map(|p| Point::from_coords(affine_apply(matrix, offset, p.coords())))
                    .collect(),
                h: raw.h * gain,
            })
        }
        SetSpec::Union { parts } => {
            let each = t.div_ceil(parts.len()).max(4);
            let mut points = Vec::new();
            let mut h: f64 = 0.0;
            for p in parts {
                let raw = generate(p, each, seed)?;
                points.extend(raw.points);
                h = h.max(raw.h);
            }
            Ok(Raw { points, h })
        }
        SetSpec::BallIntersection {
            inner,
            center,
            radius,
        } => ball_intersection_points(inner, center, *radius, t, seed),
    }
}

fn interval_grid(a: f64, b: f64, t: usize) -> Raw {
    let n = t.max(2);
    let h = (b - a) / (n - 1) as f64;
    let points = (0..n)
        .map(|k| {
            let x = if k == n - 1 { b } else { a + h * k as f64 };
            Point::real(&[x])
        })
        .collect();
    Raw { points, h }
}

fn seed_fraction(seed: u64) -> f64 {
    // golden-ratio sequence keeps rotations spread over seeds
    (seed as f64 * 0.618_033_988_749_894_9).fract()
}

/// Ring + sunflower interior of a disc of radius `r` centered at 0.
fn disc_points(t: usize, r: f64, seed: u64) -> (Vec<[f64; 2]>, f64) {
    let nb = ((BOUNDARY_FRACTION * t as f64).ceil() as usize).div_ceil(RING_MULTIPLE) * RING_MULTIPLE;
    let ni = t.saturating_sub(nb).max(t / 2);
    let h = (PI * r * r / (nb + ni) as f64).sqrt();
    let rot = seed_fraction(seed) * 2.0 * PI / nb as f64;
    let mut pts: Vec<[f64; 2]> = (0..nb)
        .map(|k| {
            let th = rot + 2.0 * PI * k as f64 / nb as f64;
            [r * th.cos(), r * th.sin()]
        })
        .collect();
    pts.extend(sunflower(ni, (r - 0.5 * h).max(0.5 * r), seed_fraction(seed + 7) * 2.0 * PI));
    (pts, h)
}

fn ball4_points(center: &[Complex64], r: f64, t: usize, seed: u64) -> Raw {
    let nb = (BOUNDARY_FRACTION * t as f64).ceil() as usize;
    let ni = t.saturating_sub(nb).max(t / 2);
    let vol = PI * PI / 2.0 * r.powi(4);
    let h = (vol / (nb + ni) as f64).powf(0.25);
    let (s1, c1) = (seed_fraction(seed) * 2.0 * PI).sin_cos();
    let (s2, c2) = (seed_fraction(seed + 3) * 2.0 * PI).sin_cos();
    let to_point = |q: [f64; 4], scale: f64| {
        let q = [c1 * q[0] - s1 * q[1], s1 * q[0] + c1 * q[1], c2 * q[2] - s2 * q[3], s2 * q[2] + c2 * q[3]];
        Point::c2(
            center[0] + Complex64::new(q[0], q[1]) * scale,
            center[1] + Complex64::new(q[2], q[3]) * scale,
        )
    };
    let mut points: Vec<Point> = sphere3_spiral(nb).into_iter().map(|q| to_point(q, r)).collect();
    let limit = (1.0 - 0.5 * h / r).max(0.5);
    let mut idx = 1 + seed * 1009;
    let mut placed = 0;
    while placed < ni && idx < 1 + seed * 1009 + 40 * ni as u64 + 1000 {
        let q = [
            2.0 * halton(idx, 2) - 1.0,
            2.0 * halton(idx, 3) - 1.0,
            2.0 * halton(idx, 5) - 1.0,
            2.0 * halton(idx, 7) - 1.0,
        ];
        idx += 1;
        if q.iter().map(|x| x * x).sum::<f64>().sqrt() <= limit {
            points.push(to_point(q, r));
            placed += 1;
        }
    }
    Raw { points, h }
}

fn box_points(axes: &[[f64; 2]], t: usize) -> Raw {
    let (wx, wy) = (axes[0][1] - axes[0][0], axes[1][1] - axes[1][0]);
    let (x0, y0) = (axes[0][0], axes[1][0]);
    let ni = ((1.0 - BOUNDARY_FRACTION) * t as f64).ceil();
    let h = (wx * wy / ni).sqrt();
    let nx = ((wx / h).ceil() as usize).max(1);
    let ny = ((wy / h).ceil() as usize).max(1);
    let (hx, hy) = (wx / nx as f64, wy / ny as f64);
    let corners = [[x0, y0], [x0 + wx, y0], [x0 + wx, y0 + wy], [x0, y0 + wy]];
    let nb = (BOUNDARY_FRACTION * t as f64).ceil() as usize;
    let mut pts = perimeter_points(&corners, nb.max(4));
    for i in 0..nx {
        for j in 0..ny {
            pts.push([x0 + (i as f64 + 0.5) * hx, y0 + (j as f64 + 0.5) * hy]);
        }
    }
    Raw {
        points: pts.into_iter().map(|q| Point::real(&q)).collect(),
        h: hx.max(hy),
    }
}

/// `count` points spread along a closed polygon, every vertex included.
fn perimeter_points(poly: &[[f64; 2]], count: usize) -> Vec<[f64; 2]> {
    let m = poly.len();
    let lens: Vec<f64> = (0..m)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % m]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let total: f64 = lens.iter().sum();
    let mut out = Vec::with_capacity(count + m);
    for i in 0..m {
        let (a, b) = (poly[i], poly[(i + 1) % m]);
        let k = ((count as f64 * lens[i] / total).ceil() as usize).max(1);
        for s in 0..k {
            let u = s as f64 / k as f64;
            out.push([a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]);
        }
    }
    out
}

fn polygon_points(poly: &[[f64; 2]], t: usize, seed: u64) -> (Vec<[f64; 2]>, f64) {
    let area = 0.5
        * (0..poly.len())
            .map(|i| {
                let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            .abs();
    let nb = (BOUNDARY_FRACTION * t as f64).ceil() as usize;
    let ni = t.saturating_sub(nb).max(t / 2);
    let h = (area / (nb + ni) as f64).sqrt();
    let mut pts = perimeter_points(poly, nb);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in poly {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let inside = |q: [f64; 2]| {
        polygon_contains(poly, q, 0.0)
            && (0..poly.len()).all(|i| {
                let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
                let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                ((b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])) / len >= 0.5 * h
            })
    };
    let start = 1 + seed * 1009;
    let mut idx = start;
    let mut placed = 0;
    while placed < ni && idx < start + 100 * ni as u64 + 1000 {
        let q = [
            lo[0] + (hi[0] - lo[0]) * halton(idx, 2),
            lo[1] + (hi[1] - lo[1]) * halton(idx, 3),
        ];
        idx += 1;
        if inside(q) {
            pts.push(q);
            placed += 1;
        }
    }
    (pts, h)
}

fn planar_point(q: [f64; 2], complex: bool) -> Point {
    if complex {
        Point::c1(Complex64::new(q[0], q[1]))
    } else {
        Point::real(&q)
    }
}

/// Parameter-space sampling `x = h(t) + M t^m v`, `v` on a lattice of the
/// unit cube, `t` uniform in `[t_lo, t_hi]`.
fn cusp_points(c: &Cusp, t_lo: f64, t_hi: f64, target: usize) -> Raw {
    let n = c.dim();
    let k: usize = if n == 1 { 5 } else { 7 };
    let per_t = k.pow(n as u32);
    let nt = (target.div_ceil(per_t) + 1).max(2);
    let dt = (t_hi - t_lo) / (nt - 1) as f64;
    let lattice: Vec<f64> = (0..k).map(|i| -1.0 + 2.0 * i as f64 / (k - 1) as f64).collect();
    let mut points = Vec::with_capacity(nt * per_t);
    let mut max_w: f64 = 0.0;
    for i in 0..nt {
        let t = if i == nt - 1 { t_hi } else { t_lo + dt * i as f64 };
        let p = c.eval(t);
        let w = c.half_width(t);
        max_w = max_w.max(w);
        if n == 1 {
            for v in &lattice {
                points.push(Point::real(&[p[0] + w * v]));
            }
        } else {
            for v1 in &lattice {
                for v2 in &lattice {
                    points.push(Point::real(&[p[0] + w * v1, p[1] + w * v2]));
                }
            }
        }
    }
    Raw {
        points,
        h: dt.max(2.0 * max_w / (k - 1) as f64),
    }
}

fn ball_intersection_points(
    inner: &SetSpec,
    center: &[Complex64],
    radius: f64,
    t: usize,
    seed: u64,
) -> Result<Raw> {
    let real_inner = inner.is_real();
    // a real set only meets the real trace of the ball
    let (real_center, real_radius) = if real_inner {
        let im2: f64 = center.iter().map(|c| c.im * c.im).sum();
        if im2 >= radius * radius {
            return Err(Error::Degenerate("ball misses the real slice".into()));
        }
        (
            center.iter().map(|c| c.re).collect::<Vec<_>>(),
            (radius * radius - im2).sqrt(),
        )
    } else {
        (Vec::new(), radius)
    };
    let in_ball = |p: &Point| {
        p.coords()
            .iter()
            .zip(center)
            .map(|(a, c)| (a - c).norm_sqr())
            .sum::<f64>()
            .sqrt()
            <= radius + super::MEMBERSHIP_TOL
    };

    if let Some((a, b)) = real_segment(inner) {
        let lo = a.max(real_center[0] - real_radius);
        let hi = b.min(real_center[0] + real_radius);
        if hi - lo <= 1e-14 * (1.0 + hi.abs()) {
            return Err(Error::Degenerate("ball meets the segment in at most a point".into()));
        }
        return Ok(interval_grid(lo, hi, t));
    }

    if let SetSpec::Cusp(c) = inner {
        let (t_lo, t_hi) = cusp_parameter_range(c, &real_center, real_radius)
            .ok_or_else(|| Error::Degenerate("ball misses the cusp".into()))?;
        let mut request = t;
        loop {
            let raw = cusp_points(c, t_lo, t_hi, request);
            let pts: Vec<Point> = raw.points.into_iter().filter(|p| in_ball(p)).collect();
            if pts.len() >= t || request > MAX_SAMPLE_COUNT / 4 {
                return Ok(Raw { points: pts, h: raw.h });
            }
            request *= 2;
        }
    }

    let ball = if real_inner {
        SetSpec::RealBall {
            center: real_center.clone(),
            radius: real_radius,
        }
    } else {
        SetSpec::ComplexBall {
            center: center.to_vec(),
            radius,
        }
    };
    let mut request = t;
    loop {
        let from_inner = generate(inner, request, seed)?;
        let from_ball = generate(&ball, request, seed)?;
        let mut pts: Vec<Point> = from_inner.points.into_iter().filter(|p| in_ball(p)).collect();
        pts.extend(
            from_ball
                .points
                .into_iter()
                .filter(|p| inner.contains_unchecked(p)),
        );
        pts.extend(local_boundary(inner, center, radius, request / 4 + 8));
        let h = from_inner.h.min(from_ball.h);
        let pts = dedup(pts);
        if pts.len() >= t {
            return Ok(Raw { points: pts, h });
        }
        request *= 2;
        if request > MAX_SAMPLE_COUNT / 2 {
            return Ok(Raw { points: pts, h });
        }
    }
}

/// Real segment `[a, b]` when the set is one-dimensional and real.
fn real_segment(spec: &SetSpec) -> Option<(f64, f64)> {
    match spec {
        SetSpec::Interval { a, b } => Some((*a, *b)),
        SetSpec::RealBall { center, radius } if center.len() == 1 => {
            Some((center[0] - radius, center[0] + radius))
        }
        SetSpec::Box { axes } if axes.len() == 1 => Some((axes[0][0], axes[0][1])),
        _ => None,
    }
}

fn cusp_parameter_range(c: &Cusp, center: &[f64], radius: f64) -> Option<(f64, f64)> {
    const SCAN: usize = 4096;
    let reach = (c.dim() as f64).sqrt();
    let hits: Vec<usize> = (0..=SCAN)
        .filter(|&k| {
            let t = k as f64 / SCAN as f64;
            let p = c.eval(t);
            let d = p.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            d - reach * c.half_width(t) <= radius
        })
        .collect();
    let (first, last) = (*hits.first()?, *hits.last()?);
    let lo = first.saturating_sub(1) as f64 / SCAN as f64;
    let hi = ((last + 1).min(SCAN)) as f64 / SCAN as f64;
    (hi > lo).then_some((lo, hi))
}

/// Boundary points of `spec` near the ball `B(center, radius)`.
fn local_boundary(spec: &SetSpec, center: &[Complex64], radius: f64, count: usize) -> Vec<Point> {
    let in_ball = |p: &Point| {
        p.coords()
            .iter()
            .zip(center)
            .map(|(a, c)| (a - c).norm_sqr())
            .sum::<f64>()
            .sqrt()
            <= radius
    };
    let pts: Vec<Point> = match spec {
        SetSpec::ComplexBall { center: c0, radius: r0 } if c0.len() == 1 => {
            let rel = center[0] - c0[0];
            arc_points(*r0, rel.norm(), rel.arg(), radius, count)
                .into_iter()
                .map(|[x, y]| Point::c1(c0[0] + Complex64::new(x, y)))
                .collect()
        }
        SetSpec::RealBall { center: c0, radius: r0 } if c0.len() == 2 => {
            let (dx, dy) = (center[0].re - c0[0], center[1].re - c0[1]);
            arc_points(*r0, dx.hypot(dy), dy.atan2(dx), radius, count)
                .into_iter()
                .map(|[x, y]| Point::real(&[c0[0] + x, c0[1] + y]))
                .collect()
        }
        SetSpec::Box { axes } if axes.len() == 2 => {
            let (x0, x1, y0, y1) = (axes[0][0], axes[0][1], axes[1][0], axes[1][1]);
            let poly = [[x0, y0], [x1, y0], [x1, y1], [x0, y1]];
            clipped_edges(&poly, [center[0].re, center[1].re], radius, count)
                .into_iter()
                .map(|q| Point::real(&q))
                .collect()
        }
        SetSpec::ConvexHull { vertices } => match spec.hull_polygon() {
            Some(poly) if poly.len() >= 3 => {
                let complex = vertices[0].dim() == 1;
                let c = if complex {
                    [center[0].re, center[0].im]
                } else {
                    [center[0].re, center[1].re]
                };
                clipped_edges(&poly, c, radius, count)
                    .into_iter()
                    .map(|q| planar_point(q, complex))
                    .collect()
            }
            _ => Vec::new(),
        },
        _ => Vec::new(),
    };
    pts.into_iter().filter(|p| in_ball(p)).collect()
}

/// Points of the circle `|x| = r0` within distance `radius` of the point at
/// polar coordinates `(dist, angle)`.
fn arc_points(r0: f64, dist: f64, angle: f64, radius: f64, count: usize) -> Vec<[f64; 2]> {
    let half = if dist < 1e-300 {
        if r0 <= radius {
            PI
        } else {
            return Vec::new();
        }
    } else {
        let kappa = (r0 * r0 + dist * dist - radius * radius) / (2.0 * r0 * dist);
        if kappa >= 1.0 {
            return Vec::new();
        }
        kappa.max(-1.0).acos()
    };
    let count = count.max(2);
    (0..count)
        .map(|k| {
            let th = angle - half + 2.0 * half * k as f64 / (count - 1) as f64;
            [r0 * th.cos(), r0 * th.sin()]
        })
        .collect()
}

fn clipped_edges(poly: &[[f64; 2]], c: [f64; 2], radius: f64, count: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let f = [a[0] - c[0], a[1] - c[1]];
        let qa = d[0] * d[0] + d[1] * d[1];
        let qb = 2.0 * (f[0] * d[0] + f[1] * d[1]);
        let qc = f[0] * f[0] + f[1] * f[1] - radius * radius;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            continue;
        }
        let s = disc.sqrt();
        let lo = ((-qb - s) / (2.0 * qa)).max(0.0);
        let hi = ((-qb + s) / (2.0 * qa)).min(1.0);
        if hi <= lo {
            continue;
        }
        for k in 0..count.max(2) {
            let u = lo + (hi - lo) * k as f64 / (count.max(2) - 1) as f64;
            out.push([a[0] + u * d[0], a[1] + u * d[1]]);
        }
    }
    out
}

fn dedup(points: Vec<Point>) -> Vec<Point> {
    let mut seen = HashSet::with_capacity(points.len());
    points
        .into_iter()
        .filter(|p| {
            let key: Vec<i64> = p
                .coords()
                .iter()
                .flat_map(|c| [c.re, c.im])
                .map(|x| (x / DEDUP_TOL).round() as i64)
                .collect();
            seen.insert(key)
        })
        .collect()
}

fn bounding_radius(points: &[Point]) -> f64 {
    let n = points[0].dim();
    let mut center = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in center.iter_mut().enumerate() {
        let (mut rl, mut rh, mut il, mut ih) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            let z = p.coords()[k];
            rl = rl.min(z.re);
            rh = rh.max(z.re);
            il = il.min(z.im);
            ih = ih.max(z.im);
        }
        *c = Complex64::new(0.5 * (rl + rh), 0.5 * (il + ih));
    }
    let c = Point::from_coords(center);
    points.iter().map(|p| p.dist(&c)).fold(0.0, f64::max)
}

pub(crate) fn cloud_digest(points: &[Point]) -> String {
    let mut hasher = Sha256::new();
    for p in points {
        for c in p.coords() {
            hasher.update(c.re.to_le_bytes());
            hasher.update(c.im.to_le_bytes());
        }
    }
    hex::encode(&hasher.finalize()[..8])
}
