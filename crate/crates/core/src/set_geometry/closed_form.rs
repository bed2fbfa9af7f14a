use std::f64::consts::PI;

use num_complex::Complex64;

use super::SetSpec;
use crate::error::{Error, Result};
use crate::point::Point;

/// Closed-form extremal function of a complex ball, a real ball or an
/// interval.
pub fn exact_extremal(spec: &SetSpec, z: &Point) -> Result<f64> {
    z.check_dim(spec.dim())?;
    match spec {
        SetSpec::ComplexBall { center, radius } => {
            let d = z
                .coords()
                .iter()
                .zip(center)
                .map(|(a, c)| (a - c).norm_sqr())
                .sum::<f64>()
                .sqrt();
            Ok((d / radius).ln().max(0.0))
        }
        SetSpec::RealBall { center, radius } => {
            let w: Vec<Complex64> = z
                .coords()
                .iter()
                .zip(center)
                .map(|(a, c)| (a - c) / radius)
                .collect();
            Ok(real_ball_extremal(&w))
        }
        SetSpec::Interval { a, b } => {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            Ok(real_ball_extremal(&[(z.coords()[0] - mid) / half]))
        }
        other => Err(Error::NoClosedForm(kind_name(other).into())),
    }
}

/// Extremal function of the closed real unit ball of R^n inside C^n:
/// `½ log h(|w|² + |w·w − 1|)` with `h(x) = x + √(x² − 1)`.
pub fn real_ball_extremal(w: &[Complex64]) -> f64 {
    let norm2: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    let dot: Complex64 = w.iter().map(|c| c * c).sum();
    let x = norm2 + (dot - 1.0).norm();
    // x ≥ 1 analytically; write h(x) = 1 + e with e = (x−1) + √((x−1)(x+1))
    let xm1 = (x - 1.0).max(0.0);
    let e = xm1 + (xm1 * (x + 1.0)).sqrt();
    0.5 * e.ln_1p()
}

/// Harmonic measure of the upper unit semicircle seen from `tau` in the
/// closed upper half-disc: `(2/π) arg((1+τ)/(1−τ))`.
pub fn halfdisc_harmonic_measure(tau: Complex64) -> Result<f64> {
    if !(tau.re.is_finite() && tau.im.is_finite()) {
        return Err(Error::OutOfDomain("non-finite tau".into()));
    }
    if tau.im < -super::MEMBERSHIP_TOL || tau.norm() > 1.0 + super::MEMBERSHIP_TOL {
        return Err(Error::OutOfDomain(format!(
            "tau = {tau} is outside the closed upper half-disc"
        )));
    }
    if (tau - 1.0).norm() < 1e-14 {
        return Err(Error::BoundarySingularity(1.0));
    }
    if (tau + 1.0).norm() < 1e-14 {
        return Err(Error::BoundarySingularity(-1.0));
    }
    let ratio = (1.0 + tau) / (1.0 - tau);
    Ok((2.0 / PI * ratio.arg()).clamp(0.0, 1.0))
}

pub(crate) fn kind_name(spec: &SetSpec) -> &'static str {
    match spec {
        SetSpec::Interval { .. } => "Interval",
        SetSpec::ComplexBall { .. } => "ComplexBall",
        SetSpec::RealBall { .. } => "RealBall",
        SetSpec::Box { .. } => "Box",
        SetSpec::ConvexHull { .. } => "ConvexHull",
        SetSpec::Cusp(_) => "Cusp",
        SetSpec::AffineImage { .. } => "AffineImage",
        SetSpec::Union { .. } => "Union",
        SetSpec::BallIntersection { .. } => "BallIntersection",
    }
}
