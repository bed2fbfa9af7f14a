//! Equilibrium measures with closed forms, Hölder norms of test functions and
//! the convergence rate of Fekete measures.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fekete::{fekete_measure, refine_locally, solve_fekete, DEFAULT_RESTARTS};
use crate::io::fmt_f64;
use crate::point::Point;
use crate::poly_basis::BasisSpec;
use crate::regularity::least_squares;
use crate::set_geometry::{sample, SetSpec};

const CIRCLE_NODES: usize = 1 << 14;
const ARCSINE_NODES: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ClosedFormMeasure {
    /// Density `1/(π√((x−a)(b−x)))` on `(a, b)`.
    Arcsine { a: f64, b: f64 },
    /// Normalized arc length on `|z − center| = radius`.
    UniformCircle { center: Complex64, radius: f64 },
}

impl ClosedFormMeasure {
    fn validate(&self) -> Result<()> {
        match self {
            ClosedFormMeasure::Arcsine { a, b } if a.is_finite() && b.is_finite() && a < b => Ok(()),
            ClosedFormMeasure::UniformCircle { center, radius }
                if center.re.is_finite() && center.im.is_finite() && radius.is_finite() && *radius > 0.0 =>
            {
                Ok(())
            }
            _ => Err(Error::InvalidArgument(format!("bad measure {self:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TestKind {
    /// `v(z) = Re Σ c_k z^k`.
    Polynomial { coefficients: Vec<Complex64> },
    /// Values on the uniform grid `lo = x_0 < … < x_m = hi`, linearly
    /// interpolated; defined on the real segment only.
    TabulatedLipschitz { lo: f64, hi: f64, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    #[serde(flatten)]
    pub kind: TestKind,
    /// Declared Hölder exponent.
    pub alpha: f64,
}

impl TestFunction {
    pub fn polynomial(coefficients: Vec<Complex64>, alpha: f64) -> Result<Self> {
        let v = TestFunction {
            kind: TestKind::Polynomial { coefficients },
            alpha,
        };
        v.validate()?;
        Ok(v)
    }

    /// Real polynomial `Σ c_k x^k`.
    pub fn real_polynomial(coefficients: &[f64]) -> Result<Self> {
        Self::polynomial(coefficients.iter().map(|c| Complex64::new(*c, 0.0)).collect(), 1.0)
    }

    pub fn tabulate(lo: f64, hi: f64, count: usize, alpha: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument("tabulation needs two values".into()));
        }
        let h = (hi - lo) / (count - 1) as f64;
        let values = (0..count).map(|k| f(if k == count - 1 { hi } else { lo + h * k as f64 })).collect();
        let v = TestFunction {
            kind: TestKind::TabulatedLipschitz { lo, hi, values },
            alpha,
        };
        v.validate()?;
        Ok(v)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!("Hölder exponent {} outside (0, 1]", self.alpha)));
        }
        match &self.kind {
            TestKind::Polynomial { coefficients } => {
                if coefficients.is_empty() || coefficients.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                    return Err(Error::InvalidArgument("polynomial needs finite coefficients".into()));
                }
            }
            TestKind::TabulatedLipschitz { lo, hi, values } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) || values.len() < 2 {
                    return Err(Error::InvalidArgument("tabulation needs lo < hi and two values".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite tabulated value".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<f64> {
        match &self.kind {
            TestKind::Polynomial { coefficients } => {
                Ok(coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c).re)
            }
            TestKind::TabulatedLipschitz { lo, hi, values } => {
                let x = z.re;
                if z.im.abs() > 1e-12 || x < lo - 1e-12 || x > hi + 1e-12 {
                    return Err(Error::OutOfDomain(format!("{z} outside the tabulation [{lo}, {hi}]")));
                }
                let m = values.len() - 1;
                let s = ((x - lo) / (hi - lo) * m as f64).clamp(0.0, m as f64);
                let k = (s.floor() as usize).min(m - 1);
                let t = s - k as f64;
                Ok(values[k] * (1.0 - t) + values[k + 1] * t)
            }
        }
    }

    fn eval_point(&self, p: &Point) -> Result<f64> {
        if p.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: p.dim() });
        }
        self.eval(p.coords()[0])
    }
}

/// `⟨μ, v⟩`.
pub fn equilibrium_pairing(measure: &ClosedFormMeasure, v: &TestFunction) -> Result<f64> {
    measure.validate()?;
    v.validate()?;
    match (measure, &v.kind) {
        (ClosedFormMeasure::Arcsine { a, b }, TestKind::Polynomial { coefficients }) => {
            Ok(arcsine_polynomial(*a, *b, coefficients))
        }
        (ClosedFormMeasure::Arcsine { a, b }, TestKind::TabulatedLipschitz { lo, hi, .. }) => {
            if *lo > a + 1e-12 || *hi < b - 1e-12 {
                return Err(Error::OutOfDomain(format!("tabulation [{lo}, {hi}] does not cover [{a}, {b}]")));
            }
            // Gauss–Chebyshev: equal weights at the Chebyshev roots
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            let n = ARCSINE_NODES;
            let mut sum = 0.0;
            for j in 0..n {
                let t = (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64).cos();
                sum += v.eval(Complex64::new((mid + half * t).clamp(*a, *b), 0.0))?;
            }
            Ok(sum / n as f64)
        }
        (ClosedFormMeasure::UniformCircle { center, radius }, TestKind::Polynomial { .. }) => {
            let n = CIRCLE_NODES;
            let mut sum = 0.0;
            for k in 0..n {
                let theta = std::f64::consts::TAU * k as f64 / n as f64;
                sum += v.eval(center + Complex64::from_polar(*radius, theta))?;
            }
            Ok(sum / n as f64)
        }
        (ClosedFormMeasure::UniformCircle { .. }, TestKind::TabulatedLipschitz { .. }) => Err(Error::OutOfDomain(
            "a real tabulation cannot cover a circle".into(),
        )),
    }
}

/// Pairing of `Re Σ c_k x^k` with the arcsine law on `[a, b]`, through the
/// moments of `t = (x − mid)/half`: `m_0 = 1`, odd moments vanish and
/// `m_k = (k−1)/k · m_{k−2}`.
fn arcsine_polynomial(a: f64, b: f64, coefficients: &[Complex64]) -> f64 {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let deg = coefficients.len() - 1;
    let mut moments = vec![0.0; deg + 1];
    moments[0] = 1.0;
    for k in (2..=deg).step_by(2) {
        moments[k] = (k - 1) as f64 / k as f64 * moments[k - 2];
    }
    // Horner in t on the real parts: p(mid + half t)
    let mut shifted = vec![0.0; deg + 1];
    for c in coefficients.iter().rev() {
        // shifted ← shifted · (mid + half t) + c
        let mut next = vec![0.0; deg + 1];
        for (k, s) in shifted.iter().enumerate() {
            next[k] += s * mid;
            if k < deg {
                next[k + 1] += s * half;
            }
        }
        next[0] += c.re;
        shifted = next;
    }
    shifted.iter().zip(&moments).map(|(s, m)| s * m).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderNorm {
    pub value: f64,
    /// Same estimate on the half-resolution grid.
    pub coarse: f64,
    pub sup: f64,
    pub seminorm: f64,
    /// The estimate moved by 5% or more between the two grids.
    pub divergent: bool,
}

/// Discrete `sup|v| + sup |v(x)−v(y)|/|x−y|^α` over a uniform grid of the
/// box, a lower bound of the true norm. One axis is the real segment, two
/// axes are the real and imaginary parts of `z`.
pub fn holder_norm(v: &TestFunction, alpha: f64, bounds: &[[f64; 2]], grid_n: usize) -> Result<HolderNorm> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("α = {alpha} outside (0, 1]")));
    }
    if grid_n < 128 {
        return Err(Error::InvalidArgument("grid_n must be at least 128".into()));
    }
    if bounds.is_empty() || bounds.len() > 2 || bounds.iter().any(|b| !(b[0] < b[1])) {
        return Err(Error::InvalidArgument("bounds must be one or two increasing axes".into()));
    }
    v.validate()?;
    let (sup, seminorm) = grid_norm(v, alpha, bounds, grid_n)?;
    let (sup_c, semi_c) = grid_norm(v, alpha, bounds, grid_n / 2)?;
    let value = sup + seminorm;
    let coarse = sup_c + semi_c;
    Ok(HolderNorm {
        value,
        coarse,
        sup,
        seminorm,
        divergent: (value - coarse).abs() >= 0.05 * value.abs().max(f64::MIN_POSITIVE),
    })
}

fn grid_norm(v: &TestFunction, alpha: f64, bounds: &[[f64; 2]], n: usize) -> Result<(f64, f64)> {
    let axis = |b: [f64; 2]| -> Vec<f64> {
        (0..n)
            .map(|k| if k == n - 1 { b[1] } else { b[0] + (b[1] - b[0]) * k as f64 / (n - 1) as f64 })
            .collect()
    };
    let xs = axis(bounds[0]);
    let ys = if bounds.len() == 2 { axis(bounds[1]) } else { vec![0.0] };
    let pts: Vec<Complex64> = ys.iter().flat_map(|y| xs.iter().map(move |x| Complex64::new(*x, *y))).collect();
    let vals: Vec<f64> = pts.iter().map(|z| v.eval(*z)).collect::<Result<_>>()?;
    let sup = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let seminorm = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            for j in i + 1..pts.len() {
                let dist = (pts[i] - pts[j]).norm();
                let scale = if alpha == 1.0 { dist } else { dist.powf(alpha) };
                best = best.max((vals[i] - vals[j]).abs() / scale);
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok((sup, seminorm))
}

/// `μ² / (μ + 2 + q)`.
pub fn localized_holder_exponent(mu: f64, q: f64) -> Result<f64> {
    if !(mu > 0.0 && mu <= 1.0) || !(q >= 0.0) {
        return Err(Error::InvalidArgument(format!("need μ ∈ (0, 1] and q ≥ 0, got {mu}, {q}")));
    }
    Ok(mu * mu / (mu + 2.0 + q))
}

#[derive(Clone, Debug)]
pub struct RateOptions {
    /// `None` means `max(2001, 20 N)` at each degree.
    pub cloud_size: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
    pub refinement_levels: usize,
    pub points_per_node: usize,
    /// Exponent of the comparison line.
    pub alpha_prime: f64,
    /// Replaces the closed-form pairing.
    pub reference: Option<f64>,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions {
            cloud_size: None,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            tol: 1e-13,
            refinement_levels: 4,
            points_per_node: 64,
            alpha_prime: 0.5,
            reference: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub degrees: Vec<usize>,
    pub errors: Vec<f64>,
    pub reference: f64,
    /// Slope and `exp(intercept)` of `log e_d` against `log d`.
    pub slope: f64,
    pub c_fit: f64,
    pub r2: f64,
    pub alpha_prime: f64,
    pub norm: f64,
    /// `C` with `e_{d_0} = C ‖v‖ d_0^{−α′}` at the smallest degree.
    pub c_calibrated: f64,
    pub bound_line: Vec<f64>,
}

impl RateFit {
    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    /// Degrees whose error lies above the calibrated line.
    pub fn bound_violations(&self) -> Vec<usize> {
        self.degrees
            .iter()
            .zip(self.errors.iter().zip(&self.bound_line))
            .filter(|(_, (e, b))| **e > **b * (1.0 + 1e-12))
            .map(|(d, _)| *d)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,e_d,bound_line\n");
        for ((d, e), b) in self.degrees.iter().zip(&self.errors).zip(&self.bound_line) {
            out.push_str(&format!("{d},{},{}\n", fmt_f64(*e), fmt_f64(*b)));
        }
        out
    }
}

/// Fekete measures of each degree against the equilibrium pairing.
pub fn rate_experiment(
    spec: &SetSpec,
    v: &TestFunction,
    degrees: &[usize],
    measure: &ClosedFormMeasure,
) -> Result<RateFit> {
    rate_experiment_with(spec, v, degrees, measure, &RateOptions::default())
}

pub fn rate_experiment_with(
    spec: &SetSpec,
    v: &TestFunction,
    degrees: &[usize],
    measure: &ClosedFormMeasure,
    opts: &RateOptions,
) -> Result<RateFit> {
    if degrees.len() < 4 {
        return Err(Error::InvalidArgument("rate fit needs at least 4 degrees".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) || degrees[0] == 0 {
        return Err(Error::InvalidArgument("degrees must be positive and strictly increasing".into()));
    }
    if spec.dim() != 1 {
        return Err(Error::Unsupported("equilibrium measures are available in one variable only".into()));
    }
    if !(opts.alpha_prime > 0.0) {
        return Err(Error::InvalidArgument("α′ must be positive".into()));
    }
    let reference = match opts.reference {
        Some(r) => r,
        None => equilibrium_pairing(measure, v)?,
    };
    let errors: Vec<f64> = degrees
        .par_iter()
        .map(|&d| fekete_error(spec, v, d, reference, opts))
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = degrees.iter().map(|d| (*d as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, intercept, r2) = least_squares(&xs, &ys);
    let bounds = measure_box(measure);
    // all-pairs cost grows like grid_n^(2·axes)
    let grid_n = if bounds.len() == 1 { 1024 } else { 128 };
    let norm = holder_norm(v, v.alpha, &bounds, grid_n)?.value;
    let d0 = degrees[0] as f64;
    let c_calibrated = errors[0] * d0.powf(opts.alpha_prime) / norm.max(f64::MIN_POSITIVE);
    let bound_line = degrees
        .iter()
        .map(|d| c_calibrated * norm * (*d as f64).powf(-opts.alpha_prime))
        .collect();
    Ok(RateFit {
        degrees: degrees.to_vec(),
        errors,
        reference,
        slope,
        c_fit: intercept.exp(),
        r2,
        alpha_prime: opts.alpha_prime,
        norm,
        c_calibrated,
        bound_line,
    })
}

fn measure_box(measure: &ClosedFormMeasure) -> Vec<[f64; 2]> {
    match measure {
        ClosedFormMeasure::Arcsine { a, b } => vec![[*a, *b]],
        ClosedFormMeasure::UniformCircle { center, radius } => vec![
            [center.re - radius, center.re + radius],
            [center.im - radius, center.im + radius],
        ],
    }
}

fn fekete_error(spec: &SetSpec, v: &TestFunction, d: usize, reference: f64, opts: &RateOptions) -> Result<f64> {
    let basis = BasisSpec::new(1, d)?;
    let count = opts.cloud_size.unwrap_or((20 * basis.size()).max(2001));
    let cloud = sample(spec, count, opts.seed)?;
    let mut config = solve_fekete(&cloud, &basis, &crate::fekete::WeightSpec::Zero, opts.restarts, opts.tol)?;
    if opts.refinement_levels > 0 {
        config = refine_locally(&config, spec, &cloud, opts.refinement_levels, opts.points_per_node, opts.tol)?.0;
    }
    let mu = fekete_measure(&config);
    let mut mean = 0.0;
    let mut sup = 0.0f64;
    for (p, m) in mu.support.iter().zip(&mu.masses) {
        let x = v.eval_point(p)?;
        mean += m * x;
        sup = sup.max(x.abs());
    }
    let e = (mean - reference).abs();
    debug_assert!(e <= 2.0 * sup.max(reference.abs()) + 1e-12);
    Ok(e)
}
