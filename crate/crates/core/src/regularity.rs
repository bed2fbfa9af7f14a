//! Modulus-of-continuity scans of extremal functions, Hölder and HCP-order
//! fits, capacity-density arithmetic and the localization experiment.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::Sandwich;
use crate::fekete::{solve_fekete, WeightSpec, DEFAULT_RESTARTS, DEFAULT_TOL};
use crate::io::content_hash;
use crate::point::Point;
use crate::poly_basis::BasisSpec;
use crate::set_geometry::{exact_extremal, sample, sphere3_spiral, SetSpec};

/// Directions per sphere.
pub const DIRECTIONS: usize = 64;
/// δ points whose gap exceeds this share of the lower track are dropped.
pub const NOISE_FLOOR: f64 = 0.5;
pub const MIN_FIT_POINTS: usize = 5;
pub const MIN_HCP_RADII: usize = 4;
/// R² required to call HCP growth logarithmic.
pub const LOG_GROWTH_R2: f64 = 0.99;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Engine {
    Exact,
    Sandwich { degree: usize },
    Projective { degree: usize },
}

impl Engine {
    pub fn label(&self) -> String {
        match self {
            Engine::Exact => "exact".into(),
            Engine::Sandwich { degree } => format!("sandwich({degree})"),
            Engine::Projective { degree } => format!("projective({degree})"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanOptions {
    pub directions: usize,
    /// Cloud size for sandwich engines; `None` picks `max(4000, 20 N)`.
    pub cloud_size: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            directions: DIRECTIONS,
            cloud_size: None,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerFit {
    pub mu: f64,
    pub c: f64,
    pub r2: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusReport {
    pub set_id: String,
    pub anchor: Point,
    pub deltas: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub gap: f64,
    pub source: String,
    pub directions: usize,
    /// Indices of δ values above the noise floor.
    pub survivors: Vec<usize>,
    pub fit: Option<PowerFit>,
    pub inconclusive: bool,
}

impl ModulusReport {
    pub fn mu(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.mu)
    }

    /// CSV `delta,varpi_lower,varpi_upper`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,varpi_lower,varpi_upper\n");
        for ((d, l), u) in self.deltas.iter().zip(&self.lower).zip(&self.upper) {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::io::fmt_f64(*d),
                crate::io::fmt_f64(*l),
                crate::io::fmt_f64(*u)
            ));
        }
        out
    }
}

/// Unit directions: 64 angles in C, or a spherical Fibonacci set on S³ ⊂ C².
pub fn direction_mesh(n: usize, count: usize) -> Vec<Vec<Complex64>> {
    if n == 1 {
        (0..count)
            .map(|k| vec![Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / count as f64)])
            .collect()
    } else {
        sphere3_spiral(count)
            .into_iter()
            .map(|q| vec![Complex64::new(q[0], q[1]), Complex64::new(q[2], q[3])])
            .collect()
    }
}

/// Pointwise `(lower, upper)` extremal values from a prepared engine.
enum Evaluator {
    Exact(SetSpec),
    Sandwich(Box<Sandwich>),
    Projective(Box<Sandwich>),
}

impl Evaluator {
    fn build(spec: &SetSpec, engine: &Engine, opts: &ScanOptions) -> Result<Self> {
        Ok(match engine {
            Engine::Exact => {
                exact_extremal(spec, &origin(spec.dim()))?;
                Evaluator::Exact(spec.clone())
            }
            Engine::Sandwich { degree } => Evaluator::Sandwich(Box::new(prepare(spec, *degree, WeightSpec::Zero, opts)?)),
            Engine::Projective { degree } => {
                Evaluator::Projective(Box::new(prepare(spec, *degree, WeightSpec::FubiniStudy, opts)?))
            }
        })
    }

    fn eval(&self, z: &Point) -> Result<(f64, f64)> {
        match self {
            Evaluator::Exact(spec) => {
                let v = exact_extremal(spec, z)?;
                Ok((v, v))
            }
            Evaluator::Sandwich(s) => {
                let e = s.estimate(z)?;
                Ok((e.lower, e.upper))
            }
            Evaluator::Projective(s) => {
                let e = s.projective(z)?;
                Ok((e.lower, e.upper))
            }
        }
    }

    fn gap(&self) -> f64 {
        match self {
            Evaluator::Exact(_) => 0.0,
            Evaluator::Sandwich(s) | Evaluator::Projective(s) => s.gap(),
        }
    }
}

fn origin(n: usize) -> Point {
    Point::real(&vec![0.0; n])
}

/// Sample, solve Fekete and wrap the sandwich evaluator.
pub fn prepare(spec: &SetSpec, degree: usize, weight: WeightSpec, opts: &ScanOptions) -> Result<Sandwich> {
    let basis = BasisSpec::new(spec.dim(), degree)?;
    let count = opts.cloud_size.unwrap_or((20 * basis.size()).max(4000));
    let cloud = sample(spec, count, opts.seed)?;
    let cfg = solve_fekete(&cloud, &basis, &weight, opts.restarts, opts.tol)?;
    Sandwich::new(&cfg, &cloud)
}

fn check_grid(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 6 {
        return Err(Error::InvalidArgument("δ grid needs at least 6 points".into()));
    }
    if deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidArgument("δ values must be positive".into()));
    }
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let ratios: Vec<f64> = sorted.windows(2).map(|w| w[0] / w[1]).collect();
    if ratios.iter().any(|r| *r > 0.7 + 1e-9) {
        return Err(Error::InvalidArgument("δ grid ratio must be at most 0.7".into()));
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |a, r| (a.0.min(*r), a.1.max(*r)));
    if hi - lo > 1e-6 * hi {
        return Err(Error::InvalidArgument("δ grid must be geometric".into()));
    }
    Ok(())
}

/// Geometric grid of `count` values from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let r = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count).map(|k| if k == count - 1 { hi } else { lo * r.powi(k as i32) }).collect()
}

pub fn modulus_fit(spec: &SetSpec, a: &Point, deltas: &[f64], engine: &Engine) -> Result<ModulusReport> {
    modulus_fit_with(spec, a, deltas, engine, &ScanOptions::default())
}

pub fn modulus_fit_with(
    spec: &SetSpec,
    a: &Point,
    deltas: &[f64],
    engine: &Engine,
    opts: &ScanOptions,
) -> Result<ModulusReport> {
    check_anchor(spec, a)?;
    check_grid(deltas)?;
    let ev = Evaluator::build(spec, engine, opts)?;
    scan(spec, a, deltas, &ev, &engine.label(), opts.directions)
}

fn check_anchor(spec: &SetSpec, a: &Point) -> Result<()> {
    if !spec.contains(a)? {
        return Err(Error::OutOfDomain("anchor is not in the set".into()));
    }
    Ok(())
}

fn scan(spec: &SetSpec, a: &Point, deltas: &[f64], ev: &Evaluator, source: &str, directions: usize) -> Result<ModulusReport> {
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let dirs = direction_mesh(a.dim(), directions);
    let raw: Vec<(f64, f64)> = sorted
        .par_iter()
        .map(|&delta| sphere_max(a, delta, &dirs, ev))
        .collect::<Result<_>>()?;
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    let (mut lo_run, mut up_run) = (0.0f64, 0.0f64);
    for (l, u) in raw {
        lo_run = lo_run.max(l);
        up_run = up_run.max(u);
        lower.push(lo_run);
        upper.push(up_run);
    }
    let gap = ev.gap();
    let survivors: Vec<usize> = (0..sorted.len())
        .filter(|&k| lower[k] > 0.0 && gap <= NOISE_FLOOR * lower[k])
        .collect();
    let fit = (survivors.len() >= MIN_FIT_POINTS).then(|| {
        let xs: Vec<f64> = survivors.iter().map(|&k| sorted[k].ln()).collect();
        let ys: Vec<f64> = survivors.iter().map(|&k| lower[k].ln()).collect();
        let (c, mu, r2) = least_squares(&xs, &ys);
        PowerFit {
            mu,
            c: c.exp(),
            r2,
            points: survivors.len(),
        }
    });
    Ok(ModulusReport {
        set_id: content_hash(spec).map_err(Error::Json)?[..16].to_string(),
        anchor: a.clone(),
        deltas: sorted,
        lower,
        upper,
        gap,
        source: source.to_string(),
        directions,
        survivors,
        inconclusive: fit.is_none(),
        fit,
    })
}

/// `(max lower, max upper)` over the sphere `|z − a| = δ`, clamped at 0.
fn sphere_max(a: &Point, delta: f64, dirs: &[Vec<Complex64>], ev: &Evaluator) -> Result<(f64, f64)> {
    let mut best = (0.0f64, 0.0f64);
    for dir in dirs {
        let (l, u) = ev.eval(&a.offset(dir, delta))?;
        best = (best.0.max(l), best.1.max(u));
    }
    Ok(best)
}

/// `y ≈ c + s x`; returns `(c, s, R²)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let (c, s) = crate::fekete::linear_fit(xs, ys);
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - c - s * x).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (c, s, r2)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HcpRadius {
    pub r: f64,
    /// Sup of the lower track over `|z − a| = 1`.
    pub sup: f64,
    pub modulus: ModulusReport,
    /// `Ĉ(r) · r^q̂` when both fits exist.
    pub coefficient: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HcpReport {
    pub anchor: Point,
    pub degree: usize,
    pub radii: Vec<HcpRadius>,
    pub dropped: Vec<(f64, String)>,
    pub q_hat: Option<f64>,
    pub q_r2: Option<f64>,
    pub logarithmic: bool,
}

impl HcpReport {
    pub fn mu_hats(&self) -> Vec<Option<f64>> {
        self.radii.iter().map(|r| r.modulus.mu()).collect()
    }

    /// CSV `r,sup,mu_hat`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,sup,mu_hat\n");
        for r in &self.radii {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::io::fmt_f64(r.r),
                crate::io::fmt_f64(r.sup),
                r.modulus.mu().map(crate::io::fmt_f64).unwrap_or_default()
            ));
        }
        out
    }
}

pub fn hcp_scan(spec: &SetSpec, a: &Point, radii: &[f64], deltas: &[f64], degree: usize) -> Result<HcpReport> {
    hcp_scan_with(spec, a, radii, deltas, degree, &ScanOptions::default())
}

pub fn hcp_scan_with(
    spec: &SetSpec,
    a: &Point,
    radii: &[f64],
    deltas: &[f64],
    degree: usize,
    opts: &ScanOptions,
) -> Result<HcpReport> {
    check_anchor(spec, a)?;
    check_grid(deltas)?;
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
        return Err(Error::InvalidArgument("radii must lie in (0, 1]".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("radii must be decreasing".into()));
    }
    let reference = direction_mesh(a.dim(), opts.directions);
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for &r in radii {
        let local = SetSpec::ball_intersection(spec.clone(), a, r);
        let sandwich = match prepare(&local, degree, WeightSpec::Zero, opts) {
            Ok(s) => s,
            Err(e @ (Error::Pluripolar { .. } | Error::Degenerate(_) | Error::TooFewPoints { .. })) => {
                log::warn!("dropping radius {r}: {e}");
                dropped.push((r, e.to_string()));
                continue;
            }
            Err(e) => return Err(e),
        };
        let ev = Evaluator::Sandwich(Box::new(sandwich));
        let modulus = scan(&local, a, deltas, &ev, &Engine::Sandwich { degree }.label(), opts.directions)?;
        let (sup, _) = sphere_max(a, 1.0, &reference, &ev)?;
        kept.push(HcpRadius {
            r,
            sup,
            modulus,
            coefficient: None,
        });
    }
    let (mut q_hat, mut q_r2, mut logarithmic) = (None, None, false);
    if kept.len() >= MIN_HCP_RADII && kept.iter().all(|k| k.sup > 0.0) {
        let inv_log: Vec<f64> = kept.iter().map(|k| (1.0 / k.r).ln()).collect();
        let log_sup: Vec<f64> = kept.iter().map(|k| k.sup.ln()).collect();
        let sups: Vec<f64> = kept.iter().map(|k| k.sup).collect();
        let (_, q, r2_power) = least_squares(&inv_log, &log_sup);
        let (_, _, r2_log) = least_squares(&inv_log, &sups);
        if r2_log >= LOG_GROWTH_R2 && r2_log >= r2_power {
            logarithmic = true;
            q_hat = Some(0.0);
            q_r2 = Some(r2_log);
        } else {
            q_hat = Some(q);
            q_r2 = Some(r2_power);
        }
    }
    if let Some(q) = q_hat {
        for k in kept.iter_mut() {
            k.coefficient = k.modulus.fit.as_ref().map(|f| f.c * k.r.powf(q));
        }
    }
    Ok(HcpReport {
        anchor: a.clone(),
        degree,
        radii: kept,
        dropped,
        q_hat,
        q_r2,
        logarithmic,
    })
}

/// `(κ, exponent) = (1/A, n q)` from a sup-norm bound `sup L ≤ A / r^q`.
pub fn capacity_density_from_supnorm(a: f64, q: f64, n: usize) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("A must be positive".into()));
    }
    if !(q >= 0.0) {
        return Err(Error::InvalidArgument("q must be nonnegative".into()));
    }
    Ok((1.0 / a, n as f64 * q))
}

/// Data of an affine cube inside the set at a point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CondPWitness {
    pub segment_lengths: Vec<f64>,
    /// Lower bound `m` on the affine map.
    pub map_bound: f64,
    /// Set diameter `‖E‖`.
    pub set_diameter: f64,
}

impl CondPWitness {
    pub fn new(segment_lengths: Vec<f64>, map_bound: f64, set_diameter: f64) -> Result<Self> {
        let w = CondPWitness {
            segment_lengths,
            map_bound,
            set_diameter,
        };
        if !(w.min_length() > 0.0) || !(map_bound > 0.0) || !(set_diameter >= 0.0) {
            return Err(Error::InvalidArgument("witness needs d > 0 and m > 0".into()));
        }
        Ok(w)
    }

    pub fn min_length(&self) -> f64 {
        self.segment_lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `4 √(1 + ‖E‖) / (m d) · δ^{1/2}`.
pub fn condition_p_bound(w: &CondPWitness, delta: f64) -> f64 {
    4.0 * (1.0 + w.set_diameter).sqrt() / (w.map_bound * w.min_length()) * delta.sqrt()
}

/// Geometric-condition constant `m = (r/n³)^n / ‖E‖^{n−1}`.
pub fn geometric_condition_m(r: f64, n: usize, diameter: f64) -> f64 {
    let n3 = (n * n * n) as f64;
    (r / n3).powi(n as i32) / diameter.powi(n as i32 - 1)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub whole: ModulusReport,
    pub local: ModulusReport,
    pub radius: f64,
    /// `|μ̂_K − μ̂_{K∩B}|` when both fits exist.
    pub difference: Option<f64>,
}

pub fn localization_experiment(
    spec: &SetSpec,
    a: &Point,
    r: f64,
    degree: usize,
    deltas: &[f64],
) -> Result<LocalizationReport> {
    localization_experiment_with(spec, a, r, degree, deltas, &ScanOptions::default())
}

pub fn localization_experiment_with(
    spec: &SetSpec,
    a: &Point,
    r: f64,
    degree: usize,
    deltas: &[f64],
    opts: &ScanOptions,
) -> Result<LocalizationReport> {
    check_anchor(spec, a)?;
    if !(r > 0.0 && r < spec.diameter()?) {
        return Err(Error::InvalidArgument("need 0 < r < diameter".into()));
    }
    let engine = Engine::Projective { degree };
    let whole = modulus_fit_with(spec, a, deltas, &engine, opts)?;
    let local_spec = SetSpec::ball_intersection(spec.clone(), a, r);
    let local = modulus_fit_with(&local_spec, a, deltas, &engine, opts)?;
    let difference = match (whole.mu(), local.mu()) {
        (Some(x), Some(y)) => Some((x - y).abs()),
        _ => None,
    };
    Ok(LocalizationReport {
        whole,
        local,
        radius: r,
        difference,
    })
}
