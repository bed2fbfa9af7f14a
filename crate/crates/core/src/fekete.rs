//! Weighted Fekete configurations on point clouds: greedy selection, exchange
//! refinement, Lagrange quality and transfinite-diameter estimates.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::point::Point;
use crate::poly_basis::{log_abs_vdm, orthonormal_basis_with_values, BasisSpec, OrthoBasis};
use crate::set_geometry::{sample, SampleCloud, SetSpec};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_RESTARTS: usize = 3;
/// Swaps between fresh recomputations of the Lagrange table.
const RECOMPUTE_EVERY: usize = 25;

/// Tabulated weight values on a cloud, evaluated by nearest neighbour.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TabulatedWeight {
    pub cloud_id: String,
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    /// Hölder exponent and constant of the underlying weight.
    pub alpha: f64,
    pub constant: f64,
}

impl TabulatedWeight {
    pub fn new(cloud: &SampleCloud, values: Vec<f64>, alpha: f64, constant: f64) -> Result<Self> {
        if values.len() != cloud.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weight values for a cloud of {} points",
                values.len(),
                cloud.len()
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0) || !(constant >= 0.0) {
            return Err(Error::InvalidArgument("weight needs alpha in (0,1] and constant ≥ 0".into()));
        }
        Ok(TabulatedWeight {
            cloud_id: cloud.id.clone(),
            points: cloud.points.clone(),
            values,
            alpha,
            constant,
        })
    }

    /// Tabulate `f` on the cloud.
    pub fn from_fn(cloud: &SampleCloud, f: impl Fn(&Point) -> f64, alpha: f64, constant: f64) -> Result<Self> {
        let values = cloud.points.iter().map(f).collect();
        Self::new(cloud, values, alpha, constant)
    }

    fn nearest(&self, p: &Point) -> (usize, f64) {
        self.points
            .iter()
            .enumerate()
            .map(|(i, q)| (i, q.dist(p)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    /// Bound `constant · dist^alpha` on the nearest-neighbour error at `p`.
    pub fn interpolation_bound(&self, p: &Point) -> f64 {
        self.constant * self.nearest(p).1.powf(self.alpha)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum WeightSpec {
    Zero,
    /// `ρ(z) = ½ log(1 + |z|²)`.
    FubiniStudy,
    Tabulated(TabulatedWeight),
}

impl WeightSpec {
    pub fn eval(&self, p: &Point) -> f64 {
        match self {
            WeightSpec::Zero => 0.0,
            WeightSpec::FubiniStudy => fubini_study(p),
            WeightSpec::Tabulated(t) => t.values[t.nearest(p).0],
        }
    }

    pub fn values_on(&self, points: &[Point]) -> Vec<f64> {
        match self {
            WeightSpec::Zero => vec![0.0; points.len()],
            WeightSpec::Tabulated(t) if t.points.as_slice() == points => t.values.clone(),
            _ => points.par_iter().map(|p| self.eval(p)).collect(),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            WeightSpec::Zero => "zero",
            WeightSpec::FubiniStudy => "fubini-study",
            WeightSpec::Tabulated(_) => "tabulated",
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, WeightSpec::Zero)
    }
}

/// Local potential `½ log(1 + |z|²)` of the Fubini–Study metric.
pub fn fubini_study(p: &Point) -> f64 {
    0.5 * p.norm().powi(2).ln_1p()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub cloud_id: String,
    pub seed: u64,
    pub density_parameter: f64,
    pub tol: f64,
    /// Restart whose result was kept.
    pub restart: usize,
    /// Accepted exchange swaps (summed over refinement levels).
    pub swaps: usize,
    pub refinement_levels: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeketeConfig {
    pub basis: BasisSpec,
    pub weight: WeightSpec,
    pub nodes: Vec<Point>,
    /// Positions of the nodes in the generating cloud.
    pub node_indices: Vec<usize>,
    /// `log|VDM(nodes)| − d Σ φ(node_j)`.
    pub objective: f64,
    pub gamma: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub support: Vec<Point>,
    pub masses: Vec<f64>,
}

impl DiscreteMeasure {
    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.support.iter().zip(&self.masses).map(|(p, m)| m * f(p)).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct FeketeOptions {
    pub restarts: usize,
    pub tol: f64,
    /// Swap cap; `None` means `50·N`.
    pub max_iters: Option<usize>,
}

impl Default for FeketeOptions {
    fn default() -> Self {
        FeketeOptions {
            restarts: DEFAULT_RESTARTS,
            tol: DEFAULT_TOL,
            max_iters: None,
        }
    }
}

pub fn solve_fekete(
    cloud: &SampleCloud,
    basis: &BasisSpec,
    weight: &WeightSpec,
    restarts: usize,
    tol: f64,
) -> Result<FeketeConfig> {
    solve_fekete_with(
        cloud,
        basis,
        weight,
        &FeketeOptions {
            restarts,
            tol,
            max_iters: None,
        },
    )
}

pub fn solve_fekete_with(
    cloud: &SampleCloud,
    basis: &BasisSpec,
    weight: &WeightSpec,
    opts: &FeketeOptions,
) -> Result<FeketeConfig> {
    check_options(opts)?;
    let size = basis.size();
    if cloud.len() < 2 * size {
        return Err(Error::TooFewPoints {
            needed: 2 * size,
            got: cloud.len(),
        });
    }
    let table = WeightedTable::new(cloud, basis, weight)?;
    let max_iters = opts.max_iters.unwrap_or(50 * size);
    let runs: Vec<Result<Run>> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let start = table.greedy(r)?;
            table.exchange(start, opts.tol, max_iters)
        })
        .collect();
    let mut best: Option<(usize, Run)> = None;
    for (r, run) in runs.into_iter().enumerate() {
        let run = run?;
        if best.as_ref().is_none_or(|(_, b)| run.log_det > b.log_det) {
            best = Some((r, run));
        }
    }
    let (restart, run) = best.expect("at least one restart");
    finish(cloud, basis, weight, &table, run, restart, opts.tol, 0)
}

fn check_options(opts: &FeketeOptions) -> Result<()> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cloud: &SampleCloud,
    basis: &BasisSpec,
    weight: &WeightSpec,
    table: &WeightedTable,
    run: Run,
    restart: usize,
    tol: f64,
    refinement_levels: usize,
) -> Result<FeketeConfig> {
    let nodes: Vec<Point> = run.nodes.iter().map(|&i| cloud.points[i].clone()).collect();
    let d = basis.d as f64;
    let phi_sum: f64 = run.nodes.iter().map(|&i| table.phi[i]).sum();
    let objective = log_abs_vdm(&nodes, basis)? - d * phi_sum;
    if !objective.is_finite() {
        return Err(Error::Pluripolar { degree: basis.d });
    }
    let lagrange = table.lagrange(&run.nodes)?;
    let gamma = max_abs(&lagrange).max(1.0);
    Ok(FeketeConfig {
        basis: basis.clone(),
        weight: weight.clone(),
        nodes,
        node_indices: run.nodes,
        objective,
        gamma,
        provenance: Provenance {
            cloud_id: cloud.id.clone(),
            seed: cloud.seed,
            density_parameter: cloud.density_parameter,
            tol,
            restart,
            swaps: run.swaps,
            refinement_levels,
        },
    })
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.as_slice()
        .par_iter()
        .map(|c| c.norm())
        .reduce(|| 0.0, f64::max)
}

struct Run {
    nodes: Vec<usize>,
    log_det: f64,
    swaps: usize,
}

/// Orthonormal basis values on the cloud with rows scaled by
/// `exp(−d (φ − min φ))`.
struct WeightedTable {
    a: DMatrix<Complex64>,
    phi: Vec<f64>,
}

impl WeightedTable {
    fn new(cloud: &SampleCloud, basis: &BasisSpec, weight: &WeightSpec) -> Result<Self> {
        let (_, mut a) = orthonormal_basis_with_values(cloud, basis)?;
        let phi = weight.values_on(&cloud.points);
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite weight value on the cloud".into()));
        }
        if !weight.is_zero() {
            let floor = phi.iter().copied().fold(f64::INFINITY, f64::min);
            let d = basis.d as f64;
            for (i, v) in phi.iter().enumerate() {
                let w = (-d * (v - floor)).exp();
                a.row_mut(i).scale_mut(w);
            }
        }
        Ok(WeightedTable { a, phi })
    }

    fn rows(&self) -> usize {
        self.a.nrows()
    }

    fn size(&self) -> usize {
        self.a.ncols()
    }

    /// Pivoted Gram–Schmidt row selection; restart `r` forces the first pivot
    /// to be the row of `r`-th largest norm.
    fn greedy(&self, restart: usize) -> Result<Vec<usize>> {
        let (m, n) = (self.rows(), self.size());
        // points as columns so each residual is contiguous
        let mut res = self.a.transpose();
        let base: Vec<f64> = res.column_iter().map(|c| c.norm_squared()).collect();
        let mut norms = base.clone();
        let mut chosen = Vec::with_capacity(n);
        for k in 0..n {
            let pick = if k == 0 && restart > 0 {
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
                order[restart.min(m - 1)]
            } else {
                argmax_first(&norms)
            };
            // exact norm of the pivot, the downdated value drifts; a residual
            // at rounding level of its own row carries no information
            let piv = res.column(pick).norm_squared();
            if !(piv > 1e-24 * base[pick]) || !(piv > 0.0) {
                return Err(Error::Pluripolar { degree: 0 });
            }
            chosen.push(pick);
            let u: Vec<Complex64> = res.column(pick).iter().map(|c| c / piv.sqrt()).collect();
            let data = res.as_mut_slice();
            for (i, col) in data.chunks_exact_mut(n).enumerate() {
                let c: Complex64 = col.iter().zip(&u).map(|(a, b)| a * b.conj()).sum();
                for (a, b) in col.iter_mut().zip(&u) {
                    *a -= c * b;
                }
                norms[i] = (norms[i] - c.norm_sqr()).max(0.0);
                if norms[i] < 1e-8 * base[i] {
                    norms[i] = col.iter().map(|c| c.norm_sqr()).sum();
                    if norms[i] <= 1e-24 * base[i] {
                        norms[i] = 0.0;
                    }
                }
            }
            for &c in &chosen {
                norms[c] = f64::NEG_INFINITY;
            }
        }
        Ok(chosen)
    }

    /// `L = A · A_S⁻¹` (cloud × nodes).
    fn lagrange(&self, nodes: &[usize]) -> Result<DMatrix<Complex64>> {
        let sub = self.a.select_rows(nodes);
        let inv = sub.try_inverse().ok_or(Error::SingularSystem)?;
        Ok(linalg::mul(&self.a, &inv))
    }

    fn log_det(&self, nodes: &[usize]) -> f64 {
        crate::poly_basis::log_abs_det(self.a.select_rows(nodes)).0
    }

    /// Swap a node for a cloud point while `log|L_xj| ≥ tol`.
    fn exchange(&self, mut nodes: Vec<usize>, tol: f64, max_iters: usize) -> Result<Run> {
        let mut l = self.lagrange(&nodes)?;
        let threshold = (2.0 * tol).exp();
        let mut swaps = 0;
        let mut since_fresh = 0;
        while swaps < max_iters {
            let (x, j, v) = best_entry(&l);
            if !(v >= threshold) {
                break;
            }
            if nodes.contains(&x) {
                break;
            }
            nodes[j] = x;
            swaps += 1;
            since_fresh += 1;
            if since_fresh >= RECOMPUTE_EVERY {
                l = self.lagrange(&nodes)?;
                since_fresh = 0;
            } else {
                rank_one_update(&mut l, x, j);
            }
        }
        let log_det = self.log_det(&nodes);
        Ok(Run {
            nodes,
            log_det,
            swaps,
        })
    }
}

fn argmax_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Largest `|L_xj|²`; ties resolved by lowest `x`, then lowest `j`.
fn best_entry(l: &DMatrix<Complex64>) -> (usize, usize, f64) {
    let m = l.nrows();
    let per_col: Vec<(usize, f64)> = (0..l.ncols())
        .into_par_iter()
        .map(|j| {
            let col = &l.as_slice()[j * m..(j + 1) * m];
            let mut best = (0, col[0].norm_sqr());
            for (x, c) in col.iter().enumerate().skip(1) {
                let v = c.norm_sqr();
                if v > best.1 {
                    best = (x, v);
                }
            }
            best
        })
        .collect();
    let top = per_col.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let (j, &(x, v)) = per_col
        .iter()
        .enumerate()
        .filter(|(_, c)| c.1 == top)
        .min_by_key(|(j, c)| (c.0, *j))
        .expect("nonempty");
    (x, j, v)
}

/// Lagrange table after node `j` is replaced by cloud point `x`.
fn rank_one_update(l: &mut DMatrix<Complex64>, x: usize, j: usize) {
    let pivot = l[(x, j)];
    let mut row: Vec<Complex64> = l.row(x).iter().map(|c| c / pivot).collect();
    row[j] -= Complex64::new(1.0, 0.0) / pivot;
    let col: Vec<Complex64> = l.column(j).iter().copied().collect();
    let m = l.nrows();
    l.as_mut_slice()
        .par_chunks_mut(m)
        .enumerate()
        .for_each(|(k, dst)| {
            let r = row[k];
            for (d, c) in dst.iter_mut().zip(&col) {
                *d -= c * r;
            }
        });
}

/// Densify the cloud around each node with samples of `K ∩ B(node, 2h)`,
/// `h` shrinking by the local sampling factor each level, and continue the
/// exchange from the current nodes.
pub fn refine_locally(
    config: &FeketeConfig,
    spec: &SetSpec,
    cloud: &SampleCloud,
    levels: usize,
    points_per_node: usize,
    tol: f64,
) -> Result<(FeketeConfig, SampleCloud)> {
    if config.provenance.cloud_id != cloud.id {
        return Err(Error::ConfigMismatch("config was not solved on this cloud".into()));
    }
    check_options(&FeketeOptions {
        tol,
        ..FeketeOptions::default()
    })?;
    let mut cloud = cloud.clone();
    let mut config = config.clone();
    let mut h = cloud.density_parameter;
    for level in 1..=levels {
        let mut extra = Vec::new();
        let mut finest = h;
        for node in &config.nodes {
            let local = SetSpec::ball_intersection(spec.clone(), node, 2.0 * h);
            let s = sample(&local, points_per_node.max(4), cloud.seed)?;
            finest = finest.min(s.density_parameter);
            extra.extend(s.points);
        }
        h = finest;
        let next = cloud.extended(extra, h);
        let index: std::collections::HashMap<String, usize> = next
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (point_key(p), i))
            .collect();
        let start: Vec<usize> = config
            .nodes
            .iter()
            .map(|p| index.get(&point_key(p)).copied().ok_or(Error::SingularSystem))
            .collect::<Result<_>>()?;
        let table = WeightedTable::new(&next, &config.basis, &config.weight)?;
        let run = table.exchange(start, tol, 50 * config.basis.size())?;
        let swaps = config.provenance.swaps + run.swaps;
        let restart = config.provenance.restart;
        let mut refined = finish(&next, &config.basis, &config.weight, &table, run, restart, tol, level)?;
        refined.provenance.swaps = swaps;
        config = refined;
        cloud = next;
    }
    Ok((config, cloud))
}

fn point_key(p: &Point) -> String {
    p.coords()
        .iter()
        .map(|c| format!("{:x}:{:x}", c.re.to_bits(), c.im.to_bits()))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn fekete_measure(config: &FeketeConfig) -> DiscreteMeasure {
    let n = config.nodes.len();
    DiscreteMeasure {
        support: config.nodes.clone(),
        masses: vec![1.0 / n as f64; n],
    }
}

/// Lagrange polynomials of a configuration, evaluated through the
/// orthonormal basis of its cloud.
pub struct LagrangeEvaluator {
    pub ortho: OrthoBasis,
    inverse: DMatrix<Complex64>,
    cloud_values: DMatrix<Complex64>,
}

impl LagrangeEvaluator {
    pub fn new(config: &FeketeConfig, cloud: &SampleCloud) -> Result<Self> {
        if config.provenance.cloud_id != cloud.id {
            return Err(Error::ConfigMismatch(format!(
                "config cloud {} vs supplied cloud {}",
                config.provenance.cloud_id, cloud.id
            )));
        }
        let (ortho, cloud_values) = orthonormal_basis_with_values(cloud, &config.basis)?;
        let at_nodes = ortho.eval_matrix(&config.nodes)?;
        let inverse = at_nodes.try_inverse().ok_or(Error::SingularSystem)?;
        Ok(LagrangeEvaluator {
            ortho,
            inverse,
            cloud_values,
        })
    }

    /// `(ℓ_1(z), …, ℓ_N(z))`.
    pub fn eval(&self, z: &Point) -> Result<Vec<Complex64>> {
        let q = self.ortho.eval(z)?;
        let n = q.len();
        Ok((0..n)
            .map(|j| (0..n).map(|k| q[k] * self.inverse[(k, j)]).sum())
            .collect())
    }

    /// Lagrange values on the generating cloud (cloud × nodes).
    pub fn on_cloud(&self) -> DMatrix<Complex64> {
        linalg::mul(&self.cloud_values, &self.inverse)
    }
}

/// `γ = max_j max_x |ℓ_j(x)| exp(−d(φ(x) − φ(x_j)))` over the cloud.
pub fn quality_gamma(config: &FeketeConfig, cloud: &SampleCloud) -> Result<f64> {
    let ev = LagrangeEvaluator::new(config, cloud)?;
    let l = ev.on_cloud();
    let d = config.basis.d as f64;
    let phi = config.weight.values_on(&cloud.points);
    let phi_nodes = config.weight.values_on(&config.nodes);
    let m = l.nrows();
    let gamma = (0..l.ncols())
        .into_par_iter()
        .map(|j| {
            let col = &l.as_slice()[j * m..(j + 1) * m];
            col.iter()
                .zip(&phi)
                .map(|(c, p)| c.norm() * (-d * (p - phi_nodes[j])).exp())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(gamma)
}

/// Recompute γ on `cloud` and store it.
pub fn certify(config: &mut FeketeConfig, cloud: &SampleCloud) -> Result<f64> {
    let g = quality_gamma(config, cloud)?;
    config.gamma = g;
    Ok(g)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransfiniteEstimate {
    pub degrees: Vec<usize>,
    /// `δ_d = exp(2 log|VDM| / (N(N−1)))`.
    pub deltas: Vec<f64>,
    /// Intercept of the least-squares line `δ_d ≈ c + s/d`.
    pub estimate: f64,
    pub slope: f64,
}

pub fn transfinite_diameter(configs: &[FeketeConfig]) -> Result<f64> {
    Ok(transfinite_sequence(configs)?.estimate)
}

pub fn transfinite_sequence(configs: &[FeketeConfig]) -> Result<TransfiniteEstimate> {
    if configs.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 degrees".into()));
    }
    if configs.iter().any(|c| c.basis.n != 1) {
        return Err(Error::MixedConfigs("transfinite diameter needs n = 1".into()));
    }
    if configs.iter().any(|c| !c.weight.is_zero()) {
        return Err(Error::MixedConfigs("transfinite diameter needs unweighted configs".into()));
    }
    let mut sorted: Vec<&FeketeConfig> = configs.iter().collect();
    sorted.sort_by_key(|c| c.basis.d);
    if sorted.windows(2).any(|w| w[0].basis.d == w[1].basis.d) {
        return Err(Error::MixedConfigs("repeated degree".into()));
    }
    let degrees: Vec<usize> = sorted.iter().map(|c| c.basis.d).collect();
    let mut deltas = Vec::with_capacity(sorted.len());
    for c in &sorted {
        let n = c.nodes.len() as f64;
        let lv = log_abs_vdm(&c.nodes, &c.basis)?;
        deltas.push((2.0 * lv / (n * (n - 1.0))).exp());
    }
    let xs: Vec<f64> = degrees.iter().map(|&d| 1.0 / d as f64).collect();
    let (estimate, slope) = linear_fit(&xs, &deltas);
    Ok(TransfiniteEstimate {
        degrees,
        deltas,
        estimate,
        slope,
    })
}

/// Least-squares `y ≈ c + s x`; returns `(c, s)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let s = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - s * mx, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_geometry::SetSpec;

    fn interval_cloud(n: usize) -> SampleCloud {
        sample(&SetSpec::interval(-1.0, 1.0), n, 0).unwrap()
    }

    fn sorted_reals(c: &FeketeConfig) -> Vec<f64> {
        let mut xs: Vec<f64> = c.nodes.iter().map(|p| p.coords()[0].re).collect();
        xs.sort_by(f64::total_cmp);
        xs
    }

    /// Exhaustive maximization of |VDM| over all node triples of a cloud.
    fn brute_force_triple(xs: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                for k in j + 1..xs.len() {
                    let v = ((xs[i] - xs[j]) * (xs[i] - xs[k]) * (xs[j] - xs[k])).abs().ln();
                    best = best.max(v);
                }
            }
        }
        best
    }

    #[test]
    fn degree_two_matches_exhaustive_search() {
        let cloud = interval_cloud(101);
        let b = BasisSpec::new(1, 2).unwrap();
        let cfg = solve_fekete(&cloud, &b, &WeightSpec::Zero, 3, DEFAULT_TOL).unwrap();
        let xs: Vec<f64> = cloud.points.iter().map(|p| p.coords()[0].re).collect();
        assert!((cfg.objective - brute_force_triple(&xs)).abs() < 1e-12);
        let nodes = sorted_reals(&cfg);
        for (got, want) in nodes.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-3);
        }
        assert!((cfg.gamma - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_weight_objective_is_log_vdm() {
        let cloud = sample(&SetSpec::disc(Complex64::new(0.0, 0.0), 1.0), 500, 0).unwrap();
        let b = BasisSpec::new(1, 6).unwrap();
        let cfg = solve_fekete(&cloud, &b, &WeightSpec::Zero, 2, DEFAULT_TOL).unwrap();
        assert_eq!(cfg.objective, log_abs_vdm(&cfg.nodes, &b).unwrap());
        for (p, &i) in cfg.nodes.iter().zip(&cfg.node_indices) {
            assert_eq!(p, &cloud.points[i]);
        }
        assert!(cfg.gamma >= 1.0 - 1e-9);
    }

    #[test]
    fn circle_nodes_are_equispaced() {
        let cloud = sample(&SetSpec::disc(Complex64::new(0.0, 0.0), 1.0), 2000, 0).unwrap();
        let d = 5;
        let cfg = solve_fekete(&cloud, &BasisSpec::new(1, d).unwrap(), &WeightSpec::Zero, 3, DEFAULT_TOL).unwrap();
        let mut angles: Vec<f64> = cfg.nodes.iter().map(|p| p.coords()[0].arg()).collect();
        angles.sort_by(f64::total_cmp);
        let step = 2.0 * std::f64::consts::PI / (d + 1) as f64;
        for w in angles.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-3);
        }
        for p in &cfg.nodes {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_detects_poor_nodes() {
        let mut pts: Vec<Point> = interval_cloud(201).points;
        pts.push(Point::real(&[0.105]));
        let cloud = SampleCloud::from_points(pts, 0, 0.01).unwrap();
        let b = BasisSpec::new(1, 2).unwrap();
        let mut cfg = solve_fekete(&cloud, &b, &WeightSpec::Zero, 1, DEFAULT_TOL).unwrap();
        assert!((quality_gamma(&cfg, &cloud).unwrap() - 1.0).abs() < 1e-6);
        cfg.nodes = vec![Point::real(&[-1.0]), Point::real(&[0.105]), Point::real(&[1.0])];
        assert!(quality_gamma(&cfg, &cloud).unwrap() > 1.0);
    }

    #[test]
    fn exchange_improves_on_greedy() {
        let cloud = sample(&SetSpec::Box { axes: vec![[0.0, 1.0], [0.0, 1.0]] }, 600, 0).unwrap();
        let b = BasisSpec::new(2, 4).unwrap();
        let table = WeightedTable::new(&cloud, &b, &WeightSpec::Zero).unwrap();
        let start = table.greedy(0).unwrap();
        let before = table.log_det(&start);
        let run = table.exchange(start, DEFAULT_TOL, 1000).unwrap();
        assert!(run.log_det >= before);
        // every remaining candidate swap is below tolerance
        let l = table.lagrange(&run.nodes).unwrap();
        assert!(max_abs(&l) < (DEFAULT_TOL).exp() + 1e-9);
    }

    #[test]
    fn rank_one_update_matches_fresh_table() {
        let cloud = interval_cloud(50);
        let b = BasisSpec::new(1, 4).unwrap();
        let table = WeightedTable::new(&cloud, &b, &WeightSpec::Zero).unwrap();
        let mut nodes = vec![0, 10, 20, 30, 40];
        let mut l = table.lagrange(&nodes).unwrap();
        rank_one_update(&mut l, 49, 2);
        nodes[2] = 49;
        let fresh = table.lagrange(&nodes).unwrap();
        assert!(max_abs(&(l - fresh)) < 1e-10);
    }

    #[test]
    fn measure_masses() {
        let cloud = interval_cloud(101);
        let cfg = solve_fekete(&cloud, &BasisSpec::new(1, 2).unwrap(), &WeightSpec::Zero, 1, DEFAULT_TOL).unwrap();
        let mu = fekete_measure(&cfg);
        assert_eq!(mu.masses, vec![1.0 / 3.0; 3]);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        let sq = SetSpec::Box { axes: vec![[0.0, 1.0], [0.0, 1.0]] };
        let cloud = sample(&sq, 100, 0).unwrap();
        let cfg = solve_fekete(&cloud, &BasisSpec::new(2, 1).unwrap(), &WeightSpec::Zero, 1, DEFAULT_TOL).unwrap();
        assert_eq!(fekete_measure(&cfg).masses.len(), 3);
    }

    #[test]
    fn small_cloud_and_bad_tol_rejected() {
        let cloud = interval_cloud(5);
        let b = BasisSpec::new(1, 3).unwrap();
        assert!(matches!(
            solve_fekete(&cloud, &b, &WeightSpec::Zero, 1, DEFAULT_TOL),
            Err(Error::TooFewPoints { .. })
        ));
        let cloud = interval_cloud(50);
        assert!(matches!(
            solve_fekete(&cloud, &b, &WeightSpec::Zero, 1, 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn config_cloud_mismatch() {
        let a = interval_cloud(50);
        let b = interval_cloud(60);
        let cfg = solve_fekete(&a, &BasisSpec::new(1, 2).unwrap(), &WeightSpec::Zero, 1, DEFAULT_TOL).unwrap();
        assert!(matches!(quality_gamma(&cfg, &b), Err(Error::ConfigMismatch(_))));
    }

    #[test]
    fn fubini_study_weight() {
        let p = Point::c2(Complex64::new(1.0, 1.0), Complex64::new(0.0, 1.0));
        assert!((fubini_study(&p) - 0.5 * 4f64.ln()).abs() < 1e-15);
        let cloud = interval_cloud(200);
        let cfg = solve_fekete(&cloud, &BasisSpec::new(1, 4).unwrap(), &WeightSpec::FubiniStudy, 2, DEFAULT_TOL).unwrap();
        let phi: f64 = cfg.nodes.iter().map(fubini_study).sum();
        let want = log_abs_vdm(&cfg.nodes, &cfg.basis).unwrap() - 4.0 * phi;
        assert!((cfg.objective - want).abs() < 1e-12);
        assert!((quality_gamma(&cfg, &cloud).unwrap() - cfg.gamma).abs() < 1e-8);
    }

    #[test]
    fn tabulated_weight_uses_nearest_value() {
        let cloud = interval_cloud(11);
        let w = TabulatedWeight::from_fn(&cloud, |p| p.coords()[0].re, 1.0, 1.0).unwrap();
        let spec = WeightSpec::Tabulated(w.clone());
        assert!((spec.eval(&Point::real(&[0.21])) - 0.2).abs() < 1e-12);
        assert!((w.interpolation_bound(&Point::real(&[0.21])) - 0.01).abs() < 1e-12);
        assert_eq!(spec.values_on(&cloud.points), w.values);
    }

    #[test]
    fn local_refinement_sharpens_lobatto_nodes() {
        let spec = SetSpec::interval(-1.0, 1.0);
        let cloud = sample(&spec, 201, 0).unwrap();
        let b = BasisSpec::new(1, 4).unwrap();
        let cfg = solve_fekete(&cloud, &b, &WeightSpec::Zero, 3, 1e-13).unwrap();
        let (fine, fine_cloud) = refine_locally(&cfg, &spec, &cloud, 3, 64, 1e-13).unwrap();
        assert!(fine.objective >= cfg.objective);
        let inner = (3.0f64 / 7.0).sqrt();
        let xs = sorted_reals(&fine);
        for (got, want) in xs.iter().zip([-1.0, -inner, 0.0, inner, 1.0]) {
            assert!((got - want).abs() < 1e-5, "{xs:?}");
        }
        assert_eq!(fine.provenance.cloud_id, fine_cloud.id);
        assert_eq!(fine.provenance.refinement_levels, 3);
    }

    #[test]
    fn transfinite_diameter_of_interval() {
        let cloud = interval_cloud(2001);
        let configs: Vec<FeketeConfig> = [8, 12, 16]
            .iter()
            .map(|&d| solve_fekete(&cloud, &BasisSpec::new(1, d).unwrap(), &WeightSpec::Zero, 1, DEFAULT_TOL).unwrap())
            .collect();
        let est = transfinite_diameter(&configs).unwrap();
        assert!((est - 0.5).abs() < 0.05, "{est}");
        assert!(matches!(transfinite_diameter(&configs[..2]), Err(Error::InvalidArgument(_))));
    }
}
