//! Graded monomial bases, Vandermonde tables, log-determinants and
//! discrete orthonormalization on point clouds.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::point::Point;
use crate::set_geometry::SampleCloud;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
/// Pivots below this magnitude make the determinant `-inf`.
pub const PIVOT_FLOOR: f64 = 1e-300;
/// Relative residual below which a new basis vector counts as dependent.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Size of the space of polynomials of degree ≤ d in n variables.
pub fn dimension(n: usize, d: usize) -> Result<usize> {
    match n {
        1 => Ok(d + 1),
        2 => Ok((d + 1) * (d + 2) / 2),
        _ => Err(Error::Unsupported(format!("dimension n = {n}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    #[serde(rename = "graded-lex")]
    GradedLex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub n: usize,
    pub d: usize,
    pub ordering: Ordering,
}

impl BasisSpec {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        dimension(n, d)?;
        if d < 1 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        Ok(BasisSpec {
            n,
            d,
            ordering: Ordering::GradedLex,
        })
    }

    pub fn size(&self) -> usize {
        dimension(self.n, self.d).expect("validated at construction")
    }

    /// Exponents in graded-lex order; within a degree the first exponent
    /// decreases. The second entry is 0 when n = 1.
    pub fn exponents(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::with_capacity(self.size());
        for deg in 0..=self.d {
            if self.n == 1 {
                out.push([deg, 0]);
            } else {
                for a1 in (0..=deg).rev() {
                    out.push([a1, deg - a1]);
                }
            }
        }
        out
    }

    /// Position of an exponent in [`exponents`](Self::exponents).
    pub fn index_of(&self, e: [usize; 2]) -> usize {
        if self.n == 1 {
            e[0]
        } else {
            let deg = e[0] + e[1];
            deg * (deg + 1) / 2 + (deg - e[0])
        }
    }
}

/// Affine frame `z = center + scale · u` putting points in a unit box.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Frame {
    pub center: Vec<Complex64>,
    pub scale: Vec<f64>,
}

impl Frame {
    pub fn of(points: &[Point]) -> Frame {
        let n = points[0].dim();
        let mut center = Vec::with_capacity(n);
        let mut scale = Vec::with_capacity(n);
        for k in 0..n {
            let (mut rl, mut rh, mut il, mut ih) =
                (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for p in points {
                let z = p.coords()[k];
                rl = rl.min(z.re);
                rh = rh.max(z.re);
                il = il.min(z.im);
                ih = ih.max(z.im);
            }
            center.push(Complex64::new(0.5 * (rl + rh), 0.5 * (il + ih)));
            scale.push((0.5 * (rh - rl)).max(0.5 * (ih - il)));
        }
        Frame { center, scale }
    }

    fn local(&self, p: &Point) -> [Complex64; 2] {
        let mut u = [ZERO; 2];
        for (k, z) in p.coords().iter().enumerate() {
            let s = if self.scale[k] > 0.0 { self.scale[k] } else { 1.0 };
            u[k] = (z - self.center[k]) / s;
        }
        u
    }
}

fn check_points(points: &[Point], n: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point list".into()));
    }
    for p in points {
        p.check_dim(n)?;
    }
    Ok(())
}

fn powers(z: Complex64, d: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(d + 1);
    let mut acc = ONE;
    for _ in 0..=d {
        out.push(acc);
        acc *= z;
    }
    out
}

fn chebyshev(x: f64, d: usize) -> Vec<Complex64> {
    let mut out = vec![ONE; d + 1];
    if d >= 1 {
        out[1] = Complex64::new(x, 0.0);
    }
    for k in 2..=d {
        out[k] = Complex64::new(2.0 * x * out[k - 1].re - out[k - 2].re, 0.0);
    }
    out
}

/// Table `V[(i, j)] = e_i(x_j)` in graded-lex order.
pub fn vandermonde(points: &[Point], basis: &BasisSpec) -> Result<DMatrix<Complex64>> {
    check_points(points, basis.n)?;
    let exps = basis.exponents();
    let mut v = DMatrix::zeros(exps.len(), points.len());
    for (j, p) in points.iter().enumerate() {
        let c = p.coords();
        let p1 = powers(c[0], basis.d);
        let p2 = if basis.n == 2 { powers(c[1], basis.d) } else { vec![ONE] };
        for (i, e) in exps.iter().enumerate() {
            v[(i, j)] = p1[e[0]] * p2[e[1]];
        }
    }
    Ok(v)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VdmEvaluation {
    pub basis: BasisSpec,
    pub nodes: Vec<Point>,
    /// Natural log of |det|; `-inf` for degenerate nodes.
    pub log_abs_det: f64,
    /// det / |det| (1 when the determinant vanishes).
    pub phase: Complex64,
}

/// `log |det[e_i(x_j)]|` for exactly `N` nodes.
pub fn log_abs_vdm(nodes: &[Point], basis: &BasisSpec) -> Result<f64> {
    Ok(vdm_evaluation(nodes, basis)?.log_abs_det)
}

pub fn vdm_evaluation(nodes: &[Point], basis: &BasisSpec) -> Result<VdmEvaluation> {
    let size = basis.size();
    if nodes.len() != size {
        return Err(Error::WrongNodeCount {
            expected: size,
            got: nodes.len(),
        });
    }
    check_points(nodes, basis.n)?;
    let (log_abs_det, phase) = scaled_log_det(nodes, basis);
    Ok(VdmEvaluation {
        basis: basis.clone(),
        nodes: nodes.to_vec(),
        log_abs_det,
        phase,
    })
}

fn scaled_log_det(nodes: &[Point], basis: &BasisSpec) -> (f64, Complex64) {
    let frame = Frame::of(nodes);
    if frame.scale.iter().any(|&s| s <= 0.0) {
        return (f64::NEG_INFINITY, ONE);
    }
    let real = nodes.iter().all(Point::is_real);
    let exps = basis.exponents();
    let mut m = DMatrix::zeros(exps.len(), nodes.len());
    for (j, p) in nodes.iter().enumerate() {
        let u = frame.local(p);
        let table = |x: Complex64| {
            if real {
                chebyshev(x.re, basis.d)
            } else {
                powers(x, basis.d)
            }
        };
        let t1 = table(u[0]);
        let t2 = if basis.n == 2 { table(u[1]) } else { vec![ONE] };
        for (i, e) in exps.iter().enumerate() {
            m[(i, j)] = t1[e[0]] * t2[e[1]];
        }
    }
    let (log_det, phase) = log_abs_det(m);
    if log_det == f64::NEG_INFINITY {
        return (log_det, ONE);
    }
    let mut correction = 0.0;
    for e in &exps {
        for k in 0..basis.n {
            correction += e[k] as f64 * frame.scale[k].ln();
            if real && e[k] >= 1 {
                // leading coefficient of T_k is 2^(k-1)
                correction -= (e[k] - 1) as f64 * std::f64::consts::LN_2;
            }
        }
    }
    (log_det + correction, phase)
}

/// `(log|det|, det/|det|)` through partial-pivot LU.
pub fn log_abs_det(m: DMatrix<Complex64>) -> (f64, Complex64) {
    let lu = m.lu();
    let u = lu.u();
    let mut log = 0.0;
    let mut phase: Complex64 = lu.p().determinant();
    for k in 0..u.nrows() {
        let piv = u[(k, k)];
        let a = piv.norm();
        if !(a >= PIVOT_FLOOR) {
            return (f64::NEG_INFINITY, ONE);
        }
        log += a.ln();
        phase *= piv / a;
    }
    (log, phase)
}

/// One step of the Arnoldi recurrence:
/// `q_k = (u_axis · q_parent − Σ_j coeffs[j] q_j) / norm`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecurrenceStep {
    pub parent: usize,
    pub axis: usize,
    pub coeffs: Vec<Complex64>,
    pub norm: f64,
}

/// Polynomials orthonormal for the uniform discrete inner product
/// `⟨f, g⟩ = (1/M) Σ f(x_i) conj(g(x_i))` on a cloud, stored as an
/// Arnoldi recurrence in rescaled coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrthoBasis {
    pub basis: BasisSpec,
    pub cloud_id: String,
    pub frame: Frame,
    pub steps: Vec<RecurrenceStep>,
    /// Largest ratio `‖u q_parent‖ / residual` met while orthogonalizing.
    pub condition: f64,
    /// Max-norm deviation of the discrete Gram matrix from the identity.
    pub gram_deviation: f64,
}

/// Orthonormalize the graded monomials on `cloud`.
pub fn orthonormal_basis(cloud: &SampleCloud, basis: &BasisSpec) -> Result<OrthoBasis> {
    Ok(orthonormal_basis_with_values(cloud, basis)?.0)
}

/// As [`orthonormal_basis`], also returning the `M × N` table of values on
/// the cloud.
pub fn orthonormal_basis_with_values(
    cloud: &SampleCloud,
    basis: &BasisSpec,
) -> Result<(OrthoBasis, DMatrix<Complex64>)> {
    check_points(&cloud.points, basis.n)?;
    let size = basis.size();
    let frame = Frame::of(&cloud.points);
    let m = cloud.len();
    let local: Vec<[Complex64; 2]> = cloud.points.iter().map(|p| frame.local(p)).collect();
    let axis_vals: Vec<DVector<Complex64>> = (0..basis.n)
        .map(|a| DVector::from_iterator(m, local.iter().map(|u| u[a])))
        .collect();
    let exps = basis.exponents();
    let inv_m = 1.0 / m as f64;
    let mut q = DMatrix::<Complex64>::zeros(m, size);
    q.column_mut(0).fill(ONE);
    let mut steps = Vec::with_capacity(size - 1);
    let mut condition: f64 = 1.0;
    for k in 1..size {
        let e = exps[k];
        let (parent, axis) = if e[0] > 0 {
            (basis.index_of([e[0] - 1, e[1]]), 0)
        } else {
            (basis.index_of([e[0], e[1] - 1]), 1)
        };
        let mut v = q.column(parent).component_mul(&axis_vals[axis]);
        let start = v.norm() * inv_m.sqrt();
        let mut coeffs = DVector::<Complex64>::zeros(k);
        for _ in 0..2 {
            let data = q.as_slice();
            let vs = v.as_mut_slice();
            let h: Vec<Complex64> = data[..k * m]
                .par_chunks_exact(m)
                .map(|col| col.iter().zip(vs.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() * inv_m)
                .collect();
            for (col, hj) in data[..k * m].chunks_exact(m).zip(&h) {
                for (x, a) in vs.iter_mut().zip(col) {
                    *x -= a * hj;
                }
            }
            for (c, hj) in coeffs.iter_mut().zip(&h) {
                *c += hj;
            }
        }
        let r = v.norm() * inv_m.sqrt();
        if !(r > DEGENERACY_TOL * start) || m < k + 1 {
            return Err(Error::Pluripolar {
                degree: e[0] + e[1],
            });
        }
        condition = condition.max(start / r);
        q.set_column(k, &(v / Complex64::new(r, 0.0)));
        steps.push(RecurrenceStep {
            parent,
            axis,
            coeffs: coeffs.iter().copied().collect(),
            norm: r,
        });
    }
    if m < 2 * size {
        return Err(Error::TooFewPoints {
            needed: 2 * size,
            got: m,
        });
    }
    let gram = linalg::ad_mul(&q, &q) * Complex64::new(inv_m, 0.0);
    let gram_deviation = (0..size)
        .flat_map(|i| (0..size).map(move |j| (i, j)))
        .map(|(i, j)| (gram[(i, j)] - if i == j { ONE } else { ZERO }).norm())
        .fold(0.0, f64::max);
    let ob = OrthoBasis {
        basis: basis.clone(),
        cloud_id: cloud.id.clone(),
        frame,
        steps,
        condition,
        gram_deviation,
    };
    Ok((ob, q))
}

impl OrthoBasis {
    pub fn size(&self) -> usize {
        self.steps.len() + 1
    }

    /// All `N` basis values at `p`.
    pub fn eval(&self, p: &Point) -> Result<Vec<Complex64>> {
        p.check_dim(self.basis.n)?;
        Ok(self.eval_unchecked(p))
    }

    fn eval_unchecked(&self, p: &Point) -> Vec<Complex64> {
        let u = self.frame.local(p);
        let mut out = Vec::with_capacity(self.size());
        out.push(ONE);
        for s in &self.steps {
            let mut v = u[s.axis] * out[s.parent];
            for (c, q) in s.coeffs.iter().zip(&out) {
                v -= c * q;
            }
            out.push(v / s.norm);
        }
        out
    }

    /// `M × N` table of basis values at `points` (row per point).
    pub fn eval_matrix(&self, points: &[Point]) -> Result<DMatrix<Complex64>> {
        check_points(points, self.basis.n)?;
        let rows: Vec<Vec<Complex64>> = points.par_iter().map(|p| self.eval_unchecked(p)).collect();
        let n = self.size();
        Ok(DMatrix::from_fn(points.len(), n, |i, j| rows[i][j]))
    }

    /// `log|det[q_i(x_j)]|` in this basis (differs from the monomial value
    /// by a node-independent constant).
    pub fn log_abs_det(&self, nodes: &[Point]) -> Result<f64> {
        if nodes.len() != self.size() {
            return Err(Error::WrongNodeCount {
                expected: self.size(),
                got: nodes.len(),
            });
        }
        Ok(log_abs_det(self.eval_matrix(nodes)?).0)
    }

    /// Coefficient table: row `k` expresses `q_k` in the graded monomials of
    /// the original coordinates. Ill-conditioned for high degree.
    pub fn monomial_coefficients(&self) -> Vec<Vec<Complex64>> {
        let size = self.size();
        let exps = self.basis.exponents();
        // coefficients in the rescaled variables u
        let mut local: Vec<Vec<Complex64>> = vec![vec![ZERO; size]];
        local[0][0] = ONE;
        for s in &self.steps {
            let mut v = vec![ZERO; size];
            for (i, c) in local[s.parent].iter().enumerate() {
                if *c != ZERO {
                    let mut e = exps[i];
                    e[s.axis] += 1;
                    v[self.basis.index_of(e)] += c;
                }
            }
            for (c, row) in s.coeffs.iter().zip(&local) {
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi -= c * ri;
                }
            }
            for vi in v.iter_mut() {
                *vi /= s.norm;
            }
            local.push(v);
        }
        // u_a^b = s_a^{-b} Σ_g C(b, g) z_a^g (−c_a)^{b−g}
        let n = self.basis.n;
        let expand: Vec<Vec<Vec<Complex64>>> = (0..n)
            .map(|a| {
                let s = if self.frame.scale[a] > 0.0 { self.frame.scale[a] } else { 1.0 };
                let c = self.frame.center[a];
                (0..=self.basis.d)
                    .map(|b| {
                        (0..=b)
                            .map(|g| binomial(b, g) * (-c).powu((b - g) as u32) / s.powi(b as i32))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        local
            .iter()
            .map(|row| {
                let mut out = vec![ZERO; size];
                for (i, coef) in row.iter().enumerate() {
                    if *coef == ZERO {
                        continue;
                    }
                    let e = exps[i];
                    if n == 1 {
                        for (g, w) in expand[0][e[0]].iter().enumerate() {
                            out[g] += coef * w;
                        }
                    } else {
                        for (g1, w1) in expand[0][e[0]].iter().enumerate() {
                            for (g2, w2) in expand[1][e[1]].iter().enumerate() {
                                out[self.basis.index_of([g1, g2])] += coef * w1 * w2;
                            }
                        }
                    }
                }
                out
            })
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_geometry::{sample, SetSpec};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reals(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::real(&[x])).collect()
    }

    fn brute_log_product(zs: &[Complex64]) -> f64 {
        let mut s = 0.0;
        for i in 0..zs.len() {
            for j in i + 1..zs.len() {
                s += (zs[i] - zs[j]).norm().ln();
            }
        }
        s
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension(1, 3).unwrap(), 4);
        assert_eq!(dimension(2, 3).unwrap(), 10);
        assert_eq!(dimension(2, 20).unwrap(), 231);
        assert!(matches!(dimension(3, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn graded_lex_order() {
        let b = BasisSpec::new(2, 2).unwrap();
        assert_eq!(b.exponents(), vec![[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]);
        for (i, e) in b.exponents().into_iter().enumerate() {
            assert_eq!(b.index_of(e), i);
        }
    }

    #[test]
    fn vandermonde_tables() {
        let v = vandermonde(&reals(&[-1.0, 0.0, 1.0]), &BasisSpec::new(1, 2).unwrap()).unwrap();
        let want = [[1.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [1.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(v[(i, j)], c(want[i][j], 0.0));
            }
        }
        let v = vandermonde(&[Point::real(&[2.0, 3.0])], &BasisSpec::new(2, 1).unwrap()).unwrap();
        assert_eq!(v.column(0).iter().copied().collect::<Vec<_>>(), vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let v = vandermonde(
            &[Point::c1(c(0.0, 0.0)), Point::c1(c(1.0, 1.0))],
            &BasisSpec::new(1, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(v[(0, 1)], ONE);
        assert_eq!(v[(1, 0)], ZERO);
        assert_eq!(v[(1, 1)], c(1.0, 1.0));
        assert!(matches!(
            vandermonde(&[Point::real(&[1.0])], &BasisSpec::new(2, 1).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn log_vdm_examples() {
        let b2 = BasisSpec::new(1, 2).unwrap();
        assert!((log_abs_vdm(&reals(&[-1.0, 0.0, 1.0]), &b2).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert_eq!(log_abs_vdm(&reals(&[0.0, 0.0, 1.0]), &b2).unwrap(), f64::NEG_INFINITY);
        let b1 = BasisSpec::new(1, 1).unwrap();
        assert!((log_abs_vdm(&reals(&[0.0, 3.0]), &b1).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert!(matches!(
            log_abs_vdm(&reals(&[0.0, 1.0]), &b2),
            Err(Error::WrongNodeCount { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn phase_of_complex_determinant() {
        // det [[1,1],[0,i]] = i
        let ev = vdm_evaluation(
            &[Point::c1(c(0.0, 0.0)), Point::c1(c(0.0, 1.0))],
            &BasisSpec::new(1, 1).unwrap(),
        )
        .unwrap();
        assert!((ev.phase - c(0.0, 1.0)).norm() < 1e-14);
        assert!(ev.log_abs_det.abs() < 1e-14);
    }

    #[test]
    fn two_variable_determinant_matches_direct() {
        let nodes = vec![
            Point::c2(c(0.1, 0.2), c(-0.3, 0.0)),
            Point::c2(c(0.7, -0.1), c(0.2, 0.4)),
            Point::c2(c(-0.5, 0.3), c(0.9, -0.2)),
            Point::c2(c(0.0, -0.8), c(0.1, 0.1)),
            Point::c2(c(0.4, 0.4), c(-0.6, -0.5)),
            Point::c2(c(-0.2, -0.3), c(0.3, 0.8)),
        ];
        let b = BasisSpec::new(2, 2).unwrap();
        let direct = vandermonde(&nodes, &b).unwrap().determinant().norm().ln();
        assert!((log_abs_vdm(&nodes, &b).unwrap() - direct).abs() < 1e-10);
        let real: Vec<Point> = nodes.iter().map(|p| Point::real(&[p.coords()[0].re, p.coords()[1].im])).collect();
        let direct = vandermonde(&real, &b).unwrap().determinant().norm().ln();
        assert!((log_abs_vdm(&real, &b).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn interval_cloud_orthonormal() {
        let cloud = sample(&SetSpec::interval(-1.0, 1.0), 200, 0).unwrap();
        let ob = orthonormal_basis(&cloud, &BasisSpec::new(1, 3).unwrap()).unwrap();
        assert_eq!(ob.size(), 4);
        assert!(ob.gram_deviation < 1e-8);
        // independent Gram check through the recurrence evaluator
        let q = ob.eval_matrix(&cloud.points).unwrap();
        let g = q.ad_mul(&q) / c(cloud.len() as f64, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - c(want, 0.0)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn collinear_points_in_c2_are_degenerate() {
        let pts: Vec<Point> = (0..5)
            .map(|k| {
                let t = k as f64 * 0.25;
                Point::c2(c(t, 0.0), c(2.0 * t, 0.0))
            })
            .collect();
        let cloud = SampleCloud::from_points(pts, 0, 0.25).unwrap();
        let err = orthonormal_basis(&cloud, &BasisSpec::new(2, 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Pluripolar { degree: 1 }));
        assert_eq!(err.to_string(), "set appears pluripolar at degree 1");
    }

    #[test]
    fn circle_family_is_monomial() {
        let pts: Vec<Point> = (0..64)
            .map(|k| Point::c1(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 64.0)))
            .collect();
        let cloud = SampleCloud::from_points(pts, 0, 0.1).unwrap();
        let ob = orthonormal_basis(&cloud, &BasisSpec::new(1, 2).unwrap()).unwrap();
        let table = ob.monomial_coefficients();
        for (k, row) in table.iter().enumerate() {
            for (i, coef) in row.iter().enumerate() {
                if i == k {
                    assert!((coef.norm() - 1.0).abs() < 1e-10);
                } else {
                    assert!(coef.norm() < 1e-10, "q_{k} has z^{i} coefficient {coef}");
                }
            }
        }
    }

    #[test]
    fn monomial_table_reproduces_values() {
        let spec = SetSpec::Box {
            axes: vec![[1.0, 2.0], [-0.5, 0.5]],
        };
        let cloud = sample(&spec, 300, 0).unwrap();
        let b = BasisSpec::new(2, 3).unwrap();
        let ob = orthonormal_basis(&cloud, &b).unwrap();
        let table = ob.monomial_coefficients();
        let p = Point::c2(c(1.3, 0.2), c(0.1, -0.4));
        let v = vandermonde(std::slice::from_ref(&p), &b).unwrap();
        let direct = ob.eval(&p).unwrap();
        for (k, row) in table.iter().enumerate() {
            let via_table: Complex64 = row.iter().zip(v.column(0).iter()).map(|(a, b)| a * b).sum();
            assert!((via_table - direct[k]).norm() < 1e-9 * (1.0 + direct[k].norm()));
        }
    }

    proptest! {
        #[test]
        fn product_formula(raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..12)) {
            let zs: Vec<Complex64> = raw.iter().map(|&(a, b)| c(a, b)).collect();
            let mut sep = f64::INFINITY;
            for i in 0..zs.len() { for j in i + 1..zs.len() { sep = sep.min((zs[i] - zs[j]).norm()); } }
            prop_assume!(sep > 0.05);
            let b = BasisSpec::new(1, zs.len() - 1).unwrap();
            let nodes: Vec<Point> = zs.iter().map(|&z| Point::c1(z)).collect();
            let got = log_abs_vdm(&nodes, &b).unwrap();
            prop_assert!((got - brute_log_product(&zs)).abs() < 1e-8);
        }

        #[test]
        fn real_product_formula(xs in proptest::collection::vec(-3.0f64..3.0, 2..16)) {
            let mut sorted = xs.clone();
            sorted.sort_by(f64::total_cmp);
            prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 0.02));
            let b = BasisSpec::new(1, xs.len() - 1).unwrap();
            let got = log_abs_vdm(&reals(&xs), &b).unwrap();
            let zs: Vec<Complex64> = xs.iter().map(|&x| c(x, 0.0)).collect();
            prop_assert!((got - brute_log_product(&zs)).abs() < 1e-8);
        }

        #[test]
        fn permutation_invariance(raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 10), rot in 1usize..9) {
            let b = BasisSpec::new(2, 3).unwrap();
            let nodes: Vec<Point> = raw.iter().map(|&(a, b)| Point::real(&[a, b])).collect();
            let mut perm = nodes.clone();
            perm.rotate_left(rot);
            perm.swap(0, 5);
            let (x, y) = (log_abs_vdm(&nodes, &b).unwrap(), log_abs_vdm(&perm, &b).unwrap());
            prop_assume!(x.is_finite() && x > -40.0);
            prop_assert!((x - y).abs() < 1e-9);
        }

        #[test]
        fn basis_change_shifts_by_constant(
            a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
            b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
        ) {
            let cloud = sample(&SetSpec::disc(c(0.0, 0.0), 1.0), 400, 0).unwrap();
            let basis = BasisSpec::new(1, 5).unwrap();
            let ob = orthonormal_basis(&cloud, &basis).unwrap();
            let na: Vec<Point> = a.iter().map(|&(x, y)| Point::c1(c(x, y))).collect();
            let nb: Vec<Point> = b.iter().map(|&(x, y)| Point::c1(c(x, y))).collect();
            let mono = log_abs_vdm(&na, &basis).unwrap() - log_abs_vdm(&nb, &basis).unwrap();
            let orth = ob.log_abs_det(&na).unwrap() - ob.log_abs_det(&nb).unwrap();
            prop_assume!(mono.is_finite());
            prop_assert!((mono - orth).abs() < 1e-6);
        }
    }
}
