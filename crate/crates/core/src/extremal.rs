//! Certified degree-d sandwiches for extremal functions built from Fekete
//! configurations, and the polynomial pullback check.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fekete::{fubini_study, FeketeConfig, LagrangeEvaluator, WeightSpec};
use crate::point::Point;
use crate::set_geometry::SampleCloud;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Unweighted,
    Weighted,
    Projective,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Unweighted => "unweighted",
            Mode::Weighted => "weighted",
            Mode::Projective => "projective",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtremalEstimate {
    pub z: Point,
    pub degree: usize,
    pub lower: f64,
    pub upper: f64,
    /// `upper − lower = log(N γ)/d`.
    pub gap: f64,
    /// Lower bound before the γ correction.
    pub lower_raw: f64,
    pub mode: Mode,
}

/// Reusable sandwich evaluator for one configuration on its cloud.
pub struct Sandwich {
    config: FeketeConfig,
    lagrange: LagrangeEvaluator,
    node_phi: Vec<f64>,
}

impl Sandwich {
    pub fn new(config: &FeketeConfig, cloud: &SampleCloud) -> Result<Self> {
        if !(config.gamma >= 1.0 - 1e-9) || !config.gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "config gamma {} has not been measured",
                config.gamma
            )));
        }
        let lagrange = LagrangeEvaluator::new(config, cloud)?;
        let node_phi = config.weight.values_on(&config.nodes);
        Ok(Sandwich {
            config: config.clone(),
            lagrange,
            node_phi,
        })
    }

    pub fn config(&self) -> &FeketeConfig {
        &self.config
    }

    /// `log(N γ)/d`.
    pub fn gap(&self) -> f64 {
        let n = self.config.nodes.len() as f64;
        (n * self.config.gamma).ln() / self.config.basis.d as f64
    }

    /// Sandwich for `L_K` (zero weight) or `L_{K,φ}` at `z`.
    pub fn estimate(&self, z: &Point) -> Result<ExtremalEstimate> {
        let ell = self.lagrange.eval(z)?;
        let d = self.config.basis.d as f64;
        let n = ell.len() as f64;
        let best = ell
            .iter()
            .zip(&self.node_phi)
            .map(|(l, phi)| phi + l.norm().ln() / d)
            .fold(f64::NEG_INFINITY, f64::max);
        let log_gamma = self.config.gamma.ln() / d;
        let lower = best - log_gamma;
        let upper = best + n.ln() / d;
        let mode = if self.config.weight.is_zero() {
            Mode::Unweighted
        } else {
            Mode::Weighted
        };
        Ok(ExtremalEstimate {
            z: z.clone(),
            degree: self.config.basis.d,
            lower,
            upper,
            gap: upper - lower,
            lower_raw: best,
            mode,
        })
    }

    /// Sandwich for `V_K = L_{K,ρ} − ρ` on the affine chart.
    pub fn projective(&self, z: &Point) -> Result<ExtremalEstimate> {
        if !matches!(self.config.weight, WeightSpec::FubiniStudy) {
            return Err(Error::InvalidArgument(
                "projective estimate needs the fubini-study weight".into(),
            ));
        }
        let mut e = self.estimate(z)?;
        let rho = fubini_study(z);
        e.lower -= rho;
        e.upper -= rho;
        e.lower_raw -= rho;
        e.mode = Mode::Projective;
        Ok(e)
    }

    pub fn estimate_many(&self, zs: &[Point]) -> Result<Vec<ExtremalEstimate>> {
        zs.par_iter().map(|z| self.estimate(z)).collect()
    }
}

pub fn sandwich(config: &FeketeConfig, cloud: &SampleCloud, z: &Point) -> Result<ExtremalEstimate> {
    Sandwich::new(config, cloud)?.estimate(z)
}

pub fn projective_extremal(config: &FeketeConfig, cloud: &SampleCloud, z: &Point) -> Result<ExtremalEstimate> {
    Sandwich::new(config, cloud)?.projective(z)
}

/// Polynomial map `C^k → C^n` as a list of terms per output coordinate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyMap {
    pub inputs: usize,
    pub components: Vec<Vec<Term>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Term {
    pub coeff: Complex64,
    pub exponents: Vec<u32>,
}

impl PolyMap {
    /// One variable, coefficients lowest degree first.
    pub fn univariate(coeffs: &[Complex64]) -> Self {
        PolyMap {
            inputs: 1,
            components: vec![coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| Term {
                    coeff: c,
                    exponents: vec![k as u32],
                })
                .collect()],
        }
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            inputs: n,
            components: (0..n)
                .map(|k| {
                    let mut e = vec![0; n];
                    e[k] = 1;
                    vec![Term {
                        coeff: Complex64::new(1.0, 0.0),
                        exponents: e,
                    }]
                })
                .collect(),
        }
    }

    pub fn outputs(&self) -> usize {
        self.components.len()
    }

    /// Total degree (terms with zero coefficient ignored).
    pub fn degree(&self) -> usize {
        self.components
            .iter()
            .flatten()
            .filter(|t| t.coeff != Complex64::new(0.0, 0.0))
            .map(|t| t.exponents.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, w: &Point) -> Result<Point> {
        w.check_dim(self.inputs)?;
        let coords = self
            .components
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| {
                        t.exponents
                            .iter()
                            .zip(w.coords())
                            .fold(t.coeff, |acc, (&e, z)| acc * z.powu(e))
                    })
                    .sum()
            })
            .collect();
        Point::new(coords)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompositionGap {
    pub w: Point,
    pub image: Point,
    pub degree_h: usize,
    /// `d_h · upper_E(w) − lower_{h(E)}(h(w))`.
    pub slack: f64,
    pub gap_e: f64,
    pub gap_he: f64,
}

impl CompositionGap {
    /// Combined numerical gaps `d_h · gap_E + gap_{h(E)}`.
    pub fn tolerance(&self) -> f64 {
        self.degree_h as f64 * self.gap_e + self.gap_he
    }
}

/// Check `L_{h(E)}(h(w)) ≤ d_h · L_E(w)` through the two sandwiches.
pub fn composition_gap(h: &PolyMap, e: &Sandwich, he: &Sandwich, w: &Point) -> Result<CompositionGap> {
    if !e.config().weight.is_zero() || !he.config().weight.is_zero() {
        return Err(Error::InvalidArgument("pullback check needs unweighted configs".into()));
    }
    if h.inputs != e.config().basis.n {
        return Err(Error::DimensionMismatch {
            expected: e.config().basis.n,
            got: h.inputs,
        });
    }
    if h.outputs() != he.config().basis.n {
        return Err(Error::DimensionMismatch {
            expected: he.config().basis.n,
            got: h.outputs(),
        });
    }
    let image = h.apply(w)?;
    let on_e = e.estimate(w)?;
    let on_he = he.estimate(&image)?;
    let degree_h = h.degree();
    Ok(CompositionGap {
        w: w.clone(),
        image,
        degree_h,
        slack: degree_h as f64 * on_e.upper - on_he.lower,
        gap_e: on_e.gap,
        gap_he: on_he.gap,
    })
}
