use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of C^n (n ≤ 2). Points with all imaginary parts exactly zero are
/// flagged as lying on the real slice R^n + i·0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Point {
    coords: Vec<Complex64>,
    real_slice: bool,
}

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("point with no coordinates".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        Ok(Self::from_coords(coords))
    }

    pub(crate) fn from_coords(coords: Vec<Complex64>) -> Self {
        let real_slice = coords.iter().all(|c| c.im == 0.0);
        Point { coords, real_slice }
    }

    pub fn real(xs: &[f64]) -> Self {
        Point {
            coords: xs.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            real_slice: true,
        }
    }

    pub fn c1(z: Complex64) -> Self {
        Self::from_coords(vec![z])
    }

    pub fn c2(z1: Complex64, z2: Complex64) -> Self {
        Self::from_coords(vec![z1, z2])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn is_real(&self) -> bool {
        self.real_slice
    }

    /// Real parts of the coordinates.
    pub fn re(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.re).collect()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `self + t * dir`, coordinatewise.
    pub fn offset(&self, dir: &[Complex64], t: f64) -> Point {
        Self::from_coords(
            self.coords
                .iter()
                .zip(dir)
                .map(|(a, d)| a + d * t)
                .collect(),
        )
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<Complex64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<Complex64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<Complex64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}
