//! Numerical pluripotential theory on compact sets in C^n (n ≤ 2):
//! weighted Fekete points, Siciak–Zaharjuta extremal functions, Hölder
//! continuity diagnostics and equidistribution rates.

pub mod equidist;
pub mod error;
pub mod extremal;
pub mod fekete;
pub mod io;
mod linalg;
pub mod point;
pub mod poly_basis;
pub mod regularity;
pub mod relative;
pub mod set_geometry;

pub use error::{Error, Result};
pub use point::Point;
pub use set_geometry::{sample, SampleCloud, SetSpec};
