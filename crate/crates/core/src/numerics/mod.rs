//! Special functions, quadrature rules and small dense linear algebra.

mod circle;
mod linalg;
mod quadrature;
pub(crate) mod special;

pub use circle::{circle_integral, circle_integral_pv, PoleSet};
pub(crate) use circle::circle_integral_graded;
pub use linalg::{ComplexMatrix, LogDet};
pub use quadrature::{adaptive_integral, adaptive_integral_complex, gauss_legendre, QuadratureSpec, Upper};
pub use special::{erfc, log_gamma, regularized_incomplete_beta, regularized_incomplete_beta_pair};
