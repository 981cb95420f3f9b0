//! Manufactured solutions, symbolic polynomials and error norms.

mod cases;
mod errors;
pub mod oracle;
mod poly;

pub use cases::{builtin_case, potential_chi, ManufacturedCase, ScalarField, TensorField, VectorField};
pub use errors::{compare_discrete, compute_errors, discrete_velocity_norms, ErrorReport};
pub use poly::Poly2;
