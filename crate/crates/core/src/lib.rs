//! Spectral simulation of anomalous localized resonance in doubly
//! complementary media.
//!
//! The crate solves `div(s_δ a ∇u) + k² s₀ σ u = f` for radially layered media
//! mode by mode, and provides the analysis used to study power blow-up,
//! critical source radii and convergence to the effective-medium field.

pub mod analysis;
pub mod checks;
pub mod dd;
pub mod error;
pub mod linalg;
pub mod media;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod special;
pub mod transforms;

pub use error::{AlrError, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex64;
pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];
pub type Field2 = transforms::CoefficientField<f64, 2>;
pub type Field3 = transforms::CoefficientField<f64, 3>;
