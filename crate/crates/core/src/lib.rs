//! Compactified trigonometric and elliptic Ruijsenaars–Schneider systems on
//! the complex projective space `CP^{n−1}`.
//!
//! The numerical layers are generic over a [`Real`] scalar (`f32`/`f64`);
//! the integer matrices are exact. Concrete `f64` aliases live at the crate
//! root.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod intmatrix;
pub mod lax;
pub mod linalg;
pub mod ode;
pub mod sampling;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type CouplingSpec64 = coupling::CouplingSpec<f64>;
pub type Classification64 = coupling::Classification<f64>;
pub type EllipticParams64 = elliptic::EllipticParams<f64>;
pub type Kernel64 = elliptic::Kernel<f64>;
pub type AlcovePoint64 = geometry::AlcovePoint<f64>;
pub type PhasePoint64 = geometry::PhasePoint<f64>;
pub type ProjectivePoint64 = geometry::ProjectivePoint<f64>;
pub type Embedding64 = geometry::Embedding<f64>;
pub type LaxModel64 = lax::LaxModel<f64>;
pub type LaxMatrix64 = lax::LaxMatrix<f64>;
pub type CMatrix64 = linalg::Matrix<Complex<f64>>;
pub type InvariantSet64 = dynamics::InvariantSet<f64>;
pub type Complex64 = Complex<f64>;
