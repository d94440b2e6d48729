//! Transmit beampattern design and analysis for MIMO antenna arrays.
//!
//! Numeric routines are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common double-precision case.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constellations;
pub mod design;
pub mod error;
pub mod io;
pub mod linalg;
pub mod quadrature;
pub mod radiation;
pub mod scalar;
pub mod scenarios;

pub use error::{Error, Result};
pub use scalar::Real;

pub type HermitianMatrixF64 = linalg::HermitianMatrix<f64>;
pub type HermitianMatrixF32 = linalg::HermitianMatrix<f32>;
pub type ArrayGeometryF64 = constellations::ArrayGeometry<f64>;
pub type ArrayGeometryF32 = constellations::ArrayGeometry<f32>;
pub type DirectionF64 = radiation::Direction<f64>;
pub type DirectionF32 = radiation::Direction<f32>;
pub type UserSetF64 = radiation::UserSet<f64>;
pub type UserSetF32 = radiation::UserSet<f32>;
pub type CovarianceF64 = radiation::Covariance<f64>;
pub type CovarianceF32 = radiation::Covariance<f32>;
pub type PatternGridF64 = radiation::PatternGrid<f64>;
pub type PatternGridF32 = radiation::PatternGrid<f32>;
pub type DesignResultF64 = design::DesignResult<f64>;
pub type DesignResultF32 = design::DesignResult<f32>;
