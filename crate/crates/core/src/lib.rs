//! Numerical toolkit for the two-dimensional Ginzburg-Landau functional with a
//! sign-changing pinning term `a(x, kappa)` and a variable applied magnetic
//! field `B0(x)`.
//!
//! The crate provides:
//!
//! * gauge-covariant finite-difference fields on masked Cartesian grids
//!   ([`grid`], [`field`]),
//! * construction of the divergence-free potential `F` with `curl F = B0`
//!   ([`gauge`]),
//! * the constant-field reference cell problem and the universal bulk energy
//!   function `fhat` ([`cell`]),
//! * minimization of the full functional and the lattice test configuration
//!   ([`solver`]),
//! * closed-form leading-order energy and order-parameter predictions plus
//!   homogenized variants for oscillating pinning ([`asympt`]),
//! * model spectral constants (de Gennes, Montgomery, half-plane) and the
//!   domain eigenvalue `mu1(kappa, H)` ([`spectral`]),
//! * third-critical-field formulas and empirical brackets ([`critical`]),
//! * the end-to-end verification suite ([`acceptance`]).

pub mod acceptance;
pub mod asympt;
pub mod cell;
pub mod coeff;
pub mod critical;
pub mod error;
pub mod field;
pub mod gauge;
pub mod grid;
pub mod linalg;
pub mod solver;
pub mod spectral;

pub use coeff::{FieldSpec, PinningSpec};
pub use error::{Error, Result};
pub use field::{ComplexField2D, LinkField2D, ScalarField2D};
pub use grid::{BoundaryNode, Grid2D, Normal};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
