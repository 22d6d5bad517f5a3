//! Shared numerical kernels: conjugate gradients, tridiagonal eigenvalues via
//! Sturm bisection, shift-invert Lanczos for sparse Hermitian operators, and
//! exact line minimization of quartic energy profiles.

mod cg;
mod lanczos;
mod quartic;
mod sturm;

pub use cg::{cg_hermitian, cg_real, HermitianOp, RealOp};
pub use lanczos::{lowest_eigen_shift_invert, EigenPair, LanczosOptions};
pub use quartic::minimize_quartic;
pub use sturm::{tridiag_eigenvector, tridiag_smallest};
