//! Dense square matrices and the eigensolvers used by the physics modules.
//!
//! Nothing here is general purpose: the solvers cover exactly the three
//! shapes that occur (real symmetric tridiagonal Hamiltonians, complex
//! Hermitian density operators and real symmetric 3×3 QFI matrices).

mod hermitian;
mod matrix;
mod sym3;
mod tridiagonal;

pub use hermitian::{hermitian_eigen, HermitianEigen};
pub use matrix::{CMatrix, RMatrix, SquareMatrix};
pub use sym3::{symmetric3_eigen, Symmetric3Eigen};
pub use tridiagonal::{tridiagonal_eigen, TridiagonalEigen};
