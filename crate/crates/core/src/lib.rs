//! Exact quantum and mean-field dynamics of a Bose-Einstein condensate in a
//! symmetric double well, mapped onto a collective spin `j = N/2`.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised as:
//!
//! * [`spin`]: Dicke basis, angular momentum matrices, Dicke and spin
//!   coherent states, first and second moments.
//! * [`dynamics`]: the two-mode Hamiltonian `H/κ = Λ(N-1)·J_x + 2·J_z²`,
//!   exact spectral propagation, fidelities and observable time series.
//! * [`qfi`]: quantum Fisher information matrices for pure and mixed states,
//!   maximal mean QFI and the Cramér-Rao bound.
//! * [`classical`]: the mean-field phase cylinder `(p, φ)`, fixed points,
//!   linear stability and the self-trapping criterion.
//! * [`linalg`]: the small dense eigensolvers the above rely on.
//!
//! Throughout, `Λ = Ω/κ_r` with `κ_r = (N-1)κ`, and quantum time is the
//! dimensionless `s = κt`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classical;
pub mod dynamics;
mod error;
pub mod linalg;
pub mod qfi;
pub mod spin;

pub use error::{Error, Result};

pub use num_complex::Complex64;
