//! Exact propagation of the two-mode Hamiltonian `H = ΩJ_x + 2κJ_z²`.
//!
//! Energies are in units of `κ` and time is `s = κt`. `H` is tridiagonal in
//! the Dicke basis; it is diagonalized once and states are evolved as
//! `ψ(s) = V e^{−iEs} Vᵀ ψ(0)`, which carries no time-step error.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{tridiagonal_eigen, RMatrix};
use crate::spin::{self, AngularMomentumSet, Spin, StateVector};
use crate::{Error, Result};

/// Particle number `N` and `Λ = Ω/κ_r` with `κ_r = (N−1)κ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    n_particles: u32,
    lambda: f64,
}

impl ModelParams {
    pub fn new(n_particles: u32, lambda: f64) -> Result<Self> {
        if n_particles < 2 {
            return Err(Error::OutOfDomain {
                name: "n_particles",
                value: n_particles as f64,
            });
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::OutOfDomain {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(Self {
            n_particles,
            lambda,
        })
    }

    pub fn n_particles(&self) -> u32 {
        self.n_particles
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn spin(&self) -> Spin {
        // n ≥ 2 checked at construction
        Spin::from_particles(self.n_particles).expect("validated particle number")
    }

    /// `Ω/κ = Λ(N−1)`.
    pub fn omega_over_kappa(&self) -> f64 {
        self.lambda * (self.n_particles - 1) as f64
    }
}

/// Real symmetric tridiagonal `H/κ` in the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeHamiltonian {
    spin: Spin,
    params: Option<ModelParams>,
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

/// `H/κ = Λ(N−1)·J_x + 2·J_z²`.
pub fn build_hamiltonian(params: ModelParams) -> TwoModeHamiltonian {
    let spin = params.spin();
    let mut h = TwoModeHamiltonian::with_couplings(spin, params.omega_over_kappa(), 2.0);
    h.params = Some(params);
    h
}

impl TwoModeHamiltonian {
    fn with_couplings(spin: Spin, omega: f64, z2_weight: f64) -> Self {
        let ops_ladder = (0..spin.dim() - 1).map(|k| {
            let m = spin.m_at(k);
            (spin.casimir() - m * (m + 1.0)).max(0.0).sqrt()
        });
        let diagonal = (0..spin.dim())
            .map(|k| {
                let m = spin.m_at(k);
                z2_weight * m * m
            })
            .collect();
        let off_diagonal = ops_ladder.map(|l| 0.5 * omega * l).collect();
        Self {
            spin,
            params: None,
            diagonal,
            off_diagonal,
        }
    }

    /// Pure tunnelling `H/κ = (Ω/κ)·J_x` with the interaction switched off.
    ///
    /// Not part of the double-well model; it exists so the propagator can be
    /// checked against the closed-form Rabi rotation.
    pub fn tunneling_only(spin: Spin, omega_over_kappa: f64) -> Self {
        Self::with_couplings(spin, omega_over_kappa, 0.0)
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    /// `None` for [`TwoModeHamiltonian::tunneling_only`].
    pub fn params(&self) -> Option<ModelParams> {
        self.params
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Entry `k` couples basis indices `k` and `k+1`.
    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn to_dense(&self) -> RMatrix {
        let n = self.diagonal.len();
        let mut m = RMatrix::from_diagonal(&self.diagonal);
        for (k, &o) in self.off_diagonal.iter().enumerate() {
            m[(k, k + 1)] = o;
            m[(k + 1, k)] = o;
        }
        debug_assert_eq!(m.dim(), n);
        m
    }

    /// `H ψ`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = psi
            .iter()
            .zip(&self.diagonal)
            .map(|(&a, &d)| a * d)
            .collect();
        for (k, &o) in self.off_diagonal.iter().enumerate() {
            out[k] += psi[k + 1] * o;
            out[k + 1] += psi[k] * o;
        }
        out
    }

    /// `⟨ψ|H|ψ⟩` in units of `κ`.
    pub fn energy(&self, state: &StateVector) -> Result<f64> {
        if state.dim() != self.diagonal.len() {
            return Err(Error::DimensionMismatch {
                expected: self.diagonal.len(),
                found: state.dim(),
            });
        }
        Ok(spin::inner(state.amplitudes(), &self.apply(state.amplitudes())).re)
    }
}

/// Spectral decomposition `H = V diag(E) Vᵀ`, built once per Hamiltonian.
#[derive(Clone, Debug)]
pub struct Propagator {
    hamiltonian: TwoModeHamiltonian,
    eigenvalues: Vec<f64>,
    eigenvectors: RMatrix,
}

impl Propagator {
    pub fn new(hamiltonian: TwoModeHamiltonian) -> Result<Self> {
        let eig = tridiagonal_eigen(&hamiltonian.diagonal, &hamiltonian.off_diagonal)?;
        Ok(Self {
            hamiltonian,
            eigenvalues: eig.values,
            eigenvectors: eig.vectors,
        })
    }

    pub fn for_params(params: ModelParams) -> Result<Self> {
        Self::new(build_hamiltonian(params))
    }

    pub fn hamiltonian(&self) -> &TwoModeHamiltonian {
        &self.hamiltonian
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are the energy eigenvectors.
    pub fn eigenvectors(&self) -> &RMatrix {
        &self.eigenvectors
    }

    pub fn spin(&self) -> Spin {
        self.hamiltonian.spin
    }

    /// Expands `psi0` in the energy eigenbasis so that many times can be
    /// sampled at O(dim²) each.
    pub fn prepare(&self, psi0: &StateVector) -> Result<PreparedState<'_>> {
        let n = self.eigenvalues.len();
        if psi0.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi0.dim(),
            });
        }
        let norm = psi0.norm();
        if (norm - 1.0).abs() > spin::NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        let psi = psi0.amplitudes();
        let v = &self.eigenvectors;
        let mut coefficients = alloc::vec![Complex64::new(0.0, 0.0); n];
        for r in 0..n {
            let a = psi[r];
            for (coef, &vr) in coefficients.iter_mut().zip(v.row(r)) {
                *coef += a * vr;
            }
        }
        Ok(PreparedState {
            propagator: self,
            coefficients,
        })
    }

    /// `ψ(s) = e^{−iHs}ψ(0)`; negative `s` runs backwards.
    pub fn evolve(&self, psi0: &StateVector, s: f64) -> Result<StateVector> {
        Ok(self.prepare(psi0)?.at(s))
    }
}

/// An initial state resolved in a propagator's eigenbasis.
#[derive(Clone, Debug)]
pub struct PreparedState<'a> {
    propagator: &'a Propagator,
    /// `Vᵀψ(0)`.
    coefficients: Vec<Complex64>,
}

impl PreparedState<'_> {
    pub fn at(&self, s: f64) -> StateVector {
        let prop = self.propagator;
        let n = prop.eigenvalues.len();
        let phased: Vec<Complex64> = self
            .coefficients
            .iter()
            .zip(&prop.eigenvalues)
            .map(|(&c, &e)| {
                let (sin, cos) = (-e * s).sin_cos();
                c * Complex64::new(cos, sin)
            })
            .collect();
        let amplitudes = (0..n)
            .map(|r| {
                prop.eigenvectors
                    .row(r)
                    .iter()
                    .zip(&phased)
                    .fold(Complex64::new(0.0, 0.0), |acc, (&v, &c)| acc + c * v)
            })
            .collect();
        StateVector::from_parts_unchecked(prop.spin(), amplitudes)
    }
}

/// `|⟨a|b⟩|`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm().min(1.0))
}

/// One sample of [`observable_series`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableRecord {
    pub kappa_t: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    /// `|⟨ψ(0)|ψ(s)⟩|`.
    pub fidelity: f64,
    /// `⟨H⟩/κ`.
    pub energy: f64,
}

pub fn observable_series(
    prop: &Propagator,
    psi0: &StateVector,
    ops: &AngularMomentumSet,
    times: &[f64],
) -> Result<Vec<ObservableRecord>> {
    if ops.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: ops.dim(),
            found: psi0.dim(),
        });
    }
    if let Some(&bad) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "kappa_t",
            value: bad,
        });
    }
    let prepared = prop.prepare(psi0)?;
    times
        .iter()
        .map(|&s| {
            let psi = prepared.at(s);
            let [jx, jy, jz] = spin::expectation(ops, &psi)?;
            Ok(ObservableRecord {
                kappa_t: s,
                jx,
                jy,
                jz,
                fidelity: fidelity(psi0, &psi)?,
                energy: prop.hamiltonian.energy(&psi)?,
            })
        })
        .collect()
}
