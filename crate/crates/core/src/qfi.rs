//! Quantum Fisher information for phase rotations generated by `J_n`.
//!
//! Both the pure-state and the mixed-state paths produce a [`QfiMatrix`]
//! obeying one convention: `F(n) = n·C·nᵀ`. For pure states this means
//! `C = 4·Cov(J)`, so `F_max` is always the top eigenvalue of `C`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{hermitian_eigen, symmetric3_eigen, CMatrix};
use crate::spin::{self, AngularMomentumSet, Axis, Spin, StateVector};
use crate::{Error, Result};

/// Pairs with `p_i + p_j` at or below this are skipped in the mixed-state sum.
pub const DEFAULT_EIGEN_FLOOR: f64 = 1e-10;

/// Real symmetric positive semidefinite `C` with `F(n) = n·C·nᵀ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QfiMatrix {
    c: [[f64; 3]; 3],
    eigenvalues: [f64; 3],
    optimal_direction: [f64; 3],
}

impl QfiMatrix {
    /// Diagonalizes `c`, clamps round-off negatives to zero and selects the
    /// optimal direction.
    ///
    /// With a degenerate top eigenvalue the eigenvector with the largest
    /// `|n_z|` wins, then the largest `|n_y|`. The sign is fixed so that the
    /// largest-magnitude component is positive.
    pub fn from_matrix(c: [[f64; 3]; 3]) -> Self {
        let eig = symmetric3_eigen(&c);
        let mut symmetric = c;
        for r in 0..3 {
            for k in r + 1..3 {
                let avg = 0.5 * (c[r][k] + c[k][r]);
                symmetric[r][k] = avg;
                symmetric[k][r] = avg;
            }
        }
        let eigenvalues = eig.values.map(|v| v.max(0.0));
        let top = eigenvalues[0];
        let tie = 1e-9 * top.max(1.0);
        let mut best = eig.vectors[0];
        for (k, &v) in eig.vectors.iter().enumerate().skip(1) {
            if eigenvalues[k] < top - tie {
                break;
            }
            let key = (v[2].abs(), v[1].abs());
            let best_key = (best[2].abs(), best[1].abs());
            if key.0 > best_key.0 + 1e-12
                || ((key.0 - best_key.0).abs() <= 1e-12 && key.1 > best_key.1 + 1e-12)
            {
                best = v;
            }
        }
        let lead = best
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if lead < 0.0 {
            best = best.map(|x| -x);
        }
        Self {
            c: symmetric,
            eigenvalues,
            optimal_direction: best,
        }
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.c
    }

    /// `λ₁ ≥ λ₂ ≥ λ₃`.
    pub fn eigenvalues(&self) -> [f64; 3] {
        self.eigenvalues
    }

    /// `F_max = λ_max`.
    pub fn f_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn optimal_direction(&self) -> [f64; 3] {
        self.optimal_direction
    }

    /// `F(n) = n·C·nᵀ` for a unit vector `n`.
    pub fn fisher_information(&self, n: [f64; 3]) -> f64 {
        let mut total = 0.0;
        for r in 0..3 {
            for k in 0..3 {
                total += n[r] * self.c[r][k] * n[k];
            }
        }
        total
    }
}

/// `C = 4·(½⟨{J_k, J_l}⟩ − ⟨J_k⟩⟨J_l⟩)`.
pub fn pure_qfi_matrix(state: &StateVector, ops: &AngularMomentumSet) -> Result<QfiMatrix> {
    let norm = state.norm();
    if (norm - 1.0).abs() > spin::NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    let mean = spin::expectation(ops, state)?;
    let second = spin::symmetrized_second_moments(ops, state)?;
    let mut c = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            c[k][l] = 4.0 * (second[k][l] - mean[k] * mean[l]);
        }
    }
    Ok(QfiMatrix::from_matrix(c))
}

/// Hermitian, unit-trace, positive semidefinite operator together with its
/// spectral decomposition.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    spin: Spin,
    matrix: CMatrix,
    populations: Vec<f64>,
    eigenvectors: CMatrix,
}

impl DensityOperator {
    /// Validates `matrix`: Hermitian to `1e-12`, trace within `1e-10` of one,
    /// eigenvalues no lower than `−1e-10` (those are clamped to zero).
    pub fn new(spin: Spin, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != spin.dim() {
            return Err(Error::DimensionMismatch {
                expected: spin.dim(),
                found: matrix.dim(),
            });
        }
        let deviation = matrix.hermiticity_defect();
        if deviation > 1e-12 {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::TraceViolation { trace: trace.re });
        }
        let eig = hermitian_eigen(&matrix)?;
        if let Some(&worst) = eig.values.first() {
            if worst < -1e-10 {
                return Err(Error::NegativeEigenvalue { value: worst });
            }
        }
        Ok(Self {
            spin,
            matrix,
            populations: eig.values.iter().map(|&p| p.max(0.0)).collect(),
            eigenvectors: eig.vectors,
        })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &StateVector) -> Result<Self> {
        Self::new(state.spin(), CMatrix::outer(state.amplitudes()))
    }

    /// `I/(2j+1)`.
    pub fn maximally_mixed(spin: Spin) -> Self {
        let n = spin.dim();
        let p = Complex64::new(1.0 / n as f64, 0.0);
        let matrix = CMatrix::from_diagonal(&alloc::vec![p; n]);
        Self::new(spin, matrix).expect("maximally mixed state is valid")
    }

    /// `Σ w_k ρ_k`; weights must be non-negative and sum to one.
    pub fn mixture(components: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = components.first().ok_or(Error::OutOfDomain {
            name: "mixture components",
            value: 0.0,
        })?;
        let spin = first.1.spin;
        let mut matrix = CMatrix::zeros(spin.dim());
        for &(w, rho) in components {
            if !(w >= 0.0) {
                return Err(Error::OutOfDomain {
                    name: "mixture weight",
                    value: w,
                });
            }
            if rho.spin != spin {
                return Err(Error::DimensionMismatch {
                    expected: spin.dim(),
                    found: rho.spin.dim(),
                });
            }
            matrix = &matrix + &rho.matrix.scale(Complex64::new(w, 0.0));
        }
        Self::new(spin, matrix)
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues `p_i` (ascending, clamped at zero).
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    /// Column `i` is `|i⟩`.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }
}

/// `C_kl = Σ_{i≠j} (p_i−p_j)²/(p_i+p_j) · 2Re(⟨i|J_k|j⟩⟨j|J_l|i⟩)`.
///
/// Only pairs with `p_i + p_j > eigen_floor` contribute. Every such pair has
/// at least one member with `p > eigen_floor/2`, so matrix elements are only
/// formed for those rows, which makes nearly pure states cheap.
pub fn mixed_qfi_matrix(
    rho: &DensityOperator,
    ops: &AngularMomentumSet,
    eigen_floor: f64,
) -> Result<QfiMatrix> {
    if !(eigen_floor >= 0.0) {
        return Err(Error::OutOfDomain {
            name: "eigen_floor",
            value: eigen_floor,
        });
    }
    let n = rho.spin.dim();
    if ops.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: ops.dim(),
            found: n,
        });
    }
    let p = &rho.populations;
    let vectors: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|r| rho.eigenvectors[(r, i)]).collect())
        .collect();
    let significant: Vec<usize> = (0..n).filter(|&i| p[i] > 0.5 * eigen_floor).collect();
    let mut is_significant = alloc::vec![false; n];
    for &i in &significant {
        is_significant[i] = true;
    }

    // elements[s][axis][j] = ⟨i_s|J_axis|j⟩
    let elements: Vec<[Vec<Complex64>; 3]> = significant
        .iter()
        .map(|&i| {
            Axis::ALL.map(|axis| {
                let image = ops.apply(axis, &vectors[i]);
                vectors.iter().map(|vj| spin::inner(&image, vj)).collect()
            })
        })
        .collect();
    let mut slot = alloc::vec![usize::MAX; n];
    for (s, &i) in significant.iter().enumerate() {
        slot[i] = s;
    }
    let element = |i: usize, j: usize, axis: usize| -> Complex64 {
        if is_significant[i] {
            elements[slot[i]][axis][j]
        } else {
            elements[slot[j]][axis][i].conj()
        }
    };

    let mut c = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            if i == j || !(is_significant[i] || is_significant[j]) {
                continue;
            }
            let total = p[i] + p[j];
            if total <= eigen_floor {
                continue;
            }
            let weight = (p[i] - p[j]) * (p[i] - p[j]) / total;
            if weight == 0.0 {
                continue;
            }
            let row: [Complex64; 3] = [element(i, j, 0), element(i, j, 1), element(i, j, 2)];
            for k in 0..3 {
                for l in k..3 {
                    // ⟨i|J_k|j⟩⟨j|J_l|i⟩ + ⟨i|J_l|j⟩⟨j|J_k|i⟩ = 2Re(⟨i|J_k|j⟩ conj⟨i|J_l|j⟩)
                    c[k][l] += weight * 2.0 * (row[k] * row[l].conj()).re;
                }
            }
        }
    }
    for k in 0..3 {
        for l in 0..k {
            c[k][l] = c[l][k];
        }
    }
    Ok(QfiMatrix::from_matrix(c))
}

/// `F̄_max = F_max / N`.
pub fn max_mean_qfi(qm: &QfiMatrix, n_particles: u32) -> f64 {
    qm.f_max() / n_particles.max(1) as f64
}

/// `Δφ_QCR = 1/√(vF)`.
pub fn cramer_rao_bound(fisher: f64, experiments: u64) -> Result<f64> {
    if !(fisher > 0.0) {
        return Err(Error::NonPositiveFisher { value: fisher });
    }
    if experiments == 0 {
        return Err(Error::OutOfDomain {
            name: "experiments",
            value: 0.0,
        });
    }
    Ok(1.0 / (experiments as f64 * fisher).sqrt())
}
