//! Collective spin picture of the two-mode condensate.
//!
//! Basis ordering is `m = -j, -j+1, …, +j`, so the amplitude of `|j,m⟩`
//! lives at index `m + j`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Total spin `j = N/2`, stored as the integer `2j = N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice_j: u32,
}

impl Spin {
    pub fn from_twice_j(twice_j: i64) -> Result<Self> {
        if twice_j <= 0 || twice_j > u32::MAX as i64 {
            return Err(Error::InvalidSpin { twice_j });
        }
        Ok(Self {
            twice_j: twice_j as u32,
        })
    }

    /// Spin of `n` bosons shared between two modes, `j = n/2`.
    pub fn from_particles(n: u32) -> Result<Self> {
        Self::from_twice_j(n as i64)
    }

    pub fn twice_j(self) -> u32 {
        self.twice_j
    }

    pub fn j(self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn particles(self) -> u32 {
        self.twice_j
    }

    /// Hilbert-space dimension `2j + 1`.
    pub fn dim(self) -> usize {
        self.twice_j as usize + 1
    }

    /// `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.j();
        j * (j + 1.0)
    }

    /// Projection quantum number at basis index `idx`.
    pub fn m_at(self, idx: usize) -> f64 {
        idx as f64 - self.j()
    }

    /// Basis index of `m = twice_m / 2`.
    pub fn index_of(self, twice_m: i64) -> Result<usize> {
        let tj = self.twice_j as i64;
        if twice_m < -tj || twice_m > tj || (twice_m + tj) % 2 != 0 {
            return Err(Error::InvalidProjection {
                twice_j: self.twice_j,
                twice_m,
            });
        }
        Ok(((twice_m + tj) / 2) as usize)
    }
}

/// `J_x, J_y, J_z` and `J_z²` as dense `(2j+1)`-dimensional matrices.
///
/// Products with states go through the tridiagonal ladder structure rather
/// than the dense matrices, which are kept for inspection and algebra checks.
#[derive(Clone, Debug)]
pub struct AngularMomentumSet {
    spin: Spin,
    /// `ladder[k] = ⟨k+1|J₊|k⟩ = √(j(j+1) − m(m+1))` with `m = k − j`.
    ladder: Vec<f64>,
    jx: CMatrix,
    jy: CMatrix,
    jz: CMatrix,
    jz2: CMatrix,
}

/// Builds the spin-`j` matrices from the standard ladder matrix elements.
pub fn build_operators(spin: Spin) -> AngularMomentumSet {
    let n = spin.dim();
    let casimir = spin.casimir();
    let ladder: Vec<f64> = (0..n - 1)
        .map(|k| {
            let m = spin.m_at(k);
            (casimir - m * (m + 1.0)).max(0.0).sqrt()
        })
        .collect();

    let mut jx = CMatrix::zeros(n);
    let mut jy = CMatrix::zeros(n);
    for (k, &l) in ladder.iter().enumerate() {
        // J₊ has entry (k+1, k); J₋ = J₊ᵀ.
        jx[(k + 1, k)] = Complex64::new(0.5 * l, 0.0);
        jx[(k, k + 1)] = Complex64::new(0.5 * l, 0.0);
        jy[(k + 1, k)] = Complex64::new(0.0, -0.5 * l);
        jy[(k, k + 1)] = Complex64::new(0.0, 0.5 * l);
    }
    let mz: Vec<Complex64> = (0..n).map(|k| Complex64::new(spin.m_at(k), 0.0)).collect();
    let mz2: Vec<Complex64> = mz.iter().map(|m| m * m).collect();

    AngularMomentumSet {
        spin,
        ladder,
        jx,
        jy,
        jz: CMatrix::from_diagonal(&mz),
        jz2: CMatrix::from_diagonal(&mz2),
    }
}

/// Cartesian component selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl AngularMomentumSet {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn jx(&self) -> &CMatrix {
        &self.jx
    }

    pub fn jy(&self) -> &CMatrix {
        &self.jy
    }

    pub fn jz(&self) -> &CMatrix {
        &self.jz
    }

    pub fn jz2(&self) -> &CMatrix {
        &self.jz2
    }

    pub fn matrix(&self, axis: Axis) -> &CMatrix {
        match axis {
            Axis::X => &self.jx,
            Axis::Y => &self.jy,
            Axis::Z => &self.jz,
        }
    }

    /// Ladder elements `√(j(j+1) − m(m+1))`, `m = −j … j−1`.
    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    /// `J_axis · ψ` in O(2j+1) operations.
    pub fn apply(&self, axis: Axis, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        debug_assert_eq!(psi.len(), n);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        match axis {
            Axis::Z => {
                for (k, (o, &a)) in out.iter_mut().zip(psi).enumerate() {
                    *o = a * self.spin.m_at(k);
                }
            }
            Axis::X | Axis::Y => {
                // (J₊ψ)_{k+1} = l_k ψ_k,  (J₋ψ)_k = l_k ψ_{k+1}.
                for (k, &l) in self.ladder.iter().enumerate() {
                    let raise = psi[k] * (0.5 * l);
                    let lower = psi[k + 1] * (0.5 * l);
                    match axis {
                        Axis::X => {
                            out[k + 1] += raise;
                            out[k] += lower;
                        }
                        _ => {
                            // J_y = (J₊ − J₋)/(2i)
                            out[k + 1] += Complex64::new(raise.im, -raise.re);
                            out[k] += Complex64::new(-lower.im, lower.re);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Normalized pure state over the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    spin: Spin,
    amplitudes: Vec<Complex64>,
}

/// Allowed deviation of `Σ|c_m|²` from one.
pub const NORM_TOLERANCE: f64 = 1e-9;

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn new(spin: Spin, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(spin, amplitudes.len())?;
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { spin, amplitudes })
    }

    /// Normalizes arbitrary (non-zero) amplitudes.
    pub fn normalized(spin: Spin, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(spin, amplitudes.len())?;
        let norm = norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { spin, amplitudes })
    }

    pub(crate) fn from_parts_unchecked(spin: Spin, amplitudes: Vec<Complex64>) -> Self {
        Self { spin, amplitudes }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }
}

fn check_len(spin: Spin, len: usize) -> Result<()> {
    if len != spin.dim() {
        return Err(Error::DimensionMismatch {
            expected: spin.dim(),
            found: len,
        });
    }
    Ok(())
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|j, m⟩` with `m = twice_m / 2`.
pub fn dicke_state(spin: Spin, twice_m: i64) -> Result<StateVector> {
    let idx = spin.index_of(twice_m)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); spin.dim()];
    amplitudes[idx] = Complex64::new(1.0, 0.0);
    Ok(StateVector { spin, amplitudes })
}

/// Spin coherent state `|θ, φ⟩ = exp(−iθ(J_x sinφ − J_y cosφ))|j,−j⟩`.
///
/// Amplitudes are `√C(2j, k) sin^k(θ/2) cos^{2j−k}(θ/2) e^{−iφk}` with
/// `k = m + j`. They are generated by the ratio recurrence outward from the
/// most probable `k`, so no binomial is ever formed and nothing overflows
/// for large `j`; the result is normalized at the end.
pub fn spin_coherent_state(spin: Spin, theta: f64, phi: f64) -> Result<StateVector> {
    use core::f64::consts::PI;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::OutOfDomain {
            name: "theta",
            value: theta,
        });
    }
    if !(0.0..2.0 * PI).contains(&phi) {
        return Err(Error::OutOfDomain {
            name: "phi",
            value: phi,
        });
    }
    let two_j = spin.twice_j() as i64;
    if theta == 0.0 {
        return dicke_state(spin, -two_j);
    }
    if theta == PI {
        // τ = e^{−iφ}tan(θ/2) → ∞; the state collapses onto |j,+j⟩ up to the
        // global phase e^{−2ijφ}.
        let mut state = dicke_state(spin, two_j)?;
        let last = state.amplitudes.len() - 1;
        state.amplitudes[last] = phase(-(two_j as f64) * phi);
        return Ok(state);
    }

    let n = spin.dim();
    let (sin_half, cos_half) = (0.5 * theta).sin_cos();
    let tan_half = sin_half / cos_half;
    let peak = ((two_j as f64) * sin_half * sin_half).round() as usize;
    let peak = peak.min(n - 1);

    let mut magnitude = vec![0.0; n];
    magnitude[peak] = 1.0;
    for k in peak..n - 1 {
        // c_{k+1}/c_k = tan(θ/2) √((2j − k)/(k + 1))
        let ratio = tan_half * (((two_j - k as i64) as f64) / ((k + 1) as f64)).sqrt();
        magnitude[k + 1] = magnitude[k] * ratio;
    }
    for k in (1..=peak).rev() {
        // c_{k−1}/c_k = cot(θ/2) √(k/(2j − k + 1))
        let ratio = (k as f64 / ((two_j - k as i64 + 1) as f64)).sqrt() / tan_half;
        magnitude[k - 1] = magnitude[k] * ratio;
    }
    let total = magnitude.iter().map(|x| x * x).sum::<f64>().sqrt();

    let amplitudes = magnitude
        .iter()
        .enumerate()
        .map(|(k, &a)| phase(-(k as f64) * phi) * (a / total))
        .collect();
    Ok(StateVector { spin, amplitudes })
}

fn phase(angle: f64) -> Complex64 {
    let (s, c) = angle.sin_cos();
    Complex64::new(c, s)
}

fn check_ops(ops: &AngularMomentumSet, state: &StateVector) -> Result<()> {
    if ops.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: ops.dim(),
            found: state.dim(),
        });
    }
    Ok(())
}

/// `(⟨J_x⟩, ⟨J_y⟩, ⟨J_z⟩)`.
pub fn expectation(ops: &AngularMomentumSet, state: &StateVector) -> Result<[f64; 3]> {
    check_ops(ops, state)?;
    let psi = state.amplitudes();
    let tolerance = 1e-10 * state.spin.j().max(1.0);
    let mut out = [0.0; 3];
    for (slot, axis) in out.iter_mut().zip(Axis::ALL) {
        let value = inner(psi, &ops.apply(axis, psi));
        if value.im.abs() > tolerance {
            return Err(Error::ComplexResidue { value: value.im });
        }
        *slot = value.re;
    }
    Ok(out)
}

/// `½⟨J_k J_l + J_l J_k⟩ = Re⟨J_k ψ | J_l ψ⟩`.
pub fn symmetrized_second_moments(
    ops: &AngularMomentumSet,
    state: &StateVector,
) -> Result<[[f64; 3]; 3]> {
    check_ops(ops, state)?;
    let psi = state.amplitudes();
    let images = Axis::ALL.map(|axis| ops.apply(axis, psi));
    let mut out = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in k..3 {
            let value = inner(&images[k], &images[l]).re;
            out[k][l] = value;
            out[l][k] = value;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn spin(twice_j: i64) -> Spin {
        Spin::from_twice_j(twice_j).unwrap()
    }

    #[test]
    fn rejects_non_positive_spin() {
        assert!(Spin::from_twice_j(0).is_err());
        assert!(Spin::from_twice_j(-3).is_err());
    }

    #[test]
    fn spin_half_is_pauli_over_two() {
        let ops = build_operators(spin(1));
        assert_eq!(ops.jz()[(0, 0)].re, -0.5);
        assert_eq!(ops.jz()[(1, 1)].re, 0.5);
        assert_eq!(ops.jx()[(0, 1)].re, 0.5);
        assert_eq!(ops.jx()[(1, 0)].re, 0.5);
        assert_eq!(ops.jy()[(0, 1)], Complex64::new(0.0, 0.5));
        assert_eq!(ops.jy()[(1, 0)], Complex64::new(0.0, -0.5));
    }

    #[test]
    fn spin_one_ladder_entries() {
        let ops = build_operators(spin(2));
        for k in 0..3 {
            assert_eq!(ops.jz()[(k, k)].re, k as f64 - 1.0);
        }
        assert!((ops.jx()[(0, 1)].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((ops.jx()[(1, 2)].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(ops.jx()[(0, 2)].re, 0.0);
    }

    #[test]
    fn banded_apply_matches_dense() {
        let ops = build_operators(spin(7));
        let psi: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new((k as f64).cos(), (2.0 * k as f64).sin()))
            .collect();
        for axis in Axis::ALL {
            let dense = ops.matrix(axis).mul_vec(&psi);
            let banded = ops.apply(axis, &psi);
            for (a, b) in dense.iter().zip(&banded) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dicke_examples() {
        let s = dicke_state(spin(2), 0).unwrap();
        assert_eq!(s.amplitudes()[1], Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitudes()[0], Complex64::new(0.0, 0.0));
        let s = dicke_state(spin(100), -100).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(dicke_state(spin(2), 3).is_err());
        // j = 1 requires integer m
        assert!(dicke_state(spin(2), 1).is_err());
    }

    #[test]
    fn coherent_state_spin_half_equator() {
        let s = spin_coherent_state(spin(1), PI / 2.0, 0.0).unwrap();
        for a in s.amplitudes() {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15);
            assert!(a.im.abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_state_poles() {
        let sp = spin(9);
        assert_eq!(
            spin_coherent_state(sp, 0.0, 1.3).unwrap(),
            dicke_state(sp, -9).unwrap()
        );
        let south = spin_coherent_state(sp, PI, 0.0).unwrap();
        assert_eq!(south, dicke_state(sp, 9).unwrap());
    }

    #[test]
    fn coherent_state_domain() {
        assert!(spin_coherent_state(spin(2), -0.1, 0.0).is_err());
        assert!(spin_coherent_state(spin(2), 0.1, 2.0 * PI).is_err());
    }

    #[test]
    fn expectation_examples() {
        let sp = spin(100);
        let ops = build_operators(sp);
        let eq = spin_coherent_state(sp, PI / 2.0, 0.0).unwrap();
        let [x, y, z] = expectation(&ops, &eq).unwrap();
        assert!((x - 50.0).abs() < 1e-9 && y.abs() < 1e-9 && z.abs() < 1e-9);
        let pole = spin_coherent_state(sp, 0.0, 0.0).unwrap();
        assert_eq!(expectation(&ops, &pole).unwrap(), [0.0, 0.0, -50.0]);
        let d = dicke_state(sp, 14).unwrap();
        assert_eq!(expectation(&ops, &d).unwrap(), [0.0, 0.0, 7.0]);
    }

    #[test]
    fn second_moments_of_dicke_states() {
        let sp = spin(10);
        let ops = build_operators(sp);
        let j = sp.j();
        for twice_m in (-10..=10).step_by(2) {
            let m = twice_m as f64 / 2.0;
            let moments =
                symmetrized_second_moments(&ops, &dicke_state(sp, twice_m).unwrap()).unwrap();
            let transverse = (j * (j + 1.0) - m * m) / 2.0;
            assert!((moments[0][0] - transverse).abs() < 1e-12);
            assert!((moments[1][1] - transverse).abs() < 1e-12);
            assert!((moments[2][2] - m * m).abs() < 1e-12);
        }
    }

    #[test]
    fn second_moments_spin_half() {
        let sp = spin(1);
        let ops = build_operators(sp);
        let s = spin_coherent_state(sp, PI / 2.0, 0.0).unwrap();
        let moments = symmetrized_second_moments(&ops, &s).unwrap();
        for k in 0..3 {
            assert!((moments[k][k] - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ops = build_operators(spin(2));
        let s = dicke_state(spin(3), 1).unwrap();
        assert!(matches!(
            expectation(&ops, &s),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(symmetrized_second_moments(&ops, &s).is_err());
    }
}
