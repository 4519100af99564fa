use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::CMatrix;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a complex Hermitian matrix, sorted ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector belonging to `values[k]`.
    pub vectors: CMatrix,
}

/// Cyclic complex Jacobi. The input is assumed Hermitian; only the upper
/// triangle drives the rotations.
///
/// Diagonal input terminates immediately, which keeps density operators of
/// Dicke states and other diagonal mixtures cheap at any dimension.
pub fn hermitian_eigen(matrix: &CMatrix) -> Result<HermitianEigen> {
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut v = CMatrix::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= 1e-15 * scale {
            return Ok(finish(&a, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let magnitude = apq.norm();
                if magnitude <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / magnitude;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * magnitude);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s, phase);
            }
        }
    }
    Err(Error::NoConvergence {
        routine: "Hermitian Jacobi",
    })
}

/// Applies `A ← U†AU`, `V ← VU` with `U = [[c, s·e^{iα}], [-s·e^{-iα}, c]]`
/// on the `(p, q)` plane, which zeroes `A[p][q]`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let n = a.dim();
    let u_pq = phase * s;
    let u_qp = -phase.conj() * s;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * u_qp.conj();
        a[(q, k)] = apk * u_pq.conj() + aqk * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * c;
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            sum += a[(p, q)].norm_sqr();
        }
    }
    sum.sqrt()
}

fn finish(a: &CMatrix, v: CMatrix) -> HermitianEigen {
    let n = a.dim();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    HermitianEigen {
        values: order.iter().map(|&k| diag[k]).collect(),
        vectors: CMatrix::from_fn(n, |r, c| v[(r, order[c])]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_y() {
        let m =
            CMatrix::from_row_major(2, alloc::vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
                .unwrap();
        let eig = hermitian_eigen(&m).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstructs_dense_hermitian() {
        let n = 9;
        let m = CMatrix::from_fn(n, |r, k| {
            if r == k {
                c((r as f64).sin() * 3.0, 0.0)
            } else {
                let (lo, hi) = if r < k { (r, k) } else { (k, r) };
                let z = c(((lo * 5 + hi) as f64).cos(), ((lo + 3 * hi) as f64).sin());
                if r < k {
                    z
                } else {
                    z.conj()
                }
            }
        });
        let eig = hermitian_eigen(&m).unwrap();
        let v = &eig.vectors;
        let d = CMatrix::from_diagonal(&eig.values.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        let rebuilt = &(v * &d) * &v.adjoint();
        assert!((&rebuilt - &m).max_abs() < 1e-12);
        let gram = &v.adjoint() * v;
        assert!((&gram - &CMatrix::identity(n)).max_abs() < 1e-12);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rank_one_projector() {
        let psi = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let eig = hermitian_eigen(&CMatrix::outer(&psi)).unwrap();
        assert!(eig.values[0].abs() < 1e-14);
        assert!(eig.values[1].abs() < 1e-14);
        assert!((eig.values[2] - 1.0).abs() < 1e-14);
        let top: Vec<_> = (0..3).map(|r| eig.vectors[(r, 2)]).collect();
        let overlap: Complex64 = top.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-14);
    }
}
