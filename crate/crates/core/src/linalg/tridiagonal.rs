use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::RMatrix;
use crate::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenpairs of a real symmetric tridiagonal matrix, sorted ascending.
#[derive(Clone, Debug)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector belonging to `values[k]`.
    pub vectors: RMatrix,
}

/// Implicit QL with Wilkinson-style shifts on the tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off` (`off[i]` couples `i` and `i+1`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagonalEigen {
            values: Vec::new(),
            vectors: RMatrix::zeros(0),
        });
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: off.len(),
        });
    }

    let mut d = diag.to_vec();
    let mut e = Vec::with_capacity(n);
    e.extend_from_slice(off);
    e.push(0.0);
    // Eigenvectors are accumulated as rows of `zt` (i.e. zt = Zᵀ) so that
    // each Givens rotation touches two contiguous rows.
    let mut zt = RMatrix::identity(n);

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NoConvergence {
                    routine: "tridiagonal QL",
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                rotate_rows(&mut zt, i, s, c);
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = RMatrix::from_fn(n, |r, c| zt[(order[c], r)]);
    Ok(TridiagonalEigen { values, vectors })
}

#[inline]
fn rotate_rows(zt: &mut RMatrix, i: usize, s: f64, c: f64) {
    let n = zt.dim();
    for k in 0..n {
        let lower = zt[(i, k)];
        let upper = zt[(i + 1, k)];
        zt[(i + 1, k)] = s * lower + c * upper;
        zt[(i, k)] = c * lower - s * upper;
    }
}
