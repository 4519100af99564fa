#[allow(unused_imports)]
use num_traits::Float;

/// Eigen-decomposition of a real symmetric 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Symmetric3Eigen {
    /// Sorted descending.
    pub values: [f64; 3],
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: [[f64; 3]; 3],
}

/// Cyclic Jacobi rotations until the off-diagonal norm falls below
/// `1e-13` relative to the matrix norm.
pub fn symmetric3_eigen(m: &[[f64; 3]; 3]) -> Symmetric3Eigen {
    let mut a = *m;
    for r in 0..3 {
        for c in r + 1..3 {
            let avg = 0.5 * (a[r][c] + a[c][r]);
            a[r][c] = avg;
            a[c][r] = avg;
        }
    }
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let norm = frobenius(&a).max(f64::MIN_POSITIVE);

    for _ in 0..64 {
        let off = (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
        if off <= 1e-15 * norm {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
            let c = 1.0 / t.hypot(1.0);
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            for row in v.iter_mut() {
                let vkp = row[p];
                let vkq = row[q];
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let mut values = [0.0; 3];
    let mut vectors = [[0.0; 3]; 3];
    for (slot, &k) in order.iter().enumerate() {
        values[slot] = a[k][k];
        vectors[slot] = [v[0][k], v[1][k], v[2][k]];
    }
    Symmetric3Eigen { values, vectors }
}

fn frobenius(a: &[[f64; 3]; 3]) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}
