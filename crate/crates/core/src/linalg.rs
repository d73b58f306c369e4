//! Small dense helpers for the `d x d` problems inside FAST-MCD, where `d`
//! is the feature dimension (typically 2 or 3).

use nalgebra::{DMatrix, SymmetricEigen};

/// Relative eigenvalue floor below which a scatter matrix counts as singular.
pub const SINGULAR_RATIO: f64 = 1e-12;

/// Lower Cholesky factor of a row-major SPD matrix, or `None` if a pivot is
/// not strictly positive.
pub fn cholesky(a: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    Some(l)
}

/// `log det(A)` from its Cholesky factor.
pub fn log_det_from_cholesky(l: &[f64], d: usize) -> f64 {
    2.0 * (0..d).map(|i| l[i * d + i].ln()).sum::<f64>()
}

/// `|L^{-1} v|^2`, the quadratic form `v^T A^{-1} v` for `A = L L^T`.
pub fn mahalanobis_sq(l: &[f64], d: usize, v: &[f64], scratch: &mut [f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..d {
        let mut s = v[i];
        for k in 0..i {
            s -= l[i * d + k] * scratch[k];
        }
        let z = s / l[i * d + i];
        scratch[i] = z;
        acc += z * z;
    }
    acc
}

/// True when the smallest eigenvalue is below `SINGULAR_RATIO` times the
/// largest (or the matrix is not finite).
pub fn is_near_singular(a: &[f64], d: usize) -> bool {
    if a.iter().any(|v| !v.is_finite()) {
        return true;
    }
    let (min, max) = eigen_range(a, d);
    !(max > 0.0) || min < SINGULAR_RATIO * max
}

/// Smallest and largest eigenvalue of a symmetric row-major matrix.
fn eigen_range(a: &[f64], d: usize) -> (f64, f64) {
    match d {
        1 => (a[0], a[0]),
        2 => {
            let mid = 0.5 * (a[0] + a[3]);
            let r = (0.25 * (a[0] - a[3]).powi(2) + a[1] * a[1]).sqrt();
            (mid - r, mid + r)
        }
        _ => {
            let eig = SymmetricEigen::new(DMatrix::from_row_slice(d, d, a)).eigenvalues;
            let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
            (min, max)
        }
    }
}

/// Mean and `(1/m)`-normalized scatter of the selected rows of a row-major
/// `n x d` array.
pub fn mean_and_scatter(rows: &[f64], d: usize, idx: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let m = idx.len() as f64;
    let mut mean = vec![0.0; d];
    for &i in idx {
        for (c, v) in mean.iter_mut().zip(&rows[i * d..(i + 1) * d]) {
            *c += v;
        }
    }
    for c in mean.iter_mut() {
        *c /= m;
    }
    let mut cov = vec![0.0; d * d];
    let mut diff = vec![0.0; d];
    for &i in idx {
        for (k, df) in diff.iter_mut().enumerate() {
            *df = rows[i * d + k] - mean[k];
        }
        for r in 0..d {
            for c in 0..=r {
                cov[r * d + c] += diff[r] * diff[c];
            }
        }
    }
    for r in 0..d {
        for c in 0..=r {
            let v = cov[r * d + c] / m;
            cov[r * d + c] = v;
            cov[c * d + r] = v;
        }
    }
    (mean, cov)
}
