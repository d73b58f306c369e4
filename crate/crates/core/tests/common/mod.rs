//! Independent oracles shared by the integration and acceptance tests.
//! Nothing here calls into the library's numerical code.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Sorting median.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn mad(xs: &[f64]) -> f64 {
    let m = median(xs);
    median(&xs.iter().map(|x| (x - m).abs()).collect::<Vec<_>>())
}

/// Planar SDO by brute force over `angles` equally spaced directions on
/// `[0, pi)`.
pub fn sweep_sdo(points: &[[f64; 2]], x: [f64; 2], angles: usize) -> f64 {
    (0..angles)
        .map(|a| {
            let th = std::f64::consts::PI * a as f64 / angles as f64;
            let (c, s) = (th.cos(), th.sin());
            let proj: Vec<f64> = points.iter().map(|p| c * p[0] + s * p[1]).collect();
            let z = (c * x[0] + s * x[1] - median(&proj)).abs();
            let m = mad(&proj);
            if m == 0.0 {
                if z == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                z / m
            }
        })
        .fold(0.0, f64::max)
}

/// Determinant of the `1/h` scatter of `rows[idx]` in two dimensions.
fn det2(rows: &[[f64; 2]], idx: &[usize]) -> f64 {
    let h = idx.len() as f64;
    let (mut mx, mut my) = (0.0, 0.0);
    for &i in idx {
        mx += rows[i][0];
        my += rows[i][1];
    }
    mx /= h;
    my /= h;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &i in idx {
        let (a, b) = (rows[i][0] - mx, rows[i][1] - my);
        sxx += a * a;
        sxy += a * b;
        syy += b * b;
    }
    (sxx * syy - sxy * sxy) / (h * h)
}

/// Smallest covariance determinant over all `h`-subsets.
pub fn exhaustive_mcd_det(rows: &[[f64; 2]], h: usize) -> f64 {
    fn rec(rows: &[[f64; 2]], h: usize, start: usize, cur: &mut Vec<usize>, best: &mut f64) {
        if cur.len() == h {
            *best = best.min(det2(rows, cur));
            return;
        }
        for i in start..rows.len() {
            if rows.len() - i < h - cur.len() {
                break;
            }
            cur.push(i);
            rec(rows, h, i + 1, cur, best);
            cur.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(rows, h, 0, &mut Vec::new(), &mut best);
    best
}

/// `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt` by the trapezoid rule,
/// which converges geometrically for this doubly-exponentially decaying
/// integrand.
pub fn bessel_k_quadrature(nu: f64, x: f64) -> f64 {
    let step = 1.0 / 256.0;
    // pull out the peak value exp(-x) to avoid underflow for large x
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
    let mut sum = 0.5 * f(0.0);
    let mut t = step;
    loop {
        let v = f(t);
        sum += v;
        if v < 1e-18 * sum {
            break;
        }
        t += step;
    }
    sum * step * (-x).exp()
}

/// Lag-`lag` sample autocorrelation pooled across curves, each of length `k`.
pub fn pooled_lag_corr(curves: &[Vec<f64>], lag: usize) -> f64 {
    let all: Vec<f64> = curves.iter().flatten().copied().collect();
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / all.len() as f64;
    let mut cov = 0.0;
    let mut count = 0usize;
    for c in curves {
        for j in 0..c.len() - lag {
            cov += (c[j] - mean) * (c[j + lag] - mean);
            count += 1;
        }
    }
    cov / count as f64 / var
}

/// Random orthogonal `p x p` matrix (row-major) from Gram-Schmidt on a
/// Gaussian matrix.
pub fn random_orthogonal<R: Rng>(p: usize, rng: &mut R) -> Vec<f64> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(p);
    while q.len() < p {
        let mut v: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
        for u in &q {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-6 {
            q.push(v.into_iter().map(|a| a / n).collect());
        }
    }
    q.into_iter().flatten().collect()
}

pub fn mat_vec(a: &[f64], v: &[f64]) -> Vec<f64> {
    let p = v.len();
    (0..p).map(|r| (0..p).map(|c| a[r * p + c] * v[c]).sum()).collect()
}
