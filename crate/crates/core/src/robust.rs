//! Robust outlier flagging on the `(MO, VO)` features.
//!
//! 1. FAST-MCD location and scatter from the `h`-subset with (approximately)
//!    minimal covariance determinant, and squared robust Mahalanobis
//!    distances `RMD^2` of every curve.
//! 2. Hardin-Rocke approximation: `c (m - d + 1) / (m d) * RMD^2` follows
//!    `F(d, m - d + 1)` on clean Gaussian data, where `d = p + 1`.
//! 3. A curve is flagged when its scaled distance exceeds the `alpha`
//!    quantile of that F law.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};
use crate::linalg;
use crate::types::OutlyingnessSummary;

pub const DEFAULT_ALPHA: f64 = 0.993;
pub const DEFAULT_H_FRAC: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct McdConfig {
    pub n_starts: usize,
    pub max_csteps: usize,
    /// Relative determinant change that ends the C-step iteration.
    pub tol: f64,
}

impl Default for McdConfig {
    fn default() -> Self {
        Self {
            n_starts: 500,
            max_csteps: 100,
            tol: 1e-12,
        }
    }
}

/// Raw (unreweighted) MCD estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct McdFit {
    /// Ascending indices of the selected `h` rows.
    pub subset: Vec<usize>,
    pub location: DVector<f64>,
    pub scatter: DMatrix<f64>,
    pub h: usize,
    pub d: usize,
    pub log_det: f64,
}

impl McdFit {
    pub fn determinant(&self) -> f64 {
        self.log_det.exp()
    }
}

struct Candidate {
    subset: Vec<usize>,
    mean: Vec<f64>,
    cov: Vec<f64>,
    log_det: f64,
}

fn row_major(y: &DMatrix<f64>) -> Vec<f64> {
    let (n, d) = y.shape();
    let mut out = Vec::with_capacity(n * d);
    for i in 0..n {
        out.extend(y.row(i).iter());
    }
    out
}

/// Mean, scatter and log-determinant of a subset, or `None` when the
/// scatter is numerically singular.
fn evaluate_subset(rows: &[f64], d: usize, idx: &[usize]) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>, f64)> {
    let (mean, cov) = linalg::mean_and_scatter(rows, d, idx);
    if linalg::is_near_singular(&cov, d) {
        return None;
    }
    let l = linalg::cholesky(&cov, d)?;
    let ld = linalg::log_det_from_cholesky(&l, d);
    Some((mean, cov, l, ld))
}

/// Indices of the `h` smallest distances, ties broken by index, ascending.
fn smallest_h(dist: &[f64], h: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dist.len()).collect();
    let by_dist = |a: &usize, b: &usize| dist[*a].total_cmp(&dist[*b]).then(a.cmp(b));
    if h < order.len() {
        order.select_nth_unstable_by(h, by_dist);
    }
    order.truncate(h);
    order.sort_unstable();
    order
}

fn distances(rows: &[f64], d: usize, mean: &[f64], l: &[f64]) -> Vec<f64> {
    let n = rows.len() / d;
    let mut diff = vec![0.0; d];
    let mut scratch = vec![0.0; d];
    (0..n)
        .map(|i| {
            for k in 0..d {
                diff[k] = rows[i * d + k] - mean[k];
            }
            linalg::mahalanobis_sq(l, d, &diff, &mut scratch)
        })
        .collect()
}

/// C-steps from an initial `h`-subset until the determinant stops changing.
fn concentrate(rows: &[f64], d: usize, h: usize, mut subset: Vec<usize>, cfg: &McdConfig) -> Option<Candidate> {
    let (mut mean, mut cov, mut l, mut ld) = evaluate_subset(rows, d, &subset)?;
    for _ in 0..cfg.max_csteps {
        let next = smallest_h(&distances(rows, d, &mean, &l), h);
        if next == subset {
            break;
        }
        let (m2, c2, l2, ld2) = evaluate_subset(rows, d, &next)?;
        let rel = ((ld2 - ld).exp() - 1.0).abs();
        subset = next;
        mean = m2;
        cov = c2;
        l = l2;
        ld = ld2;
        if rel < cfg.tol {
            break;
        }
    }
    Some(Candidate {
        subset,
        mean,
        cov,
        log_det: ld,
    })
}

/// One elemental start: a random `(d + 1)`-subset, enlarged with random
/// points while singular, then inflated to the `h` closest points.
fn elemental_start<R: Rng>(rows: &[f64], n: usize, d: usize, h: usize, rng: &mut R) -> Option<Vec<usize>> {
    let perm = sample(rng, n, n).into_vec();
    (d + 1..=h).find_map(|size| {
        evaluate_subset(rows, d, &perm[..size]).map(|(mean, _, l, _)| smallest_h(&distances(rows, d, &mean, &l), h))
    })
}

fn to_fit(c: Candidate, d: usize, h: usize) -> McdFit {
    McdFit {
        subset: c.subset,
        location: DVector::from_vec(c.mean),
        scatter: DMatrix::from_row_slice(d, d, &c.cov),
        h,
        d,
        log_det: c.log_det,
    }
}

/// FAST-MCD with elemental starts and C-steps. Deterministic given `seed`.
pub fn fast_mcd(y: &DMatrix<f64>, h: usize, seed: u64, cfg: &McdConfig) -> Result<McdFit> {
    let (n, d) = y.shape();
    if d == 0 || n <= d {
        return Err(Error::TooFewCurves { got: n, need: d + 1 });
    }
    if h < d + 1 || h > n {
        return Err(Error::InvalidParameter(format!(
            "subset size h = {h} must satisfy {} <= h <= {n}",
            d + 1
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("features must be finite".into()));
    }
    let rows = row_major(y);

    if h == n {
        let all: Vec<usize> = (0..n).collect();
        let (mean, cov, _, ld) = evaluate_subset(&rows, d, &all).ok_or(Error::SingularScatter)?;
        return Ok(to_fit(
            Candidate {
                subset: all,
                mean,
                cov,
                log_det: ld,
            },
            d,
            h,
        ));
    }

    let best = (0..cfg.n_starts.max(1))
        .into_par_iter()
        .filter_map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let init = elemental_start(&rows, n, d, h, &mut rng)?;
            concentrate(&rows, d, h, init, cfg).map(|c| (s, c))
        })
        .reduce_with(|a, b| {
            // lowest determinant, then lowest start index
            match a.1.log_det.total_cmp(&b.1.log_det) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => {
                    if a.0 <= b.0 {
                        a
                    } else {
                        b
                    }
                }
            }
        });
    best.map(|(_, c)| to_fit(c, d, h)).ok_or(Error::SingularScatter)
}

/// `(y_i - location)^T scatter^{-1} (y_i - location)` for every row.
pub fn robust_distances(y: &DMatrix<f64>, fit: &McdFit) -> Result<Vec<f64>> {
    let d = fit.d;
    if y.ncols() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            found: y.ncols(),
        });
    }
    let cov = row_major(&fit.scatter);
    if linalg::is_near_singular(&cov, d) {
        return Err(Error::SingularScatter);
    }
    let l = linalg::cholesky(&cov, d).ok_or(Error::SingularScatter)?;
    Ok(distances(&row_major(y), d, fit.location.as_slice(), &l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HrMethod {
    /// Monte-Carlo estimate of the Wishart degrees of freedom.
    Simulated,
    /// Closed-form asymptotic degrees of freedom.
    Asymptotic,
}

impl std::str::FromStr for HrMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simulated" => Ok(Self::Simulated),
            "asymptotic" => Ok(Self::Asymptotic),
            other => Err(Error::InvalidParameter(format!(
                "unknown Hardin-Rocke method `{other}`"
            ))),
        }
    }
}

/// Scaled-F approximation parameters and the resulting cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffParams {
    pub c: f64,
    pub m: f64,
    pub alpha: f64,
    /// `alpha` quantile of `F(d, m - d + 1)`.
    pub cutoff: f64,
    pub d: usize,
}

impl CutoffParams {
    pub fn new(c: f64, m: f64, d: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("scaling c = {c} must be positive")));
        }
        let df2 = m - d as f64 + 1.0;
        if !(df2 > 0.0) || !m.is_finite() {
            return Err(Error::InvalidDf { m, d });
        }
        let f = FisherSnedecor::new(d as f64, df2).map_err(|_| Error::InvalidDf { m, d })?;
        let cutoff = f.inverse_cdf(alpha);
        Ok(Self { c, m, alpha, cutoff, d })
    }

    /// Multiplier `c (m - d + 1) / (m d)` applied to `RMD^2`.
    pub fn scale_factor(&self) -> f64 {
        let d = self.d as f64;
        self.c * (self.m - d + 1.0) / (self.m * d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HrConfig {
    pub method: HrMethod,
    /// Replications for the simulated method.
    pub reps: usize,
    pub seed: u64,
    pub mcd: McdConfig,
}

impl Default for HrConfig {
    fn default() -> Self {
        Self {
            method: HrMethod::Simulated,
            reps: 500,
            seed: 0x4852_3035,
            mcd: McdConfig::default(),
        }
    }
}

/// Consistency factor of the raw MCD scatter at the Gaussian model:
/// `P(chi2_{d+2} <= q) / (h/n)` with `q` the `h/n` quantile of `chi2_d`.
/// Equals 1 when `h = n`.
pub fn consistency_factor(n: usize, d: usize, h: usize) -> f64 {
    if h >= n {
        return 1.0;
    }
    let frac = h as f64 / n as f64;
    let q = ChiSquared::new(d as f64).expect("positive df").inverse_cdf(frac);
    ChiSquared::new(d as f64 + 2.0).expect("positive df").cdf(q) / frac
}

/// Large-sample Wishart degrees of freedom of the raw MCD scatter.
///
/// At the standard Gaussian the raw scatter is `v I` with
/// `v = F_{d+2}(q) / a`, `a = h / n`, `q` the `a` quantile of `chi2_d`. Its
/// influence function is `IF_jl = (x_j x_l 1{|x|^2 <= q} - lambda(x) delta_jl) / D`,
/// with `lambda` affine in `1{|x|^2 <= q}` and `|x|^2 1{|x|^2 <= q}`. Matching
/// `Var(V_11) = E[IF_11^2] / n` to the Wishart variance `2 v^2 / m` gives `m`.
pub fn asymptotic_df(n: usize, d: usize, h: usize) -> f64 {
    let nf = n as f64;
    if h >= n {
        return nf - 1.0;
    }
    let pd = d as f64;
    let a = h as f64 / nf;
    let chi = |df: f64| ChiSquared::new(df).expect("positive df");
    let q = chi(pd).inverse_cdf(a);
    let f2 = chi(pd + 2.0).cdf(q);
    let f4 = chi(pd + 4.0).cdf(q);
    let g = statrs::distribution::Continuous::pdf(&chi(pd), q);
    let v = f2 / a;
    let beta = q * q * g / (pd * (pd + 2.0));
    let gamma = q * g / pd;
    let denom = a - 2.0 * beta / v;

    // coefficients over the basis (1, 1{x in E}, |x|^2 1{x in E})
    type Affine = [f64; 3];
    let lin = |terms: &[(f64, Affine)]| -> Affine {
        let mut out = [0.0; 3];
        for (w, t) in terms {
            for (o, c) in out.iter_mut().zip(t) {
                *o += w * c;
            }
        }
        out
    };
    let one: Affine = [1.0, 0.0, 0.0];
    let ind: Affine = [0.0, 1.0, 0.0];
    let sq: Affine = [0.0, 0.0, 1.0];
    let tr_b = lin(&[(1.0 / gamma, ind), (-a / gamma, one)]);
    let tr_v = lin(&[(-v * pd, one), (-beta * (pd + 2.0) / a, tr_b), (1.0 / a, sq)]);
    let kappa = lin(&[(1.0 / pd, tr_b), (1.0 / (pd * v), tr_v)]);
    let lambda = lin(&[(a * v, one), (beta, tr_b), (2.0 * beta, kappa)]);

    // second moments of the basis and cross moments with x_1^2 1{x in E}
    let gram = [
        [1.0, a, pd * f2],
        [a, a, pd * f2],
        [pd * f2, pd * f2, pd * (pd + 2.0) * f4],
    ];
    let cross = [f2, f2, (pd + 2.0) * f4];
    let lam_sq: f64 = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| lambda[i] * lambda[j] * gram[i][j])
        .sum();
    let lam_cross: f64 = lambda.iter().zip(cross).map(|(l, c)| l * c).sum();
    let asv = (3.0 * f4 - 2.0 * lam_cross + lam_sq) / (denom * denom);
    2.0 * v * v * nf / asv
}

/// Monte-Carlo degrees of freedom: fit the MCD to `reps` standard Gaussian
/// samples and match `2 mean^2 / var` of the raw scatter diagonals.
pub fn simulated_df(n: usize, d: usize, h: usize, reps: usize, seed: u64, mcd: &McdConfig) -> Result<f64> {
    let diag: Vec<Vec<f64>> = (0..reps.max(2))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let y = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let fit = fast_mcd(&y, h, rng.random(), mcd)?;
            Ok((0..d).map(|j| fit.scatter[(j, j)]).collect())
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = diag.into_iter().flatten().collect();
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    if !(var > 0.0) {
        return Err(Error::InvalidDf { m: f64::INFINITY, d });
    }
    Ok(2.0 * mean * mean / var)
}

type CacheKey = (usize, usize, usize, usize, u64, usize, usize);

fn df_cache() -> &'static Mutex<HashMap<CacheKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Hardin-Rocke `(c, m)` and cutoff for MCD distances with `n` rows in
/// dimension `d` and subset size `h`. Simulated results are memoized per
/// process.
pub fn hardin_rocke_params(n: usize, d: usize, h: usize, alpha: f64, cfg: &HrConfig) -> Result<CutoffParams> {
    if n <= d || h < d + 1 || h > n {
        return Err(Error::InvalidParameter(format!(
            "need n > d and d + 1 <= h <= n (n = {n}, d = {d}, h = {h})"
        )));
    }
    let c = consistency_factor(n, d, h);
    let m = match cfg.method {
        HrMethod::Asymptotic => asymptotic_df(n, d, h),
        HrMethod::Simulated => {
            let key = (n, d, h, cfg.reps, cfg.seed, cfg.mcd.n_starts, cfg.mcd.max_csteps);
            let cached = df_cache().lock().expect("cache poisoned").get(&key).copied();
            match cached {
                Some(m) => m,
                None => {
                    let m = simulated_df(n, d, h, cfg.reps, cfg.seed, &cfg.mcd)?;
                    df_cache().lock().expect("cache poisoned").insert(key, m);
                    m
                }
            }
        }
    };
    if !(m > d as f64 - 1.0) {
        return Err(Error::InvalidDf { m, d });
    }
    CutoffParams::new(c, m, d, alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    pub alpha: f64,
    pub h_frac: f64,
    pub seed: u64,
    pub mcd: McdConfig,
    pub hr: HrConfig,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            h_frac: DEFAULT_H_FRAC,
            seed: 0,
            mcd: McdConfig::default(),
            hr: HrConfig::default(),
        }
    }
}

impl DetectionConfig {
    pub fn subset_size(&self, n: usize) -> usize {
        (self.h_frac * n as f64 + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub rmd2: Vec<f64>,
    pub scaled: Vec<f64>,
    pub cutoff: f64,
    pub flags: Vec<bool>,
    pub params: CutoffParams,
    pub fit: McdFit,
}

impl DetectionReport {
    pub fn n_flagged(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

/// The `n x (p + 1)` feature matrix with rows `(mo_i, vo_i)`.
pub fn feature_matrix(summaries: &[OutlyingnessSummary]) -> Result<DMatrix<f64>> {
    let d = summaries.first().map_or(0, |s| s.mo.len() + 1);
    let mut rows = Vec::with_capacity(summaries.len() * d);
    for s in summaries {
        if s.mo.len() + 1 != d {
            return Err(Error::LengthMismatch {
                expected: d - 1,
                found: s.mo.len(),
            });
        }
        rows.extend(s.y());
    }
    Ok(DMatrix::from_row_slice(summaries.len(), d, &rows))
}

fn check_detect_size(n: usize, d: usize) -> Result<()> {
    if n < d + 2 {
        return Err(Error::TooFewCurves { got: n, need: d + 2 });
    }
    Ok(())
}

/// Full three-step flagging on per-curve summaries.
pub fn detect(summaries: &[OutlyingnessSummary], cfg: &DetectionConfig) -> Result<DetectionReport> {
    let y = feature_matrix(summaries)?;
    let (n, d) = y.shape();
    check_detect_size(n, d)?;
    let h = cfg.subset_size(n);
    let params = hardin_rocke_params(n, d, h, cfg.alpha, &cfg.hr)?;
    detect_features(&y, &params, cfg)
}

/// Flagging with precomputed cutoff parameters.
pub fn detect_features(y: &DMatrix<f64>, params: &CutoffParams, cfg: &DetectionConfig) -> Result<DetectionReport> {
    let (n, d) = y.shape();
    check_detect_size(n, d)?;
    if params.d != d {
        return Err(Error::LengthMismatch {
            expected: params.d,
            found: d,
        });
    }
    let h = cfg.subset_size(n);
    let fit = fast_mcd(y, h, cfg.seed, &cfg.mcd)?;
    let rmd2 = robust_distances(y, &fit)?;
    let factor = params.scale_factor();
    let scaled: Vec<f64> = rmd2.iter().map(|r| factor * r).collect();
    let flags = scaled.iter().map(|s| *s > params.cutoff).collect();
    Ok(DetectionReport {
        rmd2,
        scaled,
        cutoff: params.cutoff,
        flags,
        params: params.clone(),
        fit,
    })
}
