//! Covariance families, covariance-matrix assembly and Cholesky-based
//! Gaussian process sampling.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

use super::bessel::ln_bessel_k;
use crate::error::{Error, Result};
use crate::types::TimeGrid;

/// Relative jitter added to the diagonal on the first failed factorization.
pub const BASE_JITTER: f64 = 1e-10;
/// Number of tenfold jitter increases after the first jittered attempt.
pub const JITTER_ESCALATIONS: usize = 3;

const SYMMETRY_TOL: f64 = 1e-12;

/// Matérn correlation `2^{1-nu} / Gamma(nu) (alpha h)^nu K_nu(alpha h)`,
/// equal to 1 at `h = 0`.
pub fn matern_corr(h: f64, nu: f64, alpha: f64) -> f64 {
    let x = alpha * h.abs();
    if x == 0.0 {
        return 1.0;
    }
    let ln_m = (1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu) + nu * x.ln() + ln_bessel_k(nu, x);
    ln_m.exp().min(1.0)
}

/// Parameters of the bivariate Matérn cross-covariance
/// `C_ij(h) = rho_ij sigma_i sigma_j M(h; nu_ij, alpha_ij)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateMatern {
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho12: f64,
    pub alpha11: f64,
    pub alpha22: f64,
    pub alpha12: f64,
    pub nu11: f64,
    pub nu22: f64,
    pub nu12: f64,
}

impl BivariateMatern {
    /// The parameter set used by the bivariate simulation models.
    pub fn simulation_default() -> Self {
        Self {
            sigma1: 1.0,
            sigma2: 1.0,
            rho12: 0.6,
            alpha11: 0.02,
            alpha22: 0.01,
            alpha12: 0.016,
            nu11: 1.2,
            nu22: 0.6,
            nu12: 1.0,
        }
    }

    /// `C_ij(h)` for `i, j` in `{0, 1}`.
    pub fn cross(&self, i: usize, j: usize, h: f64) -> f64 {
        match (i, j) {
            (0, 0) => self.sigma1 * self.sigma1 * matern_corr(h, self.nu11, self.alpha11),
            (1, 1) => self.sigma2 * self.sigma2 * matern_corr(h, self.nu22, self.alpha22),
            _ => self.rho12 * self.sigma1 * self.sigma2 * matern_corr(h, self.nu12, self.alpha12),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovarianceSpec {
    /// `amplitude * exp(-rate |s - t|)`
    ExpScaled {
        amplitude: f64,
        rate: f64,
    },
    /// `amplitude * exp(-|s - t|^exponent)`
    PoweredExp {
        amplitude: f64,
        exponent: f64,
    },
    /// `sigma^2 M(|s - t|; nu, alpha)`
    Matern {
        sigma: f64,
        nu: f64,
        alpha: f64,
    },
    BivariateMatern(BivariateMatern),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be positive")))
    }
}

impl CovarianceSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::ExpScaled { amplitude, rate } => {
                positive("amplitude", amplitude)?;
                positive("rate", rate)
            }
            Self::PoweredExp { amplitude, exponent } => {
                positive("amplitude", amplitude)?;
                positive("exponent", exponent)?;
                if exponent > 2.0 {
                    return Err(Error::InvalidParameter(format!(
                        "powered exponential requires exponent <= 2, got {exponent}"
                    )));
                }
                Ok(())
            }
            Self::Matern { sigma, nu, alpha } => {
                positive("sigma", sigma)?;
                positive("nu", nu)?;
                positive("alpha", alpha)
            }
            Self::BivariateMatern(b) => {
                for (name, v) in [
                    ("sigma1", b.sigma1),
                    ("sigma2", b.sigma2),
                    ("alpha11", b.alpha11),
                    ("alpha22", b.alpha22),
                    ("alpha12", b.alpha12),
                    ("nu11", b.nu11),
                    ("nu22", b.nu22),
                    ("nu12", b.nu12),
                ] {
                    positive(name, v)?;
                }
                if !(b.rho12.abs() <= 1.0) {
                    return Err(Error::InvalidParameter(format!("|rho12| = {} exceeds 1", b.rho12)));
                }
                Ok(())
            }
        }
    }

    pub fn is_univariate(&self) -> bool {
        !matches!(self, Self::BivariateMatern(_))
    }

    /// Number of coordinates of the process.
    pub fn dim(&self) -> usize {
        if self.is_univariate() {
            1
        } else {
            2
        }
    }

    /// Covariance at lag `h` for coordinates `(i, j)`.
    pub fn cov(&self, i: usize, j: usize, h: f64) -> f64 {
        let h = h.abs();
        match *self {
            Self::ExpScaled { amplitude, rate } => amplitude * (-rate * h).exp(),
            Self::PoweredExp { amplitude, exponent } => amplitude * (-h.powf(exponent)).exp(),
            Self::Matern { sigma, nu, alpha } => sigma * sigma * matern_corr(h, nu, alpha),
            Self::BivariateMatern(b) => b.cross(i, j, h),
        }
    }

    /// Covariance matrix on the grid. For bivariate specs the `2k x 2k`
    /// matrix is ordered with all coordinate-1 points first.
    pub fn matrix(&self, grid: &TimeGrid) -> Result<DMatrix<f64>> {
        self.validate()?;
        let t = grid.points();
        let k = t.len();
        let q = self.dim();
        let m = DMatrix::from_fn(q * k, q * k, |r, c| {
            let (i, a) = (r / k, r % k);
            let (j, b) = (c / k, c % k);
            self.cov(i, j, t[a] - t[b])
        });
        let asym = (0..q * k)
            .flat_map(|r| (0..r).map(move |c| (r, c)))
            .map(|(r, c)| (m[(r, c)] - m[(c, r)]).abs())
            .fold(0.0, f64::max);
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidParameter(format!(
                "covariance matrix asymmetric by {asym:e}"
            )));
        }
        Ok(m)
    }
}

/// Lower Cholesky factor, adding diagonal jitter `1e-10 * max diag` and
/// escalating it tenfold up to three times if factorization fails.
pub fn factor_with_jitter(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Ok(ch.l());
    }
    let max_diag = m.diagonal().iter().copied().fold(0.0, f64::max);
    let mut jitter = BASE_JITTER * max_diag;
    for _ in 0..=JITTER_ESCALATIONS {
        let mut jm = m.clone();
        for d in 0..jm.nrows() {
            jm[(d, d)] += jitter;
        }
        if let Some(ch) = jm.cholesky() {
            return Ok(ch.l());
        }
        jitter *= 10.0;
    }
    Err(Error::NotPositiveDefinite)
}

/// Zero-mean Gaussian sampler with a fixed, pre-factored covariance.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    lower: DMatrix<f64>,
}

impl GaussianSampler {
    pub fn new(grid: &TimeGrid, spec: &CovarianceSpec) -> Result<Self> {
        Self::from_covariance(&spec.matrix(grid)?)
    }

    pub fn from_covariance(cov: &DMatrix<f64>) -> Result<Self> {
        Ok(Self {
            lower: factor_with_jitter(cov)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    /// One draw `L z` with `z` standard normal.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        (&self.lower * z).data.into()
    }
}

/// A zero-mean draw of a univariate process on the grid.
pub fn gp_sample<R: Rng + ?Sized>(grid: &TimeGrid, spec: &CovarianceSpec, rng: &mut R) -> Result<Vec<f64>> {
    if !spec.is_univariate() {
        return Err(Error::InvalidParameter(
            "gp_sample needs a univariate covariance".into(),
        ));
    }
    Ok(GaussianSampler::new(grid, spec)?.sample(rng))
}

/// A joint zero-mean draw of a bivariate process, returned as `k x 2`
/// row-major values.
pub fn bivariate_gp_sample<R: Rng + ?Sized>(grid: &TimeGrid, spec: &CovarianceSpec, rng: &mut R) -> Result<Vec<f64>> {
    if spec.is_univariate() {
        return Err(Error::InvalidParameter(
            "bivariate_gp_sample needs a bivariate covariance".into(),
        ));
    }
    let draw = GaussianSampler::new(grid, spec)?.sample(rng);
    Ok(interleave(&draw, grid.len()))
}

/// `[a_1..a_k, b_1..b_k]` to `[a_1, b_1, ..., a_k, b_k]`.
pub(crate) fn interleave(stacked: &[f64], k: usize) -> Vec<f64> {
    (0..k).flat_map(|j| [stacked[j], stacked[k + j]]).collect()
}
