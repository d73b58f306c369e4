//! Seeded generation of the simulation models: Gaussian processes sampled
//! through a Cholesky factor, the Matérn family and contamination schemes.

pub mod bessel;
pub mod covariance;
pub mod models;

pub use bessel::{bessel_k, ln_bessel_k};
pub use covariance::{
    bivariate_gp_sample, factor_with_jitter, gp_sample, matern_corr, BivariateMatern, CovarianceSpec, GaussianSampler,
};
pub use models::{generate_model, ContaminationMode, ModelGenerator, ModelSpec, MAX_MODEL};
