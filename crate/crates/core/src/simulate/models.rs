//! Simulation models 0-10 with their contamination mechanisms.
//!
//! | id | main model | contamination |
//! |----|------------|---------------|
//! | 0  | `4t + e(t)`, cov `exp(-1000|s-t|)` | none |
//! | 1  | `4t + e(t)`, cov `exp(-|s-t|)` | `+ 8U`, `U = ±1` |
//! | 2  | as 1 | `+ 8U` on `[T, T + 0.1]`, `T ~ U[0, 0.9]` |
//! | 3  | `30 t (1-t)^{3/2} + e(t)`, cov `0.3 exp(-|s-t|/0.3)` | mean `30 (1-t) t^{3/2}` |
//! | 4  | `4t + e1(t)`, cov `exp(-|s-t|)` | `4t + e2(t)`, cov `8 exp(-|s-t|^0.2)` |
//! | 5  | bivariate Matérn `e(t)` | none |
//! | 6  | `e(t)` | `4 e(t)` |
//! | 7  | `e(t)` | `e(t) (1 + 11 on [T, T + 0.1])` |
//! | 8  | `e(t)` | `(1.7 e1, 1.5 e2)` |
//! | 9  | `e(t)` | `e(t) (1 + 4 on [T, T + 0.1])` |
//! | 10 | `e + (U11 cos 4πt, U12 sin 4πt)`, `U ~ U[2, 3]` | same with `U ~ U[3.2, 3.5]` |

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::covariance::{interleave, BivariateMatern, CovarianceSpec, GaussianSampler};
use crate::error::{Error, Result};
use crate::types::{FunctionalDataset, LabelSet, TimeGrid};

pub const MAX_MODEL: u8 = 10;

/// How contaminated curves are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContaminationMode {
    /// Exactly `round(eps * n)` curves at uniformly chosen indices.
    #[default]
    FixedCount,
    /// Each curve independently with probability `eps`.
    Bernoulli,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub model: u8,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub seed: u64,
    pub contamination: ContaminationMode,
}

impl ModelSpec {
    /// Spec with the default sizes: `n = 500, k = 1000` for model 0 and
    /// `n = 100, k = 50` otherwise.
    pub fn new(model: u8, eps: f64, seed: u64) -> Result<Self> {
        let (n, k) = default_size(model)?;
        let spec = Self {
            model,
            n,
            k,
            eps,
            seed,
            contamination: ContaminationMode::FixedCount,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_size(mut self, n: usize, k: usize) -> Self {
        self.n = n;
        self.k = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        default_size(self.model)?;
        if !(0.0..0.5).contains(&self.eps) {
            return Err(Error::InvalidParameter(format!(
                "contamination level eps = {} must lie in [0, 0.5)",
                self.eps
            )));
        }
        if self.eps > 0.0 && !has_contamination(self.model) {
            return Err(Error::InvalidParameter(format!(
                "model {} has no contamination model; use eps = 0",
                self.model
            )));
        }
        if self.n < 2 {
            return Err(Error::TooFewCurves { got: self.n, need: 2 });
        }
        if self.k < 2 {
            return Err(Error::InvalidGrid(format!("need k >= 2, got {}", self.k)));
        }
        Ok(())
    }

    /// Curve dimension `p` of the model.
    pub fn p(&self) -> usize {
        dimension(self.model)
    }

    pub fn n_contaminated(&self) -> usize {
        (self.eps * self.n as f64).round() as usize
    }
}

fn default_size(model: u8) -> Result<(usize, usize)> {
    match model {
        0 => Ok((500, 1000)),
        1..=MAX_MODEL => Ok((100, 50)),
        _ => Err(Error::InvalidParameter(format!(
            "model id {model} out of range 0..={MAX_MODEL}"
        ))),
    }
}

fn has_contamination(model: u8) -> bool {
    !matches!(model, 0 | 5)
}

pub fn dimension(model: u8) -> usize {
    if model >= 5 {
        2
    } else {
        1
    }
}

fn univariate_sampler(grid: &TimeGrid, spec: CovarianceSpec) -> Result<GaussianSampler> {
    GaussianSampler::new(grid, &spec)
}

/// Caches the Cholesky factors of one model on one grid so that repeated
/// datasets only pay for the matrix-vector products.
#[derive(Debug, Clone)]
pub struct ModelGenerator {
    model: u8,
    grid: TimeGrid,
    main: GaussianSampler,
    alternate: Option<GaussianSampler>,
}

impl ModelGenerator {
    pub fn new(model: u8, k: usize) -> Result<Self> {
        default_size(model)?;
        let grid = TimeGrid::equidistant(k)?;
        let exp1 = CovarianceSpec::ExpScaled {
            amplitude: 1.0,
            rate: 1.0,
        };
        let (main, alternate) = match model {
            0 => (
                univariate_sampler(
                    &grid,
                    CovarianceSpec::ExpScaled {
                        amplitude: 1.0,
                        rate: 1000.0,
                    },
                )?,
                None,
            ),
            1 | 2 => (univariate_sampler(&grid, exp1)?, None),
            3 => (
                univariate_sampler(
                    &grid,
                    CovarianceSpec::ExpScaled {
                        amplitude: 0.3,
                        rate: 1.0 / 0.3,
                    },
                )?,
                None,
            ),
            4 => (
                univariate_sampler(&grid, exp1)?,
                Some(univariate_sampler(
                    &grid,
                    CovarianceSpec::PoweredExp {
                        amplitude: 8.0,
                        exponent: 0.2,
                    },
                )?),
            ),
            _ => (
                GaussianSampler::new(
                    &grid,
                    &CovarianceSpec::BivariateMatern(BivariateMatern::simulation_default()),
                )?,
                None,
            ),
        };
        Ok(Self {
            model,
            grid,
            main,
            alternate,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Generates one dataset with ground-truth labels.
    pub fn generate(&self, spec: &ModelSpec) -> Result<(FunctionalDataset, LabelSet)> {
        spec.validate()?;
        if spec.model != self.model || spec.k != self.grid.len() {
            return Err(Error::InvalidParameter(format!(
                "generator is for model {} on k = {}, spec asks for model {} on k = {}",
                self.model,
                self.grid.len(),
                spec.model,
                spec.k
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let n = spec.n;
        let mut flags = vec![false; n];
        match spec.contamination {
            ContaminationMode::FixedCount => {
                for i in sample(&mut rng, n, spec.n_contaminated()).into_iter() {
                    flags[i] = true;
                }
            }
            ContaminationMode::Bernoulli => {
                for f in flags.iter_mut() {
                    *f = rng.random::<f64>() < spec.eps;
                }
            }
        }
        let p = dimension(self.model);
        let k = self.grid.len();
        let mut values = Vec::with_capacity(n * k * p);
        for &outlier in &flags {
            values.extend(self.curve(outlier, &mut rng));
        }
        let data = FunctionalDataset::new(self.grid.clone(), n, p, values)?;
        Ok((data, LabelSet::new(flags)))
    }

    fn curve<R: Rng>(&self, outlier: bool, rng: &mut R) -> Vec<f64> {
        let t = self.grid.points();
        let k = t.len();
        match self.model {
            0 => {
                let e = self.main.sample(rng);
                t.iter().zip(e).map(|(t, e)| 4.0 * t + e).collect()
            }
            1 => {
                let shift = if outlier { 8.0 * sign(rng) } else { 0.0 };
                let e = self.main.sample(rng);
                t.iter().zip(e).map(|(t, e)| 4.0 * t + shift + e).collect()
            }
            2 => {
                let (shift, start) = if outlier {
                    (8.0 * sign(rng), rng.random_range(0.0..=0.9))
                } else {
                    (0.0, 0.0)
                };
                let e = self.main.sample(rng);
                t.iter()
                    .zip(e)
                    .map(|(&t, e)| {
                        let bump = if outlier && in_window(t, start) { shift } else { 0.0 };
                        4.0 * t + bump + e
                    })
                    .collect()
            }
            3 => {
                let e = self.main.sample(rng);
                t.iter()
                    .zip(e)
                    .map(|(&t, e)| {
                        let mean = if outlier {
                            30.0 * (1.0 - t) * t.powf(1.5)
                        } else {
                            30.0 * t * (1.0 - t).powf(1.5)
                        };
                        mean + e
                    })
                    .collect()
            }
            4 => {
                let sampler = match (&self.alternate, outlier) {
                    (Some(alt), true) => alt,
                    _ => &self.main,
                };
                let e = sampler.sample(rng);
                t.iter().zip(e).map(|(t, e)| 4.0 * t + e).collect()
            }
            _ => self.bivariate_curve(outlier, rng, t, k),
        }
    }

    fn bivariate_curve<R: Rng>(&self, outlier: bool, rng: &mut R, t: &[f64], k: usize) -> Vec<f64> {
        // model-specific random parameters are drawn before the process
        let start = if outlier && matches!(self.model, 7 | 9) {
            rng.random_range(0.0..=0.9)
        } else {
            0.0
        };
        let amplitudes = if self.model == 10 {
            let range = if outlier { 3.2..=3.5 } else { 2.0..=3.0 };
            Some((rng.random_range(range.clone()), rng.random_range(range)))
        } else {
            None
        };
        let mut e = interleave(&self.main.sample(rng), k);
        for (j, &tj) in t.iter().enumerate() {
            let (e1, e2) = (e[2 * j], e[2 * j + 1]);
            let (x1, x2) = match (self.model, outlier) {
                (6, true) => (4.0 * e1, 4.0 * e2),
                (7, true) | (9, true) => {
                    let gain = if self.model == 7 { 11.0 } else { 4.0 };
                    let f = if in_window(tj, start) { 1.0 + gain } else { 1.0 };
                    (e1 * f, e2 * f)
                }
                (8, true) => (1.7 * e1, 1.5 * e2),
                (10, _) => {
                    let (u1, u2) = amplitudes.expect("model 10 amplitudes");
                    (e1 + u1 * (4.0 * PI * tj).cos(), e2 + u2 * (4.0 * PI * tj).sin())
                }
                _ => (e1, e2),
            };
            e[2 * j] = x1;
            e[2 * j + 1] = x2;
        }
        e
    }
}

fn sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

fn in_window(t: f64, start: f64) -> bool {
    start <= t && t <= start + 0.1
}

/// Generates a dataset and its labels from scratch.
pub fn generate_model(spec: &ModelSpec) -> Result<(FunctionalDataset, LabelSet)> {
    spec.validate()?;
    ModelGenerator::new(spec.model, spec.k)?.generate(spec)
}
