//! Aggregation of pointwise directional outlyingness into the per-curve
//! mean (MO), variation (VO) and total (FO) outlyingness.
//!
//! With the design interval normalized to `[0, 1]` and a constant weight,
//! every time integral is a plain average over grid points, so
//! `FO = |MO|^2 + VO` holds exactly up to rounding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pointwise::{DirectionSet, PointCloud, ProjectionDepth};
use crate::types::{DepthConfig, FunctionalDataset, OutlyingnessSummary};

/// Directional outlyingness `O_i(t_j)` for every curve and grid point,
/// stored curve-major like [`FunctionalDataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutlyingnessField {
    n: usize,
    k: usize,
    p: usize,
    values: Vec<f64>,
}

impl OutlyingnessField {
    pub fn new(n: usize, k: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * k * p {
            return Err(Error::LengthMismatch {
                expected: n * k * p,
                found: values.len(),
            });
        }
        if n == 0 || k == 0 || p == 0 {
            return Err(Error::InvalidParameter("field dimensions must be positive".into()));
        }
        Ok(Self { n, k, p, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.k + j) * self.p;
        &self.values[start..start + self.p]
    }
}

/// The shared direction set for a dataset of dimension `p`, or `None` when
/// `p = 1` and the exact closed form applies.
pub fn directions_for(p: usize, cfg: &DepthConfig) -> Option<DirectionSet> {
    (p >= 2).then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        DirectionSet::random(p, cfg.n_directions, &mut rng)
    })
}

/// Evaluates directional outlyingness of every curve against the
/// cross-section at each grid point, using one direction set throughout.
pub fn outlyingness_field(data: &FunctionalDataset, cfg: &DepthConfig) -> Result<OutlyingnessField> {
    let dirs = directions_for(data.p(), cfg);
    outlyingness_field_with(data, dirs.as_ref())
}

/// Same as [`outlyingness_field`] with an explicit direction set.
pub fn outlyingness_field_with(data: &FunctionalDataset, dirs: Option<&DirectionSet>) -> Result<OutlyingnessField> {
    let (n, k, p) = (data.n(), data.k(), data.p());
    let fallback = DirectionSet::axis(p, 0);
    let dirs = dirs.unwrap_or(&fallback);
    if p >= 2 && dirs.p() != p {
        return Err(Error::LengthMismatch {
            expected: p,
            found: dirs.p(),
        });
    }

    let columns: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|j| {
            let cloud = PointCloud::new(n, p, data.cross_section(j))?;
            ProjectionDepth::new(&cloud, dirs)
                .sample_outlyingness()
                .map_err(|curve| Error::InfiniteOutlyingness { curve, time: j })
        })
        .collect::<Result<_>>()?;

    let mut values = vec![0.0; n * k * p];
    for (j, col) in columns.iter().enumerate() {
        for i in 0..n {
            let dst = (i * k + j) * p;
            values[dst..dst + p].copy_from_slice(&col[i * p..(i + 1) * p]);
        }
    }
    OutlyingnessField::new(n, k, p, values)
}

/// Per-curve MO, VO and FO as grid averages of the outlyingness field.
pub fn summarize(field: &OutlyingnessField) -> Vec<OutlyingnessSummary> {
    let (k, p) = (field.k, field.p);
    let kf = k as f64;
    (0..field.n)
        .map(|i| {
            let mut mo = vec![0.0; p];
            let mut fo = 0.0;
            for j in 0..k {
                let o = field.at(i, j);
                for (m, v) in mo.iter_mut().zip(o) {
                    *m += v;
                }
                fo += o.iter().map(|v| v * v).sum::<f64>();
            }
            for m in mo.iter_mut() {
                *m /= kf;
            }
            fo /= kf;
            let vo = (0..k)
                .map(|j| {
                    field
                        .at(i, j)
                        .iter()
                        .zip(&mo)
                        .map(|(o, m)| (o - m) * (o - m))
                        .sum::<f64>()
                })
                .sum::<f64>()
                / kf;
            OutlyingnessSummary { mo, vo, fo }
        })
        .collect()
}

/// Field evaluation followed by summarization.
pub fn outlyingness_summaries(data: &FunctionalDataset, cfg: &DepthConfig) -> Result<Vec<OutlyingnessSummary>> {
    Ok(summarize(&outlyingness_field(data, cfg)?))
}
