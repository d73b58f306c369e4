//! Monte-Carlo evaluation of the detector: replicate a model, flag outliers
//! and aggregate correct (`p_c`) and false (`p_f`) detection percentages.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::outlyingness_summaries;
use crate::robust::{detect_features, feature_matrix, hardin_rocke_params, DetectionConfig};
use crate::simulate::{ModelGenerator, ModelSpec};
use crate::types::{DepthConfig, LabelSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalMetrics {
    /// Percentage of true outliers flagged; `None` without outliers.
    pub p_c: Option<f64>,
    /// Percentage of normal curves flagged; `None` without normal curves.
    pub p_f: Option<f64>,
}

pub fn evaluate(flags: &[bool], truth: &LabelSet) -> Result<EvalMetrics> {
    if flags.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: flags.len(),
        });
    }
    let (mut hit, mut outliers, mut false_alarm, mut normals) = (0usize, 0usize, 0usize, 0usize);
    for (&f, &t) in flags.iter().zip(&truth.flags) {
        if t {
            outliers += 1;
            hit += f as usize;
        } else {
            normals += 1;
            false_alarm += f as usize;
        }
    }
    let pct = |num: usize, den: usize| (den > 0).then(|| 100.0 * num as f64 / den as f64);
    Ok(EvalMetrics {
        p_c: pct(hit, outliers),
        p_f: pct(false_alarm, normals),
    })
}

/// SplitMix64 mixing of `(master, stream, index)` into an independent seed.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub runs: usize,
    pub seed: u64,
    pub n_directions: usize,
    pub detection: DetectionConfig,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            runs: 200,
            seed: 1,
            n_directions: DepthConfig::default().n_directions,
            detection: DetectionConfig::default(),
        }
    }
}

/// Outcome of one replication; `None` marks a singular-scatter failure.
pub type ReplicationOutcome = Option<EvalMetrics>;

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub model: u8,
    pub eps: f64,
    pub runs: usize,
    pub pc_mean: Option<f64>,
    pub pc_sd: Option<f64>,
    pub pf_mean: Option<f64>,
    pub pf_sd: Option<f64>,
    pub failures: usize,
}

/// Runs every replication and returns the per-replication outcomes in
/// replication order.
pub fn replicate(model: &ModelSpec, cfg: &MonteCarloConfig) -> Result<Vec<ReplicationOutcome>> {
    if cfg.runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    model.validate()?;
    let generator = ModelGenerator::new(model.model, model.k)?;
    let d = model.p() + 1;
    let h = cfg.detection.subset_size(model.n);
    let params = hardin_rocke_params(model.n, d, h, cfg.detection.alpha, &cfg.detection.hr)?;

    (0..cfg.runs)
        .into_par_iter()
        .map(|r| {
            let r = r as u64;
            let spec = model.clone().with_seed(derive_seed(cfg.seed, 0, r));
            let (data, truth) = generator.generate(&spec)?;
            let depth = DepthConfig::new(cfg.n_directions, derive_seed(cfg.seed, 1, r))?;
            let summaries = outlyingness_summaries(&data, &depth)?;
            let y = feature_matrix(&summaries)?;
            let det_cfg = DetectionConfig {
                seed: derive_seed(cfg.seed, 2, r),
                ..cfg.detection.clone()
            };
            match detect_features(&y, &params, &det_cfg) {
                Ok(report) => evaluate(&report.flags, &truth).map(Some),
                Err(Error::SingularScatter) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Mean and sample standard deviation, summed in sorted order so the result
/// does not depend on the order replications finished in.
fn mean_sd(mut values: Vec<f64>) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        let mut sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        sq.sort_by(f64::total_cmp);
        (sq.iter().sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Some((mean, sd))
}

/// Aggregates replication outcomes into means and standard deviations.
pub fn aggregate(model: &ModelSpec, outcomes: &[ReplicationOutcome]) -> MonteCarloSummary {
    let ok: Vec<&EvalMetrics> = outcomes.iter().flatten().collect();
    let pc = mean_sd(ok.iter().filter_map(|m| m.p_c).collect());
    let pf = mean_sd(ok.iter().filter_map(|m| m.p_f).collect());
    MonteCarloSummary {
        model: model.model,
        eps: model.eps,
        runs: outcomes.len(),
        pc_mean: pc.map(|v| v.0),
        pc_sd: pc.map(|v| v.1),
        pf_mean: pf.map(|v| v.0),
        pf_sd: pf.map(|v| v.1),
        failures: outcomes.len() - ok.len(),
    }
}

/// generate -> summarize -> detect -> evaluate over `cfg.runs` replications.
pub fn monte_carlo(model: &ModelSpec, cfg: &MonteCarloConfig) -> Result<MonteCarloSummary> {
    Ok(aggregate(model, &replicate(model, cfg)?))
}
