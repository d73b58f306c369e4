//! Directional outlyingness for univariate and multivariate functional data.
//!
//! Each curve's pointwise directional outlyingness (Stahel-Donoho
//! outlyingness times the spatial sign away from the pointwise median) is
//! summarized by its mean `MO`, variation `VO` and total `FO = |MO|^2 + VO`.
//! Outliers are flagged from robust Mahalanobis distances of `(MO, VO)`
//! with a Hardin-Rocke scaled-F cutoff.
//!
//! ```
//! use dirout::prelude::*;
//!
//! let spec = ModelSpec::new(1, 0.1, 7).unwrap();
//! let (data, truth) = generate_model(&spec).unwrap();
//! let summaries = outlyingness_summaries(&data, &DepthConfig::default()).unwrap();
//! for s in &summaries {
//!     assert!((s.fo - (s.mo_norm_sq() + s.vo)).abs() <= 1e-10 * s.fo.max(1.0));
//! }
//! assert_eq!(truth.n_outliers(), 10);
//! ```

pub mod cli;
pub mod error;
pub mod functional;
pub mod harness;
mod linalg;
pub mod pointwise;
pub mod robust;
pub mod simulate;
pub mod types;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::functional::{outlyingness_field, outlyingness_summaries, summarize, OutlyingnessField};
    pub use crate::harness::{evaluate, monte_carlo, EvalMetrics, MonteCarloConfig, MonteCarloSummary};
    pub use crate::pointwise::{
        deepest_point, directional_outlyingness, mad, multivariate_sdo, projection_depth, univariate_sdo, DirectionSet,
        PointCloud,
    };
    pub use crate::robust::{
        detect, fast_mcd, hardin_rocke_params, robust_distances, CutoffParams, DetectionConfig, DetectionReport,
        HrConfig, HrMethod, McdConfig, McdFit,
    };
    pub use crate::simulate::{generate_model, ModelSpec};
    pub use crate::types::{validate_dataset, DepthConfig, FunctionalDataset, LabelSet, OutlyingnessSummary, TimeGrid};
}
