//! Shared domain types: time grids, functional datasets, per-curve
//! outlyingness summaries, ground-truth labels and depth configuration.

use crate::error::{Error, Result};

/// Ordered time points `t_1 < ... < t_k` on the design interval.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 time points, got {}",
                points.len()
            )));
        }
        if let Some(j) = points.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid(format!("time point {j} is not finite")));
        }
        if let Some(j) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "time points must be strictly increasing (index {})",
                j + 1
            )));
        }
        Ok(Self { points })
    }

    /// `k` equidistant points on `[0, 1]`, endpoints included.
    pub fn equidistant(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidGrid(format!("need k >= 2, got {k}")));
        }
        let step = (k - 1) as f64;
        Self::new((0..k).map(|j| j as f64 / step).collect())
    }

    /// Affinely maps arbitrary time points onto `[0, 1]`. Returns the grid
    /// together with the original `(min, max)` range.
    pub fn normalized(raw: &[f64]) -> Result<(Self, (f64, f64))> {
        let checked = Self::new(raw.to_vec())?;
        let lo = checked.points[0];
        let hi = checked.points[checked.points.len() - 1];
        let span = hi - lo;
        let mut points: Vec<f64> = raw.iter().map(|t| (t - lo) / span).collect();
        // pin the endpoints so rounding cannot push them outside [0, 1]
        points[0] = 0.0;
        let last = points.len() - 1;
        points[last] = 1.0;
        Ok((Self::new(points)?, (lo, hi)))
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` curves sampled on a shared grid, each value a `p`-vector.
///
/// Values are stored curve-major: `values[(i * k + j) * p + c]` is
/// coordinate `c` of curve `i` at time index `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalDataset {
    grid: TimeGrid,
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl FunctionalDataset {
    pub fn new(grid: TimeGrid, n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        let data = Self { grid, n, p, values };
        validate_dataset(&data)?;
        Ok(data)
    }

    /// Builds a univariate dataset from one row of values per curve.
    pub fn from_curves(grid: TimeGrid, curves: &[Vec<f64>]) -> Result<Self> {
        let k = grid.len();
        let mut values = Vec::with_capacity(curves.len() * k);
        for (i, c) in curves.iter().enumerate() {
            if c.len() != k {
                return Err(Error::GridMismatch(format!(
                    "curve {i} has {} values, grid has {k}",
                    c.len()
                )));
            }
            values.extend_from_slice(c);
        }
        Self::new(grid, curves.len(), 1, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.grid.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The `p`-vector of curve `i` at time index `j`.
    pub fn point(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.k() + j) * self.p;
        &self.values[start..start + self.p]
    }

    /// All `k * p` values of curve `i`.
    pub fn curve(&self, i: usize) -> &[f64] {
        let len = self.k() * self.p;
        &self.values[i * len..(i + 1) * len]
    }

    /// The `n x p` cross-section at time index `j`, row-major.
    pub fn cross_section(&self, j: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * self.p);
        for i in 0..self.n {
            out.extend_from_slice(self.point(i, j));
        }
        out
    }
}

/// Checks every dataset invariant: shape, finiteness and `n >= 2`.
pub fn validate_dataset(data: &FunctionalDataset) -> Result<()> {
    let k = data.grid.len();
    if data.p == 0 {
        return Err(Error::InvalidParameter("dimension p must be at least 1".into()));
    }
    let expected = data.n * k * data.p;
    if data.values.len() != expected {
        return Err(Error::GridMismatch(format!(
            "expected {} x {} x {} = {expected} values, found {}",
            data.n,
            k,
            data.p,
            data.values.len()
        )));
    }
    if data.n < 2 {
        return Err(Error::TooFewCurves { got: data.n, need: 2 });
    }
    if let Some(pos) = data.values.iter().position(|v| !v.is_finite()) {
        let coord = pos % data.p;
        let time = (pos / data.p) % k;
        let curve = pos / (data.p * k);
        return Err(Error::NonFiniteValue { curve, time, coord });
    }
    Ok(())
}

/// Mean, variation and total directional outlyingness for one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlyingnessSummary {
    pub mo: Vec<f64>,
    pub vo: f64,
    pub fo: f64,
}

impl OutlyingnessSummary {
    /// The `(p + 1)`-dimensional detection feature `(mo, vo)`.
    pub fn y(&self) -> Vec<f64> {
        let mut y = self.mo.clone();
        y.push(self.vo);
        y
    }

    pub fn mo_norm_sq(&self) -> f64 {
        self.mo.iter().map(|m| m * m).sum()
    }
}

/// Ground-truth outlier flags; `true` marks an outlier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    pub flags: Vec<bool>,
}

impl LabelSet {
    pub fn new(flags: Vec<bool>) -> Self {
        Self { flags }
    }

    pub fn all_normal(n: usize) -> Self {
        Self { flags: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn n_outliers(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

/// Weight function used when integrating outlyingness over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weight {
    /// `w(t) = 1 / |I|`; on the normalized interval every grid point weighs 1.
    #[default]
    Constant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthConfig {
    /// Random projection count used for `p >= 2`.
    pub n_directions: usize,
    pub seed: u64,
    pub weight: Weight,
}

impl Default for DepthConfig {
    fn default() -> Self {
        Self {
            n_directions: 200,
            seed: 0,
            weight: Weight::Constant,
        }
    }
}

impl DepthConfig {
    pub fn new(n_directions: usize, seed: u64) -> Result<Self> {
        if n_directions == 0 {
            return Err(Error::InvalidParameter("n_directions must be at least 1".into()));
        }
        Ok(Self {
            n_directions,
            seed,
            weight: Weight::Constant,
        })
    }
}
