//! Cross-sectional machinery at a single time point: MAD, Stahel-Donoho
//! outlyingness, projection depth, the deepest point and the directional
//! outlyingness vector.
//!
//! For `p = 1` the supremum over unit directions is attained on `{-1, +1}`
//! and the closed form `|x - med| / MAD` is used. For `p >= 2` the supremum
//! is approximated by a finite [`DirectionSet`].

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Depth values closer than this are treated as ties when locating the
/// deepest point.
pub const DEPTH_TIE_TOL: f64 = 1e-12;

/// Distance below which a point is considered equal to the deepest point.
pub const CENTER_TOL: f64 = 1e-12;

const UNIT_NORM_TOL: f64 = 1e-12;

/// The `n x p` cross-section `{X_1(t), ..., X_n(t)}` at one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    n: usize,
    p: usize,
    points: Vec<f64>,
}

impl PointCloud {
    pub fn new(n: usize, p: usize, points: Vec<f64>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter("dimension p must be at least 1".into()));
        }
        if points.len() != n * p {
            return Err(Error::LengthMismatch {
                expected: n * p,
                found: points.len(),
            });
        }
        if n < 2 {
            return Err(Error::TooFewCurves { got: n, need: 2 });
        }
        if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                curve: pos / p,
                time: 0,
                coord: pos % p,
            });
        }
        Ok(Self { n, p, points })
    }

    pub fn univariate(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, |r| r.len());
        let mut points = Vec::with_capacity(rows.len() * p);
        for r in rows {
            if r.len() != p {
                return Err(Error::LengthMismatch {
                    expected: p,
                    found: r.len(),
                });
            }
            points.extend_from_slice(r);
        }
        Self::new(rows.len(), p, points)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.p..(i + 1) * self.p]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Unit vectors over which the SDO supremum is taken.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    p: usize,
    dirs: Vec<f64>,
}

impl DirectionSet {
    /// `count` directions drawn uniformly on the unit sphere via normalized
    /// Gaussian vectors.
    pub fn random<R: Rng + ?Sized>(p: usize, count: usize, rng: &mut R) -> Self {
        assert!(p >= 1 && count >= 1);
        let mut dirs = Vec::with_capacity(p * count);
        let mut v = vec![0.0; p];
        while dirs.len() < p * count {
            for c in v.iter_mut() {
                *c = rng.sample(StandardNormal);
            }
            let norm = norm(&v);
            if norm < 1e-8 {
                continue;
            }
            dirs.extend(v.iter().map(|c| c / norm));
        }
        Self { p, dirs }
    }

    /// Validates that every supplied vector is unit length.
    pub fn from_vectors(p: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidParameter("direction set must be nonempty".into()));
        }
        let mut dirs = Vec::with_capacity(p * vectors.len());
        for (d, v) in vectors.iter().enumerate() {
            if v.len() != p {
                return Err(Error::LengthMismatch {
                    expected: p,
                    found: v.len(),
                });
            }
            if (norm(v) - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "direction {d} does not have unit norm"
                )));
            }
            dirs.extend_from_slice(v);
        }
        Ok(Self { p, dirs })
    }

    /// Directions at `count` equally spaced angles on `[0, pi)` in the plane.
    pub fn angular_sweep(count: usize) -> Self {
        let mut dirs = Vec::with_capacity(2 * count);
        for a in 0..count {
            let theta = std::f64::consts::PI * a as f64 / count as f64;
            dirs.push(theta.cos());
            dirs.push(theta.sin());
        }
        Self { p: 2, dirs }
    }

    /// The single coordinate axis `e_axis`.
    pub fn axis(p: usize, axis: usize) -> Self {
        let mut dirs = vec![0.0; p];
        dirs[axis] = 1.0;
        Self { p, dirs }
    }

    /// Maps every direction `u` to `A u` for a row-major `p x p` matrix.
    pub fn transformed(&self, a: &[f64]) -> Self {
        let p = self.p;
        assert_eq!(a.len(), p * p);
        let mut dirs = Vec::with_capacity(self.dirs.len());
        for u in self.iter() {
            for r in 0..p {
                dirs.push((0..p).map(|c| a[r * p + c] * u[c]).sum());
            }
        }
        Self { p, dirs }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.dirs.len() / self.p
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn get(&self, d: usize) -> &[f64] {
        &self.dirs[d * self.p..(d + 1) * self.p]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.dirs.chunks_exact(self.p)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Median of a scratch buffer; reorders the buffer.
fn median_in_place(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    assert!(n > 0, "median of an empty sample");
    let mid = n / 2;
    let (left, m, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *m;
    if n % 2 == 1 {
        upper
    } else {
        let lower = left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

pub fn median(values: &[f64]) -> f64 {
    median_in_place(&mut values.to_vec())
}

/// Median absolute deviation from the median, without a consistency factor.
pub fn mad(values: &[f64]) -> f64 {
    let mut buf = values.to_vec();
    let med = median_in_place(&mut buf);
    for v in buf.iter_mut() {
        *v = (*v - med).abs();
    }
    median_in_place(&mut buf)
}

fn med_mad(buf: &mut [f64]) -> (f64, f64) {
    let med = median_in_place(buf);
    for v in buf.iter_mut() {
        *v = (*v - med).abs();
    }
    (med, median_in_place(buf))
}

/// Robust z-score with the degenerate-MAD policy: zero deviation scores 0,
/// nonzero deviation over a zero MAD scores `+inf`.
fn scaled_deviation(x: f64, med: f64, mad: f64) -> f64 {
    let dev = (x - med).abs();
    if dev == 0.0 {
        0.0
    } else if mad == 0.0 {
        f64::INFINITY
    } else {
        dev / mad
    }
}

/// `|x - median| / MAD` for a univariate sample.
pub fn univariate_sdo(values: &[f64], x: f64) -> f64 {
    let mut buf = values.to_vec();
    let (med, mad) = med_mad(&mut buf);
    scaled_deviation(x, med, mad)
}

/// Precomputed projected medians and MADs for one cross-section.
///
/// Building this once per time point lets every curve be scored against
/// the same projections.
#[derive(Debug, Clone)]
pub struct ProjectionDepth<'a> {
    cloud: &'a PointCloud,
    dirs: DirSource<'a>,
    /// `n_dirs x n` projections of the sample points.
    proj: Vec<f64>,
    med: Vec<f64>,
    mad: Vec<f64>,
}

#[derive(Debug, Clone)]
enum DirSource<'a> {
    Exact,
    Set(&'a DirectionSet),
}

impl<'a> ProjectionDepth<'a> {
    /// For `p = 1` the direction set is ignored and the exact closed form is
    /// used.
    pub fn new(cloud: &'a PointCloud, dirs: &'a DirectionSet) -> Self {
        if cloud.p == 1 {
            Self::exact(cloud)
        } else {
            assert_eq!(dirs.p(), cloud.p, "direction dimension mismatch");
            assert!(!dirs.is_empty(), "direction set must be nonempty");
            Self::build(cloud, DirSource::Set(dirs))
        }
    }

    /// Evaluator using exactly the supplied directions, including for `p = 1`.
    pub fn with_directions(cloud: &'a PointCloud, dirs: &'a DirectionSet) -> Self {
        assert_eq!(dirs.p(), cloud.p, "direction dimension mismatch");
        assert!(!dirs.is_empty(), "direction set must be nonempty");
        Self::build(cloud, DirSource::Set(dirs))
    }

    fn exact(cloud: &'a PointCloud) -> Self {
        Self::build(cloud, DirSource::Exact)
    }

    fn build(cloud: &'a PointCloud, dirs: DirSource<'a>) -> Self {
        let n = cloud.n;
        let n_dirs = match dirs {
            DirSource::Exact => 1,
            DirSource::Set(d) => d.len(),
        };
        let mut proj = Vec::with_capacity(n_dirs * n);
        let mut med = Vec::with_capacity(n_dirs);
        let mut mad = Vec::with_capacity(n_dirs);
        let mut buf = vec![0.0; n];
        for d in 0..n_dirs {
            let start = proj.len();
            match dirs {
                DirSource::Exact => proj.extend_from_slice(&cloud.points),
                DirSource::Set(set) => {
                    let u = set.get(d);
                    proj.extend((0..n).map(|i| dot(cloud.row(i), u)));
                }
            }
            buf.copy_from_slice(&proj[start..]);
            let (m, s) = med_mad(&mut buf);
            med.push(m);
            mad.push(s);
        }
        Self {
            cloud,
            dirs,
            proj,
            med,
            mad,
        }
    }

    fn n_dirs(&self) -> usize {
        self.med.len()
    }

    fn project(&self, x: &[f64], d: usize) -> f64 {
        match self.dirs {
            DirSource::Exact => x[0],
            DirSource::Set(set) => dot(x, set.get(d)),
        }
    }

    /// SDO of an arbitrary point.
    pub fn sdo(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.cloud.p, "point dimension mismatch");
        (0..self.n_dirs())
            .map(|d| scaled_deviation(self.project(x, d), self.med[d], self.mad[d]))
            .fold(0.0, f64::max)
    }

    /// SDO of sample point `i`, reusing the stored projections.
    pub fn sample_sdo(&self, i: usize) -> f64 {
        let n = self.cloud.n;
        (0..self.n_dirs())
            .map(|d| scaled_deviation(self.proj[d * n + i], self.med[d], self.mad[d]))
            .fold(0.0, f64::max)
    }

    pub fn depth(&self, x: &[f64]) -> f64 {
        depth_from_sdo(self.sdo(x))
    }

    /// Sample point of maximal projection depth; tied points are averaged.
    pub fn deepest_point(&self) -> Vec<f64> {
        let depths: Vec<f64> = (0..self.cloud.n).map(|i| depth_from_sdo(self.sample_sdo(i))).collect();
        self.deepest_from_depths(&depths)
    }

    fn deepest_from_depths(&self, depths: &[f64]) -> Vec<f64> {
        let best = depths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let p = self.cloud.p;
        let mut center = vec![0.0; p];
        let mut count = 0usize;
        for (i, &dep) in depths.iter().enumerate() {
            if best - dep <= DEPTH_TIE_TOL {
                for (c, v) in center.iter_mut().zip(self.cloud.row(i)) {
                    *c += v;
                }
                count += 1;
            }
        }
        for c in center.iter_mut() {
            *c /= count as f64;
        }
        center
    }

    /// Directional outlyingness of every sample point, row-major `n x p`.
    /// On failure returns the index of the first point with unbounded SDO.
    pub fn sample_outlyingness(&self) -> std::result::Result<Vec<f64>, usize> {
        let n = self.cloud.n;
        let sdo: Vec<f64> = (0..n).map(|i| self.sample_sdo(i)).collect();
        let depths: Vec<f64> = sdo.iter().map(|&s| depth_from_sdo(s)).collect();
        let center = self.deepest_from_depths(&depths);
        let mut out = Vec::with_capacity(n * self.cloud.p);
        for (i, &s) in sdo.iter().enumerate() {
            match spatial_sign_scaled(self.cloud.row(i), &center, s) {
                Some(o) => out.extend(o),
                None => return Err(i),
            }
        }
        Ok(out)
    }

    pub fn directional_outlyingness(&self, x: &[f64]) -> Result<Vec<f64>> {
        let center = self.deepest_point();
        spatial_sign_scaled(x, &center, self.sdo(x)).ok_or(Error::UnboundedOutlyingness)
    }
}

/// `sdo * (x - z) / |x - z|`, zero at the center, `None` for unbounded SDO.
fn spatial_sign_scaled(x: &[f64], center: &[f64], sdo: f64) -> Option<Vec<f64>> {
    let diff: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
    let dist = norm(&diff);
    if dist <= CENTER_TOL {
        return Some(vec![0.0; x.len()]);
    }
    if !sdo.is_finite() {
        return None;
    }
    let scale = sdo / dist;
    Some(diff.into_iter().map(|c| c * scale).collect())
}

/// `1 / (1 + sdo)`, with `+inf` mapping to depth 0.
pub fn depth_from_sdo(sdo: f64) -> f64 {
    if sdo.is_infinite() {
        0.0
    } else {
        1.0 / (1.0 + sdo)
    }
}

/// Maximum over `dirs` of the projected robust z-score of `x`.
pub fn multivariate_sdo(cloud: &PointCloud, x: &[f64], dirs: &DirectionSet) -> f64 {
    ProjectionDepth::with_directions(cloud, dirs).sdo(x)
}

pub fn projection_depth(cloud: &PointCloud, x: &[f64], dirs: &DirectionSet) -> f64 {
    ProjectionDepth::new(cloud, dirs).depth(x)
}

pub fn deepest_point(cloud: &PointCloud, dirs: &DirectionSet) -> Vec<f64> {
    ProjectionDepth::new(cloud, dirs).deepest_point()
}

/// `SDO(x) * v`, where `v` is the unit vector from the deepest point to `x`.
pub fn directional_outlyingness(cloud: &PointCloud, x: &[f64], dirs: &DirectionSet) -> Result<Vec<f64>> {
    ProjectionDepth::new(cloud, dirs).directional_outlyingness(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_to_five() -> PointCloud {
        PointCloud::univariate(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap()
    }

    fn unused_dirs() -> DirectionSet {
        DirectionSet::axis(1, 0)
    }

    #[test]
    fn mad_cases() {
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0, 5.0]), 1.0);
        assert_eq!(mad(&[7.0; 4]), 0.0);
        assert_eq!(mad(&[0.0, 0.0, 0.0, 1.0]), 0.0);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn univariate_sdo_cases() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(univariate_sdo(&v, 5.0), 2.0);
        assert_eq!(univariate_sdo(&v, 3.0), 0.0);
        assert_eq!(univariate_sdo(&[0.0, 0.0, 0.0], 1.0), f64::INFINITY);
        assert_eq!(univariate_sdo(&[0.0, 0.0, 0.0], 0.0), 0.0);
    }

    #[test]
    fn depth_cases() {
        let cloud = one_to_five();
        let dirs = unused_dirs();
        assert_eq!(projection_depth(&cloud, &[3.0], &dirs), 1.0);
        assert!((projection_depth(&cloud, &[5.0], &dirs) - 1.0 / 3.0).abs() < 1e-15);
        let flat = PointCloud::univariate(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(projection_depth(&flat, &[1.0], &dirs), 0.0);
    }

    #[test]
    fn deepest_point_cases() {
        let dirs = unused_dirs();
        assert_eq!(deepest_point(&one_to_five(), &dirs), vec![3.0]);
        let even = PointCloud::univariate(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(deepest_point(&even, &dirs), vec![2.5]);

        let square = PointCloud::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dirs2 = DirectionSet::random(2, 200, &mut rng);
        assert_eq!(deepest_point(&square, &dirs2), vec![0.0, 0.0]);
        assert_eq!(multivariate_sdo(&square, &[0.0, 0.0], &dirs2), 0.0);
    }

    #[test]
    fn directional_outlyingness_cases() {
        let cloud = one_to_five();
        let dirs = unused_dirs();
        assert_eq!(directional_outlyingness(&cloud, &[5.0], &dirs).unwrap(), vec![2.0]);
        assert_eq!(directional_outlyingness(&cloud, &[1.0], &dirs).unwrap(), vec![-2.0]);
        assert_eq!(directional_outlyingness(&cloud, &[3.0], &dirs).unwrap(), vec![0.0]);
        let flat = PointCloud::univariate(&[0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            directional_outlyingness(&flat, &[1.0], &dirs),
            Err(Error::UnboundedOutlyingness)
        ));
    }

    #[test]
    fn single_axis_reduces_to_univariate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| vec![rng.random::<f64>() * 4.0, rng.random::<f64>()])
            .collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let first: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let axis = DirectionSet::axis(2, 0);
        for r in &rows {
            assert_eq!(multivariate_sdo(&cloud, r, &axis), univariate_sdo(&first, r[0]));
        }
    }

    #[test]
    fn random_directions_are_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| vec![rng.sample(StandardNormal), rng.sample(StandardNormal)])
            .collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let a = DirectionSet::random(2, 2000, &mut ChaCha8Rng::seed_from_u64(1));
        let b = DirectionSet::random(2, 2000, &mut ChaCha8Rng::seed_from_u64(2));
        for r in &rows {
            let sa = multivariate_sdo(&cloud, r, &a);
            let sb = multivariate_sdo(&cloud, r, &b);
            assert!((sa - sb).abs() <= 0.05 * sa.max(sb), "{sa} vs {sb}");
        }
    }

    #[test]
    fn random_directions_are_unit() {
        let dirs = DirectionSet::random(3, 50, &mut ChaCha8Rng::seed_from_u64(9));
        for u in dirs.iter() {
            assert!((norm(u) - 1.0).abs() < 1e-12);
        }
        assert!(DirectionSet::from_vectors(2, &[vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn sample_outlyingness_matches_pointwise_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|_| vec![rng.sample(StandardNormal), rng.sample(StandardNormal)])
            .collect();
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let dirs = DirectionSet::random(2, 100, &mut rng);
        let eval = ProjectionDepth::new(&cloud, &dirs);
        let all = eval.sample_outlyingness().unwrap();
        for (i, r) in rows.iter().enumerate() {
            let o = directional_outlyingness(&cloud, r, &dirs).unwrap();
            assert_eq!(&all[2 * i..2 * i + 2], o.as_slice());
            if o != [0.0, 0.0] {
                let s = multivariate_sdo(&cloud, r, &dirs);
                assert!((norm(&o) - s).abs() <= 1e-12 * s);
            }
        }
    }
}
