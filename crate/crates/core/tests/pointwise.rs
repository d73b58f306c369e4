mod common;

use common::{mat_vec, random_orthogonal, rel_err, rng, sweep_sdo};
use dirout::pointwise::{ProjectionDepth, DEPTH_TIE_TOL};
use dirout::prelude::*;
use proptest::prelude::*;

fn cloud_1d() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, 3..40)
}

fn cloud_2d() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec(prop::array::uniform2(-10.0..10.0f64), 4..25)
}

fn to_cloud(points: &[[f64; 2]]) -> PointCloud {
    PointCloud::new(points.len(), 2, points.iter().flatten().copied().collect()).unwrap()
}

#[test]
fn univariate_hand_cases() {
    let v = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert_eq!(mad(&v), 1.0);
    assert_eq!(univariate_sdo(&v, 5.0), 2.0);
    assert_eq!(univariate_sdo(&v, 3.0), 0.0);
    assert_eq!(mad(&[0.0, 0.0, 0.0, 1.0]), 0.0);
    assert_eq!(univariate_sdo(&[0.0, 0.0, 0.0], 1.0), f64::INFINITY);

    let cloud = PointCloud::univariate(&v).unwrap();
    let none = DirectionSet::axis(1, 0);
    assert!((projection_depth(&cloud, &[5.0], &none) - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(directional_outlyingness(&cloud, &[1.0], &none).unwrap(), vec![-2.0]);
    let even = PointCloud::univariate(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert_eq!(deepest_point(&even, &none), vec![2.5]);
}

#[test]
fn planar_sdo_against_angular_sweep() {
    let dirs = DirectionSet::random(2, 10_000, &mut rng(99));
    for seed in 0..20 {
        let mut r = rng(1000 + seed);
        let n = 5 + (seed as usize % 6);
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| [common::normal(&mut r), 3.0 * common::normal(&mut r)])
            .collect();
        let cloud = to_cloud(&pts);
        let x = [common::normal(&mut r) * 2.0, common::normal(&mut r)];
        let want = sweep_sdo(&pts, x, 3600);
        let got = multivariate_sdo(&cloud, &x, &dirs);
        assert!(rel_err(got, want) < 0.02, "seed {seed}: {got} vs {want}");
    }
}

#[test]
fn symmetric_cloud_has_center_at_origin() {
    let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    let cloud = to_cloud(&pts);
    let dirs = DirectionSet::random(2, 500, &mut rng(3));
    assert_eq!(multivariate_sdo(&cloud, &[0.0, 0.0], &dirs), 0.0);
    let z = deepest_point(&cloud, &dirs);
    assert!(z.iter().all(|c| c.abs() < 1e-15), "{z:?}");
}

fn orthogonal_2() -> impl Strategy<Value = f64> {
    0.0..std::f64::consts::TAU
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_equals_sdo(values in cloud_1d(), x in -150.0..150.0f64) {
        let cloud = PointCloud::univariate(&values).unwrap();
        let dirs = DirectionSet::axis(1, 0);
        let pd = ProjectionDepth::new(&cloud, &dirs);
        let z = pd.deepest_point();
        if let Ok(o) = pd.directional_outlyingness(&[x]) {
            if (x - z[0]).abs() > 1e-12 {
                prop_assert!((o[0].abs() - univariate_sdo(&values, x)).abs() <= 1e-12 * o[0].abs().max(1.0));
            } else {
                prop_assert_eq!(o[0], 0.0);
            }
        }
    }

    #[test]
    fn univariate_affine_invariance(values in cloud_1d(), a in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64], b in -50.0..50.0f64, pick in 0usize..40) {
        let i = pick % values.len();
        let moved: Vec<f64> = values.iter().map(|v| a * v + b).collect();
        let before = univariate_sdo(&values, values[i]);
        let after = univariate_sdo(&moved, moved[i]);
        if before.is_finite() {
            prop_assert!(rel_err(after, before) < 1e-9, "{} vs {}", after, before);
        }
    }

    #[test]
    fn orthogonal_equivariance_with_rotated_directions(pts in cloud_2d(), theta in orthogonal_2(), reflect in any::<bool>(), b in prop::array::uniform2(-5.0..5.0f64), seed in 0u64..1000) {
        let (c, s) = (theta.cos(), theta.sin());
        let a = if reflect { [c, s, s, -c] } else { [c, -s, s, c] };
        let dirs = DirectionSet::random(2, 64, &mut rng(seed));
        let moved: Vec<[f64; 2]> = pts.iter().map(|p| {
            let q = mat_vec(&a, p);
            [q[0] + b[0], q[1] + b[1]]
        }).collect();
        let (c0, c1) = (to_cloud(&pts), to_cloud(&moved));
        let rotated = dirs.transformed(&a);
        let pd0 = ProjectionDepth::with_directions(&c0, &dirs);
        let pd1 = ProjectionDepth::with_directions(&c1, &rotated);
        for (p, q) in pts.iter().zip(&moved) {
            let (Ok(o0), Ok(o1)) = (pd0.directional_outlyingness(p), pd1.directional_outlyingness(q)) else { continue };
            let want = mat_vec(&a, &o0);
            for k in 0..2 {
                prop_assert!((o1[k] - want[k]).abs() <= 1e-8 * (1.0 + want[k].abs()), "{:?} vs {:?}", o1, want);
            }
        }
    }

    #[test]
    fn deepest_point_has_zero_outlyingness(pts in cloud_2d(), seed in 0u64..1000) {
        let cloud = to_cloud(&pts);
        let dirs = DirectionSet::random(2, 50, &mut rng(seed));
        let pd = ProjectionDepth::with_directions(&cloud, &dirs);
        let z = pd.deepest_point();
        if let Ok(o) = pd.directional_outlyingness(&z) {
            prop_assert_eq!(o, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn univariate_monotone_along_rays(values in cloud_1d(), x in -150.0..150.0f64) {
        let cloud = PointCloud::univariate(&values).unwrap();
        let dirs = DirectionSet::axis(1, 0);
        let pd = ProjectionDepth::new(&cloud, &dirs);
        let z = pd.deepest_point()[0];
        let mut prev = 0.0;
        for step in 0..=50 {
            let alpha = step as f64 / 50.0;
            let s = pd.sdo(&[z + alpha * (x - z)]);
            prop_assert!(s >= prev - 1e-12 * s.abs().max(1.0));
            prev = s;
        }
    }

    #[test]
    fn depth_ties_are_averaged(values in cloud_1d()) {
        let cloud = PointCloud::univariate(&values).unwrap();
        let dirs = DirectionSet::axis(1, 0);
        let pd = ProjectionDepth::new(&cloud, &dirs);
        let depths: Vec<f64> = values.iter().map(|&v| pd.depth(&[v])).collect();
        let best = depths.iter().copied().fold(0.0, f64::max);
        let tied: Vec<f64> = values.iter().zip(&depths).filter(|(_, &d)| best - d <= DEPTH_TIE_TOL).map(|(&v, _)| v).collect();
        let want = tied.iter().sum::<f64>() / tied.len() as f64;
        prop_assert!((pd.deepest_point()[0] - want).abs() <= 1e-12 * want.abs().max(1.0));
    }
}

#[test]
fn random_orthogonal_helper_is_orthogonal() {
    let q = random_orthogonal(3, &mut rng(5));
    for i in 0..3 {
        for j in 0..3 {
            let d: f64 = (0..3).map(|k| q[i * 3 + k] * q[j * 3 + k]).sum();
            assert!((d - f64::from(u8::from(i == j))).abs() < 1e-12);
        }
    }
}
