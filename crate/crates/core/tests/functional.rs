mod common;

use common::{mat_vec, random_orthogonal, rng};
use dirout::functional::outlyingness_field_with;
use dirout::prelude::*;
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = OutlyingnessField> {
    (1usize..8, 1usize..30, 1usize..4).prop_flat_map(|(n, k, p)| {
        prop::collection::vec(-1e3..1e3f64, n * k * p).prop_map(move |v| OutlyingnessField::new(n, k, p, v).unwrap())
    })
}

fn dataset(n: usize, k: usize, p: usize, seed: u64) -> FunctionalDataset {
    let mut r = rng(seed);
    let values = (0..n * k * p).map(|_| common::normal(&mut r)).collect();
    FunctionalDataset::new(TimeGrid::equidistant(k).unwrap(), n, p, values).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decomposition_identity(field in field_strategy()) {
        for s in summarize(&field) {
            let rhs = s.mo_norm_sq() + s.vo;
            prop_assert!((s.fo - rhs).abs() <= 1e-10 * s.fo.max(1e-300), "{} vs {}", s.fo, rhs);
        }
    }

    #[test]
    fn time_permutation_invariance(field in field_strategy(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let (n, k, p) = (field.n(), field.k(), field.p());
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng(seed));
        let mut v = Vec::with_capacity(n * k * p);
        for i in 0..n {
            for &j in &perm {
                v.extend_from_slice(field.at(i, j));
            }
        }
        let shuffled = OutlyingnessField::new(n, k, p, v).unwrap();
        for (a, b) in summarize(&field).iter().zip(summarize(&shuffled).iter()) {
            prop_assert!(close(&a.mo, &b.mo, 1e-12));
            prop_assert!(close(&[a.vo, a.fo], &[b.vo, b.fo], 1e-12));
        }
    }

    #[test]
    fn orthogonal_equivariance_of_summaries(field in field_strategy(), seed in any::<u64>()) {
        let (n, k, p) = (field.n(), field.k(), field.p());
        let a = random_orthogonal(p, &mut rng(seed));
        let v: Vec<f64> = (0..n).flat_map(|i| (0..k).flat_map(|j| mat_vec(&a, field.at(i, j))).collect::<Vec<_>>()).collect();
        let turned = OutlyingnessField::new(n, k, p, v).unwrap();
        for (s, t) in summarize(&field).iter().zip(summarize(&turned).iter()) {
            prop_assert!(close(&t.mo, &mat_vec(&a, &s.mo), 1e-10));
            prop_assert!(close(&[t.vo, t.fo], &[s.vo, s.fo], 1e-10));
        }
    }
}

#[test]
fn hand_case_through_dataset() {
    // per time point the values are a permutation of 1..5
    let curves = vec![
        vec![1.0, 5.0, 3.0],
        vec![2.0, 4.0, 1.0],
        vec![3.0, 3.0, 5.0],
        vec![4.0, 2.0, 2.0],
        vec![5.0, 1.0, 4.0],
    ];
    let data = FunctionalDataset::from_curves(TimeGrid::equidistant(3).unwrap(), &curves).unwrap();
    let field = outlyingness_field(&data, &DepthConfig::default()).unwrap();
    // median 3, MAD 1 at every t, so O = x - 3
    for (i, c) in curves.iter().enumerate() {
        for (j, x) in c.iter().enumerate() {
            assert_eq!(field.at(i, j), &[x - 3.0]);
        }
    }
    let s = summarize(&field);
    assert_eq!(s[2].mo, vec![2.0 / 3.0]);
    assert!((s[0].fo - 8.0 / 3.0).abs() < 1e-14);
}

#[test]
fn parallel_curves_have_zero_vo() {
    let curves: Vec<Vec<f64>> = (1..=5).map(|v| vec![v as f64; 20]).collect();
    let data = FunctionalDataset::from_curves(TimeGrid::equidistant(20).unwrap(), &curves).unwrap();
    let s = outlyingness_summaries(&data, &DepthConfig::default()).unwrap();
    let mo: Vec<f64> = s.iter().map(|s| s.mo[0]).collect();
    assert_eq!(mo, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    assert!(s.iter().all(|s| s.vo == 0.0));
}

#[test]
fn degenerate_cross_section_reports_location() {
    let curves = vec![vec![0.0, 1.0], vec![0.0, 2.0], vec![0.0, 3.0], vec![1.0, 4.0]];
    let data = FunctionalDataset::from_curves(TimeGrid::equidistant(2).unwrap(), &curves).unwrap();
    match outlyingness_field(&data, &DepthConfig::default()) {
        Err(Error::InfiniteOutlyingness { curve: 3, time: 0 }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn dataset_rotation_with_rotated_directions() {
    for seed in 0..10 {
        let (n, k, p) = (15, 8, 3);
        let data = dataset(n, k, p, seed);
        let a = random_orthogonal(p, &mut rng(seed + 100));
        let rotated: Vec<f64> = data.values().chunks(p).flat_map(|x| mat_vec(&a, x)).collect();
        let moved = FunctionalDataset::new(data.grid().clone(), n, p, rotated).unwrap();
        let dirs = DirectionSet::random(p, 100, &mut rng(seed + 200));
        let f0 = outlyingness_field_with(&data, Some(&dirs)).unwrap();
        let f1 = outlyingness_field_with(&moved, Some(&dirs.transformed(&a))).unwrap();
        for (s, t) in summarize(&f0).iter().zip(summarize(&f1).iter()) {
            assert!(close(&t.mo, &mat_vec(&a, &s.mo), 1e-8));
            assert!(close(&[t.vo, t.fo], &[s.vo, s.fo], 1e-8));
        }
    }
}

/// MO of a probe curve against Model 0 samples of increasing size approaches
/// its value against a large reference sample.
#[test]
fn mo_converges_with_sample_size() {
    let k = 100;
    let grid = TimeGrid::equidistant(k).unwrap();
    let probe: Vec<f64> = grid.points().iter().map(|t| 4.0 * t + 0.5).collect();
    let mo_of_probe = |n: usize, seed: u64| -> f64 {
        let (data, _) = generate_model(&ModelSpec::new(0, 0.0, seed).unwrap().with_size(n, k)).unwrap();
        let mut values = data.values().to_vec();
        values.extend(&probe);
        let with_probe = FunctionalDataset::new(grid.clone(), n + 1, 1, values).unwrap();
        outlyingness_summaries(&with_probe, &DepthConfig::default()).unwrap()[n].mo[0]
    };
    let reference = mo_of_probe(2000, 1);
    let (mut small, mut medium) = (0.0, 0.0);
    for r in 0..20 {
        small += (mo_of_probe(100, 10 + r) - reference).abs();
        medium += (mo_of_probe(500, 100 + r) - reference).abs();
    }
    assert!(small > medium, "n=100: {small}, n=500: {medium}");
}
