//! FAST-MCD on contaminated Gaussian data and the resulting robust distances.

use dirout::prelude::*;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> dirout::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 60;
    let y = DMatrix::from_fn(n, 2, |i, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        if i < 8 {
            z + 6.0
        } else {
            z
        }
    });
    let fit = fast_mcd(&y, 45, 0, &McdConfig::default())?;
    println!("location {:.3?}", fit.location.as_slice());
    println!("scatter  {:.3?}", fit.scatter.as_slice());
    let kept = fit.subset.iter().filter(|&&i| i < 8).count();
    println!("shifted rows in the subset: {kept} of 8");
    let d = robust_distances(&y, &fit)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    println!("rows with the largest distances: {:?}", &order[..10]);
    Ok(())
}
