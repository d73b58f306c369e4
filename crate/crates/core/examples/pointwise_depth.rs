//! Stahel-Donoho outlyingness, projection depth and directional outlyingness
//! at a single time point.

use dirout::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dirout::Result<()> {
    let values = [1.0, 2.0, 3.0, 4.0, 5.0];
    let cloud = PointCloud::univariate(&values)?;
    let unused = DirectionSet::axis(1, 0);
    for x in [1.0, 3.0, 5.0, 8.0] {
        println!(
            "x = {x}: SDO {:.3}, depth {:.3}, O {:?}",
            univariate_sdo(&values, x),
            projection_depth(&cloud, &[x], &unused),
            directional_outlyingness(&cloud, &[x], &unused)?
        );
    }

    let rows = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.2],
        vec![-0.5, 1.0],
        vec![0.3, -0.8],
        vec![4.0, 4.0],
    ];
    let plane = PointCloud::from_rows(&rows)?;
    let dirs = DirectionSet::random(2, 500, &mut ChaCha8Rng::seed_from_u64(1));
    println!("deepest point in the plane: {:?}", deepest_point(&plane, &dirs));
    for r in &rows {
        println!("{r:?}: O = {:?}", directional_outlyingness(&plane, r, &dirs)?);
    }
    Ok(())
}
