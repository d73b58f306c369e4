//! Matérn correlations and Gaussian-process draws on a grid.

use dirout::simulate::{bessel_k, gp_sample, matern_corr, BivariateMatern, CovarianceSpec, GaussianSampler};
use dirout::types::TimeGrid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dirout::Result<()> {
    println!("K_0.5(1) = {:.15}", bessel_k(0.5, 1.0));
    for nu in [0.5, 1.2, 2.5] {
        let row: Vec<String> = [0.1, 0.5, 1.0, 2.0]
            .iter()
            .map(|h| format!("{:.4}", matern_corr(*h, nu, 2.0)))
            .collect();
        println!("nu = {nu}: M(h; nu, 2) at h = 0.1, 0.5, 1, 2 -> {}", row.join(" "));
    }

    let grid = TimeGrid::equidistant(11)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let spec = CovarianceSpec::Matern {
        sigma: 1.0,
        nu: 1.5,
        alpha: 4.0,
    };
    let draw = gp_sample(&grid, &spec, &mut rng)?;
    println!("Matérn draw: {:.3?}", draw);

    let bivariate = CovarianceSpec::BivariateMatern(BivariateMatern::simulation_default());
    let sampler = GaussianSampler::new(&grid, &bivariate)?;
    let joint = sampler.sample(&mut rng);
    println!("bivariate draw, first coordinate: {:.3?}", &joint[..11]);
    println!("bivariate draw, second coordinate: {:.3?}", &joint[11..]);
    Ok(())
}
