//! MO / VO / FO of simulated curves: shifted outliers stand out in MO,
//! shape outliers in VO, and FO = |MO|^2 + VO for every curve.
//!
//! `cargo run --release --example decomposition`

use dirout::prelude::*;

fn main() -> dirout::Result<()> {
    for model in [1u8, 4] {
        let (data, truth) = generate_model(&ModelSpec::new(model, 0.1, 3)?)?;
        let summaries = outlyingness_summaries(&data, &DepthConfig::default())?;
        println!("model {model}");
        println!("{:>5} {:>8} {:>8} {:>8} {:>9}", "curve", "MO", "VO", "FO", "outlier");
        for (i, s) in summaries
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 10 == 0 || truth.flags[*i])
        {
            println!(
                "{i:>5} {:>8.3} {:>8.3} {:>8.3} {:>9}",
                s.mo[0], s.vo, s.fo, truth.flags[i]
            );
            assert!((s.fo - (s.mo_norm_sq() + s.vo)).abs() <= 1e-10 * s.fo);
        }
    }
    Ok(())
}
