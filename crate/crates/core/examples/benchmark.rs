//! A short Monte-Carlo benchmark: correct and false detection rates of the
//! detector on one simulation model.
//!
//! `cargo run --release --example benchmark -- 1 0.1 50`

use dirout::harness::{monte_carlo, MonteCarloConfig};
use dirout::simulate::ModelSpec;

fn main() -> dirout::Result<()> {
    let mut args = std::env::args().skip(1);
    let model: u8 = args.next().map_or(1, |a| a.parse().expect("model id"));
    let eps: f64 = args.next().map_or(0.1, |a| a.parse().expect("eps"));
    let runs: usize = args.next().map_or(20, |a| a.parse().expect("runs"));

    let spec = ModelSpec::new(model, eps, 0)?;
    let cfg = MonteCarloConfig {
        runs,
        ..MonteCarloConfig::default()
    };
    let s = monte_carlo(&spec, &cfg)?;
    let show = |v: Option<f64>| v.map_or("NA".to_string(), |x| format!("{x:.1}"));
    println!(
        "model {} eps {}: p_c {} ({}), p_f {} ({}), failures {}",
        s.model,
        s.eps,
        show(s.pc_mean),
        show(s.pc_sd),
        show(s.pf_mean),
        show(s.pf_sd),
        s.failures
    );
    Ok(())
}
