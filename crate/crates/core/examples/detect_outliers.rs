//! End to end: simulate a contaminated model, compute (MO, VO), flag
//! outliers and compare with the ground truth.
//!
//! `cargo run --release --example detect_outliers -- 2`

use dirout::prelude::*;

fn main() -> dirout::Result<()> {
    let model: u8 = std::env::args().nth(1).map_or(2, |a| a.parse().expect("model id"));
    let (data, truth) = generate_model(&ModelSpec::new(model, 0.1, 11)?)?;
    let summaries = outlyingness_summaries(&data, &DepthConfig::default())?;
    let report = detect(&summaries, &DetectionConfig::default())?;
    let p = &report.params;
    println!("c = {:.4}, m = {:.2}, cutoff = {:.3}", p.c, p.m, p.cutoff);
    let flagged: Vec<usize> = (0..data.n()).filter(|&i| report.flags[i]).collect();
    let actual: Vec<usize> = (0..data.n()).filter(|&i| truth.flags[i]).collect();
    println!("flagged: {flagged:?}");
    println!("true:    {actual:?}");
    let m = evaluate(&report.flags, &truth)?;
    println!("p_c = {:?}, p_f = {:?}", m.p_c, m.p_f);
    Ok(())
}
