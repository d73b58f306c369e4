//! Hardin-Rocke degrees of freedom and cutoffs for a few sample sizes.

use dirout::robust::{asymptotic_df, consistency_factor, simulated_df, CutoffParams, McdConfig};

fn main() -> dirout::Result<()> {
    let mcd = McdConfig::default();
    println!(
        "{:>5} {:>2} {:>5} {:>8} {:>8} {:>8} {:>8}",
        "n", "d", "h", "c", "m_asy", "m_sim", "cutoff"
    );
    for &(n, d) in &[(50, 2), (100, 2), (100, 3)] {
        let h = n * 3 / 4;
        let c = consistency_factor(n, d, h);
        let m_sim = simulated_df(n, d, h, 100, 7, &mcd)?;
        let params = CutoffParams::new(c, m_sim, d, 0.993)?;
        println!(
            "{n:>5} {d:>2} {h:>5} {c:>8.4} {:>8.2} {m_sim:>8.2} {:>8.3}",
            asymptotic_df(n, d, h),
            params.cutoff
        );
    }
    Ok(())
}
