//! Writes a bivariate dataset in the long CSV format, reads it back and
//! checks that every value survives unchanged.

use dirout::cli::{read_curves, write_curves};
use dirout::prelude::*;

fn main() -> dirout::Result<()> {
    let (data, _) = generate_model(&ModelSpec::new(7, 0.1, 1)?)?;
    let ids: Vec<String> = (0..data.n()).map(|i| format!("curve{i:03}")).collect();
    let path = std::env::temp_dir().join("dirout_round_trip.csv");
    write_curves(&path, &ids, &data)?;
    let back = read_curves(&path)?;
    println!(
        "wrote and read {} curves x {} points x {} coordinates",
        back.data.n(),
        back.data.k(),
        back.data.p()
    );
    println!("bit-identical: {}", back.data.values() == data.values());
    println!("time range: {:?}", back.t_range);
    std::fs::remove_file(&path)?;
    Ok(())
}
