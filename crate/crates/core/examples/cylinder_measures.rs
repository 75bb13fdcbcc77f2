//! Cylinder probabilities and likelihood ratios for a range-2 pair on the
//! golden mean shift, loaded from a TOML config.

use std::path::Path;

use gibbstest::cli::ModelConfig;
use gibbstest::hypothesis::log_likelihood_ratio;
use gibbstest::symbolic::{enumerate_cylinders, DEFAULT_ENUMERATION_BUDGET};

fn main() -> gibbstest::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/golden_mean_markov.toml");
    let pair = ModelConfig::load(&path)?.pair()?;
    println!("{:>8} {:>12} {:>12} {:>10}", "word", "mu0", "mu1", "log ratio");
    let mut total = [0.0, 0.0];
    for w in enumerate_cylinders(pair.spec(), 3, DEFAULT_ENUMERATION_BUDGET)? {
        let (p0, p1) = (pair.h0().cylinder_probability(&w), pair.h1().cylinder_probability(&w));
        total[0] += p0;
        total[1] += p1;
        println!("{:>8} {p0:>12.8} {p1:>12.8} {:>10.6}", w.to_string(), log_likelihood_ratio(&pair, &w)?);
    }
    println!("totals {:.15} {:.15}", total[0], total[1]);
    Ok(())
}
