//! Exact randomized Neyman-Pearson tests and their power curve.

use gibbstest::hypothesis::LikelihoodRatioProfile;
use gibbstest::symbolic::DEFAULT_ENUMERATION_BUDGET;
use gibbstest::thermo::{bernoulli, ModelPair};

fn main() -> gibbstest::Result<()> {
    let pair = ModelPair::new(bernoulli(&[0.5, 0.5])?, bernoulli(&[0.75, 0.25])?)?;
    let n = 10;
    let profile = LikelihoodRatioProfile::new(&pair, n, DEFAULT_ENUMERATION_BUDGET)?;
    println!("n = {n}: {} words in {} ratio classes", profile.words().len(), profile.groups().len());
    for alpha in [0.01, 0.05, 0.1, 0.25, 0.5] {
        let test = profile.neyman_pearson(alpha)?;
        let r = profile.errors(&test)?;
        println!(
            "alpha {alpha:<5} threshold {:>10} chi {:.6} power {:.6} (type1 {:.3e})",
            test.log_threshold.to_string(),
            test.chi,
            test.beta,
            r.type1
        );
    }
    println!("{}", profile.neyman_pearson(0.05)?.to_json());
    Ok(())
}
