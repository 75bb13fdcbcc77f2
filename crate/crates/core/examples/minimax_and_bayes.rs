//! Minimax equalizer tests and Bayes tests as the horizon grows.

use gibbstest::hypothesis::{LikelihoodRatioProfile, Prior};
use gibbstest::symbolic::DEFAULT_ENUMERATION_BUDGET;
use gibbstest::thermo::{bernoulli, ModelPair};

fn main() -> gibbstest::Result<()> {
    let pair = ModelPair::new(bernoulli(&[0.5, 0.5])?, bernoulli(&[0.75, 0.25])?)?;
    let prior = Prior::new(0.3, 0.7)?;
    println!("{:>3} {:>12} {:>10} {:>12}", "n", "minimax", "chi", "bayes(0.3)");
    for n in 1..=12 {
        let profile = LikelihoodRatioProfile::new(&pair, n, DEFAULT_ENUMERATION_BUDGET)?;
        let m = profile.minimax()?;
        let risk = profile.errors(&m)?.minimax_risk;
        let b = profile.errors(&profile.bayes(&prior)?)?.bayes_risk(&prior);
        println!("{n:>3} {risk:>12.9} {:>10.6} {b:>12.9}", m.chi);
    }
    Ok(())
}
