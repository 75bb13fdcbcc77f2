//! Monte Carlo error estimates of a minimax test against exact values.

use gibbstest::hypothesis::LikelihoodRatioProfile;
use gibbstest::sampling::{ergodic_ratio_check, monte_carlo_errors};
use gibbstest::symbolic::DEFAULT_ENUMERATION_BUDGET;
use gibbstest::thermo::{bernoulli, ModelPair};

fn main() -> gibbstest::Result<()> {
    let pair = ModelPair::new(bernoulli(&[0.5, 0.5])?, bernoulli(&[0.75, 0.25])?)?;
    let profile = LikelihoodRatioProfile::new(&pair, 8, DEFAULT_ENUMERATION_BUDGET)?;
    let test = profile.minimax()?;
    let exact = profile.errors(&test)?;
    let mc = monte_carlo_errors(&test, &pair, 200_000, 11)?;
    println!("type1 exact {:.6}, estimate {:.6} +- {:.6}", exact.type1, mc.type1.value, mc.type1.std_error);
    println!("type2 exact {:.6}, estimate {:.6} +- {:.6}", exact.type2, mc.type2.value, mc.type2.std_error);
    println!("z scores {:.3} {:.3}", mc.type1.z_score(exact.type1, mc.samples), mc.type2.z_score(exact.type2, mc.samples));

    let check = ergodic_ratio_check(&pair, 0, 2000, 50, 5)?;
    println!(
        "(1/n) log ratio under h0: mean {:.6} +- {:.6}, target {:.6}",
        check.summary.mean, check.summary.std_error, check.target
    );
    Ok(())
}
