//! Topological pressure of zero potentials and the measure of maximal entropy.

use gibbstest::symbolic::{SubshiftSpec, Word};
use gibbstest::thermo::{entropy_rate, normalize_potential, pressure, FiniteRangePotential};

fn main() -> gibbstest::Result<()> {
    for (name, spec) in [("full 2-shift", SubshiftSpec::full_shift(2)?), ("golden mean", SubshiftSpec::golden_mean())] {
        let zero = FiniteRangePotential::zero(spec);
        let p = pressure(&zero)?;
        let parry = normalize_potential(&zero)?;
        println!("{name}: pressure {p:.15}, entropy of normalized model {:.15}", entropy_rate(&parry));
        for w in ["1", "2", "1-1", "1-2", "2-1"] {
            let w: Word = w.parse()?;
            if w.check(parry.spec()).is_ok() {
                println!("  mu[{w}] = {:.15}", parry.cylinder_probability(&w));
            }
        }
    }
    Ok(())
}
