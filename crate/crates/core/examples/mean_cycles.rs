//! Range of Birkhoff averages of the log-likelihood direction, which bounds
//! the thresholds where error exponents are finite.

use gibbstest::thermo::{bernoulli, ModelPair};
use gibbstest::tilt::TiltedFamily;

fn main() -> gibbstest::Result<()> {
    let pair = ModelPair::new(bernoulli(&[0.5, 0.5])?, bernoulli(&[0.75, 0.25])?)?;
    for i in 0..2 {
        let f = TiltedFamily::new(&pair, i)?;
        let (lo, hi) = f.birkhoff_range();
        println!("family {i}: direction averages in [{lo:.12}, {hi:.12}]");
        println!("  f'(0) = {:.12}, f'(1) = {:.12}", f.free_energy_derivative(0.0)?, f.free_energy_derivative(1.0)?);
    }
    Ok(())
}
