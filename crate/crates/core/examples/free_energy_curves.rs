//! Free energy, information function and rate function of the tilted family.

use gibbstest::thermo::{bernoulli, ModelPair};
use gibbstest::tilt::TiltedFamily;

fn main() -> gibbstest::Result<()> {
    let pair = ModelPair::new(bernoulli(&[0.5, 0.5])?, bernoulli(&[0.75, 0.25])?)?;
    let f = TiltedFamily::new(&pair, 0)?;
    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "t", "f(t)", "f'(t)", "f''(t)", "F(t)");
    for k in -4..=8 {
        let t = 0.25 * k as f64;
        println!(
            "{t:>5.2} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
            f.free_energy(t)?,
            f.free_energy_derivative(t)?,
            f.free_energy_second_derivative(t)?,
            f.information_function(t)?
        );
    }
    let rf = f.rate_function();
    let (lo, hi) = rf.domain();
    for k in 0..=6 {
        let z = lo + (hi - lo) * k as f64 / 6.0;
        println!("I({z:+.6}) = {}", rf.rate(z)?);
    }
    Ok(())
}
