//! Predicted error exponents against slopes fitted to exact error
//! probabilities, written as CSV to stdout.

use gibbstest::asymptotics::{exponent_sweep, minimax_exponent, SweepKind, SweepOptions};
use gibbstest::thermo::{bernoulli, ModelPair};

fn main() -> gibbstest::Result<()> {
    let pair = ModelPair::new(bernoulli(&[0.5, 0.5])?, bernoulli(&[0.75, 0.25])?)?;
    let m = minimax_exponent(&pair)?;
    eprintln!("minimax: t0 = {:.12}, exponent = {:.12}", m.t0, m.exponent);
    for kind in [SweepKind::NpThreshold { c: 0.0 }, SweepKind::Minimax] {
        let report = exponent_sweep(&pair, kind, 1, 16, SweepOptions::default())?;
        if let Some(fit) = &report.fit_risk {
            eprintln!("{}: fitted risk slope {:.5} over {} points", kind.name(), fit.slope, fit.points);
        }
        print!("{}", report.to_csv_string());
    }
    Ok(())
}
