//! Command-line front end. Data goes to the writer passed to [`run`] (or to
//! `--out`/`--save` files); diagnostics go to standard error.
//!
//! Exit status: 0 success, 1 validation error, 2 enumeration budget
//! exceeded, 3 numerical failure.

mod config;

pub use config::{ModelConfig, ModelSection, OptionsSection, SubshiftSection};

use std::ffi::OsString;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::asymptotics::{
    bayes_exponent, exponent_sweep, minimax_exponent, type1_exponent, type2_exponent, LinearFit,
    SweepKind, SweepOptions, DEFAULT_BURN_IN,
};
use crate::error::{Error, Result};
use crate::hypothesis::{LikelihoodRatioProfile, Prior, RandomizedCylinderTest};
use crate::numeric::{format_g17, ExtendedReal};
use crate::sampling::{monte_carlo_errors, read_digit_lines};
use crate::symbolic::Word;
use crate::thermo::{entropy_rate, ModelPair};
use crate::tilt::TiltedFamily;

#[derive(Debug, Parser)]
#[command(name = "gibbstest", version, about = "Optimal tests between two Gibbs measures on a subshift of finite type")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Model configuration file (TOML).
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelName {
    H0,
    H1,
}

impl ModelName {
    fn key(self) -> &'static str {
        match self {
            ModelName::H0 => "h0",
            ModelName::H1 => "h1",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    #[value(name = "np_threshold", alias = "np")]
    NpThreshold,
    Minimax,
    Bayes,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pressure of a model's potential and its normalized Jacobian.
    Pressure {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum)]
        model: ModelName,
    },
    /// Exact probability of a cylinder, e.g. `--word 1-2-1`.
    Cylinder {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum)]
        model: ModelName,
        #[arg(long)]
        word: String,
    },
    /// Neyman–Pearson test at level `alpha` on words of length n+1.
    Np {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        alpha: f64,
        /// Write the test record as JSON.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Minimax (equalizing) test.
    Minimax {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Bayes test for a prior `p0,p1`.
    Bayes {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        prior: String,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Predicted error exponents.
    Exponents {
        #[command(flatten)]
        config: ConfigArg,
        /// Threshold exponent c of the tests e^{c n}.
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["minimax", "bayes"])]
        c: Option<f64>,
        #[arg(long, conflicts_with = "bayes")]
        minimax: bool,
        #[arg(long, requires = "prior")]
        bayes: bool,
        #[arg(long)]
        prior: Option<String>,
    },
    /// Exact errors over a range of horizons, written as CSV, with fitted slopes.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long)]
        prior: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: usize,
    },
    /// Monte Carlo estimates of a saved test's errors.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Accept/reject decisions for digit streams, one observation per line.
    Classify {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        alpha: f64,
        /// File of digit lines, or `-` for standard input.
        #[arg(long)]
        input: String,
    },
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = e.print();
                    1
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as i32
        }
    }
}

fn load(config: &ConfigArg) -> Result<ModelConfig> {
    ModelConfig::load(&config.config)
}

fn check_level(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1]")))
    }
}

fn line(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> Result<()> {
    writeln!(out, "{key} = {value}")?;
    Ok(())
}

fn g(x: f64) -> String {
    format_g17(x)
}

fn report_test(out: &mut dyn Write, profile: &LikelihoodRatioProfile, test: &RandomizedCylinderTest, save: Option<&Path>) -> Result<()> {
    let r = profile.errors(test)?;
    line(out, "n", test.n)?;
    line(out, "log_threshold", test.log_threshold)?;
    line(out, "chi", g(test.chi))?;
    line(out, "alpha", g(test.alpha))?;
    line(out, "beta", g(test.beta))?;
    line(out, "boundary_mass0", g(test.boundary_mass0))?;
    line(out, "type1", g(r.type1))?;
    line(out, "type2", g(r.type2))?;
    line(out, "risk", g(r.minimax_risk))?;
    if let Some(path) = save {
        std::fs::write(path, test.to_json() + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn fit_text(f: &Option<LinearFit>) -> String {
    match f {
        Some(f) => format!("{} (intercept {}, r2 {}, points {})", g(f.slope), g(f.intercept), g(f.r_squared), f.points),
        None => "none".into(),
    }
}

fn rate_text(family: &TiltedFamily, z: f64) -> Result<String> {
    Ok(family.rate_function().rate(z)?.to_string())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Pressure { config, model } => {
            let cfg = load(&config)?;
            let m = cfg.model(model.key())?;
            line(out, "pressure", g(m.pressure_of_potential()))?;
            line(out, "range", m.range())?;
            line(out, "entropy_rate", g(entropy_rate(&m)))?;
            for (e, lj) in m.log_jacobian().iter().enumerate() {
                let w = Word::from_zero_based(m.graph().edge_symbols(e));
                line(out, &format!("jacobian[{w}]"), g(lj.exp()))?;
            }
        }
        Command::Cylinder { config, model, word } => {
            let cfg = load(&config)?;
            let m = cfg.model(model.key())?;
            let w: Word = word.parse()?;
            w.check(m.spec())?;
            let lp = m.log_cylinder_probability(w.symbols());
            line(out, "probability", g(lp.exp()))?;
            line(out, "log_probability", ExtendedReal::from_f64(lp))?;
        }
        Command::Np { config, n, alpha, save } => {
            check_level(alpha)?;
            let cfg = load(&config)?;
            let profile = LikelihoodRatioProfile::new(&cfg.pair()?, n, cfg.budget())?;
            let t = profile.neyman_pearson(alpha)?;
            report_test(out, &profile, &t, save.as_deref())?;
        }
        Command::Minimax { config, n, save } => {
            let cfg = load(&config)?;
            let profile = LikelihoodRatioProfile::new(&cfg.pair()?, n, cfg.budget())?;
            let t = profile.minimax()?;
            report_test(out, &profile, &t, save.as_deref())?;
        }
        Command::Bayes { config, n, prior, save } => {
            let prior: Prior = prior.parse()?;
            let cfg = load(&config)?;
            let profile = LikelihoodRatioProfile::new(&cfg.pair()?, n, cfg.budget())?;
            let t = profile.bayes(&prior)?;
            report_test(out, &profile, &t, save.as_deref())?;
            line(out, "bayes_risk", g(profile.errors(&t)?.bayes_risk(&prior)))?;
        }
        Command::Exponents { config, c, minimax, bayes, prior } => {
            let cfg = load(&config)?;
            exponents(out, &cfg.pair()?, c, minimax, bayes.then_some(prior).flatten())?;
        }
        Command::Sweep { config, kind, n_min, n_max, out: path, c, prior, burn_in } => {
            let cfg = load(&config)?;
            let kind = match kind {
                KindArg::NpThreshold => SweepKind::NpThreshold {
                    c: c.ok_or_else(|| Error::InvalidArgument("--kind np_threshold needs --c".into()))?,
                },
                KindArg::Minimax => SweepKind::Minimax,
                KindArg::Bayes => SweepKind::Bayes {
                    prior: prior
                        .ok_or_else(|| Error::InvalidArgument("--kind bayes needs --prior".into()))?
                        .parse()?,
                },
            };
            let opts = SweepOptions { budget: cfg.budget(), burn_in };
            let report = exponent_sweep(&cfg.pair()?, kind, n_min, n_max, opts)?;
            let file = std::fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            report.write_csv(std::io::BufWriter::new(file))?;
            line(out, "kind", report.kind)?;
            line(out, "n_window", format!("{}..={}", report.n_window.0, report.n_window.1))?;
            line(out, "predicted_type1", report.predicted_type1)?;
            line(out, "predicted_type2", report.predicted_type2)?;
            if let Some(t) = report.t_star {
                line(out, "t_star", g(t))?;
            }
            if let Some(v) = report.paper_formula_value {
                line(out, "paper_formula_value", g(v))?;
            }
            line(out, "slope_type1", fit_text(&report.fit_type1))?;
            line(out, "slope_type2", fit_text(&report.fit_type2))?;
            line(out, "slope_risk", fit_text(&report.fit_risk))?;
        }
        Command::Simulate { config, test, samples, seed } => {
            let cfg = load(&config)?;
            let text = std::fs::read_to_string(&test).map_err(|e| Error::Io(format!("{}: {e}", test.display())))?;
            let t = RandomizedCylinderTest::from_json(&text)?;
            let seed = seed.unwrap_or(cfg.options.seed);
            let mc = monte_carlo_errors(&t, &cfg.pair()?, samples, seed)?;
            line(out, "samples", mc.samples)?;
            line(out, "seed", mc.seed)?;
            line(out, "type1", format!("{} +- {}", g(mc.type1.value), g(mc.type1.std_error)))?;
            line(out, "type2", format!("{} +- {}", g(mc.type2.value), g(mc.type2.std_error)))?;
        }
        Command::Classify { config, n, alpha, input } => {
            check_level(alpha)?;
            let cfg = load(&config)?;
            let pair = cfg.pair()?;
            if pair.spec().alphabet_size() != 10 {
                return Err(Error::Config("classify needs a model on the 10-symbol full shift".into()));
            }
            let test = LikelihoodRatioProfile::new(&pair, n, cfg.budget())?.neyman_pearson(alpha)?;
            let lines = if input == "-" {
                read_digit_lines(std::io::stdin().lock())?
            } else {
                let f = std::fs::File::open(&input).map_err(|e| Error::Io(format!("{input}: {e}")))?;
                read_digit_lines(BufReader::new(f))?
            };
            return classify(out, &pair, &test, lines, cfg.options.seed);
        }
    }
    Ok(0)
}

fn exponents(out: &mut dyn Write, pair: &ModelPair, c: Option<f64>, minimax: bool, bayes: Option<String>) -> Result<()> {
    let f0 = TiltedFamily::new(pair, 0)?;
    let f1 = TiltedFamily::new(pair, 1)?;
    let (lo, hi) = f0.birkhoff_range();
    line(out, "range_h0", format!("{} {}", g(lo), g(hi)))?;
    line(out, "mean_h0", g(f0.free_energy_derivative(0.0)?))?;
    line(out, "mean_h1", g(f1.free_energy_derivative(0.0)?))?;
    if let Some(c) = c {
        line(out, "c", g(c))?;
        line(out, "type1_exponent", type1_exponent(&f0, c)?)?;
        line(out, "type2_exponent", type2_exponent(&f1, c)?)?;
        if c > lo && c < hi {
            line(out, "t_star", g(f0.solve_derivative(c)?))?;
        }
        line(out, "rate_h0", rate_text(&f0, c)?)?;
        line(out, "rate_h1", rate_text(&f1, -c)?)?;
    } else if minimax {
        let m = minimax_exponent(pair)?;
        line(out, "t0", g(m.t0))?;
        line(out, "minimax_exponent", g(m.exponent))?;
        line(out, "equalization_gap", g(m.equalization_gap))?;
        line(out, "literal_residual", g(m.literal_residual))?;
    } else if let Some(prior) = bayes {
        let b = bayes_exponent(pair, &prior.parse()?)?;
        line(out, "t_pi", g(b.t_pi))?;
        line(out, "chernoff_value", g(b.chernoff_value))?;
        line(out, "paper_formula_value", g(b.paper_formula_value))?;
    } else {
        return Err(Error::InvalidArgument("exponents needs --c, --minimax or --bayes --prior".into()));
    }
    Ok(())
}

/// Each observation is truncated to its first `n + 1` symbols; boundary
/// randomization draws from ChaCha20 with the config seed, stream 0.
fn classify(
    out: &mut dyn Write,
    pair: &ModelPair,
    test: &RandomizedCylinderTest,
    lines: Vec<Result<Word>>,
    seed: u64,
) -> Result<i32> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut failures = 0;
    for (k, obs) in lines.into_iter().enumerate() {
        let decision = obs.and_then(|w| {
            if w.len() < test.n + 1 {
                return Err(Error::LengthMismatch { expected: test.n + 1, got: w.len() });
            }
            let w = Word::from_zero_based(w.symbols()[..test.n + 1].to_vec());
            Ok(test.decide(pair.log_likelihood_ratio(&w)?, rng.gen::<f64>()))
        });
        match decision {
            Ok(d) => writeln!(out, "{} {d}", k + 1)?,
            Err(e) => {
                failures += 1;
                writeln!(out, "{} error {e}", k + 1)?;
            }
        }
    }
    Ok(if failures > 0 { 1 } else { 0 })
}
