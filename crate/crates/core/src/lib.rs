//! Exact optimal tests between two Gibbs measures on a mixing subshift of
//! finite type, observed through a finite window of symbols.
//!
//! The crate builds Gibbs measures from locally constant potentials via
//! Perron eigendata of the transfer operator, evaluates cylinder
//! probabilities exactly, constructs the Neyman–Pearson, minimax and Bayes
//! tests for each horizon, and predicts their exponential error decay from
//! tilted pressure functions.
//!
//! Module map:
//!
//! - [`symbolic`]: subshifts, words, context graphs, mean cycles
//! - [`thermo`]: potentials, pressure, Gibbs models, entropy
//! - [`tilt`]: free-energy curves, information functions, rate functions
//! - [`hypothesis`]: optimal tests and their exact error probabilities
//! - [`asymptotics`]: predicted and fitted error exponents
//! - [`sampling`]: orbit sampling, Monte Carlo, decimal-digit input
//! - [`cli`]: config files, CSV output and the command-line front end

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod hypothesis;
pub mod numeric;
pub mod sampling;
pub mod symbolic;
pub mod thermo;
pub mod tilt;

pub use error::{Error, Result};
pub use numeric::ExtendedReal;
