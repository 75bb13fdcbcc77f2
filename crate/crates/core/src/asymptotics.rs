//! Predicted exponential decay rates of test errors and least-squares fits
//! of `log(error)` against `n` from exact finite-horizon errors.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypothesis::{LikelihoodRatioProfile, Prior, RandomizedCylinderTest, RiskSummary};
use crate::numeric::{format_g17, ExtendedReal};
use crate::thermo::ModelPair;
use crate::tilt::{TiltedFamily, DEGENERACY_TOLERANCE};

/// Horizons below this are left out of slope fits by default.
pub const DEFAULT_BURN_IN: usize = 4;
/// Tolerance of the post-check `F_0(t_0) = F_1(1 - t_0)`.
pub const EQUALIZATION_TOLERANCE: f64 = 1e-10;
/// Literal residuals of the coupled minimax system above this are logged.
pub const LITERAL_RESIDUAL_LOG_LEVEL: f64 = 1e-6;

/// `lim (1/n) log μ_i(S_n > z n)` for the direction of `family`.
fn upper_tail_exponent(family: &TiltedFamily, z: f64) -> Result<ExtendedReal> {
    family.require_nondegenerate()?;
    let (_, hi) = family.birkhoff_range();
    if z > hi + DEGENERACY_TOLERANCE {
        return Ok(ExtendedReal::NegInfinity);
    }
    if z <= family.free_energy_derivative(0.0)? {
        return Ok(ExtendedReal::Finite(0.0));
    }
    match family.rate_function().rate(z)? {
        ExtendedReal::Finite(r) => Ok(ExtendedReal::Finite(-r)),
        other => Ok(ExtendedReal::from_f64(-other.to_f64())),
    }
}

fn require_index(family: &TiltedFamily, i: usize) -> Result<()> {
    if family.index() != i {
        return Err(Error::InvalidArgument(format!("expected the family of model {i}, got {}", family.index())));
    }
    Ok(())
}

/// Decay rate of the type-1 error of the threshold tests `c_n = e^{c n}`:
/// `f_0(t) - t f_0'(t)` with `f_0'(t) = c` inside the range, `-∞` above it
/// and `0` at or below the ergodic mean `f_0'(0)`.
pub fn type1_exponent(family: &TiltedFamily, c: f64) -> Result<ExtendedReal> {
    require_index(family, 0)?;
    upper_tail_exponent(family, c)
}

/// Decay rate of the type-2 error of the same tests, from family 1 at
/// `f_1'(s) = -c`: `-∞` for `c < -A_1` and `0` for `c ≥ -f_1'(0)`.
pub fn type2_exponent(family: &TiltedFamily, c: f64) -> Result<ExtendedReal> {
    require_index(family, 1)?;
    upper_tail_exponent(family, -c)
}

/// The tilt `t` with `f_i'(t) = z`, when `z` is strictly inside the range.
fn interior_tilt(family: &TiltedFamily, z: f64) -> Option<f64> {
    let (lo, hi) = family.birkhoff_range();
    (z > lo && z < hi).then(|| family.solve_derivative(z).ok()).flatten()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimaxExponent {
    /// Root of `f_0'` in `(0, 1)`.
    pub t0: f64,
    /// `f_0(t_0)`, the minimum of `f_0`.
    pub exponent: f64,
    /// `|F_0(t_0) - F_1(1 - t_0)|`.
    pub equalization_gap: f64,
    /// `s s' f_1''(s) - t f_0''(t)` at `s = 1 - t_0`, as displayed in the
    /// coupled system; reduces to `-f_0''(t_0)`.
    pub literal_residual: f64,
}

/// Residuals of the coupled system for the minimax horizon equalization
/// evaluated at `(t, s)` with `s' = -1`: the first-order coupling
/// `f_0'(t) + f_1'(s)` and the second displayed line.
pub fn minimax_system_residuals(pair: &ModelPair, t: f64) -> Result<(f64, f64)> {
    let f0 = TiltedFamily::new(pair, 0)?;
    let f1 = TiltedFamily::new(pair, 1)?;
    let s = 1.0 - t;
    let first = f0.free_energy_derivative(t)? + f1.free_energy_derivative(s)?;
    let second = s * -1.0 * f1.free_energy_second_derivative(s)? - t * f0.free_energy_second_derivative(t)?;
    Ok((first, second))
}

/// The exponent of the minimax risk: with `s = 1 - t` the coupling holds
/// identically and equal rates force `f_0'(t_0) = 0`.
pub fn minimax_exponent(pair: &ModelPair) -> Result<MinimaxExponent> {
    let f0 = TiltedFamily::new(pair, 0)?;
    let f1 = TiltedFamily::new(pair, 1)?;
    f0.require_nondegenerate()?;
    let t0 = f0.solve_derivative(0.0)?;
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(Error::RootNotBracketed(format!("root of f_0' at {t0} lies outside (0, 1)")));
    }
    let exponent = f0.free_energy(t0)?;
    let equalization_gap = (f0.information_function(t0)? - f1.information_function(1.0 - t0)?).abs();
    if equalization_gap > EQUALIZATION_TOLERANCE {
        log::warn!("minimax rates differ by {equalization_gap:e} at t0 = {t0}");
    }
    let (first, literal_residual) = minimax_system_residuals(pair, t0)?;
    if literal_residual.abs() > LITERAL_RESIDUAL_LOG_LEVEL || first.abs() > LITERAL_RESIDUAL_LOG_LEVEL {
        log::info!(
            "literal coupled system at t0 = {t0}: first line {first:e}, second line {literal_residual:e}"
        );
    }
    Ok(MinimaxExponent { t0, exponent, equalization_gap, literal_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesExponent {
    pub t_pi: f64,
    /// `f_0(t_π)`; the same for every interior prior.
    pub chernoff_value: f64,
    /// `2 π_0 (f_0(t_π) - t_π f_0'(t_π))`, evaluated as displayed.
    pub paper_formula_value: f64,
}

pub fn bayes_exponent(pair: &ModelPair, prior: &Prior) -> Result<BayesExponent> {
    if prior.is_degenerate() {
        return Err(Error::DegeneratePrior(prior.pi0, prior.pi1));
    }
    let m = minimax_exponent(pair)?;
    let f0 = TiltedFamily::new(pair, 0)?;
    let t = m.t0;
    let paper_formula_value = 2.0 * prior.pi0 * (f0.free_energy(t)? - t * f0.free_energy_derivative(t)?);
    Ok(BayesExponent { t_pi: t, chernoff_value: m.exponent, paper_formula_value })
}

/// Which family of tests a sweep builds at each horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepKind {
    /// Likelihood-ratio threshold `e^{c n}`.
    NpThreshold { c: f64 },
    Minimax,
    Bayes { prior: Prior },
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::NpThreshold { .. } => "np_threshold",
            SweepKind::Minimax => "minimax",
            SweepKind::Bayes { .. } => "bayes",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordinary least squares `y = slope · x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// `None` with fewer than two points or no spread in `x`.
pub fn fit_line(points: &[(f64, f64)]) -> Option<LinearFit> {
    let k = points.len();
    if k < 2 {
        return None;
    }
    let kf = k as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit { slope, intercept, r_squared, points: k })
}

/// Exact errors of the sweep test at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub type1: f64,
    pub type2: f64,
    /// Maximum of the errors, or the Bayes risk for Bayes sweeps.
    pub risk: f64,
    pub test: RandomizedCylinderTest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    #[serde(serialize_with = "serialize_kind")]
    pub kind: SweepKind,
    pub predicted_type1: ExtendedReal,
    pub predicted_type2: ExtendedReal,
    /// The tilt attaining the prediction, when it is interior.
    pub t_star: Option<f64>,
    /// Only for Bayes sweeps: the displayed prior-weighted value.
    pub paper_formula_value: Option<f64>,
    pub fit_type1: Option<LinearFit>,
    pub fit_type2: Option<LinearFit>,
    pub fit_risk: Option<LinearFit>,
    /// Horizons used by the fits.
    pub n_window: (usize, usize),
    pub rows: Vec<SweepRow>,
}

fn serialize_kind<S: serde::Serializer>(k: &SweepKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(k.name())
}

pub const CSV_HEADER: &str =
    "n,kind,type1,type2,risk,log_type1,log_type2,log_risk,predicted_type1,predicted_type2";

impl ExponentReport {
    /// Writes the fixed-schema CSV, one row per horizon.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        let log = |x: f64| ExtendedReal::from_f64(x.ln());
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n,
                self.kind.name(),
                format_g17(r.type1),
                format_g17(r.type2),
                format_g17(r.risk),
                log(r.type1),
                log(r.type2),
                log(r.risk),
                self.predicted_type1,
                self.predicted_type2,
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub budget: u128,
    pub burn_in: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { budget: crate::symbolic::DEFAULT_ENUMERATION_BUDGET, burn_in: DEFAULT_BURN_IN }
    }
}

/// Builds the requested test for every `n` in `n_min..=n_max`, computes its
/// exact errors and fits the slopes of the log-errors over the horizons at
/// or above the burn-in.
pub fn exponent_sweep(
    pair: &ModelPair,
    kind: SweepKind,
    n_min: usize,
    n_max: usize,
    options: SweepOptions,
) -> Result<ExponentReport> {
    if n_min > n_max {
        return Err(Error::InvalidArgument(format!("empty horizon range {n_min}..={n_max}")));
    }
    crate::symbolic::check_budget(pair.spec(), n_max + 1, options.budget)?;
    let f0 = TiltedFamily::new(pair, 0)?;
    let f1 = TiltedFamily::new(pair, 1)?;
    let (predicted_type1, predicted_type2, t_star, paper_formula_value) = match kind {
        SweepKind::NpThreshold { c } => {
            (type1_exponent(&f0, c)?, type2_exponent(&f1, c)?, interior_tilt(&f0, c), None)
        }
        SweepKind::Minimax => {
            let m = minimax_exponent(pair)?;
            (ExtendedReal::Finite(m.exponent), ExtendedReal::Finite(m.exponent), Some(m.t0), None)
        }
        SweepKind::Bayes { prior } => {
            let b = bayes_exponent(pair, &prior)?;
            let e = ExtendedReal::Finite(b.chernoff_value);
            (e, e, Some(b.t_pi), Some(b.paper_formula_value))
        }
    };

    let rows: Vec<SweepRow> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| sweep_row(pair, kind, n, options.budget))
        .collect::<Result<_>>()?;

    let start = n_min.max(options.burn_in).min(n_max);
    let fit = |pick: fn(&SweepRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.n >= start)
            .map(|r| (r.n as f64, pick(r).ln()))
            .filter(|p| p.1.is_finite())
            .collect();
        fit_line(&pts)
    };
    Ok(ExponentReport {
        kind,
        predicted_type1,
        predicted_type2,
        t_star,
        paper_formula_value,
        fit_type1: fit(|r| r.type1),
        fit_type2: fit(|r| r.type2),
        fit_risk: fit(|r| r.risk),
        n_window: (start, n_max),
        rows,
    })
}

fn sweep_row(pair: &ModelPair, kind: SweepKind, n: usize, budget: u128) -> Result<SweepRow> {
    let profile = LikelihoodRatioProfile::new(pair, n, budget)?;
    let test = match kind {
        SweepKind::NpThreshold { c } => profile.threshold_test(ExtendedReal::Finite(c * n as f64), 1.0)?,
        SweepKind::Minimax => profile.minimax()?,
        SweepKind::Bayes { prior } => profile.bayes(&prior)?,
    };
    let RiskSummary { type1, type2, minimax_risk } = profile.errors(&test)?;
    let risk = match kind {
        SweepKind::Bayes { prior } => prior.pi0 * type1 + prior.pi1 * type2,
        _ => minimax_risk,
    };
    Ok(SweepRow { n, type1, type2, risk, test })
}
