//! Exact optimal tests on words of length `n + 1`: Neyman–Pearson at a
//! given level, the equalizing minimax test and Bayes solutions, with their
//! error probabilities from full enumeration.
//!
//! Every test here is a likelihood-ratio threshold rule: reject `H0` when
//! `log μ1([w]) - log μ0([w])` exceeds the threshold, accept below it, and
//! reject with probability `χ` on the boundary.

mod profile;

pub use profile::{LikelihoodRatioProfile, RatioGroup, WordMass, TIE_TOLERANCE};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, ExtendedReal};
use crate::symbolic::{Word, DEFAULT_ENUMERATION_BUDGET};
use crate::thermo::ModelPair;

/// A randomized threshold test, serializable as a JSON record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedCylinderTest {
    /// The test sees words of length `n + 1`.
    pub n: usize,
    pub log_threshold: ExtendedReal,
    /// Rejection probability on the boundary.
    pub chi: f64,
    /// Exact level `μ0(reject)`.
    pub alpha: f64,
    /// Exact power `μ1(reject)`.
    pub beta: f64,
    /// `μ0` mass of the boundary event; `χ` is irrelevant when it is zero.
    #[serde(default)]
    pub boundary_mass0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    AcceptH0,
    RejectH0,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::AcceptH0 => "accept",
            Decision::RejectH0 => "reject",
        })
    }
}

/// Where a log-ratio falls relative to a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Accept,
    Boundary,
    Reject,
}

impl RandomizedCylinderTest {
    /// Accepts every word.
    pub fn always_accept(n: usize) -> Self {
        RandomizedCylinderTest {
            n,
            log_threshold: ExtendedReal::PosInfinity,
            chi: 0.0,
            alpha: 0.0,
            beta: 0.0,
            boundary_mass0: 0.0,
        }
    }

    /// Rejects every word.
    pub fn always_reject(n: usize) -> Self {
        RandomizedCylinderTest {
            n,
            log_threshold: ExtendedReal::NegInfinity,
            chi: 1.0,
            alpha: 1.0,
            beta: 1.0,
            boundary_mass0: 0.0,
        }
    }

    pub fn region(&self, log_ratio: f64) -> Region {
        let thr = self.log_threshold.to_f64();
        if log_ratio > thr + TIE_TOLERANCE {
            Region::Reject
        } else if (log_ratio - thr).abs() <= TIE_TOLERANCE {
            Region::Boundary
        } else {
            Region::Accept
        }
    }

    /// Probability of rejecting a word with this log-ratio.
    pub fn rejection_probability(&self, log_ratio: f64) -> f64 {
        match self.region(log_ratio) {
            Region::Reject => 1.0,
            Region::Boundary => self.chi,
            Region::Accept => 0.0,
        }
    }

    /// Decision for a word with this log-ratio and a uniform draw `u`.
    pub fn decide(&self, log_ratio: f64, u: f64) -> Decision {
        match self.region(log_ratio) {
            Region::Reject => Decision::RejectH0,
            Region::Boundary if u < self.chi => Decision::RejectH0,
            _ => Decision::AcceptH0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("test records serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("test record: {e}")))?;
        if !(0.0..=1.0).contains(&t.chi) {
            return Err(Error::Config(format!("test record: chi {} outside [0, 1]", t.chi)));
        }
        Ok(t)
    }
}

/// Error probabilities of a test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskSummary {
    pub type1: f64,
    pub type2: f64,
    pub minimax_risk: f64,
}

impl RiskSummary {
    pub fn new(type1: f64, type2: f64) -> Self {
        RiskSummary { type1, type2, minimax_risk: type1.max(type2) }
    }

    pub fn bayes_risk(&self, prior: &Prior) -> f64 {
        prior.pi0 * self.type1 + prior.pi1 * self.type2
    }
}

/// Prior weights of `H0` and `H1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    pub pi0: f64,
    pub pi1: f64,
}

impl Prior {
    pub fn new(pi0: f64, pi1: f64) -> Result<Self> {
        if !(pi0 >= 0.0 && pi1 >= 0.0 && (pi0 + pi1 - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "prior ({pi0}, {pi1}) must be nonnegative and sum to 1"
            )));
        }
        Ok(Prior { pi0, pi1 })
    }

    pub fn uniform() -> Self {
        Prior { pi0: 0.5, pi1: 0.5 }
    }

    pub fn is_degenerate(&self) -> bool {
        self.pi0 == 0.0 || self.pi1 == 0.0
    }
}

impl FromStr for Prior {
    type Err = Error;

    /// Parses `"p0,p1"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::InvalidArgument(format!("prior {s:?} is not of the form p0,p1"));
        if parts.len() != 2 {
            return Err(bad());
        }
        let p0: f64 = parts[0].parse().map_err(|_| bad())?;
        let p1: f64 = parts[1].parse().map_err(|_| bad())?;
        Prior::new(p0, p1)
    }
}

impl LikelihoodRatioProfile {
    /// Exact errors of `test` on this horizon.
    pub fn errors(&self, test: &RandomizedCylinderTest) -> Result<RiskSummary> {
        if test.n != self.horizon() {
            return Err(Error::LengthMismatch { expected: self.horizon() + 1, got: test.n + 1 });
        }
        let (mut type1, mut type2) = (CompensatedSum::new(), CompensatedSum::new());
        for w in self.words() {
            let p = test.rejection_probability(w.log_ratio);
            type1.add(p * w.mass0);
            type2.add((1.0 - p) * w.mass1);
        }
        Ok(RiskSummary::new(type1.value().clamp(0.0, 1.0), type2.value().clamp(0.0, 1.0)))
    }

    /// Threshold test with the exact level and power filled in.
    pub fn threshold_test(&self, log_threshold: ExtendedReal, chi: f64) -> Result<RandomizedCylinderTest> {
        if !(0.0..=1.0).contains(&chi) {
            return Err(Error::InvalidArgument(format!("randomization {chi} outside [0, 1]")));
        }
        let mut test = RandomizedCylinderTest {
            n: self.horizon(),
            log_threshold,
            chi,
            alpha: 0.0,
            beta: 0.0,
            boundary_mass0: 0.0,
        };
        let boundary: CompensatedSum = self
            .words()
            .iter()
            .filter(|w| test.region(w.log_ratio) == Region::Boundary)
            .map(|w| w.mass0)
            .collect();
        let r = self.errors(&test)?;
        test.alpha = r.type1;
        test.beta = 1.0 - r.type2;
        test.boundary_mass0 = boundary.value();
        Ok(test)
    }

    fn group_test(&self, g: usize, chi: f64) -> RandomizedCylinderTest {
        let group = self.groups()[g];
        RandomizedCylinderTest {
            n: self.horizon(),
            log_threshold: ExtendedReal::Finite(group.log_ratio),
            chi,
            alpha: (self.mass0_before(g) + chi * group.mass0).clamp(0.0, 1.0),
            beta: (self.mass1_before(g) + chi * group.mass1).clamp(0.0, 1.0),
            boundary_mass0: group.mass0,
        }
    }

    /// The Neyman–Pearson test of level `alpha`.
    ///
    /// At a level that is exactly a cumulative group mass the lower
    /// threshold with `χ = 0` is returned, so `alpha = 0` rejects nothing.
    pub fn neyman_pearson(&self, alpha: f64) -> Result<RandomizedCylinderTest> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("level {alpha} outside [0, 1]")));
        }
        let groups = self.groups();
        let g = (0..groups.len()).collect::<Vec<_>>().partition_point(|&g| self.mass0_before(g + 1) <= alpha);
        if g == groups.len() {
            return Ok(self.group_test(groups.len() - 1, 1.0));
        }
        let m0 = groups[g].mass0;
        let chi = if m0 > 0.0 { ((alpha - self.mass0_before(g)) / m0).clamp(0.0, 1.0) } else { 1.0 };
        Ok(self.group_test(g, chi))
    }

    /// The Neyman–Pearson test whose two error probabilities coincide.
    ///
    /// Both errors are linear in `χ` within a group, so the crossing group is
    /// located by binary search over the group prefix sums and `χ` is solved
    /// for exactly on it.
    pub fn minimax(&self) -> Result<RandomizedCylinderTest> {
        let groups = self.groups();
        let idx: Vec<usize> = (0..groups.len()).collect();
        let g = idx
            .partition_point(|&g| self.mass0_before(g + 1) < self.mass1_after(g))
            .min(groups.len() - 1);
        let RatioGroup { mass0, mass1, .. } = groups[g];
        let chi = if mass0 + mass1 > 0.0 {
            ((self.mass1_after(g) + mass1 - self.mass0_before(g)) / (mass0 + mass1)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        Ok(self.group_test(g, chi))
    }

    /// Bayes solution: threshold `log(π0 / π1)`, `χ = 1`; a prior on the
    /// boundary of the simplex gives a constant test.
    pub fn bayes(&self, prior: &Prior) -> Result<RandomizedCylinderTest> {
        if prior.pi1 == 0.0 {
            return Ok(RandomizedCylinderTest::always_accept(self.horizon()));
        }
        if prior.pi0 == 0.0 {
            return Ok(RandomizedCylinderTest::always_reject(self.horizon()));
        }
        self.threshold_test(ExtendedReal::Finite((prior.pi0 / prior.pi1).ln()), 1.0)
    }
}

/// `log μ1([w]) - log μ0([w])`.
pub fn log_likelihood_ratio(pair: &ModelPair, word: &Word) -> Result<f64> {
    pair.log_likelihood_ratio(word)
}

pub fn neyman_pearson(pair: &ModelPair, n: usize, alpha: f64) -> Result<RandomizedCylinderTest> {
    LikelihoodRatioProfile::new(pair, n, DEFAULT_ENUMERATION_BUDGET)?.neyman_pearson(alpha)
}

pub fn minimax_test(pair: &ModelPair, n: usize) -> Result<RandomizedCylinderTest> {
    LikelihoodRatioProfile::new(pair, n, DEFAULT_ENUMERATION_BUDGET)?.minimax()
}

pub fn bayes_test(pair: &ModelPair, n: usize, prior: &Prior) -> Result<RandomizedCylinderTest> {
    LikelihoodRatioProfile::new(pair, n, DEFAULT_ENUMERATION_BUDGET)?.bayes(prior)
}

pub fn threshold_test(pair: &ModelPair, n: usize, log_threshold: ExtendedReal, chi: f64) -> Result<RandomizedCylinderTest> {
    LikelihoodRatioProfile::new(pair, n, DEFAULT_ENUMERATION_BUDGET)?.threshold_test(log_threshold, chi)
}

pub fn test_errors(test: &RandomizedCylinderTest, pair: &ModelPair) -> Result<RiskSummary> {
    LikelihoodRatioProfile::new(pair, test.n, DEFAULT_ENUMERATION_BUDGET)?.errors(test)
}

/// Runs `test` on one observed word.
pub fn apply_test(test: &RandomizedCylinderTest, pair: &ModelPair, word: &Word, u: f64) -> Result<Decision> {
    if word.len() != test.n + 1 {
        return Err(Error::LengthMismatch { expected: test.n + 1, got: word.len() });
    }
    Ok(test.decide(pair.log_likelihood_ratio(word)?, u))
}
