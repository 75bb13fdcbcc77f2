use crate::error::{Error, Result};
use crate::symbolic::{SubshiftSpec, Word};
use crate::thermo::GibbsModel;

/// Jacobians closer than this on every edge are treated as the same measure.
pub const DISTINCTNESS_TOLERANCE: f64 = 1e-12;

/// The null (`h0`) and alternative (`h1`) models, recoded to a common range.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPair {
    h0: GibbsModel,
    h1: GibbsModel,
}

impl ModelPair {
    /// Pairs two models on the same subshift; rejects identical measures.
    pub fn new(h0: GibbsModel, h1: GibbsModel) -> Result<Self> {
        let pair = Self::new_unchecked(h0, h1)?;
        let max_diff = pair
            .h0
            .log_jacobian()
            .iter()
            .zip(pair.h1.log_jacobian())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if max_diff <= DISTINCTNESS_TOLERANCE {
            return Err(Error::IdenticalModels);
        }
        Ok(pair)
    }

    /// Like [`ModelPair::new`] but accepts `μ0 = μ1`, for diagnostics on a
    /// degenerate pair.
    pub fn new_unchecked(h0: GibbsModel, h1: GibbsModel) -> Result<Self> {
        if h0.spec() != h1.spec() {
            return Err(Error::SpecMismatch);
        }
        let k = h0.range().max(h1.range());
        Ok(ModelPair { h0: h0.lift(k)?, h1: h1.lift(k)? })
    }

    pub fn h0(&self) -> &GibbsModel {
        &self.h0
    }

    pub fn h1(&self) -> &GibbsModel {
        &self.h1
    }

    /// Model `i ∈ {0, 1}`.
    pub fn model(&self, i: usize) -> &GibbsModel {
        match i {
            0 => &self.h0,
            1 => &self.h1,
            _ => panic!("model index must be 0 or 1"),
        }
    }

    pub fn spec(&self) -> &SubshiftSpec {
        self.h0.spec()
    }

    pub fn range(&self) -> usize {
        self.h0.range()
    }

    /// `log μ1([w]) - log μ0([w])`.
    pub fn log_likelihood_ratio(&self, word: &Word) -> Result<f64> {
        word.check(self.spec())?;
        let s = word.symbols();
        Ok(self.h1.log_cylinder_probability(s) - self.h0.log_cylinder_probability(s))
    }

    /// `log J_{i'} - log J_i` per edge of the shared context graph.
    pub fn direction(&self, i: usize) -> Vec<f64> {
        let (a, b) = (self.model(i), self.model(1 - i));
        b.log_jacobian().iter().zip(a.log_jacobian()).map(|(x, y)| x - y).collect()
    }
}
