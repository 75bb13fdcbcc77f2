//! The TOML model configuration shared by all subcommands.
//!
//! ```toml
//! [subshift]
//! d = 2
//! transitions = [[1, 1], [1, 1]]
//!
//! [h0]
//! range = 1
//! normalized = true
//! weights = { "1" = 0.5, "2" = 0.5 }
//!
//! [h1]
//! range = 1
//! normalized = true
//! log_weights = { "1" = -0.2876820724517809, "2" = -1.3862943611198906 }
//!
//! [options]
//! budget = 16777216
//! tolerance = 1e-9
//! seed = 1
//! ```
//!
//! Each model gives one of `log_weights` (values of the potential `A`) or
//! `weights` (values of `e^A`, which must be positive), keyed by
//! hyphen-separated 1-based admissible words of length `range`. With
//! `normalized = true` the pressure must vanish within `tolerance`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::symbolic::{LocalTable, SubshiftSpec, Word, DEFAULT_ENUMERATION_BUDGET};
use crate::thermo::{normalize_potential, FiniteRangePotential, GibbsModel, ModelPair, NORMALIZATION_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubshiftSection {
    pub d: usize,
    pub transitions: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub range: usize,
    #[serde(default)]
    pub normalized: bool,
    pub log_weights: Option<BTreeMap<String, f64>>,
    pub weights: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSection {
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_budget() -> u64 {
    DEFAULT_ENUMERATION_BUDGET as u64
}

fn default_tolerance() -> f64 {
    NORMALIZATION_TOLERANCE
}

impl Default for OptionsSection {
    fn default() -> Self {
        OptionsSection { budget: default_budget(), tolerance: default_tolerance(), seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub subshift: SubshiftSection,
    pub h0: ModelSection,
    pub h1: ModelSection,
    #[serde(default)]
    pub options: OptionsSection,
}

impl ModelConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn spec(&self) -> Result<SubshiftSpec> {
        crate::symbolic::validate_subshift(self.subshift.d, &self.subshift.transitions)
    }

    pub fn budget(&self) -> u128 {
        self.options.budget as u128
    }

    pub fn section(&self, name: &str) -> Result<&ModelSection> {
        match name {
            "h0" => Ok(&self.h0),
            "h1" => Ok(&self.h1),
            other => Err(Error::InvalidArgument(format!("unknown model {other:?} (expected h0 or h1)"))),
        }
    }

    /// The potential of model `name` as given in the file.
    pub fn potential(&self, name: &str) -> Result<FiniteRangePotential> {
        let spec = self.spec()?;
        let section = self.section(name)?;
        let entries = match (&section.log_weights, &section.weights) {
            (Some(lw), None) => parse_entries(lw, |v| Ok(v))?,
            (None, Some(w)) => parse_entries(w, |v| {
                if v > 0.0 {
                    Ok(v.ln())
                } else {
                    Err(format!("weight {v} is not positive"))
                }
            })?,
            _ => {
                return Err(Error::Config(format!(
                    "[{name}] needs exactly one of log_weights or weights"
                )))
            }
        };
        let table = LocalTable::from_entries(&spec, section.range, entries)
            .map_err(|e| Error::Config(format!("[{name}] {e}")))?;
        FiniteRangePotential::new(spec, table)
    }

    /// The Gibbs model of `name`; a `normalized` model must have zero pressure.
    pub fn model(&self, name: &str) -> Result<GibbsModel> {
        let m = normalize_potential(&self.potential(name)?)?;
        if self.section(name)?.normalized && m.pressure_of_potential().abs() > self.options.tolerance {
            return Err(Error::Config(format!(
                "[{name}] is marked normalized but its pressure is {}",
                m.pressure_of_potential()
            )));
        }
        Ok(m)
    }

    pub fn pair(&self) -> Result<ModelPair> {
        ModelPair::new(self.model("h0")?, self.model("h1")?)
    }
}

fn parse_entries(
    map: &BTreeMap<String, f64>,
    convert: impl Fn(f64) -> std::result::Result<f64, String>,
) -> Result<Vec<(Word, f64)>> {
    map.iter()
        .map(|(k, &v)| {
            let w: Word = k.parse().map_err(|e| Error::Config(format!("key {k:?}: {e}")))?;
            let v = convert(v).map_err(|e| Error::Config(format!("key {k:?}: {e}")))?;
            Ok((w, v))
        })
        .collect()
}
