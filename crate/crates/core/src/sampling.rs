//! Exact sampling of orbit words from Gibbs models, Monte Carlo estimates
//! of test errors, the ergodic check of normalized log-likelihood ratios,
//! and ingestion of decimal digit streams.
//!
//! The generator is ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded by
//! `seed_from_u64(seed)` with `set_stream(stream)`. Parallel work is split
//! into fixed chunks with their own streams, so results do not depend on
//! the number of worker threads.

use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{Decision, RandomizedCylinderTest};
use crate::symbolic::{SubshiftSpec, Word};
use crate::thermo::{GibbsModel, ModelPair};
use crate::tilt::TiltedFamily;

/// Samples per independent stream in Monte Carlo runs.
pub const MONTE_CARLO_CHUNK: usize = 4096;

#[derive(Debug, Clone)]
struct Transition {
    symbol: usize,
    next: usize,
    cumulative: f64,
}

/// Draws words distributed exactly as the model's cylinder measure: the
/// first context from the stationary weights, then successive symbols with
/// `P(v -> u) = J(edge) π(u) / π(v)`.
#[derive(Debug, Clone)]
pub struct OrbitSampler {
    model: GibbsModel,
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
    initial: Vec<f64>,
    transitions: Vec<Vec<Transition>>,
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w / total;
            acc
        })
        .collect()
}

fn pick(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

impl OrbitSampler {
    pub fn new(model: GibbsModel, seed: u64, stream: u64) -> Self {
        let graph = model.graph();
        let pi = model.stationary_context_weights();
        let initial = cumulative(pi);
        let mut out: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); graph.context_count()];
        for (e, (edge, lj)) in graph.edges().iter().zip(model.log_jacobian()).enumerate() {
            let symbol = graph.edge_symbols(e)[graph.range() - 1];
            out[edge.from].push((symbol, edge.to, lj.exp() * pi[edge.to] / pi[edge.from]));
        }
        let transitions = out
            .into_iter()
            .map(|row| {
                let w: Vec<f64> = row.iter().map(|r| r.2).collect();
                row.iter()
                    .zip(cumulative(&w))
                    .map(|(&(symbol, next, _), cumulative)| Transition { symbol, next, cumulative })
                    .collect()
            })
            .collect();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        OrbitSampler { model, seed, stream, rng, initial, transitions }
    }

    pub fn model(&self) -> &GibbsModel {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A uniform draw in `[0, 1)` from the sampler's stream.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// A word of length `n + 1`.
    pub fn sample_orbit(&mut self, n: usize) -> Word {
        let graph = self.model.graph();
        let mut ctx = pick(&self.initial, self.rng.gen::<f64>());
        let mut symbols = graph.context_symbols(ctx);
        while symbols.len() < n + 1 {
            let row = &self.transitions[ctx];
            let u = self.rng.gen::<f64>();
            let j = row.partition_point(|t| t.cumulative <= u).min(row.len() - 1);
            symbols.push(row[j].symbol);
            ctx = row[j].next;
        }
        symbols.truncate(n + 1);
        Word::from_zero_based(symbols)
    }
}

/// Mean and spread of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
    pub count: usize,
}

impl SampleSummary {
    pub fn from_values(values: &[f64]) -> Self {
        let k = values.len();
        let mean = values.iter().sum::<f64>() / k as f64;
        let var = if k > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64 } else { 0.0 };
        let std_dev = var.sqrt();
        SampleSummary { mean, std_dev, std_error: std_dev / (k as f64).sqrt(), count: k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicCheck {
    pub summary: SampleSummary,
    /// The limit `f_i'(0)`.
    pub target: f64,
}

/// `(1/n) log(μ_{i'}([w]) / μ_i([w]))` over `trials` words drawn from `μ_i`;
/// trial `k` uses stream `k`.
pub fn ergodic_ratio_check(pair: &ModelPair, i: usize, n: usize, trials: usize, seed: u64) -> Result<ErgodicCheck> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument("ergodic check needs n >= 1 and at least one trial".into()));
    }
    let target = TiltedFamily::new(pair, i)?.free_energy_derivative(0.0)?;
    let (mi, mj) = (pair.model(i), pair.model(1 - i));
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let w = OrbitSampler::new(mi.clone(), seed, k as u64).sample_orbit(n);
            (mj.log_cylinder_probability(w.symbols()) - mi.log_cylinder_probability(w.symbols())) / n as f64
        })
        .collect();
    Ok(ErgodicCheck { summary: SampleSummary::from_values(&values), target })
}

/// A proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    fn from_count(hits: u64, samples: usize) -> Self {
        let p = hits as f64 / samples as f64;
        Estimate { value: p, std_error: (p * (1.0 - p) / samples as f64).sqrt() }
    }

    /// `|value - exact|` in units of the standard error computed at `exact`.
    pub fn z_score(&self, exact: f64, samples: usize) -> f64 {
        let se = (exact * (1.0 - exact) / samples as f64).sqrt();
        if se == 0.0 {
            if self.value == exact { 0.0 } else { f64::INFINITY }
        } else {
            (self.value - exact).abs() / se
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloErrors {
    pub type1: Estimate,
    pub type2: Estimate,
    pub samples: usize,
    pub seed: u64,
}

/// Rejections under `μ0` and acceptances under `μ1`, each over `samples`
/// words. Chunk `j` of `H0` draws from stream `2j`, of `H1` from `2j + 1`.
pub fn monte_carlo_errors(test: &RandomizedCylinderTest, pair: &ModelPair, samples: usize, seed: u64) -> Result<MonteCarloErrors> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let chunks = samples.div_ceil(MONTE_CARLO_CHUNK);
    let count = |i: usize, want: Decision| -> u64 {
        (0..chunks)
            .into_par_iter()
            .map(|j| {
                let size = MONTE_CARLO_CHUNK.min(samples - j * MONTE_CARLO_CHUNK);
                let mut s = OrbitSampler::new(pair.model(i).clone(), seed, (2 * j + i) as u64);
                let mut hits = 0u64;
                for _ in 0..size {
                    let w = s.sample_orbit(test.n);
                    let llr = pair.h1().log_cylinder_probability(w.symbols())
                        - pair.h0().log_cylinder_probability(w.symbols());
                    if test.decide(llr, s.uniform()) == want {
                        hits += 1;
                    }
                }
                hits
            })
            .sum()
    };
    let rejections0 = count(0, Decision::RejectH0);
    let acceptances1 = count(1, Decision::AcceptH0);
    Ok(MonteCarloErrors {
        type1: Estimate::from_count(rejections0, samples),
        type2: Estimate::from_count(acceptances1, samples),
        samples,
        seed,
    })
}

/// The full shift on ten symbols that digit words live on.
pub fn digits_spec() -> SubshiftSpec {
    SubshiftSpec::full_shift(10).expect("ten symbols")
}

/// Maps a decimal expansion such as `"0.141592"` to the word of symbols
/// `digit + 1`. Trailing whitespace is ignored; positions in errors are
/// 0-based character offsets into `text`.
pub fn ingest_digits(text: &str) -> Result<Word> {
    let text = text.trim_end();
    let offset = if text.starts_with("0.") { 2 } else { 0 };
    let mut symbols = Vec::with_capacity(text.len());
    for (position, ch) in text.chars().enumerate().skip(offset) {
        match ch.to_digit(10) {
            Some(d) => symbols.push(d as usize),
            None => return Err(Error::InvalidCharacter { position, ch }),
        }
    }
    if symbols.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(Word::from_zero_based(symbols))
}

/// One digit observation per non-blank line.
pub fn read_digit_lines<R: BufRead>(reader: R) -> Result<Vec<Result<Word>>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(ingest_digits(&line));
    }
    Ok(out)
}
