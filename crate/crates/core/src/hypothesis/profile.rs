use rayon::prelude::*;

use crate::error::Result;
use crate::numeric::CompensatedSum;
use crate::symbolic::{check_budget, enumerate_cylinders};
use crate::thermo::ModelPair;

/// Log-ratios closer than this are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// One admissible word of the horizon, reduced to what the tests need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordMass {
    /// `log μ1([w]) - log μ0([w])`.
    pub log_ratio: f64,
    pub mass0: f64,
    pub mass1: f64,
}

/// Words sharing a log-ratio up to [`TIE_TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioGroup {
    /// Largest log-ratio in the group.
    pub log_ratio: f64,
    pub mass0: f64,
    pub mass1: f64,
    pub words: usize,
}

/// The distribution of the log-likelihood ratio on words of length `n + 1`
/// under both models, from exact enumeration.
///
/// Words are sorted by decreasing log-ratio; `groups` merge ties. Prefix
/// sums of the group masses are kept in compensated form.
#[derive(Debug, Clone)]
pub struct LikelihoodRatioProfile {
    n: usize,
    words: Vec<WordMass>,
    groups: Vec<RatioGroup>,
    /// `mass0_before[g] = Σ_{h<g} mass0`, length `groups + 1`.
    mass0_before: Vec<f64>,
    mass1_before: Vec<f64>,
    /// `mass1_after[g] = Σ_{h>g} mass1`.
    mass1_after: Vec<f64>,
}

impl LikelihoodRatioProfile {
    pub fn new(pair: &ModelPair, n: usize, budget: u128) -> Result<Self> {
        check_budget(pair.spec(), n + 1, budget)?;
        let mut words = enumerate(pair, n, budget)?;
        words.sort_by(|a, b| b.log_ratio.total_cmp(&a.log_ratio));

        let mut groups: Vec<RatioGroup> = Vec::new();
        let mut sums: Vec<(CompensatedSum, CompensatedSum)> = Vec::new();
        let mut prev = f64::INFINITY;
        for w in &words {
            if groups.is_empty() || prev - w.log_ratio > TIE_TOLERANCE {
                groups.push(RatioGroup { log_ratio: w.log_ratio, mass0: 0.0, mass1: 0.0, words: 0 });
                sums.push((CompensatedSum::new(), CompensatedSum::new()));
            }
            let (s0, s1) = sums.last_mut().expect("non-empty");
            s0.add(w.mass0);
            s1.add(w.mass1);
            groups.last_mut().expect("non-empty").words += 1;
            prev = w.log_ratio;
        }
        for (g, (s0, s1)) in groups.iter_mut().zip(&sums) {
            g.mass0 = s0.value();
            g.mass1 = s1.value();
        }

        let mut mass0_before = Vec::with_capacity(groups.len() + 1);
        let mut mass1_before = Vec::with_capacity(groups.len() + 1);
        let (mut a0, mut a1) = (CompensatedSum::new(), CompensatedSum::new());
        mass0_before.push(0.0);
        mass1_before.push(0.0);
        for (s0, s1) in &sums {
            a0.add_sum(s0);
            a1.add_sum(s1);
            mass0_before.push(a0.value());
            mass1_before.push(a1.value());
        }
        let mut mass1_after = vec![0.0; groups.len()];
        let mut a1 = CompensatedSum::new();
        for g in (0..groups.len()).rev() {
            mass1_after[g] = a1.value();
            a1.add_sum(&sums[g].1);
        }
        Ok(LikelihoodRatioProfile { n, words, groups, mass0_before, mass1_before, mass1_after })
    }

    pub fn horizon(&self) -> usize {
        self.n
    }

    /// Per-word masses, by decreasing log-ratio.
    pub fn words(&self) -> &[WordMass] {
        &self.words
    }

    pub fn groups(&self) -> &[RatioGroup] {
        &self.groups
    }

    /// `μ0` mass of the groups strictly before `g`.
    pub fn mass0_before(&self, g: usize) -> f64 {
        self.mass0_before[g]
    }

    pub fn mass1_before(&self, g: usize) -> f64 {
        self.mass1_before[g]
    }

    /// `μ1` mass of the groups strictly after `g`.
    pub fn mass1_after(&self, g: usize) -> f64 {
        self.mass1_after[g]
    }
}

/// Words are enumerated per start context in lexicographic order, so the
/// pre-sort order is fixed regardless of how the work is scheduled.
fn enumerate(pair: &ModelPair, n: usize, budget: u128) -> Result<Vec<WordMass>> {
    let (m0, m1) = (pair.h0(), pair.h1());
    let graph = m0.graph();
    let ctx_len = graph.range() - 1;
    let len = n + 1;
    if len < ctx_len {
        return Ok(enumerate_cylinders(pair.spec(), n, budget)?
            .map(|w| {
                let l0 = m0.log_cylinder_probability(w.symbols());
                let l1 = m1.log_cylinder_probability(w.symbols());
                WordMass { log_ratio: l1 - l0, mass0: l0.exp(), mass1: l1.exp() }
            })
            .collect());
    }
    let steps = len - ctx_len;
    let (lj0, lj1) = (m0.log_jacobian(), m1.log_jacobian());
    let (ls0, ls1) = (m0.log_stationary(), m1.log_stationary());
    let d = graph.alphabet_size();
    let chunks: Vec<Vec<WordMass>> = (0..graph.context_count())
        .into_par_iter()
        .map(|start| {
            let mut out = Vec::new();
            let mut stack = vec![(start, steps, 0.0f64, 0.0f64)];
            while let Some((ctx, left, a0, a1)) = stack.pop() {
                if left == 0 {
                    let (l0, l1) = (a0 + ls0[ctx], a1 + ls1[ctx]);
                    out.push(WordMass { log_ratio: l1 - l0, mass0: l0.exp(), mass1: l1.exp() });
                    continue;
                }
                // push in reverse so symbols pop in increasing order
                for s in (0..d).rev() {
                    if let Some(e) = graph.extend(ctx, s) {
                        stack.push((graph.edges()[e].to, left - 1, a0 + lj0[e], a1 + lj1[e]));
                    }
                }
            }
            out
        })
        .collect();
    Ok(chunks.concat())
}
