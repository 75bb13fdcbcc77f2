use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, log_sum_exp};
use crate::symbolic::{ContextGraph, LocalTable, SubshiftSpec, Word};
use crate::thermo::perron::{self, Side};

/// Tolerance for accepting a table as an already normalized Jacobian.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A locally constant potential `A`: a function of the first `k` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRangePotential {
    spec: SubshiftSpec,
    log_values: LocalTable,
}

impl FiniteRangePotential {
    pub fn new(spec: SubshiftSpec, log_values: LocalTable) -> Result<Self> {
        if log_values.alphabet_size() != spec.alphabet_size() {
            return Err(Error::SpecMismatch);
        }
        Ok(FiniteRangePotential { spec, log_values })
    }

    pub fn zero(spec: SubshiftSpec) -> Self {
        let log_values = LocalTable::constant(&spec, 1, 0.0).expect("range 1 fits");
        FiniteRangePotential { spec, log_values }
    }

    pub fn spec(&self) -> &SubshiftSpec {
        &self.spec
    }

    pub fn range(&self) -> usize {
        self.log_values.range()
    }

    pub fn log_values(&self) -> &LocalTable {
        &self.log_values
    }

    fn edge_values(&self, graph: &ContextGraph) -> Result<Vec<f64>> {
        graph.tabulate(&self.log_values)
    }
}

/// Log of the Perron eigenvalue of the transfer operator restricted to
/// functions of `range - 1` symbols.
pub fn pressure(potential: &FiniteRangePotential) -> Result<f64> {
    let graph = ContextGraph::new(&potential.spec, potential.range().max(2))?;
    let phi = potential.edge_values(&graph)?;
    Ok(perron::perron(graph.context_count(), graph.edges(), &phi, Side::Right)?.log_eigenvalue)
}

/// A Gibbs measure described by its normalized Jacobian on the context
/// graph of range `k ≥ 2`, together with the eigendata of the potential it
/// was built from.
///
/// The cylinder `[w_0 .. w_m]` (with `m + 1 ≥ k - 1`) has probability
/// `π(last context) · Π J(k-window)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsModel {
    spec: SubshiftSpec,
    graph: ContextGraph,
    log_jacobian: Vec<f64>,
    pressure_of_potential: f64,
    eigenfunction: Vec<f64>,
    eigenmeasure: Vec<f64>,
    stationary: Vec<f64>,
    log_stationary: Vec<f64>,
}

/// Builds the Gibbs model of a potential: `J = e^A · h / (λ · h∘T)` with
/// `h` the Perron eigenfunction of the transfer operator and `λ = e^{P(A)}`.
pub fn normalize_potential(potential: &FiniteRangePotential) -> Result<GibbsModel> {
    let graph = ContextGraph::new(&potential.spec, potential.range().max(2))?;
    let phi = potential.edge_values(&graph)?;
    GibbsModel::from_edge_potential(potential.spec.clone(), graph, &phi)
}

impl GibbsModel {
    pub(crate) fn from_edge_potential(spec: SubshiftSpec, graph: ContextGraph, phi: &[f64]) -> Result<Self> {
        let n = graph.context_count();
        let right = perron::perron(n, graph.edges(), phi, Side::Right)?;
        let left = perron::perron(n, graph.edges(), phi, Side::Left)?;
        let log_lambda = right.log_eigenvalue;
        let eigenmeasure = right.vector;
        let log_products: Vec<f64> = right.log_vector.iter().zip(&left.log_vector).map(|(a, b)| a + b).collect();
        let log_dot = log_sum_exp(&log_products);
        let log_h: Vec<f64> = left.log_vector.iter().map(|h| h - log_dot).collect();
        let eigenfunction: Vec<f64> = log_h.iter().map(|h| h.exp()).collect();
        let raw: Vec<f64> = graph
            .edges()
            .iter()
            .zip(phi)
            .map(|(e, &a)| a + log_h[e.from] - log_h[e.to] - log_lambda)
            .collect();
        let log_jacobian = renormalize(&graph, raw);
        let start: Vec<f64> = log_products.iter().map(|l| (l - log_dot).exp()).collect();
        let jac: Vec<f64> = log_jacobian.iter().map(|l| l.exp()).collect();
        let stationary = perron::stationary(n, graph.edges(), &jac, start)?;
        let log_stationary = stationary.iter().map(|p| p.ln()).collect();
        Ok(GibbsModel {
            spec,
            graph,
            log_jacobian,
            pressure_of_potential: log_lambda,
            eigenfunction,
            eigenmeasure,
            stationary,
            log_stationary,
        })
    }

    /// Model from an already normalized log-Jacobian table; the table must
    /// sum to one over the preimages of every context.
    pub fn from_log_jacobian(spec: SubshiftSpec, log_jacobian: &LocalTable) -> Result<Self> {
        let graph = ContextGraph::new(&spec, log_jacobian.range().max(2))?;
        let raw = graph.tabulate(log_jacobian)?;
        let sums = preimage_log_sums(&graph, &raw);
        if let Some((ctx, s)) = sums.iter().enumerate().find(|(_, s)| s.abs() > NORMALIZATION_TOLERANCE) {
            return Err(Error::InvalidArgument(format!(
                "Jacobian preimage sum at context {} is {} (expected 1)",
                Word::from_zero_based(graph.context_symbols(ctx)),
                s.exp()
            )));
        }
        Self::from_normalized_edges(spec, graph, raw, 0.0)
    }

    /// Skips the finiteness requirement so that degenerate (zero-weight)
    /// fixtures can be built in tests.
    #[cfg(test)]
    pub(crate) fn from_raw_log_jacobian(spec: SubshiftSpec, range: usize, raw: Vec<f64>) -> Result<Self> {
        let graph = ContextGraph::new(&spec, range)?;
        Self::from_normalized_edges(spec, graph, raw, 0.0)
    }

    fn from_normalized_edges(spec: SubshiftSpec, graph: ContextGraph, raw: Vec<f64>, pressure: f64) -> Result<Self> {
        let n = graph.context_count();
        let log_jacobian = renormalize(&graph, raw);
        let jac: Vec<f64> = log_jacobian.iter().map(|l| l.exp()).collect();
        let stationary = perron::stationary(n, graph.edges(), &jac, vec![1.0; n])?;
        let log_stationary = stationary.iter().map(|p| p.ln()).collect();
        Ok(GibbsModel {
            spec,
            graph,
            log_jacobian,
            pressure_of_potential: pressure,
            eigenfunction: vec![1.0; n],
            eigenmeasure: stationary.clone(),
            stationary,
            log_stationary,
        })
    }

    /// The same measure on the context graph of a larger range.
    pub fn lift(&self, range: usize) -> Result<GibbsModel> {
        if range < self.range() {
            return Err(Error::InvalidArgument(format!(
                "cannot lift range {} model to {range}",
                self.range()
            )));
        }
        if range == self.range() {
            return Ok(self.clone());
        }
        let graph = ContextGraph::new(&self.spec, range)?;
        let k = self.range();
        let log_jacobian: Vec<f64> = (0..graph.edges().len())
            .map(|e| {
                let w = graph.edge_symbols(e);
                self.log_jacobian[self.graph.edge_of(&w[..k]).expect("prefix admissible")]
            })
            .collect();
        let n = graph.context_count();
        let eigenfunction: Vec<f64> = (0..n)
            .map(|c| {
                let s = graph.context_symbols(c);
                self.eigenfunction[self.graph.context_of(&s[..k - 1]).expect("prefix admissible")]
            })
            .collect();
        let stationary: Vec<f64> = (0..n)
            .map(|c| self.log_cylinder_probability(&graph.context_symbols(c)).exp())
            .collect();
        let eigenmeasure = stationary.iter().zip(&eigenfunction).map(|(p, h)| p / h).collect();
        let log_stationary = stationary.iter().map(|p| p.ln()).collect();
        Ok(GibbsModel {
            spec: self.spec.clone(),
            graph,
            log_jacobian,
            pressure_of_potential: self.pressure_of_potential,
            eigenfunction,
            eigenmeasure,
            stationary,
            log_stationary,
        })
    }

    pub fn spec(&self) -> &SubshiftSpec {
        &self.spec
    }

    /// Range of the stored Jacobian (at least 2).
    pub fn range(&self) -> usize {
        self.graph.range()
    }

    pub fn graph(&self) -> &ContextGraph {
        &self.graph
    }

    /// `log J` per context-graph edge.
    pub fn log_jacobian(&self) -> &[f64] {
        &self.log_jacobian
    }

    pub fn log_jacobian_table(&self) -> LocalTable {
        LocalTable::from_fn(&self.spec, self.range(), |w| {
            self.log_jacobian[self.graph.edge_of(w).expect("admissible")]
        })
        .expect("table matches graph")
    }

    /// `P(A)` of the potential the model was normalized from.
    pub fn pressure_of_potential(&self) -> f64 {
        self.pressure_of_potential
    }

    /// Perron eigenfunction `h` on contexts, scaled so that `ν · h = 1`.
    pub fn eigenfunction(&self) -> &[f64] {
        &self.eigenfunction
    }

    /// Eigenmeasure weights `ν` on contexts, summing to one.
    pub fn eigenmeasure(&self) -> &[f64] {
        &self.eigenmeasure
    }

    /// Probabilities of the context cylinders, summing to one.
    pub fn stationary_context_weights(&self) -> &[f64] {
        &self.stationary
    }

    pub fn log_stationary(&self) -> &[f64] {
        &self.log_stationary
    }

    /// `μ(edge word) = π(suffix) · J(edge)`, per context-graph edge.
    pub fn edge_measure(&self) -> Vec<f64> {
        self.graph
            .edges()
            .iter()
            .zip(&self.log_jacobian)
            .map(|(e, lj)| (self.log_stationary[e.to] + lj).exp())
            .collect()
    }

    /// `log μ([w])` for 0-based symbols; `-inf` for inadmissible words.
    pub fn log_cylinder_probability(&self, symbols: &[usize]) -> f64 {
        if symbols.is_empty() || !self.spec.is_admissible(symbols) {
            return f64::NEG_INFINITY;
        }
        let ctx_len = self.range() - 1;
        if symbols.len() < ctx_len {
            // marginal over the contexts extending the word
            let terms: Vec<f64> = (0..self.graph.context_count())
                .filter(|&c| self.graph.context_symbols(c).starts_with(symbols))
                .map(|c| self.log_stationary[c])
                .collect();
            return log_sum_exp(&terms);
        }
        let k = self.range();
        let last = self.graph.context_of(&symbols[symbols.len() - ctx_len..]).expect("admissible");
        let mut acc = self.log_stationary[last];
        for w in symbols.windows(k) {
            acc += self.log_jacobian[self.graph.edge_of(w).expect("admissible")];
        }
        acc
    }

    pub fn cylinder_probability(&self, word: &Word) -> f64 {
        self.log_cylinder_probability(word.symbols()).exp()
    }

    /// Per-edge values of `table`, lifting the table if its range is
    /// smaller than the model's.
    pub fn edge_values(&self, table: &LocalTable) -> Result<Vec<f64>> {
        self.graph.tabulate(table)
    }
}

/// `log Σ_{edges into ctx} J` for each context.
fn preimage_log_sums(graph: &ContextGraph, log_j: &[f64]) -> Vec<f64> {
    let mut terms: Vec<Vec<f64>> = vec![Vec::new(); graph.context_count()];
    for (e, &lj) in graph.edges().iter().zip(log_j) {
        terms[e.to].push(lj);
    }
    terms.iter().map(|t| log_sum_exp(t)).collect()
}

fn renormalize(graph: &ContextGraph, mut log_j: Vec<f64>) -> Vec<f64> {
    let sums = preimage_log_sums(graph, &log_j);
    for (e, lj) in graph.edges().iter().zip(log_j.iter_mut()) {
        *lj -= sums[e.to];
    }
    log_j
}

/// `h_μ(T) = -∫ log J dμ`.
pub fn entropy_rate(model: &GibbsModel) -> f64 {
    -compensated_sum(
        model
            .edge_measure()
            .iter()
            .zip(model.log_jacobian())
            .filter(|(m, _)| **m > 0.0)
            .map(|(m, lj)| m * lj),
    )
}

/// `∫ g dμ` for a locally constant observable `g`.
pub fn birkhoff_integral(model: &GibbsModel, observable: &LocalTable) -> Result<f64> {
    if observable.alphabet_size() != model.spec().alphabet_size() {
        return Err(Error::SpecMismatch);
    }
    let lifted;
    let m = if observable.range() > model.range() {
        lifted = model.lift(observable.range())?;
        &lifted
    } else {
        model
    };
    let values = m.edge_values(observable)?;
    Ok(compensated_sum(m.edge_measure().iter().zip(&values).map(|(a, b)| a * b)))
}

/// `∫ (log J_p - log J_q) dμ_p`, the relative entropy rate of `p` to `q`.
pub fn relative_entropy_rate(p: &GibbsModel, q: &GibbsModel) -> Result<f64> {
    if p.spec() != q.spec() {
        return Err(Error::SpecMismatch);
    }
    let k = p.range().max(q.range());
    let (p, q) = (p.lift(k)?, q.lift(k)?);
    let value = compensated_sum(
        p.edge_measure()
            .iter()
            .zip(p.log_jacobian().iter().zip(q.log_jacobian()))
            .map(|(m, (a, b))| m * (a - b)),
    );
    // clear rounding noise around zero
    Ok(if value < 0.0 && value > -1e-13 { 0.0 } else { value })
}
