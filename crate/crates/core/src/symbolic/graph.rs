//! Context graphs of a subshift and mean-cycle analysis of weighted
//! digraphs.
//!
//! A range-`k` function on words is recoded as a weight on the edges of the
//! graph whose nodes are the admissible `(k-1)`-words ("contexts"): the
//! `k`-word `w` is the edge from `prefix(w)` to `suffix(w)`. Walks of length
//! `n` then correspond to admissible words of length `n + k - 1`, and walk
//! weights are Birkhoff sums.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::symbolic::table::{decode, table_slots};
use crate::symbolic::{LocalTable, SubshiftSpec, Word};

const NO_INDEX: usize = usize::MAX;

/// One admissible `range`-word seen as an edge between contexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContextEdge {
    /// Base-`d` code of the word; lexicographic order equals code order.
    pub code: usize,
    /// Context index of the first `range - 1` symbols.
    pub from: usize,
    /// Context index of the last `range - 1` symbols.
    pub to: usize,
}

/// Nodes (admissible `(range-1)`-words) and edges (admissible
/// `range`-words), both in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextGraph {
    d: usize,
    range: usize,
    contexts: Vec<usize>,
    context_index: Vec<usize>,
    edges: Vec<ContextEdge>,
    edge_index: Vec<usize>,
}

impl ContextGraph {
    /// `range` must be at least 2 so that contexts carry at least one symbol.
    pub fn new(spec: &SubshiftSpec, range: usize) -> Result<Self> {
        if range < 2 {
            return Err(Error::InvalidArgument("context graphs need range >= 2".into()));
        }
        let d = spec.alphabet_size();
        let ctx_slots = table_slots(d, range - 1)?;
        let edge_slots = table_slots(d, range)?;
        let mut context_index = vec![NO_INDEX; ctx_slots];
        let mut contexts = Vec::new();
        for code in 0..ctx_slots {
            if spec.is_admissible(&decode(d, range - 1, code)) {
                context_index[code] = contexts.len();
                contexts.push(code);
            }
        }
        let mut edge_index = vec![NO_INDEX; edge_slots];
        let mut edges = Vec::new();
        for code in 0..edge_slots {
            if spec.is_admissible(&decode(d, range, code)) {
                edge_index[code] = edges.len();
                edges.push(ContextEdge {
                    code,
                    from: context_index[code / d],
                    to: context_index[code % ctx_slots],
                });
            }
        }
        Ok(ContextGraph { d, range, contexts, context_index, edges, edge_index })
    }

    pub fn alphabet_size(&self) -> usize {
        self.d
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn context_count(&self) -> usize {
        self.contexts.len()
    }

    pub fn edges(&self) -> &[ContextEdge] {
        &self.edges
    }

    /// 0-based symbols of context `i`.
    pub fn context_symbols(&self, i: usize) -> Vec<usize> {
        decode(self.d, self.range - 1, self.contexts[i])
    }

    pub fn edge_symbols(&self, e: usize) -> Vec<usize> {
        decode(self.d, self.range, self.edges[e].code)
    }

    /// Context index of a `(range-1)`-word, if admissible.
    pub fn context_of(&self, symbols: &[usize]) -> Option<usize> {
        let code = symbols.iter().try_fold(0usize, |acc, &s| (s < self.d).then_some(acc * self.d + s))?;
        self.context_index.get(code).copied().filter(|&i| i != NO_INDEX)
    }

    /// Edge index of a `range`-word, if admissible.
    pub fn edge_of(&self, symbols: &[usize]) -> Option<usize> {
        let code = symbols.iter().try_fold(0usize, |acc, &s| (s < self.d).then_some(acc * self.d + s))?;
        self.edge_index.get(code).copied().filter(|&i| i != NO_INDEX)
    }

    /// Edge index extending context `ctx` by `symbol` on the right.
    #[inline]
    pub fn extend(&self, ctx: usize, symbol: usize) -> Option<usize> {
        let code = self.contexts[ctx] * self.d + symbol;
        self.edge_index.get(code).copied().filter(|&i| i != NO_INDEX)
    }

    /// Per-edge values of a table of range at most `self.range`.
    pub fn tabulate(&self, table: &LocalTable) -> Result<Vec<f64>> {
        if table.range() > self.range {
            return Err(Error::InvalidArgument(format!(
                "table range {} exceeds graph range {}",
                table.range(),
                self.range
            )));
        }
        Ok((0..self.edges.len()).map(|e| table.get(&self.edge_symbols(e))).collect())
    }
}

/// A directed edge carrying a real weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Digraph with real edge weights; nodes optionally labelled by words.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEdgeGraph {
    node_labels: Vec<Word>,
    edges: Vec<WeightedEdge>,
}

/// A cycle attaining an extreme mean weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCycle {
    pub value: f64,
    /// Nodes along the cycle, rotated to start at the smallest index.
    pub nodes: Vec<usize>,
    /// Edge indices, `edges[j]` leaves `nodes[j]`.
    pub edges: Vec<usize>,
}

impl WeightedEdgeGraph {
    /// Unlabelled graph on `node_count` nodes.
    pub fn new(node_count: usize, edges: Vec<WeightedEdge>) -> Result<Self> {
        if let Some(e) = edges.iter().find(|e| e.source >= node_count || e.target >= node_count) {
            return Err(Error::InvalidArgument(format!(
                "edge {}->{} out of range",
                e.source, e.target
            )));
        }
        let node_labels = (0..node_count).map(|i| Word::from_zero_based(vec![i])).collect();
        Ok(WeightedEdgeGraph { node_labels, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn node_label(&self, i: usize) -> &Word {
        &self.node_labels[i]
    }

    pub fn is_strongly_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return false;
        }
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                for e in &self.edges {
                    let (a, b) = if forward { (e.source, e.target) } else { (e.target, e.source) };
                    if a == u && !seen[b] {
                        seen[b] = true;
                        queue.push_back(b);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    /// Minimum cycle mean (Karp) with a lexicographically smallest witness.
    pub fn min_mean_cycle(&self) -> Result<MeanCycle> {
        if !self.is_strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        let weights: Vec<f64> = self.edges.iter().map(|e| e.weight).collect();
        let value = karp_min_mean(self.node_count(), &self.edges, &weights);
        let (nodes, edges) = self.tight_cycle(&weights, value);
        Ok(MeanCycle { value, nodes, edges })
    }

    /// Maximum cycle mean, computed as the negated minimum of `-weight`.
    pub fn max_mean_cycle(&self) -> Result<MeanCycle> {
        if !self.is_strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        let weights: Vec<f64> = self.edges.iter().map(|e| -e.weight).collect();
        let value = karp_min_mean(self.node_count(), &self.edges, &weights);
        let (nodes, edges) = self.tight_cycle(&weights, value);
        Ok(MeanCycle { value: -value, nodes, edges })
    }

    /// Finds a cycle of mean `mean` under `weights` among the edges that are
    /// tight for shortest-path potentials of `weights - mean`.
    fn tight_cycle(&self, weights: &[f64], mean: f64) -> (Vec<usize>, Vec<usize>) {
        let n = self.node_count();
        let scale = 1.0 + weights.iter().fold(0.0f64, |a, w| a.max(w.abs()));
        let tol = 1e-9 * scale;
        let reduced: Vec<f64> = weights.iter().map(|w| w - mean).collect();
        let mut potential = vec![0.0f64; n];
        for _ in 0..n {
            let mut changed = false;
            for (e, edge) in self.edges.iter().enumerate() {
                let cand = potential[edge.source] + reduced[e];
                if cand < potential[edge.target] - 1e-15 * scale {
                    potential[edge.target] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let tight: Vec<bool> = self
            .edges
            .iter()
            .enumerate()
            .map(|(e, edge)| potential[edge.source] + reduced[e] - potential[edge.target] <= tol)
            .collect();
        // tight successors of each node, ascending by target then edge index
        let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, edge) in self.edges.iter().enumerate() {
            if tight[e] {
                succ[edge.source].push((edge.target, e));
            }
        }
        for s in succ.iter_mut() {
            s.sort_unstable();
        }
        for start in 0..n {
            let mut on_path = vec![false; n];
            on_path[start] = true;
            if !reaches(&succ, start, start, &on_path, start, true) {
                continue;
            }
            let mut nodes = vec![start];
            let mut edges = Vec::new();
            let mut cur = start;
            loop {
                if let Some(&(_, e)) = succ[cur].iter().find(|(t, _)| *t == start) {
                    edges.push(e);
                    return (nodes, edges);
                }
                let (next, e) = succ[cur]
                    .iter()
                    .copied()
                    .find(|&(t, _)| {
                        t > start && !on_path[t] && reaches(&succ, t, start, &on_path, start, false)
                    })
                    .expect("a tight cycle through start exists");
                on_path[next] = true;
                nodes.push(next);
                edges.push(e);
                cur = next;
            }
        }
        unreachable!("a strongly connected graph has a critical cycle")
    }
}

/// Whether `target` is reachable from `from` over tight edges using only
/// nodes `>= floor` that are not on the current path. With `skip_first`,
/// `from == target` asks for a non-trivial cycle.
fn reaches(
    succ: &[Vec<(usize, usize)>],
    from: usize,
    target: usize,
    on_path: &[bool],
    floor: usize,
    skip_first: bool,
) -> bool {
    if from == target && !skip_first {
        return true;
    }
    let mut seen = vec![false; succ.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &succ[u] {
            if v == target {
                return true;
            }
            if v >= floor && !on_path[v] && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    false
}

/// Maximum cycle mean of `weights` on the arcs `(source, target)` of a
/// strongly connected graph, with a node on a cycle attaining it. Arcs of
/// weight `-inf` count as absent.
pub(crate) fn max_cycle_mean(n: usize, arcs: &[(usize, usize)], weights: &[f64]) -> (f64, usize) {
    let graph = WeightedEdgeGraph {
        node_labels: vec![Word::from_zero_based(Vec::new()); n],
        edges: arcs.iter().map(|&(source, target)| WeightedEdge { source, target, weight: 0.0 }).collect(),
    };
    let negated: Vec<f64> = weights.iter().map(|w| -w).collect();
    let value = karp_min_mean(n, &graph.edges, &negated);
    let (nodes, _) = graph.tight_cycle(&negated, value);
    (-value, nodes[0])
}

/// Karp's characterisation `min_v max_k (D_n(v) - D_k(v)) / (n - k)` with
/// `D_k(v)` the minimum weight of a `k`-edge walk ending at `v` from any
/// start.
fn karp_min_mean(n: usize, edges: &[WeightedEdge], weights: &[f64]) -> f64 {
    let mut dist = vec![vec![f64::INFINITY; n]; n + 1];
    dist[0].iter_mut().for_each(|d| *d = 0.0);
    for k in 1..=n {
        let (done, rest) = dist.split_at_mut(k);
        let prev = &done[k - 1];
        let cur = &mut rest[0];
        for (e, edge) in edges.iter().enumerate() {
            let cand = prev[edge.source] + weights[e];
            if cand < cur[edge.target] {
                cur[edge.target] = cand;
            }
        }
    }
    (0..n)
        .filter(|&v| dist[n][v].is_finite())
        .map(|v| {
            (0..n)
                .filter(|&k| dist[k][v].is_finite())
                .map(|k| (dist[n][v] - dist[k][v]) / (n - k) as f64)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Recodes a range-`k` table as edge weights on the context graph of range
/// `max(k, 2)`.
pub fn lift_observable(spec: &SubshiftSpec, values: &LocalTable) -> Result<WeightedEdgeGraph> {
    let graph = ContextGraph::new(spec, values.range().max(2))?;
    let weights = graph.tabulate(values)?;
    Ok(weighted_context_graph(&graph, &weights))
}

/// Labels context-graph edges with the given per-edge weights.
pub fn weighted_context_graph(graph: &ContextGraph, weights: &[f64]) -> WeightedEdgeGraph {
    let node_labels = (0..graph.context_count())
        .map(|i| Word::from_zero_based(graph.context_symbols(i)))
        .collect();
    let edges = graph
        .edges()
        .iter()
        .zip(weights)
        .map(|(e, &w)| WeightedEdge { source: e.from, target: e.to, weight: w })
        .collect();
    WeightedEdgeGraph { node_labels, edges }
}
