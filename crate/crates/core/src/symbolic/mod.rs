//! Subshifts of finite type, admissible words, and mean-cycle extremes of
//! Birkhoff averages.

mod graph;
mod subshift;
mod table;
mod word;

pub use graph::{
    lift_observable, weighted_context_graph, ContextEdge, ContextGraph, MeanCycle, WeightedEdge,
    WeightedEdgeGraph,
};
pub(crate) use graph::max_cycle_mean;
pub use subshift::SubshiftSpec;
pub use table::{LocalTable, MAX_TABLE_SLOTS};
pub use word::{
    check_budget, enumerate_cylinders, enumerate_cylinders_with_prefix, CylinderIter, Word,
    DEFAULT_ENUMERATION_BUDGET,
};

/// Validates a 0/1 transition matrix; see [`SubshiftSpec::new`].
pub fn validate_subshift(d: usize, transitions: &[Vec<u8>]) -> crate::Result<SubshiftSpec> {
    SubshiftSpec::new(d, transitions)
}
