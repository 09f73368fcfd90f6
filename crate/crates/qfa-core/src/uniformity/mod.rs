//! Uniformity norms, sum graphs over atoms, and quasirandomness measures.
//!
//! Graph measures work on explicit bitset graphs ([`BipartiteGraph`],
//! [`PartiteGraph`]); the triad layer builds those graphs from a quadratic
//! factor and a label descriptor.

mod graphs;
mod hypergraph;
mod norms;
mod reduced;
mod triads;

use serde::{Deserialize, Serialize};

pub use graphs::{
    dev23_measure, dev2_measure, dev2_naive, hom_count, hom_count_check, k222_count, oct_measure_weights, oct_naive,
    triangles, BipartiteGraph, Dev2, Dev23, OctValue, PartiteGraph,
};
pub use hypergraph::{hypergraph_decomposition_check, DecompositionReport};
pub use norms::{gowers_inner, gowers_inner_direct, u2_direct, u2_norm, u3_direct, u3_norm};
pub use reduced::{reduced_pair, LabelClass, ReducedPair};
pub use triads::{
    balanced_oct, beta_graph, density_transfer_check, density_transfer_pairs, pair_graph, sigma_membership_exhaustive,
    sum_graph2, sum_graph3, triad_graph, BilinearTable, MembershipCount, PairDescriptor, PairTransfer, SumGraph2,
    SumGraph3, TriadDescriptor,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// A measured quantity against an evaluated bound; PASS iff `measured <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub formula: String,
    pub status: Status,
    pub runtime_ms: u64,
}

impl MeasureReport {
    pub fn new(name: impl Into<String>, measured: f64, bound: f64, formula: impl Into<String>, start: std::time::Instant) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            formula: formula.into(),
            status: Status::from_bool(measured <= bound),
            runtime_ms: start.elapsed().as_millis() as u64,
        }
    }
}
