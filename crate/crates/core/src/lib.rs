//! Balanced k-way graph partitioning.
//!
//! The crate partitions undirected, node- and edge-weighted graphs into `k`
//! blocks of bounded weight while minimizing the edge cut. It provides a
//! multilevel partitioner with several local search algorithms, an
//! evolutionary optimizer built on top of it, size-constrained label
//! propagation clustering and node separator extraction.

pub mod api;
pub mod coarsening;
pub mod error;
pub mod evolutionary;
pub mod graph;
pub mod initial;
pub mod io;
pub mod multilevel;
pub mod refinement;
pub mod rng;
pub mod separator;

pub use api::{kaffpa, kaffpa_balance_NE, node_separator, KaffpaOutput, Mode, SeparatorOutput};
pub use error::{Error, Result};
pub use graph::{
    boundary_nodes, build_graph, check_balance, comm_volume, contract, edge_cut, project, BalanceSpec, BlockId, Graph,
    NodeId, Partition, QualityReport, RawGraph, Weight,
};
pub use multilevel::Preconfiguration;
