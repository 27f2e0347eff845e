//! Quality measures of a partition.

use super::{BalanceSpec, BlockId, Graph, NodeId, Partition, Weight};

/// Summary of a partition's cut, balance and communication volume.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub edge_cut: Weight,
    pub max_block_weight: Weight,
    pub l_max: Weight,
    pub is_feasible: bool,
    /// `max_block_weight / ceil(total / k)`.
    pub balance: f64,
    pub comm_volume_total: u64,
    pub comm_volume_max: u64,
}

/// Total weight of edges whose endpoints lie in different blocks.
pub fn edge_cut(g: &Graph, p: &Partition) -> Weight {
    let a = p.assignment();
    let mut cut = 0;
    for u in 0..g.n() {
        for (v, w) in g.neighbors(u) {
            if u < v && a[u] != a[v] {
                cut += w;
            }
        }
    }
    cut
}

/// Cut weight between blocks `a` and `b` only.
pub fn pair_cut(g: &Graph, p: &Partition, a: BlockId, b: BlockId) -> Weight {
    let asg = p.assignment();
    let mut cut = 0;
    for u in 0..g.n() {
        if asg[u] != a {
            continue;
        }
        for (v, w) in g.neighbors(u) {
            if asg[v] == b {
                cut += w;
            }
        }
    }
    cut
}

/// Communication volume with unit cost per node.
///
/// `D(v)` is the number of distinct foreign blocks among the neighbors of
/// `v`. Returns `(sum of D(v), max over blocks of the block's D sum)`.
pub fn comm_volume(g: &Graph, p: &Partition) -> (u64, u64) {
    let k = p.k();
    let mut per_block = vec![0u64; k];
    let mut seen = vec![usize::MAX; k];
    for v in 0..g.n() {
        let own = p.block(v);
        let mut d = 0;
        for (u, _) in g.neighbors(v) {
            let b = p.block(u);
            if b != own && seen[b] != v {
                seen[b] = v;
                d += 1;
            }
        }
        per_block[own] += d;
    }
    let total = per_block.iter().sum();
    let max = per_block.iter().copied().max().unwrap_or(0);
    (total, max)
}

/// Nodes with at least one neighbor in a different block, ascending.
pub fn boundary_nodes(g: &Graph, p: &Partition) -> Vec<NodeId> {
    (0..g.n())
        .filter(|&v| g.neighbors(v).any(|(u, _)| p.block(u) != p.block(v)))
        .collect()
}

pub fn check_balance(g: &Graph, p: &Partition, spec: &BalanceSpec) -> QualityReport {
    let max_block_weight = if spec.balance_edges {
        let mut weights = vec![0; p.k()];
        for v in 0..g.n() {
            weights[p.block(v)] += spec.effective_node_weight(g, v);
        }
        weights.into_iter().max().unwrap_or(0)
    } else {
        p.max_block_weight()
    };
    let (comm_volume_total, comm_volume_max) = comm_volume(g, p);
    let avg = spec.average_ceil().max(1);
    QualityReport {
        edge_cut: edge_cut(g, p),
        max_block_weight,
        l_max: spec.l_max(),
        is_feasible: max_block_weight <= spec.l_max(),
        balance: max_block_weight as f64 / avg as f64,
        comm_volume_total,
        comm_volume_max,
    }
}
