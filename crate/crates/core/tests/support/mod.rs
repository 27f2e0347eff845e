//! Random instances and exhaustive oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use gpart::refinement::FlowCorridor;
use gpart::{BalanceSpec, Graph, NodeId, Partition, Weight};
use rand::seq::SliceRandom;
use rand::Rng;

/// Connected graph: a random spanning tree plus each other pair with
/// probability `density`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, density: f64, max_edge_weight: Weight) -> Graph {
    let mut edges = BTreeSet::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (u, v) = (order[i], order[j]);
        edges.insert((u.min(v), u.max(v)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.insert((u, v));
            }
        }
    }
    let list: Vec<(NodeId, NodeId, Weight)> = edges
        .into_iter()
        .map(|(u, v)| (u, v, rng.gen_range(1..=max_edge_weight)))
        .collect();
    Graph::from_edges(n, &list).unwrap()
}

pub fn with_node_weights<R: Rng>(rng: &mut R, g: &Graph, max_weight: Weight) -> Graph {
    let weights: Vec<Weight> = (0..g.n()).map(|_| rng.gen_range(1..=max_weight)).collect();
    let edges: Vec<_> = g.edges().collect();
    Graph::from_weighted_edges(weights, &edges).unwrap()
}

pub fn random_partition<R: Rng>(rng: &mut R, g: &Graph, k: usize) -> Partition {
    let assignment = (0..g.n()).map(|_| rng.gen_range(0..k)).collect();
    Partition::new(g, k, assignment).unwrap()
}

pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1, 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols, 1));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges).unwrap()
}

pub fn five_nodes() -> Graph {
    Graph::from_edges(5, &[(0, 1, 1), (0, 4, 1), (1, 2, 1), (1, 4, 1), (2, 3, 1), (3, 4, 1)]).unwrap()
}

/// Smallest cut over all feasible bipartitions, by enumeration.
pub fn optimal_bisection_cut(g: &Graph, spec: &BalanceSpec) -> Option<Weight> {
    let n = g.n();
    let l_max = spec.l_max();
    let mut best = None;
    // node 0 stays in block 0 by symmetry
    for mask in 0u64..(1u64 << (n - 1)) {
        let side = |v: usize| v > 0 && mask >> (v - 1) & 1 == 1;
        let w1: Weight = (0..n).filter(|&v| side(v)).map(|v| g.node_weight(v)).sum();
        let w0 = g.total_node_weight() - w1;
        if w0 > l_max || w1 > l_max {
            continue;
        }
        let cut: Weight = g
            .edges()
            .filter(|&(u, v, _)| side(u) != side(v))
            .map(|(_, _, w)| w)
            .sum();
        if best.is_none_or(|b| cut < b) {
            best = Some(cut);
        }
    }
    best
}

/// Random flow corridor with `nodes` inner nodes.
pub fn random_corridor<R: Rng>(rng: &mut R, nodes: usize) -> FlowCorridor {
    let mut c = FlowCorridor {
        nodes: (0..nodes).collect(),
        block_b: 1,
        ..FlowCorridor::default()
    };
    for u in 0..nodes {
        for v in u + 1..nodes {
            if rng.gen_bool(0.4) {
                c.edges.push((u, v, rng.gen_range(1..=9)));
            }
        }
        if rng.gen_bool(0.35) {
            c.source_edges.push((u, rng.gen_range(1..=9)));
        }
        if rng.gen_bool(0.35) {
            c.sink_edges.push((u, rng.gen_range(1..=9)));
        }
    }
    c.fixed_cut = rng.gen_range(0..3);
    c
}

/// Minimum of `cut_weight` over all source-side subsets.
pub fn exhaustive_min_cut(c: &FlowCorridor) -> Weight {
    let n = c.nodes.len();
    (0u64..(1u64 << n))
        .map(|mask| {
            let side: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            c.cut_weight(&side)
        })
        .min()
        .unwrap()
}

/// Size of the smallest set of boundary nodes covering every cut edge
/// of a bipartition.
pub fn min_boundary_cover(g: &Graph, p: &Partition) -> usize {
    let cut_edges: Vec<(NodeId, NodeId)> = g
        .edges()
        .filter(|&(u, v, _)| p.block(u) != p.block(v))
        .map(|(u, v, _)| (u, v))
        .collect();
    let mut boundary: Vec<NodeId> = cut_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    boundary.sort_unstable();
    boundary.dedup();
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in boundary.iter().enumerate() {
        index[v] = i;
    }
    let edge_masks: Vec<u64> = cut_edges.iter().map(|&(u, v)| 1 << index[u] | 1 << index[v]).collect();
    (0u64..(1u64 << boundary.len()))
        .filter(|&mask| edge_masks.iter().all(|&e| e & mask != 0))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

/// Whether a BFS from any non-separator node reaches a node of another
/// block without passing through the separator.
pub fn blocks_disconnected(g: &Graph, assignment: &[usize], separator_block: usize) -> bool {
    let mut seen = vec![false; g.n()];
    for s in 0..g.n() {
        if seen[s] || assignment[s] == separator_block {
            continue;
        }
        let block = assignment[s];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for (v, _) in g.neighbors(u) {
                if assignment[v] == separator_block || seen[v] {
                    continue;
                }
                if assignment[v] != block {
                    return false;
                }
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    true
}
