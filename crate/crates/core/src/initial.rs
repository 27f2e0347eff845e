//! Initial partitioning of the coarsest graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{edge_cut, BalanceSpec, Graph, NodeId, Partition, Weight};
use crate::refinement::{fm_refine, rebalance, FmConfig};
use crate::rng::{derive, PartRng};

/// Fails with [`Error::InfeasibleInstance`] if some node alone exceeds
/// `l_max`.
pub fn check_node_weights(g: &Graph, spec: &BalanceSpec) -> Result<()> {
    let l_max = spec.l_max();
    match (0..g.n()).find(|&v| g.node_weight(v) > l_max) {
        Some(node) => Err(Error::InfeasibleInstance {
            node,
            weight: g.node_weight(node),
            l_max,
        }),
        None => Ok(()),
    }
}

/// Greedy graph growing.
///
/// Blocks `0..k-1` are grown one after another from a random seed. The
/// frontier node most strongly connected to the growing block is absorbed
/// next (ties: smaller degree, then random) as long as it fits under
/// `l_max`, until the block reaches `ceil(c(V) / k)`. When the frontier
/// runs dry a new random seed is taken. Everything left over forms the last
/// block, which may be overloaded.
pub fn greedy_graph_growing(g: &Graph, spec: &BalanceSpec, rng: &mut PartRng) -> Result<Partition> {
    check_node_weights(g, spec)?;
    let k = spec.k;
    let n = g.n();
    let last = k - 1;
    let mut assignment = vec![last; n];
    if k == 1 {
        return Partition::new(g, k, assignment);
    }
    let target = spec.average_ceil();
    let l_max = spec.l_max();
    let mut free = vec![true; n];
    let mut seeds: Vec<NodeId> = (0..n).collect();
    seeds.shuffle(rng);
    let mut next_seed = 0;
    let tie: Vec<u32> = (0..n).map(|_| rng.gen()).collect();
    let mut conn: Vec<Weight> = vec![0; n];
    // Nodes that did not fit into the current block.
    let mut rejected = vec![usize::MAX; n];

    for block in 0..last {
        let mut weight: Weight = 0;
        let mut heap: BinaryHeap<(Weight, Reverse<usize>, u32, NodeId)> = BinaryHeap::new();
        let mut touched: Vec<NodeId> = Vec::new();
        while weight < target {
            let v = match heap.pop() {
                Some((c, _, _, v)) => {
                    if !free[v] || rejected[v] == block || conn[v] != c {
                        continue;
                    }
                    v
                }
                None => {
                    while next_seed < n && (!free[seeds[next_seed]] || rejected[seeds[next_seed]] == block) {
                        next_seed += 1;
                    }
                    if next_seed == n {
                        break;
                    }
                    seeds[next_seed]
                }
            };
            let c = g.node_weight(v);
            if weight + c > l_max {
                rejected[v] = block;
                continue;
            }
            free[v] = false;
            assignment[v] = block;
            weight += c;
            for (u, w) in g.neighbors(v) {
                if free[u] && rejected[u] != block {
                    if conn[u] == 0 {
                        touched.push(u);
                    }
                    conn[u] += w;
                    heap.push((conn[u], Reverse(g.degree(u)), tie[u], u));
                }
            }
        }
        for u in touched {
            conn[u] = 0;
        }
        // Seeds skipped because they were rejected may serve later blocks.
        next_seed = 0;
    }
    Partition::new(g, k, assignment)
}

/// Runs greedy graph growing `attempts` times with derived generators,
/// improves each result with FM (after rebalancing if needed) and keeps the
/// best one: fewest overload first, then smallest cut, then earliest
/// attempt.
pub fn best_of(g: &Graph, spec: &BalanceSpec, attempts: usize, rng: &mut PartRng) -> Result<Partition> {
    let cfg = FmConfig::default();
    let l_max = spec.l_max();
    let mut best: Option<((Weight, Weight), Partition)> = None;
    for _ in 0..attempts.max(1) {
        let mut local = derive(rng);
        let mut p = greedy_graph_growing(g, spec, &mut local)?;
        if !spec.is_feasible(&p) {
            rebalance(g, &mut p, spec);
        }
        fm_refine(g, &mut p, spec, &cfg, &mut local);
        let key = (p.overload(l_max), edge_cut(g, &p));
        if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
            best = Some((key, p));
        }
    }
    Ok(best.expect("at least one attempt").1)
}
