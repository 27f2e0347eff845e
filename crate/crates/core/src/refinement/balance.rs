//! Explicit rebalancing of overloaded partitions.

use crate::error::{Error, Result};
use crate::graph::{BalanceSpec, BlockId, Graph, NodeId, Partition, Weight};

/// Moves nodes out of overloaded blocks until the partition is feasible or
/// no single move reduces the overload.
///
/// Each step takes the heaviest overloaded block and applies the move that
/// reduces the total overload with the smallest cut increase. Candidate
/// targets are the adjacent blocks of a node plus the lightest block.
/// Returns whether the partition ended feasible.
pub fn rebalance(g: &Graph, p: &mut Partition, spec: &BalanceSpec) -> bool {
    let l_max = spec.l_max();
    let k = p.k();
    let mut conn: Vec<Weight> = vec![0; k];
    let mut touched: Vec<BlockId> = Vec::new();
    while p.overload(l_max) > 0 {
        let heavy = (0..k)
            .max_by_key(|&b| (p.block_weight(b), std::cmp::Reverse(b)))
            .unwrap();
        let lightest = (0..k).min_by_key(|&b| (p.block_weight(b), b)).unwrap();
        let overload = p.overload(l_max);
        // (damage, overload after, target weight, target, node)
        let mut best: Option<(i64, Weight, Weight, BlockId, NodeId)> = None;
        for v in (0..g.n()).filter(|&v| p.block(v) == heavy) {
            for (u, w) in g.neighbors(v) {
                let b = p.block(u);
                if conn[b] == 0 {
                    touched.push(b);
                }
                conn[b] += w;
            }
            if conn[lightest] == 0 {
                touched.push(lightest);
            }
            let c = g.node_weight(v);
            for &t in &touched {
                if t == heavy {
                    continue;
                }
                let wt = p.block_weight(t);
                let after = overload - p.block_weight(heavy).saturating_sub(l_max)
                    + p.block_weight(heavy).saturating_sub(c).saturating_sub(l_max)
                    - wt.saturating_sub(l_max)
                    + (wt + c).saturating_sub(l_max);
                if after >= overload {
                    continue;
                }
                let damage = conn[heavy] as i64 - conn[t] as i64;
                let key = (damage, after, wt, t, v);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
            for &b in &touched {
                conn[b] = 0;
            }
            touched.clear();
        }
        match best {
            Some((_, _, _, t, v)) => p.move_node(g, v, t),
            None => return false,
        }
    }
    true
}

/// Makes the partition feasible on graphs with uniform node weights, at
/// the expense of the cut if needed.
///
/// Fails with [`Error::WeightedGraphUnsupported`] on non-uniform node
/// weights and with [`Error::InfeasibleInstance`] when no feasible
/// partition exists.
pub fn enforce_balance(g: &Graph, p: &mut Partition, spec: &BalanceSpec) -> Result<()> {
    let weights = g.node_weights();
    if weights.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::WeightedGraphUnsupported);
    }
    if rebalance(g, p, spec) {
        Ok(())
    } else {
        Err(Error::InfeasibleInstance {
            node: 0,
            weight: weights.first().copied().unwrap_or(0),
            l_max: spec.l_max(),
        })
    }
}
