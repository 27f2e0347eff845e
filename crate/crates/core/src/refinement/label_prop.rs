//! Label propagation refinement.

use rand::seq::SliceRandom;

use crate::graph::{BalanceSpec, BlockId, Graph, Partition, Weight};
use crate::rng::PartRng;

/// Sweeps over the nodes in random order, moving each node to the adjacent
/// block it is most strongly connected to.
///
/// A move needs room in the target block and must not increase the cut.
/// Cut-neutral moves are only made when they shrink the heavier of the two
/// blocks involved. Stops after `iterations` sweeps or a sweep without
/// moves. Returns whether anything moved.
pub fn label_prop_refine(
    g: &Graph,
    p: &mut Partition,
    spec: &BalanceSpec,
    iterations: usize,
    rng: &mut PartRng,
) -> bool {
    let k = p.k();
    if k < 2 {
        return false;
    }
    let l_max = spec.l_max();
    let mut order: Vec<usize> = (0..g.n()).collect();
    let mut conn: Vec<Weight> = vec![0; k];
    let mut touched: Vec<BlockId> = Vec::new();
    let mut changed = false;
    for _ in 0..iterations {
        order.shuffle(rng);
        let mut moved = false;
        for &v in &order {
            let own = p.block(v);
            for (u, w) in g.neighbors(v) {
                let b = p.block(u);
                if conn[b] == 0 {
                    touched.push(b);
                }
                conn[b] += w;
            }
            let c = g.node_weight(v);
            let own_conn = conn[own];
            let mut best: Option<(Weight, BlockId)> = None;
            for &b in &touched {
                if b == own || p.block_weight(b) + c > l_max {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bc, bb)) => {
                        conn[b] > bc || (conn[b] == bc && (p.block_weight(b), b) < (p.block_weight(bb), bb))
                    }
                };
                if better {
                    best = Some((conn[b], b));
                }
            }
            for &b in &touched {
                conn[b] = 0;
            }
            touched.clear();
            if let Some((bc, b)) = best {
                let balances = bc == own_conn && p.block_weight(b) + c < p.block_weight(own);
                if bc > own_conn || balances {
                    p.move_node(g, v, b);
                    moved = true;
                }
            }
        }
        changed |= moved;
        if !moved {
            break;
        }
    }
    changed
}
