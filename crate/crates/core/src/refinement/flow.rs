//! Max-flow min-cut improvement between pairs of blocks.
//!
//! For a pair `(a, b)` a corridor is grown breadth-first from the pair
//! boundary into both blocks. The part grown into `a` weighs at most
//! `l_max - w(b)` and the part grown into `b` at most `l_max - w(a)`, so any
//! assignment of corridor nodes to the two blocks respects the balance
//! constraint. Everything of `a` outside the corridor is merged into the
//! source, everything of `b` into the sink, and a minimum cut of that
//! network is the best bipartition the corridor can express.
//!
//! When that corridor brings no improvement, a wider one reaching up to half
//! of each block is tried. Its cuts are not all feasible, so among its
//! minimum cuts the most evenly balanced feasible one is taken, if any.

use std::collections::{BTreeSet, VecDeque};

use super::maxflow::FlowNetwork;
use crate::error::{Error, Result};
use crate::graph::{BalanceSpec, BlockId, Graph, NodeId, Partition, Weight};

/// Flow problem around the boundary of two blocks.
///
/// Corridor nodes have local ids `0..nodes.len()`; the source is
/// `nodes.len()` and the sink `nodes.len() + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowCorridor {
    pub block_a: BlockId,
    pub block_b: BlockId,
    /// Graph node of each local id.
    pub nodes: Vec<NodeId>,
    /// Edges between corridor nodes, local ids, each listed once.
    pub edges: Vec<(usize, usize, Weight)>,
    /// Total edge weight from each corridor node to the source side.
    pub source_edges: Vec<(usize, Weight)>,
    /// Total edge weight from each corridor node to the sink side.
    pub sink_edges: Vec<(usize, Weight)>,
    /// Weight of edges running directly between source and sink remainders.
    pub fixed_cut: Weight,
}

impl FlowCorridor {
    pub fn source(&self) -> usize {
        self.nodes.len()
    }

    pub fn sink(&self) -> usize {
        self.nodes.len() + 1
    }

    /// Cut weight (including `fixed_cut`) when corridor node `i` goes to
    /// the source side iff `source_side[i]`.
    pub fn cut_weight(&self, source_side: &[bool]) -> Weight {
        let mut cut = self.fixed_cut;
        for &(u, v, w) in &self.edges {
            if source_side[u] != source_side[v] {
                cut += w;
            }
        }
        for &(u, w) in &self.source_edges {
            if !source_side[u] {
                cut += w;
            }
        }
        for &(u, w) in &self.sink_edges {
            if source_side[u] {
                cut += w;
            }
        }
        cut
    }
}

fn grow_region(
    g: &Graph,
    p: &Partition,
    block: BlockId,
    boundary: &[NodeId],
    cap: Weight,
    in_corridor: &mut [bool],
    out: &mut Vec<NodeId>,
) {
    let mut weight = 0;
    let mut queue: VecDeque<NodeId> = VecDeque::new();
    let mut seen = vec![false; g.n()];
    for &v in boundary {
        seen[v] = true;
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        let c = g.node_weight(v);
        if weight + c > cap {
            continue;
        }
        weight += c;
        in_corridor[v] = true;
        out.push(v);
        for (u, _) in g.neighbors(v) {
            if !seen[u] && p.block(u) == block {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
}

/// Builds the corridor for blocks `a` and `b`.
///
/// `budget_scale` limits each side's region to that multiple of the side's
/// boundary weight, on top of the balance-derived limit.
pub fn build_corridor(
    g: &Graph,
    p: &Partition,
    a: BlockId,
    b: BlockId,
    spec: &BalanceSpec,
    budget_scale: f64,
) -> Result<FlowCorridor> {
    let (boundary_a, boundary_b) = pair_boundary(g, p, a, b)?;
    let l_max = spec.l_max();
    let cap_a = l_max
        .saturating_sub(p.block_weight(b))
        .min(scaled_budget(g, &boundary_a, budget_scale));
    let cap_b = l_max
        .saturating_sub(p.block_weight(a))
        .min(scaled_budget(g, &boundary_b, budget_scale));
    Ok(grow_corridor(g, p, a, b, &boundary_a, &boundary_b, cap_a, cap_b))
}

/// Corridor whose regions may take up to half of each block. Its cuts are
/// not all feasible; see [`most_balanced_min_cut`].
fn build_wide_corridor(g: &Graph, p: &Partition, a: BlockId, b: BlockId, budget_scale: f64) -> Result<FlowCorridor> {
    let (boundary_a, boundary_b) = pair_boundary(g, p, a, b)?;
    let cap_a = (p.block_weight(a) / 2).min(scaled_budget(g, &boundary_a, budget_scale));
    let cap_b = (p.block_weight(b) / 2).min(scaled_budget(g, &boundary_b, budget_scale));
    Ok(grow_corridor(g, p, a, b, &boundary_a, &boundary_b, cap_a, cap_b))
}

fn pair_boundary(g: &Graph, p: &Partition, a: BlockId, b: BlockId) -> Result<(Vec<NodeId>, Vec<NodeId>)> {
    let mut boundary_a = Vec::new();
    let mut boundary_b = Vec::new();
    for v in 0..g.n() {
        let own = p.block(v);
        let other = if own == a {
            b
        } else if own == b {
            a
        } else {
            continue;
        };
        if g.neighbors(v).any(|(u, _)| p.block(u) == other) {
            if own == a {
                boundary_a.push(v);
            } else {
                boundary_b.push(v);
            }
        }
    }
    if boundary_a.is_empty() {
        return Err(Error::EmptyBoundary { a, b });
    }
    Ok((boundary_a, boundary_b))
}

fn scaled_budget(g: &Graph, boundary: &[NodeId], scale: f64) -> Weight {
    let w: Weight = boundary.iter().map(|&v| g.node_weight(v)).sum();
    (w as f64 * scale).ceil() as Weight
}

#[allow(clippy::too_many_arguments)]
fn grow_corridor(
    g: &Graph,
    p: &Partition,
    a: BlockId,
    b: BlockId,
    boundary_a: &[NodeId],
    boundary_b: &[NodeId],
    cap_a: Weight,
    cap_b: Weight,
) -> FlowCorridor {
    let mut in_corridor = vec![false; g.n()];
    let mut nodes = Vec::new();
    grow_region(g, p, a, boundary_a, cap_a, &mut in_corridor, &mut nodes);
    grow_region(g, p, b, boundary_b, cap_b, &mut in_corridor, &mut nodes);

    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    let mut corridor = FlowCorridor {
        block_a: a,
        block_b: b,
        ..FlowCorridor::default()
    };
    for (i, &v) in nodes.iter().enumerate() {
        let mut to_source = 0;
        let mut to_sink = 0;
        for (u, w) in g.neighbors(v) {
            if in_corridor[u] {
                if i < local[u] {
                    corridor.edges.push((i, local[u], w));
                }
            } else if p.block(u) == a {
                to_source += w;
            } else if p.block(u) == b {
                to_sink += w;
            }
        }
        if to_source > 0 {
            corridor.source_edges.push((i, to_source));
        }
        if to_sink > 0 {
            corridor.sink_edges.push((i, to_sink));
        }
    }
    for v in 0..g.n() {
        if p.block(v) != a || in_corridor[v] {
            continue;
        }
        for (u, w) in g.neighbors(v) {
            if p.block(u) == b && !in_corridor[u] {
                corridor.fixed_cut += w;
            }
        }
    }
    corridor.nodes = nodes;
    corridor
}

/// Exact maximum flow of the corridor network and the source side of a
/// minimum cut. The flow value plus `fixed_cut` equals the cut weight.
pub fn max_flow_min_cut(corridor: &FlowCorridor) -> (Weight, Vec<bool>) {
    let nc = corridor.nodes.len();
    let (flow, mut side) = network(corridor).max_flow(corridor.source(), corridor.sink());
    side.truncate(nc);
    debug_assert_eq!(flow + corridor.fixed_cut, corridor.cut_weight(&side));
    (flow, side)
}

fn network(corridor: &FlowCorridor) -> FlowNetwork {
    let (s, t) = (corridor.source(), corridor.sink());
    let mut net = FlowNetwork::new(corridor.nodes.len() + 2);
    for &(u, v, w) in &corridor.edges {
        net.add_edge(u, v, w);
    }
    for &(u, w) in &corridor.source_edges {
        net.add_arc(s, u, w);
    }
    for &(u, w) in &corridor.sink_edges {
        net.add_arc(u, t, w);
    }
    net
}

/// Among the minimum cuts of `corridor`, one that leaves both blocks within
/// `l_max` and splits their weight most evenly. Returns the cut weight and
/// the source side, or `None` if no minimum cut is feasible.
///
/// The source sides of minimum cuts are the sets that contain everything
/// reachable from the source in the residual network, avoid everything
/// that reaches the sink, and are closed under residual arcs. Adding the
/// remaining strongly connected components in reverse topological order
/// passes through such sets only; two orders are tried.
fn most_balanced_min_cut(
    g: &Graph,
    p: &Partition,
    corridor: &FlowCorridor,
    l_max: Weight,
) -> Option<(Weight, Vec<bool>)> {
    let nc = corridor.nodes.len();
    let (s, t) = (corridor.source(), corridor.sink());
    let mut net = network(corridor);
    let (flow, reach) = net.max_flow(s, t);

    let succ: Vec<Vec<usize>> = (0..nc + 2).map(|u| net.residual_successors(u).collect()).collect();
    let mut pred = vec![Vec::new(); nc + 2];
    for (u, list) in succ.iter().enumerate() {
        for &v in list {
            pred[v].push(u);
        }
    }
    let mut to_sink = vec![false; nc + 2];
    to_sink[t] = true;
    let mut queue = VecDeque::from([t]);
    while let Some(v) = queue.pop_front() {
        for &u in &pred[v] {
            if !to_sink[u] {
                to_sink[u] = true;
                queue.push_back(u);
            }
        }
    }
    let free: Vec<bool> = (0..nc).map(|v| !reach[v] && !to_sink[v]).collect();

    let weight = |v: usize| g.node_weight(corridor.nodes[v]);
    let corridor_a: Weight = (0..nc)
        .filter(|&v| p.block(corridor.nodes[v]) == corridor.block_a)
        .map(weight)
        .sum();
    let pair_total = p.block_weight(corridor.block_a) + p.block_weight(corridor.block_b);
    let base: Weight =
        p.block_weight(corridor.block_a) - corridor_a + (0..nc).filter(|&v| reach[v]).map(weight).sum::<Weight>();

    let score = |source: Weight| {
        let sink = pair_total - source;
        (source <= l_max && sink <= l_max).then(|| source.abs_diff(sink))
    };
    let mut best: Option<(Weight, Vec<bool>)> = None;
    let consider = |side: &[bool], source: Weight, best: &mut Option<(Weight, Vec<bool>)>| {
        if let Some(d) = score(source) {
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                *best = Some((d, side.to_vec()));
            }
        }
    };
    for ascending in [true, false] {
        let order: Vec<usize> = if ascending {
            (0..nc).collect()
        } else {
            (0..nc).rev().collect()
        };
        let mut side: Vec<bool> = reach[..nc].to_vec();
        let mut source = base;
        consider(&side, source, &mut best);
        for component in components_sinks_first(&succ, &free, &order) {
            for &v in &component {
                side[v] = true;
                source += weight(v);
            }
            consider(&side, source, &mut best);
        }
    }
    best.map(|(_, side)| {
        debug_assert_eq!(corridor.cut_weight(&side), flow + corridor.fixed_cut);
        (flow + corridor.fixed_cut, side)
    })
}

/// Strongly connected components of the subgraph induced by `free`, each
/// listed after every component it has arcs into (Tarjan's order).
fn components_sinks_first(succ: &[Vec<usize>], free: &[bool], roots: &[usize]) -> Vec<Vec<usize>> {
    let n = free.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut counter = 0;
    for &root in roots {
        if !free[root] || index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*next) {
                *next += 1;
                if w >= n || !free[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                components.push(component);
            }
        }
    }
    components
}

/// Repeated flow improvement of one block pair with growing corridors.
///
/// A min cut is applied only if it strictly lowers the pair cut. Iteration
/// stops after `max_iterations`, or once a round brings no improvement and
/// the corridor did not grow. Returns whether the partition changed.
pub fn flow_refine_pair(
    g: &Graph,
    p: &mut Partition,
    a: BlockId,
    b: BlockId,
    spec: &BalanceSpec,
    max_iterations: usize,
) -> Result<bool> {
    let mut improved = false;
    let mut scale = 1.0;
    let mut previous_sizes = None;
    for iteration in 0..max_iterations {
        let corridor = match build_corridor(g, p, a, b, spec, scale) {
            Ok(c) => c,
            Err(Error::EmptyBoundary { .. }) if iteration > 0 => break,
            Err(e) => return Err(e),
        };
        let current: Vec<bool> = corridor.nodes.iter().map(|&v| p.block(v) == a).collect();
        let old_cut = corridor.cut_weight(&current);
        let (flow, side) = max_flow_min_cut(&corridor);
        let mut round_improved = false;
        if flow + corridor.fixed_cut < old_cut {
            let overload = p.overload(spec.l_max());
            apply(g, p, &corridor, &side);
            if p.overload(spec.l_max()) > overload {
                // Cannot happen with the corridor budgets, but never trade balance for cut.
                apply(g, p, &corridor, &current);
                break;
            }
            round_improved = true;
        }
        let mut wide_size = 0;
        if !round_improved {
            let wide = build_wide_corridor(g, p, a, b, scale)?;
            wide_size = wide.nodes.len();
            let current: Vec<bool> = wide.nodes.iter().map(|&v| p.block(v) == a).collect();
            let old_cut = wide.cut_weight(&current);
            if let Some((cut, side)) = most_balanced_min_cut(g, p, &wide, spec.l_max()) {
                if cut < old_cut {
                    apply(g, p, &wide, &side);
                    round_improved = true;
                }
            }
        }
        improved |= round_improved;
        let sizes = (corridor.nodes.len(), wide_size);
        if !round_improved && previous_sizes == Some(sizes) {
            break;
        }
        previous_sizes = Some(sizes);
        scale *= 1.5;
    }
    Ok(improved)
}

fn apply(g: &Graph, p: &mut Partition, corridor: &FlowCorridor, source_side: &[bool]) {
    for (i, &v) in corridor.nodes.iter().enumerate() {
        p.move_node(
            g,
            v,
            if source_side[i] {
                corridor.block_a
            } else {
                corridor.block_b
            },
        );
    }
}

/// Pairs `(a, b)`, `a < b`, that share at least one cut edge.
pub fn adjacent_block_pairs(g: &Graph, p: &Partition) -> BTreeSet<(BlockId, BlockId)> {
    let mut pairs = BTreeSet::new();
    for (u, v, _) in g.edges() {
        let (bu, bv) = (p.block(u), p.block(v));
        if bu != bv {
            pairs.insert((bu.min(bv), bu.max(bv)));
        }
    }
    pairs
}

/// Flow refinement over all boundary-sharing block pairs.
///
/// Pairs are processed in ascending order; whenever a pair improves, every
/// pair involving one of its blocks is scheduled again. Runs until no
/// scheduled pair remains.
pub fn refine_all_pairs(g: &Graph, p: &mut Partition, spec: &BalanceSpec, max_iterations: usize) -> bool {
    let mut queue: VecDeque<(BlockId, BlockId)> = adjacent_block_pairs(g, p).into_iter().collect();
    let mut queued: BTreeSet<(BlockId, BlockId)> = queue.iter().copied().collect();
    let mut improved = false;
    while let Some((a, b)) = queue.pop_front() {
        queued.remove(&(a, b));
        if let Ok(true) = flow_refine_pair(g, p, a, b, spec, max_iterations) {
            improved = true;
            for pair in adjacent_block_pairs(g, p) {
                let touches = pair.0 == a || pair.0 == b || pair.1 == a || pair.1 == b;
                if touches && pair != (a, b) && queued.insert(pair) {
                    queue.push_back(pair);
                }
            }
        }
    }
    improved
}
