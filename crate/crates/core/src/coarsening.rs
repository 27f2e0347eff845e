//! Clusterings used to contract a graph: heavy-edge matching for mesh-like
//! inputs and size-constrained label propagation for social-network-like
//! inputs.
//!
//! Both algorithms accept an optional *group* label per node. An edge whose
//! endpoints carry different group labels is never contracted; this is how
//! the cut edges of one or more given partitions are protected.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Graph, NodeId, Weight};
use crate::rng::PartRng;

/// Node-to-cluster assignment with contiguous ids and per-cluster weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    pub cluster_of: Vec<usize>,
    pub cluster_weight: Vec<Weight>,
}

impl Clustering {
    pub fn singletons(g: &Graph) -> Self {
        Clustering {
            cluster_of: (0..g.n()).collect(),
            cluster_weight: g.node_weights().to_vec(),
        }
    }

    /// Renumbers arbitrary labels by first appearance in node order.
    pub fn from_labels(g: &Graph, labels: &[usize]) -> Self {
        let mut remap = vec![usize::MAX; labels.iter().map(|&l| l + 1).max().unwrap_or(0)];
        let mut cluster_of = Vec::with_capacity(labels.len());
        let mut cluster_weight = Vec::new();
        for (v, &l) in labels.iter().enumerate() {
            if remap[l] == usize::MAX {
                remap[l] = cluster_weight.len();
                cluster_weight.push(0);
            }
            let c = remap[l];
            cluster_of.push(c);
            cluster_weight[c] += g.node_weight(v);
        }
        Clustering {
            cluster_of,
            cluster_weight,
        }
    }

    pub fn num_clusters(&self) -> usize {
        self.cluster_weight.len()
    }
}

#[inline]
fn same_group(groups: Option<&[usize]>, u: NodeId, v: NodeId) -> bool {
    groups.is_none_or(|gr| gr[u] == gr[v])
}

/// Randomized heavy-edge matching.
///
/// Nodes are visited in random order; each unmatched node is paired with its
/// unmatched neighbor of maximum edge weight whose combined weight stays
/// within `max_cluster_weight`. Unmatched nodes stay singletons.
pub fn heavy_edge_matching(g: &Graph, rng: &mut PartRng, max_cluster_weight: Weight) -> Clustering {
    heavy_edge_matching_constrained(g, rng, max_cluster_weight, None)
}

pub fn heavy_edge_matching_constrained(
    g: &Graph,
    rng: &mut PartRng,
    max_cluster_weight: Weight,
    groups: Option<&[usize]>,
) -> Clustering {
    let mut order: Vec<NodeId> = (0..g.n()).collect();
    order.shuffle(rng);
    heavy_edge_matching_in_order(g, &order, max_cluster_weight, groups)
}

/// Matching with a fixed visit order. Ties between equally heavy edges go
/// to the neighbor listed first.
pub fn heavy_edge_matching_in_order(
    g: &Graph,
    order: &[NodeId],
    max_cluster_weight: Weight,
    groups: Option<&[usize]>,
) -> Clustering {
    let n = g.n();
    let mut mate: Vec<usize> = (0..n).collect();
    let mut matched = vec![false; n];
    for &v in order {
        if matched[v] {
            continue;
        }
        let cv = g.node_weight(v);
        let mut best: Option<(NodeId, Weight)> = None;
        for (u, w) in g.neighbors(v) {
            if matched[u] || !same_group(groups, u, v) || cv + g.node_weight(u) > max_cluster_weight {
                continue;
            }
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((u, w));
            }
        }
        if let Some((u, _)) = best {
            matched[u] = true;
            matched[v] = true;
            mate[v] = u;
            mate[u] = v;
        }
    }
    let labels: Vec<usize> = (0..n).map(|v| v.min(mate[v])).collect();
    Clustering::from_labels(g, &labels)
}

/// Size-constrained label propagation.
///
/// Starts from singletons and performs `iterations` sweeps in random node
/// order. A node adopts the label with maximum incident edge weight among
/// the labels it may join (`cluster weight + c(v) <= upper_bound`, its own
/// label always allowed); ties are broken uniformly at random. `None` means
/// no size constraint.
pub fn label_propagation_clustering(
    g: &Graph,
    upper_bound: Option<Weight>,
    iterations: usize,
    rng: &mut PartRng,
) -> Clustering {
    label_propagation_constrained(g, upper_bound, iterations, rng, None)
}

pub fn label_propagation_constrained(
    g: &Graph,
    upper_bound: Option<Weight>,
    iterations: usize,
    rng: &mut PartRng,
    groups: Option<&[usize]>,
) -> Clustering {
    let n = g.n();
    let bound = upper_bound.unwrap_or(Weight::MAX);
    let mut label: Vec<usize> = (0..n).collect();
    let mut weight: Vec<Weight> = g.node_weights().to_vec();
    let mut conn: Vec<Weight> = vec![0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut best: Vec<usize> = Vec::new();
    let mut order: Vec<NodeId> = (0..n).collect();

    for _ in 0..iterations {
        order.shuffle(rng);
        let mut changed = false;
        for &v in &order {
            let own = label[v];
            let cv = g.node_weight(v);
            touched.push(own);
            for (u, w) in g.neighbors(v) {
                if !same_group(groups, u, v) {
                    continue;
                }
                let l = label[u];
                if conn[l] == 0 && l != own {
                    touched.push(l);
                }
                conn[l] += w;
            }
            let mut best_conn = 0;
            best.clear();
            for &l in &touched {
                if l != own && weight[l].saturating_add(cv) > bound {
                    continue;
                }
                match conn[l].cmp(&best_conn) {
                    std::cmp::Ordering::Greater => {
                        best_conn = conn[l];
                        best.clear();
                        best.push(l);
                    }
                    std::cmp::Ordering::Equal => best.push(l),
                    std::cmp::Ordering::Less => {}
                }
            }
            for &l in &touched {
                conn[l] = 0;
            }
            touched.clear();
            let chosen = match best.len() {
                0 => own,
                1 => best[0],
                len => best[rng.gen_range(0..len)],
            };
            if chosen != own {
                weight[own] -= cv;
                weight[chosen] += cv;
                label[v] = chosen;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Clustering::from_labels(g, &label)
}

/// Splits clusters so that no edge in `forbidden` ends up inside a cluster.
///
/// Members of each cluster are placed greedily, in node order, into the
/// first sub-cluster that holds none of their forbidden neighbors. Cluster
/// weights can only shrink, so any size constraint stays satisfied.
pub fn enforce_contraction_forbidden_edges(
    g: &Graph,
    clustering: &Clustering,
    forbidden: &[(NodeId, NodeId)],
) -> Clustering {
    if forbidden.is_empty() {
        return clustering.clone();
    }
    let n = g.n();
    let mut forbidden_nbrs: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut seen = HashSet::new();
    for &(u, v) in forbidden {
        if u != v && seen.insert((u.min(v), u.max(v))) {
            forbidden_nbrs[u].push(v);
            forbidden_nbrs[v].push(u);
        }
    }
    // Sub-cluster index within the node's original cluster.
    let mut sub = vec![usize::MAX; n];
    let mut sub_count = vec![0usize; clustering.num_clusters()];
    let mut blocked: Vec<bool> = Vec::new();
    for v in 0..n {
        let c = clustering.cluster_of[v];
        blocked.clear();
        blocked.resize(sub_count[c] + 1, false);
        for &u in &forbidden_nbrs[v] {
            if clustering.cluster_of[u] == c && sub[u] != usize::MAX {
                blocked[sub[u]] = true;
            }
        }
        let s = blocked.iter().position(|&b| !b).unwrap();
        sub[v] = s;
        sub_count[c] = sub_count[c].max(s + 1);
    }
    let mut offset = vec![0usize; clustering.num_clusters() + 1];
    for c in 0..clustering.num_clusters() {
        offset[c + 1] = offset[c] + sub_count[c];
    }
    let labels: Vec<usize> = (0..n).map(|v| offset[clustering.cluster_of[v]] + sub[v]).collect();
    Clustering::from_labels(g, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::five_nodes;
    use crate::graph::Partition;
    use crate::rng::seeded;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap()
    }

    #[test]
    fn matching_in_fixed_order() {
        let g = five_nodes();
        let c = heavy_edge_matching_in_order(&g, &[0, 1, 2, 3, 4], 2, None);
        assert_eq!(c.cluster_of, vec![0, 0, 1, 1, 2]);
        assert_eq!(c.cluster_weight, vec![2, 2, 1]);
    }

    #[test]
    fn matching_trivial_cases() {
        let mut rng = seeded(1);
        let edgeless = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(heavy_edge_matching(&edgeless, &mut rng, 10).num_clusters(), 3);
        let pair = Graph::from_edges(2, &[(0, 1, 5)]).unwrap();
        assert_eq!(heavy_edge_matching(&pair, &mut rng, 10).cluster_of, vec![0, 0]);
    }

    #[test]
    fn matching_prefers_heavy_edges() {
        let g = Graph::from_edges(3, &[(0, 1, 1), (1, 2, 9)]).unwrap();
        let c = heavy_edge_matching_in_order(&g, &[1, 0, 2], 2, None);
        assert_eq!(c.cluster_of, vec![0, 1, 1]);
    }

    #[test]
    fn matching_respects_groups() {
        let g = five_nodes();
        let groups = [0, 0, 1, 1, 0];
        for seed in 0..20 {
            let c = heavy_edge_matching_constrained(&g, &mut seeded(seed), 10, Some(&groups));
            for (u, v, _) in g.edges() {
                if groups[u] != groups[v] {
                    assert_ne!(c.cluster_of[u], c.cluster_of[v]);
                }
            }
        }
    }

    #[test]
    fn label_propagation_without_sweeps_is_singletons() {
        let g = five_nodes();
        let c = label_propagation_clustering(&g, None, 0, &mut seeded(3));
        assert_eq!(c, Clustering::singletons(&g));
    }

    #[test]
    fn label_propagation_triangle() {
        let g = triangle();
        for seed in 0..20 {
            let c = label_propagation_clustering(&g, None, 10, &mut seeded(seed));
            assert_eq!(c.num_clusters(), 1, "seed {seed}");
            let c = label_propagation_clustering(&g, Some(2), 10, &mut seeded(seed));
            let mut sizes = c.cluster_weight.clone();
            sizes.sort_unstable();
            assert_eq!(sizes, vec![1, 2], "seed {seed}");
        }
    }

    #[test]
    fn forbidden_edges_split_clusters() {
        let pair = Graph::from_edges(2, &[(0, 1, 1)]).unwrap();
        let c = Clustering::from_labels(&pair, &[0, 0]);
        let split = enforce_contraction_forbidden_edges(&pair, &c, &[(0, 1)]);
        assert_eq!(split.cluster_of, vec![0, 1]);
        assert_eq!(enforce_contraction_forbidden_edges(&pair, &c, &[]), c);
    }

    #[test]
    fn forbidden_cut_edges_on_example() {
        let g = five_nodes();
        let p = Partition::new(&g, 2, vec![0, 0, 1, 1, 0]).unwrap();
        let cut_edges: Vec<_> = g
            .edges()
            .filter(|&(u, v, _)| p.block(u) != p.block(v))
            .map(|(u, v, _)| (u, v))
            .collect();
        assert_eq!(cut_edges, vec![(1, 2), (3, 4)]);
        for seed in 0..20 {
            let c = label_propagation_clustering(&g, None, 10, &mut seeded(seed));
            let split = enforce_contraction_forbidden_edges(&g, &c, &cut_edges);
            assert_ne!(split.cluster_of[1], split.cluster_of[2]);
            assert_ne!(split.cluster_of[3], split.cluster_of[4]);
        }
    }
}
