//! Compressed-sparse-row graph representation, structural validation and
//! contraction.
//!
//! A [`Graph`] is always valid: it can only be obtained through
//! [`build_graph`] (or [`RawGraph::into_graph`]), which rejects self-loops,
//! duplicate neighbors, asymmetric arcs, mismatched arc weights and
//! non-positive edge weights. Unvalidated arrays live in [`RawGraph`], which
//! is what the file parser and the graph checker operate on.

mod metrics;
mod partition;
mod validate;

pub use metrics::{boundary_nodes, check_balance, comm_volume, edge_cut, pair_cut, QualityReport};
pub use partition::{project, BalanceSpec, Partition};
pub use validate::{StructuralError, ValidationVerdict, Violation};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type BlockId = usize;
pub type Weight = u64;

/// Undirected graph with node and edge weights in CSR form.
///
/// Every undirected edge `{u, v}` is stored twice, once in the adjacency
/// range of `u` and once in that of `v`, with identical weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    xadj: Vec<usize>,
    adjncy: Vec<NodeId>,
    node_weight: Vec<Weight>,
    edge_weight: Vec<Weight>,
}

/// CSR arrays that have not been validated yet.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawGraph {
    pub xadj: Vec<usize>,
    pub adjncy: Vec<usize>,
    pub node_weight: Vec<Weight>,
    pub edge_weight: Vec<Weight>,
}

impl RawGraph {
    /// Unit weights are filled in for absent weight arrays.
    pub fn new(
        xadj: Vec<usize>,
        adjncy: Vec<usize>,
        node_weights: Option<Vec<Weight>>,
        edge_weights: Option<Vec<Weight>>,
    ) -> Self {
        let n = xadj.len().saturating_sub(1);
        let arcs = adjncy.len();
        RawGraph {
            xadj,
            adjncy,
            node_weight: node_weights.unwrap_or_else(|| vec![1; n]),
            edge_weight: edge_weights.unwrap_or_else(|| vec![1; arcs]),
        }
    }

    pub fn n(&self) -> usize {
        self.xadj.len().saturating_sub(1)
    }

    /// Checks every structural rule and returns all violations found.
    ///
    /// `declared_n` / `declared_m` are the counts announced by a file header;
    /// pass `None` to skip the corresponding comparison.
    pub fn validate(&self, declared_n: Option<usize>, declared_m: Option<usize>) -> ValidationVerdict {
        validate::validate_raw(self, declared_n, declared_m)
    }

    /// Validates and converts into a [`Graph`], failing on the first violation.
    pub fn into_graph(self) -> Result<Graph> {
        if let Some(first) = validate::first_violation(&self) {
            return Err(Error::Structural(first));
        }
        Ok(Graph {
            xadj: self.xadj,
            adjncy: self.adjncy,
            node_weight: self.node_weight,
            edge_weight: self.edge_weight,
        })
    }
}

/// Builds a validated graph from CSR arrays; absent weights default to 1.
pub fn build_graph(
    n: usize,
    xadj: Vec<usize>,
    adjncy: Vec<usize>,
    node_weights: Option<Vec<Weight>>,
    edge_weights: Option<Vec<Weight>>,
) -> Result<Graph> {
    if xadj.len() != n + 1 {
        return Err(StructuralError::OffsetInconsistency(format!(
            "xadj has length {} but n + 1 = {}",
            xadj.len(),
            n + 1
        ))
        .into());
    }
    RawGraph::new(xadj, adjncy, node_weights, edge_weights).into_graph()
}

impl Graph {
    /// Builds a graph from an undirected edge list `(u, v, weight)`.
    ///
    /// Each edge must be listed once; the reverse arc is added automatically.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId, Weight)]) -> Result<Graph> {
        Self::from_weighted_edges(vec![1; n], edges)
    }

    pub fn from_weighted_edges(node_weights: Vec<Weight>, edges: &[(NodeId, NodeId, Weight)]) -> Result<Graph> {
        let n = node_weights.len();
        let mut adj: Vec<Vec<(NodeId, Weight)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(StructuralError::NeighborOutOfRange {
                    node: u.min(v),
                    neighbor: u.max(v),
                }
                .into());
            }
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        let mut xadj = Vec::with_capacity(n + 1);
        let mut adjncy = Vec::with_capacity(2 * edges.len());
        let mut edge_weight = Vec::with_capacity(2 * edges.len());
        xadj.push(0);
        for list in &mut adj {
            list.sort_unstable();
            for &(v, w) in list.iter() {
                adjncy.push(v);
                edge_weight.push(w);
            }
            xadj.push(adjncy.len());
        }
        RawGraph {
            xadj,
            adjncy,
            node_weight: node_weights,
            edge_weight,
        }
        .into_graph()
    }

    pub fn n(&self) -> usize {
        self.xadj.len() - 1
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.adjncy.len() / 2
    }

    pub fn xadj(&self) -> &[usize] {
        &self.xadj
    }

    pub fn adjncy(&self) -> &[NodeId] {
        &self.adjncy
    }

    pub fn node_weights(&self) -> &[Weight] {
        &self.node_weight
    }

    pub fn edge_weights(&self) -> &[Weight] {
        &self.edge_weight
    }

    #[inline]
    pub fn node_weight(&self, v: NodeId) -> Weight {
        self.node_weight[v]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }

    /// Arc index range of `v` into `adjncy` / `edge_weights`.
    #[inline]
    pub fn arcs(&self, v: NodeId) -> std::ops::Range<usize> {
        self.xadj[v]..self.xadj[v + 1]
    }

    /// Neighbors of `v` with the weight of the connecting edge.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = (NodeId, Weight)> + '_ {
        self.arcs(v).map(move |e| (self.adjncy[e], self.edge_weight[e]))
    }

    /// Sum of incident edge weights.
    pub fn weighted_degree(&self, v: NodeId) -> Weight {
        self.edge_weight[self.arcs(v)].iter().sum()
    }

    pub fn total_node_weight(&self) -> Weight {
        self.node_weight.iter().sum()
    }

    pub fn max_node_weight(&self) -> Weight {
        self.node_weight.iter().copied().max().unwrap_or(0)
    }

    pub fn has_unit_node_weights(&self) -> bool {
        self.node_weight.iter().all(|&w| w == 1)
    }

    pub fn has_unit_edge_weights(&self) -> bool {
        self.edge_weight.iter().all(|&w| w == 1)
    }

    /// Each undirected edge once, as `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, Weight)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Copy of this graph whose node weights are `c(v) + deg_w(v)`, the
    /// weight model used when edges are balanced together with nodes.
    pub fn with_edge_balanced_weights(&self) -> Graph {
        let node_weight = (0..self.n())
            .map(|v| self.node_weight[v] + self.weighted_degree(v))
            .collect();
        Graph {
            node_weight,
            ..self.clone()
        }
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            xadj: self.xadj.clone(),
            adjncy: self.adjncy.clone(),
            node_weight: self.node_weight.clone(),
            edge_weight: self.edge_weight.clone(),
        }
    }

    /// Validates the graph against declared counts.
    pub fn validate(&self, declared_n: usize, declared_m: usize) -> ValidationVerdict {
        validate::validate_raw(&self.to_raw(), Some(declared_n), Some(declared_m))
    }
}

/// Contracts every cluster into one coarse node.
///
/// `cluster_of` must use every id in `0..n'` at least once. Coarse node
/// weights are member sums, parallel coarse edges are merged by summing their
/// weights, and intra-cluster edges disappear. Coarse adjacency lists are
/// sorted by neighbor id. Returns the coarse graph and the fine-to-coarse
/// mapping (a copy of `cluster_of`).
pub fn contract(g: &Graph, cluster_of: &[usize]) -> Result<(Graph, Vec<usize>)> {
    let n = g.n();
    if cluster_of.len() != n {
        return Err(Error::InvalidClustering(format!(
            "clustering covers {} nodes, graph has {}",
            cluster_of.len(),
            n
        )));
    }
    let coarse_n = cluster_of.iter().map(|&c| c + 1).max().unwrap_or(0);
    let mut members_start = vec![0usize; coarse_n + 1];
    for &c in cluster_of {
        members_start[c + 1] += 1;
    }
    if let Some(empty) = (0..coarse_n).find(|&c| members_start[c + 1] == 0) {
        return Err(Error::InvalidClustering(format!(
            "cluster ids are not contiguous: id {empty} is unused"
        )));
    }
    for c in 0..coarse_n {
        members_start[c + 1] += members_start[c];
    }
    let mut fill = members_start.clone();
    let mut members = vec![0usize; n];
    for (v, &c) in cluster_of.iter().enumerate() {
        members[fill[c]] = v;
        fill[c] += 1;
    }

    let mut xadj = Vec::with_capacity(coarse_n + 1);
    let mut adjncy = Vec::new();
    let mut edge_weight = Vec::new();
    let mut node_weight = vec![0; coarse_n];
    let mut acc: Vec<Weight> = vec![0; coarse_n];
    let mut touched: Vec<usize> = Vec::new();
    xadj.push(0);
    for c in 0..coarse_n {
        for &v in &members[members_start[c]..members_start[c + 1]] {
            node_weight[c] += g.node_weight(v);
            for (u, w) in g.neighbors(v) {
                let cu = cluster_of[u];
                if cu == c {
                    continue;
                }
                if acc[cu] == 0 {
                    touched.push(cu);
                }
                acc[cu] += w;
            }
        }
        touched.sort_unstable();
        for &cu in &touched {
            adjncy.push(cu);
            edge_weight.push(acc[cu]);
            acc[cu] = 0;
        }
        touched.clear();
        xadj.push(adjncy.len());
    }
    let coarse = Graph {
        xadj,
        adjncy,
        node_weight,
        edge_weight,
    };
    Ok((coarse, cluster_of.to_vec()))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The five-node example graph used throughout the tests.
    pub(crate) fn five_nodes() -> Graph {
        build_graph(
            5,
            vec![0, 2, 5, 7, 9, 12],
            vec![1, 4, 0, 2, 4, 1, 3, 2, 4, 0, 1, 3],
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn builds_example_graph() {
        let g = five_nodes();
        assert_eq!(g.n(), 5);
        assert_eq!(g.m(), 6);
        assert!(g.has_unit_node_weights());
        assert!(g.has_unit_edge_weights());
        assert_eq!(g.total_node_weight(), 5);
    }

    #[test]
    fn single_node_without_edges() {
        let g = build_graph(1, vec![0, 0], vec![], None, None).unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.m(), 0);
    }

    #[test]
    fn rejects_asymmetric_arc() {
        let err = build_graph(2, vec![0, 1, 1], vec![1], None, None).unwrap_err();
        match err {
            Error::Structural(StructuralError::AsymmetricArc { from: 0, to: 1 }) => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_self_loop_and_duplicates() {
        let err = build_graph(1, vec![0, 1], vec![0], None, None).unwrap_err();
        assert!(matches!(err, Error::Structural(StructuralError::SelfLoop { node: 0 })));
        let err = build_graph(2, vec![0, 2, 4], vec![1, 1, 0, 0], None, None).unwrap_err();
        assert!(matches!(
            err,
            Error::Structural(StructuralError::DuplicateNeighbor { node: 0, neighbor: 1 })
        ));
    }

    #[test]
    fn rejects_weight_mismatch() {
        let err = build_graph(2, vec![0, 1, 2], vec![1, 0], None, Some(vec![2, 3])).unwrap_err();
        assert!(matches!(err, Error::Structural(StructuralError::WeightMismatch { .. })));
    }

    #[test]
    fn rejects_bad_offsets() {
        let err = build_graph(2, vec![0, 2, 1], vec![1, 0], None, None).unwrap_err();
        assert!(matches!(
            err,
            Error::Structural(StructuralError::OffsetInconsistency(_))
        ));
    }

    #[test]
    fn contract_merges_parallel_edges() {
        let g = five_nodes();
        let (c, mapping) = contract(&g, &[0, 0, 1, 1, 2]).unwrap();
        assert_eq!(mapping, vec![0, 0, 1, 1, 2]);
        assert_eq!(c.node_weights(), &[2, 2, 1]);
        let edges: Vec<_> = c.edges().collect();
        assert_eq!(edges, vec![(0, 1, 1), (0, 2, 2), (1, 2, 1)]);
        assert!(c.validate(3, 3).is_ok());
    }

    #[test]
    fn contract_identity_and_total_collapse() {
        let g = five_nodes();
        let (same, _) = contract(&g, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(same, g);
        let (one, _) = contract(&g, &[0; 5]).unwrap();
        assert_eq!(one.n(), 1);
        assert_eq!(one.m(), 0);
        assert_eq!(one.node_weights(), &[5]);
    }

    #[test]
    fn contract_rejects_gaps() {
        let g = five_nodes();
        assert!(matches!(
            contract(&g, &[0, 0, 2, 2, 2]),
            Err(Error::InvalidClustering(_))
        ));
    }

    #[test]
    fn edge_balanced_weights_add_degree() {
        let g = five_nodes();
        let b = g.with_edge_balanced_weights();
        assert_eq!(b.node_weights(), &[3, 4, 3, 3, 4]);
    }
}
