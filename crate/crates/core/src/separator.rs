//! Node separators derived from partitions.
//!
//! For two blocks the cut edges form a bipartite graph between the boundary
//! nodes of either side. A minimum vertex cover of it is a smallest
//! separator made of boundary nodes; it is obtained from a maximum matching
//! by König's construction. The k-way separator processes block pairs in
//! ascending order, ignoring nodes that are already separator nodes.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{BlockId, Graph, NodeId, Partition};
use crate::refinement::flow::adjacent_block_pairs;

/// Cut edges between two blocks as a bipartite graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundaryBipartiteGraph {
    /// Boundary nodes of the first block, ascending.
    pub left: Vec<NodeId>,
    /// Boundary nodes of the second block, ascending.
    pub right: Vec<NodeId>,
    /// Edges as `(index into left, index into right)`.
    pub edges: Vec<(usize, usize)>,
}

impl BoundaryBipartiteGraph {
    /// Cut edges between blocks `a` and `b` of `p`, skipping nodes flagged
    /// in `excluded`.
    pub fn from_partition(g: &Graph, p: &Partition, a: BlockId, b: BlockId, excluded: &[bool]) -> Self {
        let mut left_index = vec![usize::MAX; g.n()];
        let mut right_index = vec![usize::MAX; g.n()];
        let mut bip = BoundaryBipartiteGraph::default();
        for u in 0..g.n() {
            if p.block(u) != a || excluded[u] {
                continue;
            }
            for (v, _) in g.neighbors(u) {
                if p.block(v) != b || excluded[v] {
                    continue;
                }
                if left_index[u] == usize::MAX {
                    left_index[u] = bip.left.len();
                    bip.left.push(u);
                }
                if right_index[v] == usize::MAX {
                    right_index[v] = usize::MAX - 1;
                }
                bip.edges.push((left_index[u], v));
            }
        }
        let mut right: Vec<NodeId> = (0..g.n()).filter(|&v| right_index[v] != usize::MAX).collect();
        right.sort_unstable();
        for (i, &v) in right.iter().enumerate() {
            right_index[v] = i;
        }
        for e in &mut bip.edges {
            e.1 = right_index[e.1];
        }
        bip.right = right;
        bip
    }

    fn left_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.left.len()];
        for &(l, r) in &self.edges {
            adj[l].push(r);
        }
        adj
    }

    /// Maximum matching by augmenting paths, searched breadth-first from
    /// each left vertex in index order. Returns the mate of every left
    /// vertex.
    pub fn maximum_matching(&self) -> Vec<Option<usize>> {
        let adj = self.left_adjacency();
        let mut mate_left: Vec<Option<usize>> = vec![None; self.left.len()];
        let mut mate_right: Vec<Option<usize>> = vec![None; self.right.len()];
        let mut parent_right = vec![usize::MAX; self.right.len()];
        let mut seen_round = vec![usize::MAX; self.right.len()];
        for start in 0..self.left.len() {
            let mut queue = VecDeque::from([start]);
            let mut free_end = None;
            'search: while let Some(l) = queue.pop_front() {
                for &r in &adj[l] {
                    if seen_round[r] == start {
                        continue;
                    }
                    seen_round[r] = start;
                    parent_right[r] = l;
                    match mate_right[r] {
                        None => {
                            free_end = Some(r);
                            break 'search;
                        }
                        Some(next) => queue.push_back(next),
                    }
                }
            }
            let mut r = match free_end {
                Some(r) => r,
                None => continue,
            };
            loop {
                let l = parent_right[r];
                let previous = mate_left[l];
                mate_left[l] = Some(r);
                mate_right[r] = Some(l);
                match previous {
                    Some(p) => r = p,
                    None => break,
                }
            }
        }
        mate_left
    }
}

/// Minimum vertex cover of a bipartite graph, as sorted graph node ids, and
/// the size of the maximum matching it was built from.
///
/// With `Z` the vertices reachable from unmatched left vertices along
/// alternating paths, the cover is `(left \ Z) ∪ (right ∩ Z)`.
pub fn min_vertex_cover_with_matching(b: &BoundaryBipartiteGraph) -> (Vec<NodeId>, usize) {
    let adj = b.left_adjacency();
    let mate_left = b.maximum_matching();
    let mut mate_right = vec![None; b.right.len()];
    for (l, m) in mate_left.iter().enumerate() {
        if let Some(r) = *m {
            mate_right[r] = Some(l);
        }
    }
    let mut in_z_left = vec![false; b.left.len()];
    let mut in_z_right = vec![false; b.right.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for l in 0..b.left.len() {
        if mate_left[l].is_none() {
            in_z_left[l] = true;
            queue.push_back(l);
        }
    }
    while let Some(l) = queue.pop_front() {
        for &r in &adj[l] {
            if in_z_right[r] || mate_left[l] == Some(r) {
                continue;
            }
            in_z_right[r] = true;
            if let Some(next) = mate_right[r] {
                if !in_z_left[next] {
                    in_z_left[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    let mut cover: Vec<NodeId> = (0..b.left.len())
        .filter(|&l| !in_z_left[l])
        .map(|l| b.left[l])
        .collect();
    cover.extend((0..b.right.len()).filter(|&r| in_z_right[r]).map(|r| b.right[r]));
    cover.sort_unstable();
    let matching = mate_left.iter().filter(|m| m.is_some()).count();
    debug_assert_eq!(cover.len(), matching);
    (cover, matching)
}

pub fn min_vertex_cover_bipartite(b: &BoundaryBipartiteGraph) -> Vec<NodeId> {
    min_vertex_cover_with_matching(b).0
}

/// Separator nodes and the blocks of the remaining nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorResult {
    pub k: usize,
    /// Separator nodes, ascending.
    pub separator: Vec<NodeId>,
    /// Block of every node; separator nodes carry the id `k`.
    pub assignment: Vec<usize>,
}

impl SeparatorResult {
    fn new(p: &Partition, separator: Vec<NodeId>) -> Self {
        let k = p.k();
        let mut assignment = p.assignment().to_vec();
        for &v in &separator {
            assignment[v] = k;
        }
        SeparatorResult {
            k,
            separator,
            assignment,
        }
    }

    pub fn size(&self) -> usize {
        self.separator.len()
    }

    pub fn is_separator(&self, v: NodeId) -> bool {
        self.assignment[v] == self.k
    }

    /// No edge joins two different non-separator blocks.
    pub fn separates(&self, g: &Graph) -> bool {
        g.edges().all(|(u, v, _)| {
            let (bu, bv) = (self.assignment[u], self.assignment[v]);
            bu == bv || bu == self.k || bv == self.k
        })
    }
}

/// Smallest separator of a bipartition that consists of boundary nodes.
pub fn separator_from_bipartition(g: &Graph, p: &Partition) -> Result<SeparatorResult> {
    if p.k() != 2 {
        return Err(Error::InvalidArgument(format!(
            "a bipartition is required, got {} blocks",
            p.k()
        )));
    }
    Ok(kway_separator(g, p))
}

/// Union of pairwise separators over all block pairs that share cut edges.
pub fn kway_separator(g: &Graph, p: &Partition) -> SeparatorResult {
    let mut excluded = vec![false; g.n()];
    let mut separator = Vec::new();
    for (a, b) in adjacent_block_pairs(g, p) {
        let bip = BoundaryBipartiteGraph::from_partition(g, p, a, b, &excluded);
        if bip.edges.is_empty() {
            continue;
        }
        for v in min_vertex_cover_bipartite(&bip) {
            excluded[v] = true;
            separator.push(v);
        }
    }
    separator.sort_unstable();
    SeparatorResult::new(p, separator)
}
