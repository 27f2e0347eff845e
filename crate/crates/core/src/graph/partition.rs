use super::{BlockId, Graph, NodeId, Weight};
use crate::error::{Error, Result};

/// Assignment of every node to one of `k` blocks, with cached block weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    assignment: Vec<BlockId>,
    block_weight: Vec<Weight>,
}

impl Partition {
    pub fn new(g: &Graph, k: usize, assignment: Vec<BlockId>) -> Result<Self> {
        if assignment.len() != g.n() {
            return Err(Error::Length {
                expected: g.n(),
                found: assignment.len(),
            });
        }
        let mut block_weight = vec![0; k];
        for (v, &b) in assignment.iter().enumerate() {
            if b >= k {
                return Err(Error::BlockOutOfRange { node: v, block: b, k });
            }
            block_weight[b] += g.node_weight(v);
        }
        Ok(Partition {
            k,
            assignment,
            block_weight,
        })
    }

    /// Every node in block 0.
    pub fn single_block(g: &Graph, k: usize) -> Self {
        let mut block_weight = vec![0; k.max(1)];
        block_weight[0] = g.total_node_weight();
        Partition {
            k: k.max(1),
            assignment: vec![0; g.n()],
            block_weight,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    #[inline]
    pub fn block(&self, v: NodeId) -> BlockId {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[BlockId] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<BlockId> {
        self.assignment
    }

    #[inline]
    pub fn block_weight(&self, b: BlockId) -> Weight {
        self.block_weight[b]
    }

    pub fn block_weights(&self) -> &[Weight] {
        &self.block_weight
    }

    pub fn max_block_weight(&self) -> Weight {
        self.block_weight.iter().copied().max().unwrap_or(0)
    }

    /// Moves `v` to block `to`, keeping the weight cache coherent.
    #[inline]
    pub fn move_node(&mut self, g: &Graph, v: NodeId, to: BlockId) {
        let from = self.assignment[v];
        if from == to {
            return;
        }
        let w = g.node_weight(v);
        self.block_weight[from] -= w;
        self.block_weight[to] += w;
        self.assignment[v] = to;
    }

    /// Total weight above `l_max`, summed over blocks.
    pub fn overload(&self, l_max: Weight) -> Weight {
        self.block_weight.iter().map(|&w| w.saturating_sub(l_max)).sum()
    }

    /// Checks that the cached weights agree with `g`.
    pub fn is_coherent(&self, g: &Graph) -> bool {
        match Partition::new(g, self.k, self.assignment.clone()) {
            Ok(fresh) => fresh.block_weight == self.block_weight,
            Err(_) => false,
        }
    }
}

/// Projects a coarse partition onto the finer level through `mapping`
/// (fine node -> coarse node). Block weights carry over unchanged because
/// contraction preserves total weight per cluster.
pub fn project(coarse: &Partition, mapping: &[NodeId]) -> Partition {
    Partition {
        k: coarse.k,
        assignment: mapping.iter().map(|&c| coarse.assignment[c]).collect(),
        block_weight: coarse.block_weight.clone(),
    }
}

/// Block count, allowed imbalance and the resulting per-block weight limit.
///
/// The limit is `floor((1 + eps) * ceil(total / k))`, evaluated in integer
/// arithmetic with `eps` truncated to thousandths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BalanceSpec {
    pub k: usize,
    pub epsilon: f64,
    pub balance_edges: bool,
    total_weight: Weight,
    l_max: Weight,
}

impl BalanceSpec {
    /// `balance_edges` selects the node+edge weight model, where each node
    /// counts `c(v) + deg_w(v)`.
    pub fn new(g: &Graph, k: usize, epsilon: f64, balance_edges: bool) -> Self {
        let total = if balance_edges {
            g.total_node_weight() + g.edge_weights().iter().sum::<Weight>()
        } else {
            g.total_node_weight()
        };
        let mut spec = Self::from_total(total, k, epsilon);
        spec.balance_edges = balance_edges;
        spec
    }

    pub fn from_total(total_weight: Weight, k: usize, epsilon: f64) -> Self {
        let k = k.max(1);
        let epsilon = epsilon.max(0.0);
        let avg = total_weight.div_ceil(k as Weight);
        let milli = (epsilon * 1000.0 + 1e-9).floor() as Weight;
        let l_max = (1000 + milli) * avg / 1000;
        BalanceSpec {
            k,
            epsilon,
            balance_edges: false,
            total_weight,
            l_max,
        }
    }

    /// Same block count and weight model with a different imbalance.
    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        let mut spec = Self::from_total(self.total_weight, self.k, epsilon);
        spec.balance_edges = self.balance_edges;
        spec
    }

    #[inline]
    pub fn l_max(&self) -> Weight {
        self.l_max
    }

    /// `(1 + eps) * ceil(total / k)` without truncation, for reporting.
    pub fn l_max_fractional(&self) -> f64 {
        (1.0 + self.epsilon) * self.average_ceil() as f64
    }

    /// `ceil(total / k)`.
    pub fn average_ceil(&self) -> Weight {
        self.total_weight.div_ceil(self.k as Weight)
    }

    pub fn total_weight(&self) -> Weight {
        self.total_weight
    }

    /// Weight of `v` under this weight model.
    pub fn effective_node_weight(&self, g: &Graph, v: NodeId) -> Weight {
        if self.balance_edges {
            g.node_weight(v) + g.weighted_degree(v)
        } else {
            g.node_weight(v)
        }
    }

    pub fn is_feasible(&self, p: &Partition) -> bool {
        p.max_block_weight() <= self.l_max
    }
}
