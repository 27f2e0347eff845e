use std::fmt;

use thiserror::Error;

use super::RawGraph;

/// The first structural problem that prevents building a [`super::Graph`].
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum StructuralError {
    #[error("offset inconsistency: {0}")]
    OffsetInconsistency(String),
    #[error("neighbor {neighbor} of node {node} is out of range")]
    NeighborOutOfRange { node: usize, neighbor: usize },
    #[error("self-loop at node {node}")]
    SelfLoop { node: usize },
    #[error("duplicate neighbor {neighbor} of node {node} (parallel edge)")]
    DuplicateNeighbor { node: usize, neighbor: usize },
    #[error("edge ({u},{v}) has non-positive weight")]
    NonPositiveEdgeWeight { u: usize, v: usize },
    #[error("asymmetric arc ({from},{to}): backward edge is missing")]
    AsymmetricArc { from: usize, to: usize },
    #[error(
        "weight mismatch on ({u},{v}): forward and backward edges have different weights ({forward} vs {backward})"
    )]
    WeightMismatch {
        u: usize,
        v: usize,
        forward: u64,
        backward: u64,
    },
    #[error("node count mismatch: declared {declared}, found {found}")]
    NodeCountMismatch { declared: usize, found: usize },
    #[error("edge count mismatch: declared {declared}, found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
}

/// A single finding of [`RawGraph::validate`]; violations are data.
pub type Violation = StructuralError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationVerdict {
    pub violations: Vec<Violation>,
}

impl ValidationVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "OK");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn offsets_problem(g: &RawGraph) -> Option<StructuralError> {
    let bad = |msg: String| Some(StructuralError::OffsetInconsistency(msg));
    if g.xadj.is_empty() {
        return bad("xadj is empty".into());
    }
    if g.xadj[0] != 0 {
        return bad(format!("xadj[0] = {}", g.xadj[0]));
    }
    if let Some(i) = g.xadj.windows(2).position(|w| w[0] > w[1]) {
        return bad(format!("xadj decreases at index {}", i + 1));
    }
    let n = g.n();
    if g.xadj[n] != g.adjncy.len() {
        return bad(format!(
            "xadj[n] = {} but adjncy has {} entries",
            g.xadj[n],
            g.adjncy.len()
        ));
    }
    if g.node_weight.len() != n {
        return bad(format!("{} node weights for {n} nodes", g.node_weight.len()));
    }
    if g.edge_weight.len() != g.adjncy.len() {
        return bad(format!(
            "{} edge weights for {} arcs",
            g.edge_weight.len(),
            g.adjncy.len()
        ));
    }
    None
}

/// Per-node checks in node order; `emit` returns false to stop early.
fn scan(g: &RawGraph, mut emit: impl FnMut(StructuralError) -> bool) {
    if let Some(err) = offsets_problem(g) {
        emit(err);
        return;
    }
    let n = g.n();
    // Sorted (neighbor, weight) copies make reverse-arc lookups a binary search.
    let sorted: Vec<Vec<(usize, u64)>> = (0..n)
        .map(|v| {
            let mut list: Vec<(usize, u64)> = (g.xadj[v]..g.xadj[v + 1])
                .map(|e| (g.adjncy[e], g.edge_weight[e]))
                .collect();
            list.sort_unstable();
            list
        })
        .collect();
    for v in 0..n {
        let list = &sorted[v];
        for (i, &(u, w)) in list.iter().enumerate() {
            let found = if u >= n {
                Some(StructuralError::NeighborOutOfRange { node: v, neighbor: u })
            } else if u == v {
                Some(StructuralError::SelfLoop { node: v })
            } else if i > 0 && list[i - 1].0 == u {
                Some(StructuralError::DuplicateNeighbor { node: v, neighbor: u })
            } else if w == 0 {
                Some(StructuralError::NonPositiveEdgeWeight { u: v, v: u })
            } else {
                let back = &sorted[u];
                let pos = back.partition_point(|&(x, _)| x < v);
                match back.get(pos) {
                    Some(&(x, bw)) if x == v => {
                        // Report each mismatching pair once.
                        if bw != w && v < u {
                            Some(StructuralError::WeightMismatch {
                                u: v,
                                v: u,
                                forward: w,
                                backward: bw,
                            })
                        } else {
                            None
                        }
                    }
                    _ => Some(StructuralError::AsymmetricArc { from: v, to: u }),
                }
            };
            if let Some(err) = found {
                if !emit(err) {
                    return;
                }
            }
        }
    }
}

pub(super) fn first_violation(g: &RawGraph) -> Option<StructuralError> {
    let mut first = None;
    scan(g, |err| {
        first = Some(err);
        false
    });
    first
}

pub(super) fn validate_raw(g: &RawGraph, declared_n: Option<usize>, declared_m: Option<usize>) -> ValidationVerdict {
    let mut violations = Vec::new();
    scan(g, |err| {
        violations.push(err);
        true
    });
    let found_n = g.n();
    if let Some(declared) = declared_n {
        if declared != found_n {
            violations.push(StructuralError::NodeCountMismatch {
                declared,
                found: found_n,
            });
        }
    }
    if let Some(declared) = declared_m {
        let arcs = g.adjncy.len();
        if !arcs.is_multiple_of(2) || declared != arcs / 2 {
            violations.push(StructuralError::EdgeCountMismatch {
                declared,
                found: arcs / 2,
            });
        }
    }
    ValidationVerdict { violations }
}
