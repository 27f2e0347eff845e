//! CSR-array entry points mirroring the classic partitioning library calls.

use crate::error::Result;
use crate::graph::{build_graph, edge_cut, BalanceSpec, Graph, Weight};
use crate::multilevel::{run_cycle, Preconfiguration};
use crate::rng::seeded;
use crate::separator::kway_separator;

/// Partitioner mode of the library calls.
pub type Mode = Preconfiguration;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KaffpaOutput {
    pub edgecut: Weight,
    /// Block of every node.
    pub part: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorOutput {
    pub num_separator_vertices: usize,
    /// Separator nodes, ascending.
    pub separator: Vec<usize>,
}

/// Silences logging while alive if requested.
struct Quiet(Option<log::LevelFilter>);

impl Quiet {
    fn new(suppress: bool) -> Self {
        if suppress {
            let previous = log::max_level();
            log::set_max_level(log::LevelFilter::Off);
            Quiet(Some(previous))
        } else {
            Quiet(None)
        }
    }
}

impl Drop for Quiet {
    fn drop(&mut self) {
        if let Some(level) = self.0 {
            log::set_max_level(level);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn partition(
    n: usize,
    vwgt: Option<&[Weight]>,
    xadj: &[usize],
    adjcwgt: Option<&[Weight]>,
    adjncy: &[usize],
    nparts: usize,
    imbalance: f64,
    balance_edges: bool,
    seed: u64,
    mode: Mode,
) -> Result<(Graph, KaffpaOutput)> {
    let g = build_graph(
        n,
        xadj.to_vec(),
        adjncy.to_vec(),
        vwgt.map(<[Weight]>::to_vec),
        adjcwgt.map(<[Weight]>::to_vec),
    )?;
    let spec = BalanceSpec::new(&g, nparts, imbalance, balance_edges);
    let p = run_cycle(&g, &spec, mode, &mut seeded(seed), None)?;
    let edgecut = edge_cut(&g, &p);
    log::info!("cut {edgecut}");
    Ok((
        g,
        KaffpaOutput {
            edgecut,
            part: p.into_assignment(),
        },
    ))
}

/// Partitions the CSR graph into `nparts` blocks with imbalance
/// `imbalance` (a fraction, e.g. 0.03).
#[allow(clippy::too_many_arguments)]
pub fn kaffpa(
    n: usize,
    vwgt: Option<&[Weight]>,
    xadj: &[usize],
    adjcwgt: Option<&[Weight]>,
    adjncy: &[usize],
    nparts: usize,
    imbalance: f64,
    suppress_output: bool,
    seed: u64,
    mode: Mode,
) -> Result<KaffpaOutput> {
    let _quiet = Quiet::new(suppress_output);
    partition(n, vwgt, xadj, adjcwgt, adjncy, nparts, imbalance, false, seed, mode).map(|r| r.1)
}

/// Like [`kaffpa`], but balances node weight plus incident edge weight.
#[allow(non_snake_case, clippy::too_many_arguments)]
pub fn kaffpa_balance_NE(
    n: usize,
    vwgt: Option<&[Weight]>,
    xadj: &[usize],
    adjcwgt: Option<&[Weight]>,
    adjncy: &[usize],
    nparts: usize,
    imbalance: f64,
    suppress_output: bool,
    seed: u64,
    mode: Mode,
) -> Result<KaffpaOutput> {
    let _quiet = Quiet::new(suppress_output);
    partition(n, vwgt, xadj, adjcwgt, adjncy, nparts, imbalance, true, seed, mode).map(|r| r.1)
}

/// Partitions the graph and returns a separator between all blocks.
#[allow(clippy::too_many_arguments)]
pub fn node_separator(
    n: usize,
    vwgt: Option<&[Weight]>,
    xadj: &[usize],
    adjcwgt: Option<&[Weight]>,
    adjncy: &[usize],
    nparts: usize,
    imbalance: f64,
    suppress_output: bool,
    seed: u64,
    mode: Mode,
) -> Result<SeparatorOutput> {
    let _quiet = Quiet::new(suppress_output);
    let (g, out) = partition(n, vwgt, xadj, adjcwgt, adjncy, nparts, imbalance, false, seed, mode)?;
    let p = crate::graph::Partition::new(&g, nparts, out.part)?;
    let s = kway_separator(&g, &p);
    Ok(SeparatorOutput {
        num_separator_vertices: s.size(),
        separator: s.separator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const XADJ: [usize; 6] = [0, 2, 5, 7, 9, 12];
    const ADJNCY: [usize; 12] = [1, 4, 0, 2, 4, 1, 3, 2, 4, 0, 1, 3];

    #[test]
    fn example_graph() {
        let out = kaffpa(5, None, &XADJ, None, &ADJNCY, 2, 0.03, true, 0, Mode::Eco).unwrap();
        assert_eq!(out.edgecut, 2);
        assert_eq!(out.part.len(), 5);
    }

    #[test]
    fn balanced_nodes_and_edges() {
        let out = kaffpa_balance_NE(5, None, &XADJ, None, &ADJNCY, 2, 0.03, true, 0, Mode::Fast).unwrap();
        assert_eq!(out.part.len(), 5);
    }

    #[test]
    fn separator_of_example_graph() {
        let out = node_separator(5, None, &XADJ, None, &ADJNCY, 2, 0.03, true, 0, Mode::Strong).unwrap();
        assert_eq!(out.num_separator_vertices, 2);
    }

    #[test]
    fn invalid_arrays_are_rejected() {
        assert!(kaffpa(5, None, &XADJ, None, &ADJNCY[..11], 2, 0.03, true, 0, Mode::Eco).is_err());
    }
}
