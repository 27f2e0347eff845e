//! Multilevel partitioning: coarsening, initial partitioning of the
//! coarsest graph, and refinement while uncoarsening, arranged as V-cycles,
//! F-cycles and time-limited iterated cycles.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::coarsening::{heavy_edge_matching_constrained, label_propagation_constrained};
use crate::error::{Error, Result};
use crate::graph::{contract, edge_cut, project, BalanceSpec, Graph, Partition, Weight};
use crate::initial::{best_of, check_node_weights};
use crate::refinement::{fm_refine, label_prop_refine, multi_try_fm, rebalance, refine_all_pairs, FmConfig, StopRule};
use crate::rng::PartRng;

/// Label propagation sweeps per coarsening level and per refinement call.
const LP_ITERATIONS: usize = 5;
/// Recursion depth of F-cycle sub-cycles.
const MAX_F_DEPTH: usize = 2;

/// Speed/quality trade-off of the partitioner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preconfiguration {
    Fast,
    Eco,
    Strong,
    FastSocial,
    EcoSocial,
    StrongSocial,
}

impl Preconfiguration {
    pub const ALL: [Preconfiguration; 6] = [
        Preconfiguration::Fast,
        Preconfiguration::Eco,
        Preconfiguration::Strong,
        Preconfiguration::FastSocial,
        Preconfiguration::EcoSocial,
        Preconfiguration::StrongSocial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preconfiguration::Fast => "fast",
            Preconfiguration::Eco => "eco",
            Preconfiguration::Strong => "strong",
            Preconfiguration::FastSocial => "fastsocial",
            Preconfiguration::EcoSocial => "ecosocial",
            Preconfiguration::StrongSocial => "strongsocial",
        }
    }

    /// Label propagation coarsening and refinement instead of matching.
    pub fn is_social(self) -> bool {
        matches!(
            self,
            Preconfiguration::FastSocial | Preconfiguration::EcoSocial | Preconfiguration::StrongSocial
        )
    }

    fn level(self) -> u8 {
        match self {
            Preconfiguration::Fast | Preconfiguration::FastSocial => 0,
            Preconfiguration::Eco | Preconfiguration::EcoSocial => 1,
            Preconfiguration::Strong | Preconfiguration::StrongSocial => 2,
        }
    }

    /// Initial partitioning attempts at the coarsest level.
    pub fn attempts(self) -> usize {
        [4, 8, 16][self.level() as usize]
    }

    /// Corridor iterations of flow refinement; zero disables it.
    pub fn flow_iterations(self) -> usize {
        [0, 3, 7][self.level() as usize]
    }

    pub fn fm_config(self) -> FmConfig {
        FmConfig {
            stop: if self.level() == 0 {
                StopRule::Fixed(15)
            } else {
                StopRule::Adaptive
            },
            plateau: self.level() == 2,
            ..FmConfig::default()
        }
    }

    /// Rounds of localized multi-try FM; zero disables it.
    pub fn multi_try_rounds(self) -> usize {
        if self.level() == 2 {
            3
        } else {
            0
        }
    }

    pub fn uses_fcycle(self) -> bool {
        self.level() == 2
    }
}

impl fmt::Display for Preconfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preconfiguration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preconfiguration::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown preconfiguration '{s}'")))
    }
}

/// One contraction step.
#[derive(Clone, Debug)]
pub struct CoarseLevel {
    pub graph: Graph,
    /// Node of the previous (finer) level -> node of this level.
    pub mapping: Vec<usize>,
    /// Group label of each node at this level, if coarsening was constrained.
    pub groups: Option<Vec<usize>>,
}

/// Coarse levels above an input graph, finest first.
#[derive(Clone, Debug, Default)]
pub struct Hierarchy {
    pub levels: Vec<CoarseLevel>,
}

impl Hierarchy {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Graph at `level`, where level 0 is `finest`.
    pub fn graph<'a>(&'a self, finest: &'a Graph, level: usize) -> &'a Graph {
        if level == 0 {
            finest
        } else {
            &self.levels[level - 1].graph
        }
    }

    pub fn coarsest<'a>(&'a self, finest: &'a Graph) -> &'a Graph {
        self.graph(finest, self.depth())
    }

    /// Maps a partition of the finest graph to the coarsest one. Every
    /// cluster must be contained in one block.
    pub fn restrict(&self, finest: &Graph, p: &Partition) -> Result<Partition> {
        let mut assignment = p.assignment().to_vec();
        for level in &self.levels {
            let mut coarse = vec![usize::MAX; level.graph.n()];
            for (v, &c) in level.mapping.iter().enumerate() {
                debug_assert!(coarse[c] == usize::MAX || coarse[c] == assignment[v]);
                coarse[c] = assignment[v];
            }
            assignment = coarse;
        }
        Partition::new(self.coarsest(finest), p.k(), assignment)
    }
}

/// Coarsening stops at this many nodes.
pub fn coarsening_limit(k: usize) -> usize {
    (40 * k).max(60)
}

/// Contracts `g` until it has at most [`coarsening_limit`] nodes or a level
/// shrinks by less than ten percent. Clusters never exceed
/// `max(ceil(c(V) / 4k), max node weight)` and never join nodes with
/// different `groups` labels.
pub fn coarsen(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    groups: Option<&[usize]>,
    rng: &mut PartRng,
) -> Hierarchy {
    let k = spec.k as Weight;
    let bound = g.total_node_weight().div_ceil(4 * k).max(g.max_node_weight());
    let limit = coarsening_limit(spec.k);
    let mut hierarchy = Hierarchy::default();
    loop {
        let (current, current_groups) = match hierarchy.levels.last() {
            Some(level) => (&level.graph, level.groups.as_deref()),
            None => (g, groups),
        };
        if current.n() <= limit {
            break;
        }
        let clustering = if pre.is_social() {
            label_propagation_constrained(current, Some(bound), LP_ITERATIONS, rng, current_groups)
        } else {
            heavy_edge_matching_constrained(current, rng, bound, current_groups)
        };
        if clustering.num_clusters() * 10 > current.n() * 9 {
            break;
        }
        if let Some(gr) = current_groups {
            debug_assert!(
                current
                    .edges()
                    .all(|(u, v, _)| gr[u] == gr[v] || clustering.cluster_of[u] != clustering.cluster_of[v]),
                "a cluster contains an edge between different groups"
            );
        }
        let (coarse, mapping) = contract(current, &clustering.cluster_of).expect("clustering ids are contiguous");
        let coarse_groups = current_groups.map(|gr| {
            let mut cg = vec![0; coarse.n()];
            for (v, &c) in mapping.iter().enumerate() {
                cg[c] = gr[v];
            }
            cg
        });
        hierarchy.levels.push(CoarseLevel {
            graph: coarse,
            mapping,
            groups: coarse_groups,
        });
    }
    hierarchy
}

/// Local search applied at every level while uncoarsening.
pub fn refine_level(g: &Graph, p: &mut Partition, spec: &BalanceSpec, pre: Preconfiguration, rng: &mut PartRng) {
    if p.k() < 2 {
        return;
    }
    if !spec.is_feasible(p) {
        rebalance(g, p, spec);
    }
    if pre.is_social() {
        label_prop_refine(g, p, spec, LP_ITERATIONS, rng);
    }
    let cfg = pre.fm_config();
    fm_refine(g, p, spec, &cfg, rng);
    if pre.flow_iterations() > 0 {
        refine_all_pairs(g, p, spec, pre.flow_iterations());
    }
    if pre.multi_try_rounds() > 0 {
        multi_try_fm(g, p, spec, pre.multi_try_rounds(), &cfg, rng);
    }
    if !spec.is_feasible(p) {
        rebalance(g, p, spec);
        fm_refine(g, p, spec, &cfg, rng);
    }
}

/// Graph whose node weights follow the weight model of `spec`, and the balance
/// constraint for that graph.
pub(crate) fn weight_model<'a>(g: &'a Graph, spec: &BalanceSpec) -> (Cow<'a, Graph>, BalanceSpec) {
    if spec.balance_edges {
        let work = g.with_edge_balanced_weights();
        let work_spec = BalanceSpec::from_total(work.total_node_weight(), spec.k, spec.epsilon);
        (Cow::Owned(work), work_spec)
    } else {
        (Cow::Borrowed(g), *spec)
    }
}

fn check_input(g: &Graph, spec: &BalanceSpec, input: Option<&Partition>) -> Result<()> {
    if let Some(p) = input {
        if p.k() != spec.k {
            return Err(Error::InvalidArgument(format!(
                "input partition has {} blocks, expected {}",
                p.k(),
                spec.k
            )));
        }
        if p.len() != g.n() {
            return Err(Error::Length {
                expected: g.n(),
                found: p.len(),
            });
        }
    }
    Ok(())
}

/// Returns the partition with block weights taken from `g`.
fn rebind(g: &Graph, p: Partition) -> Partition {
    let k = p.k();
    Partition::new(g, k, p.into_assignment()).expect("assignment covers the graph")
}

/// One cycle on a graph whose weights already follow the balance model.
///
/// `groups` constrains coarsening; `initial`, which must be constant on
/// every group, replaces initial partitioning. `f_depth` enables F-cycle
/// sub-cycles while uncoarsening.
pub(crate) fn cycle(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    rng: &mut PartRng,
    groups: Option<&[usize]>,
    initial: Option<&Partition>,
    f_depth: Option<usize>,
) -> Result<Partition> {
    check_node_weights(g, spec)?;
    if spec.k == 1 {
        return Partition::new(g, 1, vec![0; g.n()]);
    }
    let hierarchy = coarsen(g, spec, pre, groups, rng);
    let coarsest = hierarchy.coarsest(g);
    let mut p = match initial {
        Some(init) => hierarchy.restrict(g, init)?,
        None => best_of(coarsest, spec, pre.attempts(), rng)?,
    };
    refine_level(coarsest, &mut p, spec, pre, rng);
    for level in (0..hierarchy.depth()).rev() {
        let fine = hierarchy.graph(g, level);
        p = project(&p, &hierarchy.levels[level].mapping);
        if let Some(depth) = f_depth {
            if level > 0 && depth < MAX_F_DEPTH {
                let blocks = p.assignment().to_vec();
                p = cycle(fine, spec, pre, rng, Some(&blocks), Some(&p), Some(depth + 1))?;
            }
        }
        refine_level(fine, &mut p, spec, pre, rng);
    }
    Ok(p)
}

/// A single V-cycle. With an input partition its cut edges are never
/// contracted and it serves as the coarsest-level partition, so a feasible
/// input never comes back with a larger cut.
pub fn vcycle(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    rng: &mut PartRng,
    input: Option<&Partition>,
) -> Result<Partition> {
    check_input(g, spec, input)?;
    let (work, work_spec) = weight_model(g, spec);
    let blocks = input.map(|p| p.assignment().to_vec());
    let init = input.map(|p| rebind(&work, p.clone()));
    let p = cycle(&work, &work_spec, pre, rng, blocks.as_deref(), init.as_ref(), None)?;
    Ok(rebind(g, p))
}

/// A V-cycle followed by an F-shaped cycle seeded with its result: while
/// uncoarsening, every intermediate level first runs a sub-cycle on its own
/// coarser hierarchy, recursing up to a fixed depth.
pub fn fcycle(g: &Graph, spec: &BalanceSpec, pre: Preconfiguration, rng: &mut PartRng) -> Result<Partition> {
    let (work, work_spec) = weight_model(g, spec);
    let v = cycle(&work, &work_spec, pre, rng, None, None, None)?;
    let p = f_from(&work, &work_spec, pre, rng, &v)?;
    Ok(rebind(g, p))
}

fn f_from(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    rng: &mut PartRng,
    start: &Partition,
) -> Result<Partition> {
    let blocks = start.assignment().to_vec();
    cycle(g, spec, pre, rng, Some(&blocks), Some(start), Some(1))
}

/// One partitioner call as selected by the preconfiguration: an F-cycle for
/// the strong variants, a V-cycle otherwise.
pub fn run_cycle(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    rng: &mut PartRng,
    input: Option<&Partition>,
) -> Result<Partition> {
    check_input(g, spec, input)?;
    let (work, work_spec) = weight_model(g, spec);
    let p = run_cycle_work(
        &work,
        &work_spec,
        pre,
        rng,
        input.map(|p| rebind(&work, p.clone())).as_ref(),
    )?;
    Ok(rebind(g, p))
}

pub(crate) fn run_cycle_work(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    rng: &mut PartRng,
    input: Option<&Partition>,
) -> Result<Partition> {
    match (input, pre.uses_fcycle()) {
        (Some(init), true) => f_from(g, spec, pre, rng, init),
        (Some(init), false) => {
            let blocks = init.assignment().to_vec();
            cycle(g, spec, pre, rng, Some(&blocks), Some(init), None)
        }
        (None, true) => {
            let v = cycle(g, spec, pre, rng, None, None, None)?;
            f_from(g, spec, pre, rng, &v)
        }
        (None, false) => cycle(g, spec, pre, rng, None, None, None),
    }
}

/// Limits of [`iterated_cycles_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CycleOptions {
    /// Seconds; 0 runs a single cycle.
    pub time_limit: f64,
    /// Runs exactly this many cycles, ignoring the time limit.
    pub max_cycles: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct CycleReport {
    pub partition: Partition,
    /// Cut of the best partition after each cycle.
    pub trace: Vec<Weight>,
}

/// Repeats partitioner calls until the time limit, each seeded with the
/// best partition so far. A time limit of 0 makes exactly one call.
pub fn iterated_cycles(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    rng: &mut PartRng,
    time_limit: f64,
    input: Option<&Partition>,
) -> Result<Partition> {
    let opts = CycleOptions {
        time_limit,
        max_cycles: None,
    };
    iterated_cycles_with(g, spec, pre, rng, &opts, input).map(|r| r.partition)
}

pub fn iterated_cycles_with(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    rng: &mut PartRng,
    opts: &CycleOptions,
    input: Option<&Partition>,
) -> Result<CycleReport> {
    check_input(g, spec, input)?;
    let start = Instant::now();
    let (work, work_spec) = weight_model(g, spec);
    let l_max = work_spec.l_max();
    let input = input.map(|p| rebind(&work, p.clone()));
    let mut best = run_cycle_work(&work, &work_spec, pre, rng, input.as_ref())?;
    let mut best_key = (best.overload(l_max), edge_cut(&work, &best));
    let mut trace = vec![best_key.1];
    let more = |cycles: usize| match opts.max_cycles {
        Some(m) => cycles < m,
        None => opts.time_limit > 0.0 && start.elapsed().as_secs_f64() < opts.time_limit,
    };
    while more(trace.len()) {
        let p = run_cycle_work(&work, &work_spec, pre, rng, Some(&best))?;
        let key = (p.overload(l_max), edge_cut(&work, &p));
        if key < best_key {
            best = p;
            best_key = key;
        }
        log::debug!("cycle {}: cut {}", trace.len(), best_key.1);
        trace.push(best_key.1);
    }
    Ok(CycleReport {
        partition: rebind(g, best),
        trace,
    })
}
