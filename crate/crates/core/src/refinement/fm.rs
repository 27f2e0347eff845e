//! k-way Fiduccia-Mattheyses local search.
//!
//! A search pops the node with the highest gain from a max-priority queue,
//! moves it to the block that maximizes the gain, and inserts its unmoved
//! neighbors. Each node moves at most once per search. When the stop rule
//! fires, every move after the best state seen is undone.
//!
//! States are compared lexicographically by `(overload, cut)`, where overload
//! is the total block weight above `l_max`. A feasible input therefore never
//! leaves the search infeasible or with a larger cut. Moves that overload a
//! block are allowed as long as the total overload stays within one maximum
//! node weight of the starting overload, which makes weight-neutral swaps
//! reachable even when `epsilon = 0`.

use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{boundary_nodes, edge_cut, BalanceSpec, BlockId, Graph, NodeId, Partition, Weight};
use crate::rng::PartRng;

/// When a search gives up after its last improvement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Stop after this many consecutive moves without a new best state.
    Fixed(usize),
    /// Stop once the moves since the best state exceed
    /// `100 + 20 * sqrt(moves made in this search)`.
    Adaptive,
}

impl StopRule {
    fn should_stop(&self, since_best: usize, total_moves: usize) -> bool {
        match *self {
            StopRule::Fixed(limit) => since_best >= limit,
            StopRule::Adaptive => since_best as f64 > 100.0 + 20.0 * (total_moves as f64).sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FmConfig {
    pub stop: StopRule,
    /// Always take zero-gain moves and accept equal-quality states as the
    /// new best, letting the search walk across plateaus. Without it a
    /// zero-gain move is taken with probability one half.
    pub plateau: bool,
    /// Upper bound on rounds of [`fm_refine`].
    pub max_rounds: usize,
}

impl Default for FmConfig {
    fn default() -> Self {
        FmConfig {
            stop: StopRule::Fixed(15),
            plateau: false,
            max_rounds: 25,
        }
    }
}

/// One executed move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveRecord {
    pub node: NodeId,
    pub from: BlockId,
    pub to: BlockId,
    pub cut_after: Weight,
    pub feasible_after: bool,
}

/// Moves executed by one search, including the ones rolled back.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveLog {
    pub moves: Vec<MoveRecord>,
    /// Length of the prefix that was kept.
    pub best_len: usize,
}

/// Gain `g_P(v) = w(v, P) - w(v, own block)` and the block attaining the
/// maximum over admissible targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainTable {
    pub gain: Vec<Option<(i64, BlockId)>>,
}

impl GainTable {
    /// Best unrestricted gain of every node (targets are adjacent blocks).
    pub fn compute(g: &Graph, p: &Partition) -> Self {
        let mut scratch = GainScratch::new(p.k());
        let gain = (0..g.n())
            .map(|v| scratch.best_move(g, p, v, false, |_, _| true))
            .collect();
        GainTable { gain }
    }

    /// Refreshes the entries that can change when `v` was just moved.
    pub fn update_after_move(&mut self, g: &Graph, p: &Partition, v: NodeId) {
        let mut scratch = GainScratch::new(p.k());
        self.gain[v] = scratch.best_move(g, p, v, false, |_, _| true);
        for (u, _) in g.neighbors(v) {
            self.gain[u] = scratch.best_move(g, p, u, false, |_, _| true);
        }
    }
}

struct GainScratch {
    conn: Vec<Weight>,
    touched: Vec<BlockId>,
}

impl GainScratch {
    fn new(k: usize) -> Self {
        GainScratch {
            conn: vec![0; k],
            touched: Vec::new(),
        }
    }

    /// Best admissible move of `v`; ties prefer the lower block id, or the
    /// lighter block first if `prefer_light`.
    fn best_move(
        &mut self,
        g: &Graph,
        p: &Partition,
        v: NodeId,
        prefer_light: bool,
        admissible: impl Fn(&Partition, BlockId) -> bool,
    ) -> Option<(i64, BlockId)> {
        let own = p.block(v);
        for (u, w) in g.neighbors(v) {
            let b = p.block(u);
            if self.conn[b] == 0 {
                self.touched.push(b);
            }
            self.conn[b] += w;
        }
        let own_conn = self.conn[own] as i64;
        let mut best: Option<(i64, BlockId)> = None;
        for &b in &self.touched {
            if b == own || !admissible(p, b) {
                continue;
            }
            let gain = self.conn[b] as i64 - own_conn;
            let better = match best {
                None => true,
                Some((bg, bb)) => {
                    gain > bg
                        || (gain == bg
                            && if prefer_light {
                                (p.block_weight(b), b) < (p.block_weight(bb), bb)
                            } else {
                                b < bb
                            })
                }
            };
            if better {
                best = Some((gain, b));
            }
        }
        for &b in &self.touched {
            self.conn[b] = 0;
        }
        self.touched.clear();
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct QueueEntry {
    gain: i64,
    tie: u64,
    node: NodeId,
}

/// Total overload after moving a node of weight `c` from `from` to `to`.
#[inline]
fn overload_after(p: &Partition, l_max: Weight, overload: Weight, c: Weight, from: BlockId, to: BlockId) -> Weight {
    let wf = p.block_weight(from);
    let wt = p.block_weight(to);
    overload - wf.saturating_sub(l_max) + (wf - c).saturating_sub(l_max) - wt.saturating_sub(l_max)
        + (wt + c).saturating_sub(l_max)
}

/// Reusable FM search state. Stamps avoid clearing per-node arrays between
/// searches, which matters for the many small localized searches.
pub(crate) struct FmSearch {
    l_max: Weight,
    allowance: Weight,
    cfg: FmConfig,
    scratch: GainScratch,
    stamp: u32,
    moved: Vec<u32>,
    queued: Vec<u32>,
    key: Vec<i64>,
    heap: BinaryHeap<QueueEntry>,
}

pub(crate) struct SearchOutcome {
    pub improved: bool,
    pub log: MoveLog,
}

impl FmSearch {
    pub(crate) fn new(g: &Graph, k: usize, spec: &BalanceSpec, cfg: FmConfig) -> Self {
        let n = g.n();
        FmSearch {
            l_max: spec.l_max(),
            allowance: g.max_node_weight(),
            cfg,
            scratch: GainScratch::new(k),
            stamp: 0,
            moved: vec![0; n],
            queued: vec![0; n],
            key: vec![0; n],
            heap: BinaryHeap::new(),
        }
    }

    fn candidate(
        &mut self,
        g: &Graph,
        p: &Partition,
        v: NodeId,
        overload: Weight,
        cap: Weight,
    ) -> Option<(i64, BlockId)> {
        let l_max = self.l_max;
        let c = g.node_weight(v);
        let from = p.block(v);
        self.scratch.best_move(g, p, v, true, |p, to| {
            p.block_weight(to) + c <= l_max || overload_after(p, l_max, overload, c, from, to) <= cap
        })
    }

    fn enqueue(&mut self, v: NodeId, gain: i64, rng: &mut PartRng) {
        self.queued[v] = self.stamp;
        self.key[v] = gain;
        self.heap.push(QueueEntry {
            gain,
            tie: rng.gen(),
            node: v,
        });
    }

    /// Runs one search seeded with `seeds` and rolls back to the best state.
    pub(crate) fn run(
        &mut self,
        g: &Graph,
        p: &mut Partition,
        seeds: &[NodeId],
        start_cut: Weight,
        rng: &mut PartRng,
    ) -> SearchOutcome {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.moved.fill(0);
            self.queued.fill(0);
            self.stamp = 1;
        }
        self.heap.clear();

        let l_max = self.l_max;
        let start_overload = p.overload(l_max);
        let cap = start_overload + self.allowance;
        let mut overload = start_overload;
        let mut cut = start_cut as i64;
        let mut best = (start_overload, cut);
        let mut log = MoveLog::default();
        let mut since_best = 0usize;

        for &s in seeds {
            if let Some((gain, _)) = self.candidate(g, p, s, overload, cap) {
                self.enqueue(s, gain, rng);
            }
        }

        while let Some(entry) = self.heap.pop() {
            let v = entry.node;
            if self.moved[v] == self.stamp || self.queued[v] != self.stamp || self.key[v] != entry.gain {
                continue;
            }
            let Some((gain, to)) = self.candidate(g, p, v, overload, cap) else {
                self.queued[v] = 0;
                continue;
            };
            if gain != entry.gain {
                self.enqueue(v, gain, rng);
                continue;
            }
            let c = g.node_weight(v);
            if gain == 0 {
                let fits = p.block_weight(to) + c <= l_max;
                if !fits || (!self.cfg.plateau && rng.gen_bool(0.5)) {
                    self.queued[v] = 0;
                    continue;
                }
            }
            let from = p.block(v);
            overload = overload_after(p, l_max, overload, c, from, to);
            p.move_node(g, v, to);
            self.moved[v] = self.stamp;
            self.queued[v] = 0;
            cut -= gain;
            log.moves.push(MoveRecord {
                node: v,
                from,
                to,
                cut_after: cut as Weight,
                feasible_after: overload == 0,
            });

            let state = (overload, cut);
            if state < best || (self.cfg.plateau && state == best) {
                best = state;
                log.best_len = log.moves.len();
                since_best = 0;
            } else {
                since_best += 1;
            }
            if self.cfg.stop.should_stop(since_best, log.moves.len()) {
                break;
            }

            for (u, _) in g.neighbors(v) {
                if self.moved[u] == self.stamp {
                    continue;
                }
                match self.candidate(g, p, u, overload, cap) {
                    Some((gu, _)) => {
                        if self.queued[u] != self.stamp || self.key[u] != gu {
                            self.enqueue(u, gu, rng);
                        }
                    }
                    None => self.queued[u] = 0,
                }
            }
        }

        for rec in log.moves[log.best_len..].iter().rev() {
            p.move_node(g, rec.node, rec.from);
        }
        SearchOutcome {
            improved: best < (start_overload, start_cut as i64),
            log,
        }
    }
}

/// FM refinement in rounds until a round brings no improvement.
///
/// Every round seeds the queue with all boundary nodes in random order.
/// Returns the logs of all rounds.
pub fn fm_refine(g: &Graph, p: &mut Partition, spec: &BalanceSpec, cfg: &FmConfig, rng: &mut PartRng) -> Vec<MoveLog> {
    let mut logs = Vec::new();
    if p.k() < 2 || g.n() == 0 {
        return logs;
    }
    let mut search = FmSearch::new(g, p.k(), spec, *cfg);
    let mut cut = edge_cut(g, p);
    for _ in 0..cfg.max_rounds {
        let mut seeds = boundary_nodes(g, p);
        seeds.shuffle(rng);
        let outcome = search.run(g, p, &seeds, cut, rng);
        if outcome.log.best_len > 0 {
            cut = outcome.log.moves[outcome.log.best_len - 1].cut_after;
        }
        logs.push(outcome.log);
        if !outcome.improved {
            break;
        }
    }
    logs
}

/// Localized FM: each search starts from a single boundary node.
///
/// Per round, boundary nodes are shuffled and every node that was neither a
/// seed nor moved by an earlier search of the same round seeds its own search, which rolls
/// back to its best prefix independently.
pub fn multi_try_fm(
    g: &Graph,
    p: &mut Partition,
    spec: &BalanceSpec,
    rounds: usize,
    cfg: &FmConfig,
    rng: &mut PartRng,
) -> bool {
    if p.k() < 2 || g.n() == 0 || rounds == 0 {
        return false;
    }
    let local_cfg = FmConfig {
        stop: match cfg.stop {
            StopRule::Fixed(limit) => StopRule::Fixed(limit),
            StopRule::Adaptive => StopRule::Fixed(30),
        },
        ..*cfg
    };
    let mut search = FmSearch::new(g, p.k(), spec, local_cfg);
    let mut cut = edge_cut(g, p);
    let mut improved_any = false;
    let mut touched = vec![false; g.n()];
    for _ in 0..rounds {
        touched.fill(false);
        let mut seeds = boundary_nodes(g, p);
        seeds.shuffle(rng);
        let mut improved = false;
        for s in seeds {
            if touched[s] {
                continue;
            }
            let outcome = search.run(g, p, &[s], cut, rng);
            touched[s] = true;
            for rec in &outcome.log.moves[..outcome.log.best_len] {
                touched[rec.node] = true;
            }
            if outcome.improved {
                improved = true;
                cut = outcome.log.moves[outcome.log.best_len - 1].cut_after;
            }
        }
        improved_any |= improved;
        if !improved {
            break;
        }
    }
    improved_any
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::five_nodes;
    use crate::rng::seeded;

    fn path4() -> Graph {
        Graph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap()
    }

    /// Two 4-cliques {0..3} and {4..7} joined by edges 0-4 and 1-5.
    pub(crate) fn two_cliques() -> Graph {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((base + i, base + j, 1));
                }
            }
        }
        edges.push((0, 4, 1));
        edges.push((1, 5, 1));
        Graph::from_edges(8, &edges).unwrap()
    }

    #[test]
    fn example_partition_is_left_unchanged() {
        let g = five_nodes();
        let spec = BalanceSpec::new(&g, 2, 0.03, false);
        for seed in 0..10 {
            let mut p = Partition::new(&g, 2, vec![0, 0, 1, 1, 0]).unwrap();
            fm_refine(&g, &mut p, &spec, &FmConfig::default(), &mut seeded(seed));
            assert_eq!(edge_cut(&g, &p), 2);
            assert!(spec.is_feasible(&p));
        }
    }

    #[test]
    fn optimal_path_bisection_is_kept() {
        let g = path4();
        let spec = BalanceSpec::new(&g, 2, 0.0, false);
        let mut p = Partition::new(&g, 2, vec![0, 0, 1, 1]).unwrap();
        fm_refine(&g, &mut p, &spec, &FmConfig::default(), &mut seeded(1));
        assert_eq!(p.assignment(), &[0, 0, 1, 1]);
    }

    #[test]
    fn improves_bad_path_bisection() {
        let g = path4();
        let spec = BalanceSpec::new(&g, 2, 0.0, false);
        for seed in 0..10 {
            let mut p = Partition::new(&g, 2, vec![0, 1, 1, 0]).unwrap();
            assert_eq!(edge_cut(&g, &p), 2);
            let cfg = FmConfig {
                stop: StopRule::Adaptive,
                plateau: true,
                ..FmConfig::default()
            };
            fm_refine(&g, &mut p, &spec, &cfg, &mut seeded(seed));
            assert_eq!(edge_cut(&g, &p), 1, "seed {seed}");
            assert!(spec.is_feasible(&p));
        }
    }

    #[test]
    fn rollback_replays_to_returned_partition() {
        let g = two_cliques();
        let spec = BalanceSpec::new(&g, 2, 0.0, false);
        for seed in 0..10 {
            let start = Partition::new(&g, 2, vec![0, 1, 0, 1, 1, 0, 1, 0]).unwrap();
            let mut p = start.clone();
            let logs = fm_refine(&g, &mut p, &spec, &FmConfig::default(), &mut seeded(seed));
            let mut replay = start.clone();
            for log in &logs {
                for (i, rec) in log.moves[..log.best_len].iter().enumerate() {
                    assert_eq!(replay.block(rec.node), rec.from);
                    replay.move_node(&g, rec.node, rec.to);
                    assert_eq!(edge_cut(&g, &replay), rec.cut_after, "move {i}");
                    assert_eq!(spec.is_feasible(&replay), rec.feasible_after);
                }
            }
            assert_eq!(replay, p);
            assert!(edge_cut(&g, &p) <= edge_cut(&g, &start));
        }
    }

    #[test]
    fn gain_table_incremental_matches_fresh() {
        let g = two_cliques();
        let mut p = Partition::new(&g, 3, vec![0, 1, 2, 0, 1, 2, 0, 1]).unwrap();
        let mut table = GainTable::compute(&g, &p);
        let mut rng = seeded(5);
        for _ in 0..50 {
            let v = rng.gen_range(0..g.n());
            let to = rng.gen_range(0..3);
            p.move_node(&g, v, to);
            table.update_after_move(&g, &p, v);
            assert_eq!(table, GainTable::compute(&g, &p));
        }
    }

    #[test]
    fn gain_definition() {
        let g = five_nodes();
        let p = Partition::new(&g, 2, vec![0, 0, 1, 1, 0]).unwrap();
        let t = GainTable::compute(&g, &p);
        assert_eq!(t.gain[0], None);
        assert_eq!(t.gain[1], Some((-1, 1)));
        assert_eq!(t.gain[2], Some((0, 0)));
        assert_eq!(t.gain[3], Some((0, 0)));
        assert_eq!(t.gain[4], Some((-1, 1)));
    }

    #[test]
    fn fm_repairs_swapped_pair_at_zero_imbalance() {
        let g = two_cliques();
        let spec = BalanceSpec::new(&g, 2, 0.0, false);
        // Nodes 3 and 7 are swapped; fixing it needs a temporarily
        // overloading move followed by the balancing counter-move.
        for seed in 0..10 {
            let mut p = Partition::new(&g, 2, vec![0, 0, 0, 1, 1, 1, 1, 0]).unwrap();
            assert_eq!(edge_cut(&g, &p), 8);
            fm_refine(&g, &mut p, &spec, &FmConfig::default(), &mut seeded(seed));
            assert_eq!(edge_cut(&g, &p), 2, "seed {seed}");
            assert!(spec.is_feasible(&p));
        }
    }

    #[test]
    fn multi_try_moves_misassigned_node() {
        let g = two_cliques();
        let spec = BalanceSpec::new(&g, 2, 0.25, false);
        for seed in 0..10 {
            let mut p = Partition::new(&g, 2, vec![0, 0, 0, 1, 1, 1, 1, 1]).unwrap();
            assert_eq!(edge_cut(&g, &p), 5);
            assert!(multi_try_fm(
                &g,
                &mut p,
                &spec,
                3,
                &FmConfig::default(),
                &mut seeded(seed)
            ));
            assert_eq!(edge_cut(&g, &p), 2, "seed {seed}");
            assert!(spec.is_feasible(&p));
        }
    }

    #[test]
    fn multi_try_zero_rounds_and_optimum() {
        let g = path4();
        let spec = BalanceSpec::new(&g, 2, 0.0, false);
        let mut p = Partition::new(&g, 2, vec![0, 1, 1, 0]).unwrap();
        let before = p.clone();
        multi_try_fm(&g, &mut p, &spec, 0, &FmConfig::default(), &mut seeded(0));
        assert_eq!(p, before);
        let mut p = Partition::new(&g, 2, vec![0, 0, 1, 1]).unwrap();
        multi_try_fm(&g, &mut p, &spec, 4, &FmConfig::default(), &mut seeded(0));
        assert_eq!(edge_cut(&g, &p), 1);
    }
}
