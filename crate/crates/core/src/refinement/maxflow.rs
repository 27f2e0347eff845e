//! Dinic's maximum flow on small dense-ish networks.

use std::collections::VecDeque;

use crate::graph::Weight;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: Weight,
}

/// Flow network with paired residual arcs (`arc ^ 1` is the reverse).
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.out.len()
    }

    /// Adds an undirected edge: capacity `cap` in both directions.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: Weight) {
        self.push_pair(u, v, cap, cap);
    }

    /// Adds a directed arc `u -> v`.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: Weight) {
        self.push_pair(u, v, cap, 0);
    }

    fn push_pair(&mut self, u: usize, v: usize, forward: Weight, backward: Weight) {
        self.out[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, cap: forward });
        self.out[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, cap: backward });
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.num_nodes()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.out[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && level[arc.to] == usize::MAX {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    fn augment(&mut self, u: usize, t: usize, limit: Weight, level: &[usize], next: &mut [usize]) -> Weight {
        if u == t {
            return limit;
        }
        while next[u] < self.out[u].len() {
            let a = self.out[u][next[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > 0 && level[to] == level[u] + 1 {
                let pushed = self.augment(to, t, limit.min(cap), level, next);
                if pushed > 0 {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0
    }

    /// Maximum `s`-`t` flow. Returns the flow value and the source side of
    /// a minimum cut (nodes reachable from `s` in the residual network).
    pub fn max_flow(&mut self, s: usize, t: usize) -> (Weight, Vec<bool>) {
        let mut flow = 0;
        if s != t {
            while let Some(level) = self.levels(s, t) {
                let mut next = vec![0; self.num_nodes()];
                loop {
                    let pushed = self.augment(s, t, Weight::MAX, &level, &mut next);
                    if pushed == 0 {
                        break;
                    }
                    flow += pushed;
                }
            }
        }
        let mut source_side = vec![false; self.num_nodes()];
        source_side[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.out[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && !source_side[arc.to] {
                    source_side[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        (flow, source_side)
    }

    /// Heads of the arcs leaving `u` that still have residual capacity.
    pub fn residual_successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[u]
            .iter()
            .map(|&a| &self.arcs[a])
            .filter(|arc| arc.cap > 0)
            .map(|arc| arc.to)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_path() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 1);
        net.add_arc(1, 2, 1);
        assert_eq!(net.max_flow(0, 2).0, 1);
    }

    #[test]
    fn two_disjoint_paths() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 1);
        net.add_arc(1, 3, 1);
        net.add_arc(0, 2, 1);
        net.add_arc(2, 3, 1);
        let (flow, side) = net.max_flow(0, 3);
        assert_eq!(flow, 2);
        assert_eq!(side, vec![true, false, false, false]);
    }

    #[test]
    fn bottleneck_in_undirected_network() {
        let mut net = FlowNetwork::new(4);
        net.add_edge(0, 1, 5);
        net.add_edge(1, 2, 2);
        net.add_edge(2, 3, 5);
        net.add_edge(0, 2, 1);
        let (flow, side) = net.max_flow(0, 3);
        assert_eq!(flow, 3);
        assert_eq!(side, vec![true, true, false, false]);
    }
}
