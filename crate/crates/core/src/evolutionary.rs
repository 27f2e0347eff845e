//! Evolutionary optimization over a population of partitions.
//!
//! Offspring are produced by a combine operator, a V-cycle whose coarsening
//! never contracts a cut edge of either parent and which starts from the
//! better parent, and by mutation, a V-cycle under a loosened balance
//! constraint followed by restoring the real one. Workers run on their own
//! threads with their own populations and periodically exchange their best
//! individuals through a shared buffer.

use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;

use crate::error::Result;
use crate::graph::{comm_volume, edge_cut, BalanceSpec, Graph, Partition, Weight};
use crate::multilevel::{cycle, run_cycle_work, weight_model, Preconfiguration};
use crate::refinement::{fm_refine, rebalance};
use crate::rng::{derive, PartRng};

/// Quantity minimized by the optimizer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Objective {
    /// Edge cut, then heaviest block.
    #[default]
    Cut,
    /// Maximum communication volume of a block, then edge cut.
    CommVolume,
}

/// Lexicographically ordered fitness; smaller is better.
pub type Fitness = (u64, u64);

pub fn fitness(g: &Graph, p: &Partition, objective: Objective) -> Fitness {
    match objective {
        Objective::Cut => (edge_cut(g, p), p.max_block_weight()),
        Objective::CommVolume => (comm_volume(g, p).1, edge_cut(g, p)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    pub partition: Partition,
    pub fitness: Fitness,
    pub cut: Weight,
}

impl Individual {
    pub fn new(g: &Graph, partition: Partition, objective: Objective) -> Self {
        Individual {
            fitness: fitness(g, &partition, objective),
            cut: edge_cut(g, &partition),
            partition,
        }
    }
}

/// Bounded population. When full, inserting evicts the worst individual,
/// the oldest one among equally bad ones, but never the best.
#[derive(Clone, Debug)]
pub struct Population {
    capacity: usize,
    members: Vec<(u64, Individual)>,
    next_birth: u64,
}

impl Population {
    pub fn new(capacity: usize) -> Self {
        Population {
            capacity: capacity.max(1),
            members: Vec::new(),
            next_birth: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = &Individual> {
        self.members.iter().map(|(_, ind)| ind)
    }

    fn best_index(&self) -> Option<usize> {
        (0..self.members.len()).min_by_key(|&i| (self.members[i].1.fitness, self.members[i].0))
    }

    pub fn best(&self) -> Option<&Individual> {
        self.best_index().map(|i| &self.members[i].1)
    }

    pub fn insert(&mut self, ind: Individual) {
        self.members.push((self.next_birth, ind));
        self.next_birth += 1;
        if self.members.len() > self.capacity {
            let best = self.best_index().expect("population is not empty");
            let worst = (0..self.members.len())
                .filter(|&i| i != best)
                .max_by_key(|&i| (self.members[i].1.fitness, std::cmp::Reverse(self.members[i].0)))
                .expect("capacity is at least one");
            self.members.swap_remove(worst);
        }
    }

    /// Better of two uniformly drawn members.
    pub fn tournament(&self, rng: &mut PartRng) -> &Individual {
        let a = &self.members[rng.gen_range(0..self.members.len())].1;
        let b = &self.members[rng.gen_range(0..self.members.len())].1;
        if b.fitness < a.fitness {
            b
        } else {
            a
        }
    }
}

fn combine_work(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    p1: &Individual,
    p2: &Individual,
    objective: Objective,
    rng: &mut PartRng,
) -> Result<Individual> {
    let k = spec.k;
    let groups: Vec<usize> = p1
        .partition
        .assignment()
        .iter()
        .zip(p2.partition.assignment())
        .map(|(&a, &b)| a * k + b)
        .collect();
    let start = if p2.fitness < p1.fitness { p2 } else { p1 };
    let child = cycle(g, spec, pre, rng, Some(&groups), Some(&start.partition), None)?;
    Ok(Individual::new(g, child, objective))
}

fn mutate_work(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    parent: &Individual,
    internal_bal: f64,
    objective: Objective,
    rng: &mut PartRng,
) -> Result<Individual> {
    let loose = spec.with_epsilon(spec.epsilon + internal_bal.max(0.0));
    let blocks = parent.partition.assignment().to_vec();
    let mut child = cycle(g, &loose, pre, rng, Some(&blocks), Some(&parent.partition), None)?;
    if !spec.is_feasible(&child) {
        rebalance(g, &mut child, spec);
        fm_refine(g, &mut child, spec, &pre.fm_config(), rng);
    }
    if spec.is_feasible(&child) {
        Ok(Individual::new(g, child, objective))
    } else {
        Ok(parent.clone())
    }
}

/// Offspring of two feasible parents. No cut edge of either parent is
/// contracted, and the better parent is the starting partition, so under
/// the cut objective the offspring cut never exceeds the smaller parent
/// cut.
pub fn combine(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    p1: &Individual,
    p2: &Individual,
    objective: Objective,
    rng: &mut PartRng,
) -> Result<Individual> {
    let (work, work_spec) = weight_model(g, spec);
    let rebound = |ind: &Individual| Individual {
        partition: Partition::new(&work, ind.partition.k(), ind.partition.assignment().to_vec())
            .expect("parent covers the graph"),
        ..ind.clone()
    };
    let child = combine_work(&work, &work_spec, pre, &rebound(p1), &rebound(p2), objective, rng)?;
    Ok(finish(g, child.partition, objective))
}

/// V-cycle from `parent` under the imbalance `epsilon + internal_bal`,
/// then rebalanced to the real constraint. Falls back to the parent if
/// the result cannot be made feasible.
pub fn mutate(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    parent: &Individual,
    internal_bal: f64,
    objective: Objective,
    rng: &mut PartRng,
) -> Result<Individual> {
    let (work, work_spec) = weight_model(g, spec);
    let start = Individual {
        partition: Partition::new(&work, parent.partition.k(), parent.partition.assignment().to_vec())?,
        ..parent.clone()
    };
    let child = mutate_work(&work, &work_spec, pre, &start, internal_bal, objective, rng)?;
    Ok(finish(g, child.partition, objective))
}

fn finish(g: &Graph, p: Partition, objective: Objective) -> Individual {
    let p = Partition::new(g, p.k(), p.into_assignment()).expect("partition covers the graph");
    Individual::new(g, p, objective)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub workers: usize,
    /// Seconds; 0 only builds the initial populations.
    pub time_limit: f64,
    /// Workers build a share of the initial individuals each and fill
    /// their populations from the shared pool.
    pub quickstart: bool,
    pub objective: Objective,
    /// Extra imbalance allowed inside mutation.
    pub internal_bal: f64,
    /// Population capacity per worker.
    pub population_size: usize,
    /// Generations per worker; overrides the time limit when set.
    pub max_generations: Option<usize>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            workers: 1,
            time_limit: 0.0,
            quickstart: false,
            objective: Objective::Cut,
            internal_bal: 0.01,
            population_size: 10,
            max_generations: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolveReport {
    pub best: Individual,
    /// Fitness of each worker's best individual after every generation,
    /// starting with the initial population.
    pub traces: Vec<Vec<Fitness>>,
}

const COMBINE_PROBABILITY: f64 = 0.9;
const EXCHANGE_INTERVAL: usize = 5;

/// Best individuals published by the workers, at most one slot per worker.
struct Exchange {
    slots: usize,
    pool: Mutex<Vec<Individual>>,
}

impl Exchange {
    fn publish(&self, ind: &Individual) {
        let mut pool = self.pool.lock().expect("exchange lock");
        if pool.iter().any(|other| other.partition == ind.partition) {
            return;
        }
        pool.push(ind.clone());
        pool.sort_by_key(|i| i.fitness);
        pool.truncate(self.slots);
    }

    fn pull(&self, rng: &mut PartRng) -> Option<Individual> {
        let pool = self.pool.lock().expect("exchange lock");
        (!pool.is_empty()).then(|| pool[rng.gen_range(0..pool.len())].clone())
    }

    fn all(&self) -> Vec<Individual> {
        self.pool.lock().expect("exchange lock").clone()
    }
}

struct WorkerContext<'a> {
    g: &'a Graph,
    spec: &'a BalanceSpec,
    pre: Preconfiguration,
    opts: &'a EvolveOptions,
    exchange: &'a Exchange,
    input: Option<&'a Partition>,
    start: Instant,
}

impl WorkerContext<'_> {
    fn keep_going(&self, generation: usize) -> bool {
        match self.opts.max_generations {
            Some(max) => generation < max,
            None => self.opts.time_limit > 0.0 && self.start.elapsed().as_secs_f64() < self.opts.time_limit,
        }
    }

    fn fresh(&self, rng: &mut PartRng, first: bool) -> Result<Individual> {
        let input = if first { self.input } else { None };
        let p = run_cycle_work(self.g, self.spec, self.pre, rng, input)?;
        Ok(Individual::new(self.g, p, self.opts.objective))
    }

    fn run(&self, rng: &mut PartRng) -> Result<(Individual, Vec<Fitness>)> {
        let opts = self.opts;
        let mut population = Population::new(opts.population_size);
        if opts.quickstart {
            let share = opts.population_size.div_ceil(opts.workers.max(1)).max(1);
            for i in 0..share {
                let ind = self.fresh(rng, i == 0)?;
                self.exchange.publish(&ind);
                population.insert(ind);
            }
        } else {
            for i in 0..opts.population_size {
                population.insert(self.fresh(rng, i == 0)?);
            }
        }
        let mut trace = vec![population.best().expect("non-empty").fitness];
        let mut generation = 0;
        if opts.quickstart && self.keep_going(0) {
            for ind in self.exchange.all() {
                if population.members().all(|m| m.partition != ind.partition) {
                    population.insert(ind);
                }
            }
        }
        while self.keep_going(generation) {
            let child = if population.len() >= 2 && rng.gen_bool(COMBINE_PROBABILITY) {
                let p1 = population.tournament(rng).clone();
                let p2 = population.tournament(rng).clone();
                combine_work(self.g, self.spec, self.pre, &p1, &p2, opts.objective, rng)?
            } else {
                let parent = population.tournament(rng).clone();
                mutate_work(
                    self.g,
                    self.spec,
                    self.pre,
                    &parent,
                    opts.internal_bal,
                    opts.objective,
                    rng,
                )?
            };
            population.insert(child);
            generation += 1;
            if generation % EXCHANGE_INTERVAL == 0 && opts.workers > 1 {
                self.exchange.publish(population.best().expect("non-empty"));
                if let Some(ind) = self.exchange.pull(rng) {
                    if population.members().all(|m| m.partition != ind.partition) {
                        population.insert(ind);
                    }
                }
            }
            trace.push(population.best().expect("non-empty").fitness);
        }
        log::debug!("worker finished after {generation} generations");
        Ok((population.best().expect("non-empty").clone(), trace))
    }
}

/// Runs the evolutionary optimizer and returns the best individual found
/// by any worker. The first individual of every worker improves `input`
/// when given. With one worker and a generation limit the result only
/// depends on `rng`.
pub fn evolve(
    g: &Graph,
    spec: &BalanceSpec,
    pre: Preconfiguration,
    opts: &EvolveOptions,
    input: Option<&Partition>,
    rng: &mut PartRng,
) -> Result<EvolveReport> {
    let (work, work_spec) = weight_model(g, spec);
    let input = match input {
        Some(p) => Some(Partition::new(&work, spec.k, p.assignment().to_vec())?),
        None => None,
    };
    let workers = opts.workers.max(1);
    let opts = EvolveOptions { workers, ..*opts };
    let exchange = Exchange {
        slots: workers,
        pool: Mutex::new(Vec::new()),
    };
    let ctx = WorkerContext {
        g: &work,
        spec: &work_spec,
        pre,
        opts: &opts,
        exchange: &exchange,
        input: input.as_ref(),
        start: Instant::now(),
    };
    let mut rngs: Vec<PartRng> = (0..workers).map(|_| derive(rng)).collect();
    let results: Vec<Result<(Individual, Vec<Fitness>)>> = if workers == 1 {
        vec![ctx.run(&mut rngs[0])]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = rngs
                .iter_mut()
                .map(|r| {
                    let ctx = &ctx;
                    scope.spawn(move || ctx.run(r))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let mut best: Option<Individual> = None;
    let mut traces = Vec::with_capacity(workers);
    for result in results {
        let (ind, trace) = result?;
        traces.push(trace);
        if best.as_ref().is_none_or(|b| ind.fitness < b.fitness) {
            best = Some(ind);
        }
    }
    let best = best.expect("at least one worker");
    Ok(EvolveReport {
        best: finish(g, best.partition, opts.objective),
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::five_nodes;
    use crate::rng::seeded;

    fn ind(g: &Graph, a: Vec<usize>) -> Individual {
        Individual::new(g, Partition::new(g, 2, a).unwrap(), Objective::Cut)
    }

    #[test]
    fn fitness_definitions() {
        let g = five_nodes();
        let one = Partition::new(&g, 2, vec![0; 5]).unwrap();
        assert_eq!(fitness(&g, &one, Objective::Cut), (0, 5));
        let p = Partition::new(&g, 2, vec![0, 0, 1, 1, 0]).unwrap();
        assert_eq!(fitness(&g, &p, Objective::CommVolume), (2, 2));
    }

    #[test]
    fn population_keeps_best_and_capacity() {
        let g = five_nodes();
        let mut pop = Population::new(2);
        pop.insert(ind(&g, vec![0, 0, 1, 1, 0]));
        pop.insert(ind(&g, vec![0, 1, 1, 0, 0]));
        pop.insert(ind(&g, vec![0, 1, 0, 1, 0]));
        assert_eq!(pop.len(), 2);
        assert_eq!(pop.best().unwrap().cut, 2);
        // Equal fitness: the older one goes.
        let mut pop = Population::new(2);
        pop.insert(ind(&g, vec![0, 0, 1, 1, 0]));
        pop.insert(ind(&g, vec![1, 0, 1, 0, 1]));
        pop.insert(ind(&g, vec![0, 1, 0, 1, 0]));
        let kept: Vec<_> = pop.members().map(|i| i.partition.assignment().to_vec()).collect();
        assert!(kept.contains(&vec![0, 0, 1, 1, 0]));
        assert!(kept.contains(&vec![0, 1, 0, 1, 0]));
    }

    #[test]
    fn combine_example_parents() {
        let g = five_nodes();
        let spec = BalanceSpec::new(&g, 2, 0.03, false);
        let p1 = ind(&g, vec![0, 0, 1, 1, 0]);
        let p2 = ind(&g, vec![0, 1, 1, 0, 0]);
        assert_eq!(p2.cut, 3);
        for seed in 0..5 {
            let child = combine(
                &g,
                &spec,
                Preconfiguration::Strong,
                &p1,
                &p2,
                Objective::Cut,
                &mut seeded(seed),
            )
            .unwrap();
            assert!(child.cut <= 2);
            let same = combine(
                &g,
                &spec,
                Preconfiguration::Eco,
                &p1,
                &p1,
                Objective::Cut,
                &mut seeded(seed),
            )
            .unwrap();
            assert_eq!(same.cut, 2);
        }
    }

    #[test]
    fn mutation_stays_feasible() {
        let g = five_nodes();
        let spec = BalanceSpec::new(&g, 2, 0.03, false);
        let opt = ind(&g, vec![0, 0, 1, 1, 0]);
        for seed in 0..10 {
            let m = mutate(
                &g,
                &spec,
                Preconfiguration::Eco,
                &opt,
                0.01,
                Objective::Cut,
                &mut seeded(seed),
            )
            .unwrap();
            assert!(spec.is_feasible(&m.partition));
            assert!(m.cut >= 2);
        }
    }

    #[test]
    fn evolve_example_graph() {
        let g = five_nodes();
        let spec = BalanceSpec::new(&g, 2, 0.03, false);
        let opts = EvolveOptions {
            workers: 2,
            max_generations: Some(10),
            ..EvolveOptions::default()
        };
        let r = evolve(&g, &spec, Preconfiguration::Strong, &opts, None, &mut seeded(1)).unwrap();
        assert_eq!(r.best.cut, 2);
        for trace in &r.traces {
            assert!(trace.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn zero_time_limit_builds_initial_population_only() {
        let g = five_nodes();
        let spec = BalanceSpec::new(&g, 2, 0.03, false);
        let r = evolve(
            &g,
            &spec,
            Preconfiguration::Fast,
            &EvolveOptions::default(),
            None,
            &mut seeded(0),
        )
        .unwrap();
        assert_eq!(r.traces, vec![vec![r.best.fitness]]);
        let quick = EvolveOptions {
            quickstart: true,
            workers: 3,
            ..EvolveOptions::default()
        };
        let r = evolve(&g, &spec, Preconfiguration::Fast, &quick, None, &mut seeded(0)).unwrap();
        assert_eq!(r.best.cut, 2);
    }

    #[test]
    fn single_worker_is_deterministic() {
        let g = five_nodes();
        let spec = BalanceSpec::new(&g, 2, 0.03, false);
        let opts = EvolveOptions {
            max_generations: Some(6),
            ..EvolveOptions::default()
        };
        let a = evolve(&g, &spec, Preconfiguration::Eco, &opts, None, &mut seeded(5)).unwrap();
        let b = evolve(&g, &spec, Preconfiguration::Eco, &opts, None, &mut seeded(5)).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.traces, b.traces);
    }
}
