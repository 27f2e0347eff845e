mod support;

use gpart::evolutionary::{combine, Individual, Objective};
use gpart::initial::best_of;
use gpart::io::{parse_graph, read_partition, write_graph, write_partition};
use gpart::refinement::{
    enforce_balance, flow_refine_pair, fm_refine, label_prop_refine, max_flow_min_cut, multi_try_fm, rebalance,
    refine_all_pairs, FmConfig, GainTable, StopRule,
};
use gpart::rng::{seeded, PartRng};
use gpart::separator::{
    kway_separator, min_vertex_cover_with_matching, separator_from_bipartition, BoundaryBipartiteGraph,
};
use gpart::{edge_cut, BalanceSpec, Graph, Partition, Preconfiguration};
use proptest::prelude::*;
use rand::Rng;
use support::*;

/// Random graph with a feasible partition.
fn instance(seed: u64, n: usize, k: usize, weighted_edges: bool) -> (Graph, Partition, BalanceSpec, PartRng) {
    let mut rng = seeded(seed);
    let g = random_connected(&mut rng, n, 0.25, if weighted_edges { 5 } else { 1 });
    let epsilon = [0.0, 0.03, 0.1][rng.gen_range(0..3)];
    let spec = BalanceSpec::new(&g, k, epsilon, false);
    let mut p = random_partition(&mut rng, &g, k);
    enforce_balance(&g, &mut p, &spec).unwrap();
    (g, p, spec, rng)
}

fn fm_config(rng: &mut PartRng) -> FmConfig {
    FmConfig {
        stop: if rng.gen_bool(0.5) {
            StopRule::Adaptive
        } else {
            StopRule::Fixed(rng.gen_range(1..20))
        },
        plateau: rng.gen_bool(0.5),
        max_rounds: 10,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refiners_never_worsen(seed in any::<u64>(), n in 4usize..40, k in 2usize..5, weighted in any::<bool>()) {
        let (g, start, spec, mut rng) = instance(seed, n, k, weighted);
        let cut0 = edge_cut(&g, &start);
        prop_assert!(spec.is_feasible(&start));

        let cfg = fm_config(&mut rng);
        let mut p = start.clone();
        fm_refine(&g, &mut p, &spec, &cfg, &mut rng);
        prop_assert!(edge_cut(&g, &p) <= cut0 && spec.is_feasible(&p), "fm_refine");

        let mut p = start.clone();
        multi_try_fm(&g, &mut p, &spec, 3, &cfg, &mut rng);
        prop_assert!(edge_cut(&g, &p) <= cut0 && spec.is_feasible(&p), "multi_try_fm");

        let mut p = start.clone();
        let _ = flow_refine_pair(&g, &mut p, 0, 1, &spec, 3);
        prop_assert!(edge_cut(&g, &p) <= cut0 && spec.is_feasible(&p), "flow_refine_pair");

        let mut p = start.clone();
        refine_all_pairs(&g, &mut p, &spec, 3);
        prop_assert!(edge_cut(&g, &p) <= cut0 && spec.is_feasible(&p), "refine_all_pairs");

        let mut p = start.clone();
        label_prop_refine(&g, &mut p, &spec, 5, &mut rng);
        prop_assert!(edge_cut(&g, &p) <= cut0 && spec.is_feasible(&p), "label_prop_refine");

        let mut p = start.clone();
        prop_assert!(rebalance(&g, &mut p, &spec));
        prop_assert_eq!(p, start);
    }

    #[test]
    fn fm_logs_replay(seed in any::<u64>(), n in 4usize..30, k in 2usize..4) {
        let (g, start, spec, mut rng) = instance(seed, n, k, true);
        let cfg = fm_config(&mut rng);
        let mut p = start.clone();
        let logs = fm_refine(&g, &mut p, &spec, &cfg, &mut rng);
        let mut replay = start;
        for log in &logs {
            for rec in &log.moves {
                prop_assert_eq!(replay.block(rec.node), rec.from);
                replay.move_node(&g, rec.node, rec.to);
                prop_assert_eq!(edge_cut(&g, &replay), rec.cut_after);
                prop_assert_eq!(spec.is_feasible(&replay), rec.feasible_after);
            }
            for rec in log.moves[log.best_len..].iter().rev() {
                replay.move_node(&g, rec.node, rec.from);
            }
        }
        prop_assert_eq!(replay, p);
    }

    #[test]
    fn gain_table_updates_match_recomputation(seed in any::<u64>(), n in 3usize..30, k in 2usize..5) {
        let (g, mut p, _, mut rng) = instance(seed, n, k, true);
        let mut table = GainTable::compute(&g, &p);
        for _ in 0..10 {
            let v = rng.gen_range(0..n);
            let to = rng.gen_range(0..k);
            p.move_node(&g, v, to);
            table.update_after_move(&g, &p, v);
            prop_assert_eq!(&table, &GainTable::compute(&g, &p));
        }
    }

    #[test]
    fn max_flow_equals_min_cut(seed in any::<u64>(), nodes in 1usize..11) {
        let mut rng = seeded(seed);
        let corridor = random_corridor(&mut rng, nodes);
        let (value, side) = max_flow_min_cut(&corridor);
        prop_assert_eq!(value + corridor.fixed_cut, exhaustive_min_cut(&corridor));
        prop_assert_eq!(corridor.cut_weight(&side), value + corridor.fixed_cut);
    }

    #[test]
    fn konig_cover(seed in any::<u64>(), left in 1usize..8, right in 1usize..8) {
        let mut rng = seeded(seed);
        let mut b = BoundaryBipartiteGraph {
            left: (0..left).collect(),
            right: (left..left + right).collect(),
            edges: Vec::new(),
        };
        for l in 0..left {
            for r in 0..right {
                if rng.gen_bool(0.35) {
                    b.edges.push((l, r));
                }
            }
        }
        let (cover, matching) = min_vertex_cover_with_matching(&b);
        prop_assert_eq!(cover.len(), matching);
        for &(l, r) in &b.edges {
            prop_assert!(cover.contains(&b.left[l]) || cover.contains(&b.right[r]));
        }
        let mates = b.maximum_matching();
        let mut used = vec![false; right];
        for (l, m) in mates.iter().enumerate() {
            if let Some(r) = *m {
                prop_assert!(b.edges.contains(&(l, r)));
                prop_assert!(!used[r]);
                used[r] = true;
            }
        }
    }

    #[test]
    fn separator_is_minimum_and_separates(seed in any::<u64>(), n in 2usize..15) {
        let mut rng = seeded(seed);
        let g = random_connected(&mut rng, n, 0.3, 3);
        let p = random_partition(&mut rng, &g, 2);
        let s = separator_from_bipartition(&g, &p).unwrap();
        prop_assert_eq!(s.size(), min_boundary_cover(&g, &p));
        prop_assert!(s.separates(&g));
        prop_assert!(blocks_disconnected(&g, &s.assignment, 2));
    }

    #[test]
    fn kway_separator_separates(seed in any::<u64>(), n in 2usize..30, k in 2usize..6) {
        let mut rng = seeded(seed);
        let g = random_connected(&mut rng, n, 0.2, 1);
        let p = random_partition(&mut rng, &g, k);
        let s = kway_separator(&g, &p);
        prop_assert!(s.separates(&g));
        prop_assert!(blocks_disconnected(&g, &s.assignment, k));
        prop_assert!(s.separator.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn initial_partitions_are_feasible(seed in any::<u64>(), n in 2usize..40, k in 2usize..6) {
        let mut rng = seeded(seed);
        let g = random_connected(&mut rng, n, 0.15, 4);
        let spec = BalanceSpec::new(&g, k, 0.03, false);
        let p = best_of(&g, &spec, 4, &mut rng).unwrap();
        prop_assert!(spec.is_feasible(&p));
        prop_assert_eq!(p.k(), k);
    }

    #[test]
    fn enforce_balance_always_feasible(seed in any::<u64>(), n in 1usize..40, k in 1usize..6) {
        let mut rng = seeded(seed);
        let g = random_connected(&mut rng, n, 0.15, 4);
        let spec = BalanceSpec::new(&g, k, 0.0, false);
        let mut p = Partition::new(&g, k, vec![0; n]).unwrap();
        enforce_balance(&g, &mut p, &spec).unwrap();
        prop_assert!(spec.is_feasible(&p));
    }

    #[test]
    fn graph_and_partition_round_trip(seed in any::<u64>(), n in 1usize..30, weighted in any::<bool>()) {
        let mut rng = seeded(seed);
        let mut g = random_connected(&mut rng, n, 0.2, if weighted { 7 } else { 1 });
        if weighted {
            g = with_node_weights(&mut rng, &g, 5);
        }
        let mut text = Vec::new();
        write_graph(&g, &mut text).unwrap();
        prop_assert_eq!(&parse_graph(text.as_slice()).unwrap(), &g);

        let p = random_partition(&mut rng, &g, 3);
        let mut text = Vec::new();
        write_partition(&p, &mut text).unwrap();
        prop_assert_eq!(read_partition(text.as_slice(), &g, 3).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn combine_never_worse_than_parents(seed in any::<u64>(), n in 6usize..40, k in 2usize..4) {
        let (g, p1, spec, mut rng) = instance(seed, n, k, true);
        let mut p2 = random_partition(&mut rng, &g, k);
        enforce_balance(&g, &mut p2, &spec).unwrap();
        let a = Individual::new(&g, p1, Objective::Cut);
        let b = Individual::new(&g, p2, Objective::Cut);
        let child = combine(&g, &spec, Preconfiguration::Fast, &a, &b, Objective::Cut, &mut rng).unwrap();
        prop_assert!(child.cut <= a.cut.min(b.cut));
        prop_assert!(spec.is_feasible(&child.partition));
    }
}
