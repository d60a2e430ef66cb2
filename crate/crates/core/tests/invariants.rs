//! Cross-module property tests: permutation invariance, dual-route
//! agreement between independent algorithms, round-trips, and the
//! aggregation-norm inequality checked against live forward passes.

use gnncheck_core::bounds::{compute_rbar, BoundSpec};
use gnncheck_core::engines::{lu_forward_stats, ActivationSuite, GnnParams, NormCaps};
use gnncheck_core::graph::{generate_consistent_ports, validate_ports, Graph};
use gnncheck_core::io::{graph_from_str, graph_to_string};
use gnncheck_core::isomorphism::{
    are_port_locally_isomorphic, lu_refine, port_refine, verify_witness,
};
use gnncheck_core::port_agg::{aggregate, PortMessageSeq};
use gnncheck_core::properties::{
    count_cycles, enumerate_simple_cycles, girth, property_report, Extent,
};
use gnncheck_core::tree::{tree_distribution, unroll_tree};
use proptest::prelude::*;

/// Random graph on 1..=8 nodes with small integer-ish features.
fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..=8)
        .prop_flat_map(|n| {
            let max_edges = n * (n - 1) / 2;
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), max_edges),
                proptest::collection::vec(0u8..4, n),
            )
        })
        .prop_map(|(n, mask, classes)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            let features: Vec<Vec<f64>> = classes
                .iter()
                .map(|&c| {
                    let mut f = vec![0.0; 4];
                    f[c as usize] = 1.0;
                    f
                })
                .collect();
            Graph::new(features, &edges).unwrap()
        })
}

fn arb_permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_ports_always_validate(g in arb_graph(), seed in 0u64..32) {
        let ported = g.clone().with_ports(generate_consistent_ports(&g, seed)).unwrap();
        prop_assert!(validate_ports(&ported).unwrap().is_empty());
    }

    #[test]
    fn tree_distribution_is_permutation_invariant(g in arb_graph(), depth in 0usize..4) {
        let n = g.node_count();
        let perm: Vec<usize> = (0..n).rev().collect();
        let h = g.permuted(&perm).unwrap();
        let da = tree_distribution(&g, depth).unwrap();
        let db = tree_distribution(&h, depth).unwrap();
        prop_assert_eq!(da.entries.len(), db.entries.len());
        for (a, b) in da.entries.iter().zip(db.entries.iter()) {
            prop_assert_eq!(&a.key, &b.key);
            prop_assert_eq!(a.count, b.count);
        }
    }

    #[test]
    fn tree_distribution_weights_sum_to_one(g in arb_graph(), depth in 0usize..4) {
        let dist = tree_distribution(&g, depth).unwrap();
        let total: f64 = dist.entries.iter().map(|e| e.weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for e in &dist.entries {
            let scaled = e.weight * g.node_count() as f64;
            prop_assert!((scaled - scaled.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn property_oracles_are_permutation_invariant(g in arb_graph()) {
        let n = g.node_count();
        let perm: Vec<usize> = (0..n).map(|i| (i + n / 2) % n).collect();
        let h = g.permuted(&perm).unwrap();
        prop_assert_eq!(property_report(&g).unwrap(), property_report(&h).unwrap());
    }

    #[test]
    fn girth_routes_agree(g in arb_graph()) {
        // BFS-with-edge-removal vs exhaustive enumeration
        let by_bfs = girth(&g).unwrap();
        let by_enumeration = enumerate_simple_cycles(&g)
            .unwrap()
            .iter()
            .map(|c| Extent::Finite(c.vertices.len()))
            .min()
            .unwrap_or(Extent::Infinite);
        prop_assert_eq!(by_bfs, by_enumeration);
    }

    #[test]
    fn cycle_count_is_additive(a in arb_graph(), b in arb_graph()) {
        let u = a.disjoint_union(&b).unwrap();
        prop_assert_eq!(
            count_cycles(&u).unwrap(),
            count_cycles(&a).unwrap() + count_cycles(&b).unwrap()
        );
    }

    #[test]
    fn graph_files_round_trip_bit_exactly(g in arb_graph(), seed in 0u64..8) {
        let g = g.clone().with_ports(generate_consistent_ports(&g, seed)).unwrap();
        let text = graph_to_string(&g);
        let back = graph_from_str(&text).unwrap();
        prop_assert_eq!(graph_to_string(&back), text);
    }

    #[test]
    fn unroll_size_counts_walks(g in arb_graph(), depth in 0usize..4) {
        let n = g.node_count();
        let mut adjacency = vec![vec![0u64; n]; n];
        for &(u, v) in g.edges() {
            adjacency[u][v] = 1;
            adjacency[v][u] = 1;
        }
        for root in 0..n {
            let mut current = vec![0u64; n];
            current[root] = 1;
            let mut walks = 1u64;
            for _ in 0..depth {
                let mut next = vec![0u64; n];
                for i in 0..n {
                    for j in 0..n {
                        next[j] += current[i] * adjacency[i][j];
                    }
                }
                walks += next.iter().sum::<u64>();
                current = next;
            }
            let tree = unroll_tree(&g, root, depth).unwrap();
            prop_assert_eq!(tree.size() as u64, walks);
        }
    }

    #[test]
    fn ported_partition_refines_unported(g in arb_graph(), seed in 0u64..8) {
        let g = g.clone().with_ports(generate_consistent_ports(&g, seed)).unwrap();
        let ported = port_refine(&g).unwrap();
        let unported = lu_refine(&g).unwrap();
        let n = g.node_count();
        for v in 0..n {
            for u in 0..n {
                if ported.stable()[v] == ported.stable()[u] {
                    prop_assert_eq!(unported.stable()[v], unported.stable()[u]);
                }
            }
        }
    }

    #[test]
    fn graph_is_isomorphic_to_its_relabeling(g in arb_graph(), seed in 0u64..8) {
        let g = g.clone().with_ports(generate_consistent_ports(&g, seed)).unwrap();
        let n = g.node_count();
        let perm: Vec<usize> = (0..n).rev().collect();
        let h = g.permuted(&perm).unwrap();
        let (iso, witness) = are_port_locally_isomorphic(&g, &h).unwrap();
        prop_assert!(iso);
        verify_witness(&g, &h, &witness.unwrap()).unwrap();
    }

    #[test]
    fn aggregate_ignores_pair_order(items in proptest::collection::vec((1u64..=4, 1usize..=5), 0..5)) {
        // keep ports distinct
        let mut seen = std::collections::BTreeSet::new();
        let items: Vec<(u64, usize)> =
            items.into_iter().filter(|&(_, p)| seen.insert(p)).collect();
        let seq = PortMessageSeq::new(10, items.clone()).unwrap();
        let mut reversed = items;
        reversed.reverse();
        let seq_rev = PortMessageSeq::new(10, reversed).unwrap();
        prop_assert_eq!(aggregate(&seq), aggregate(&seq_rev));
    }

    #[test]
    fn aggregation_norm_respects_the_closed_form(g in arb_graph(), seed in 0u64..8) {
        let g = g.with_feature_dim(6).unwrap();
        let params = GnnParams::random(6, 3, seed, &NormCaps::default(), ActivationSuite::default());
        let (_, max_aggregate) = lu_forward_stats(&g, &params).unwrap();
        let b_x = (0..g.node_count())
            .map(|v| g.features(v).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max)
            .max(1e-9);
        let spec = BoundSpec {
            b_x,
            b_1: params.b1().max(1e-9),
            b_2: params.b2().max(1e-9),
            r: 6,
            d: g.max_degree().max(0),
            depth: 3,
            ..BoundSpec::reference()
        };
        let rbar = compute_rbar(&spec);
        prop_assert!(
            max_aggregate <= rbar * (1.0 + 1e-12),
            "aggregate {} exceeds closed form {}", max_aggregate, rbar
        );
    }
}
