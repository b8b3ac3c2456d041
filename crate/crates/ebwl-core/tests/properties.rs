//! Property suite: oracle equivalences against independent brute-force
//! checks, the hierarchy of the four tests, and the structural invariants of
//! stable colorings, on seeded random corpora.

mod common;

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;

use common::*;
use ebwl_core::ebgnn::{forward, init_params, relative_linf_diff, Pooling};
use ebwl_core::graph::{random_permutation, relabel};
use ebwl_core::*;

// ---------------------------------------------------------------------------
// regression pins

#[test]
fn pinned_random_graph_bytes() {
    use sha2::{Digest, Sha256};
    let g = random_graph(50, 0.15, 1).unwrap();
    assert_eq!(g.node_count(), 50);
    assert_eq!(g.undirected_edge_count(), 186);
    let mut h = Sha256::new();
    h.update(g.to_edge_list().as_bytes());
    let hex: String = h.finalize().iter().map(|b| format!("{:02x}", b)).collect();
    assert_eq!(
        hex,
        "07a0b1e809cc6d4b50a3ea61913a5ebca4f13d7e0a59bb515e7f14d15f184183"
    );
}

#[test]
fn pinned_parameter_digest() {
    let p = init_params(4, 2, 7);
    assert_eq!(
        p.digest(),
        "73b94d20ad9e9409015d9b11292ec7665212a782841ef107f5b64c640aed80e1"
    );
}

// ---------------------------------------------------------------------------
// properties

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn construction_invariants_and_round_trip(n in 4usize..50, deg in 1.5f64..8.0, seed in 0u64..1_000_000) {
        prop_assume!(seeded_graph(n, deg, seed).is_some());
        let g = seeded_graph(n, deg, seed).unwrap();
        prop_assert!(g.check_invariants());
        let text = g.to_edge_list();
        let h = Graph::parse_edge_list(&text).unwrap();
        prop_assert_eq!(text, h.to_edge_list());
    }

    #[test]
    fn triangle_enumeration_matches_cubic_brute_force(n in 4usize..60, deg in 2.0f64..8.0, seed in 0u64..1_000_000) {
        prop_assume!(seeded_graph(n, deg, seed).is_some());
        let g = seeded_graph(n, deg, seed).unwrap();
        let ts = ts_of(&g);
        let expected = brute_force_triangles(&g);
        prop_assert_eq!(ts.triangle_count(), expected.len() as u64);
        let mut found = BTreeSet::new();
        for e in 0..g.directed_edge_count() as u32 {
            let (u, v) = g.edge_endpoints(e);
            for entry in ts.common_neighbors(e) {
                let mut t = [u, v, entry.apex];
                t.sort_unstable();
                found.insert((t[0], t[1], t[2]));
            }
        }
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn degeneracy_bounded_by_max_degree(n in 4usize..50, deg in 1.5f64..8.0, seed in 0u64..1_000_000) {
        prop_assume!(seeded_graph(n, deg, seed).is_some());
        let g = seeded_graph(n, deg, seed).unwrap();
        let info = degeneracy_order(&g);
        let max_deg = (0..g.node_count() as u32).map(|v| g.degree(v)).max().unwrap() as u32;
        prop_assert!(info.degeneracy <= max_deg);
    }

    #[test]
    fn refinement_is_monotone_and_fixed_point_sound(n in 4usize..28, deg in 1.5f64..6.0, seed in 0u64..1_000_000) {
        prop_assume!(seeded_graph(n, deg, seed).is_some());
        let g = seeded_graph(n, deg, seed).unwrap();
        let ts = ts_of(&g);
        let traces = [
            run_1wl(&g, 10_000),
            run_nc1wl(&g, &ts, 10_000),
            run_eb1wl(&g, &ts, 10_000),
            run_2wl(&g, 10_000).unwrap(),
        ];
        for t in &traces {
            let stable = t.stable_round.expect("bound is generous");
            prop_assert!(stable <= t.object_count);
            for r in 1..t.rounds.len() {
                // each round refines the previous one
                prop_assert!(refines(&t.rounds[r].colors, &t.rounds[r - 1].colors));
                if r < stable {
                    prop_assert!(t.rounds[r].class_count > t.rounds[r - 1].class_count);
                }
            }
            // the confirming round left the partition unchanged
            prop_assert!(partitions_equal(
                &t.rounds[stable].colors,
                &t.rounds[stable - 1].colors
            ));
        }
    }

    #[test]
    fn hierarchy_and_stable_color_invariants(
        n1 in 6usize..20, n2 in 6usize..20, deg in 1.5f64..6.0,
        seed1 in 0u64..1_000_000, seed2 in 0u64..1_000_000, relabeled in any::<bool>(),
    ) {
        prop_assume!(seeded_graph(n1, deg, seed1).is_some());
        let g1 = seeded_graph(n1, deg, seed1).unwrap();
        let g2 = if relabeled {
            relabel(&g1, &random_permutation(g1.node_count(), seed2))
        } else {
            prop_assume!(seeded_graph(n2, deg, seed2).is_some());
            seeded_graph(n2, deg, seed2).unwrap()
        };
        check_pair_invariants(&g1, &g2).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn triangle_free_eb_degenerates_to_1wl(half in 3usize..12, p in 0.15f64..0.6, seed in 0u64..1_000_000) {
        prop_assume!(seeded_bipartite(half, p, seed).is_some());
        let g = seeded_bipartite(half, p, seed).unwrap();
        let ts = ts_of(&g);
        prop_assert_eq!(ts.triangle_count(), 0);

        // stable edge partition equals the partition by stable endpoint colors
        let eb = run_eb1wl(&g, &ts, 10_000);
        let wl = run_1wl(&g, 10_000);
        let eb_colors = eb.stable_colors();
        let pair_classes: Vec<u32> = {
            let wl_colors = wl.stable_colors();
            let mut intern: HashMap<(u32, u32), u32> = HashMap::new();
            (0..g.directed_edge_count() as u32)
                .map(|e| {
                    let (u, v) = g.edge_endpoints(e);
                    let key = (wl_colors[u as usize], wl_colors[v as usize]);
                    let next = intern.len() as u32;
                    *intern.entry(key).or_insert(next)
                })
                .collect()
        };
        prop_assert!(partitions_equal(eb_colors, &pair_classes));

        // distinguishability coincides with 1wl on triangle-free pairs
        let h = seeded_bipartite(half, p, seed.wrapping_add(99)).unwrap_or_else(|| g.clone());
        let v_eb = distinguish(&g, &h, TestKind::Eb1Wl).unwrap();
        let v_wl = distinguish(&g, &h, TestKind::OneWl).unwrap();
        prop_assert_eq!(v_eb.distinguished, v_wl.distinguished);
    }

    #[test]
    fn peo_recognizer_matches_independent_checks(n in 2usize..9, seed in 0u64..1_000_000) {
        prop_assume!(seeded_pattern(n, seed).is_some());
        let p = seeded_pattern(n, seed).unwrap();
        let ours = find_peo_tw2(&p).is_some();
        let oracle = is_chordal(&p) && is_treewidth_at_most_2(&p);
        prop_assert_eq!(ours, oracle);
    }

    #[test]
    fn peo_dp_matches_brute_force(pn in 2usize..7, pseed in 0u64..1_000_000, tn in 4usize..30, tseed in 0u64..1_000_000) {
        prop_assume!(seeded_pattern(pn, pseed).is_some());
        let pattern = seeded_pattern(pn, pseed).unwrap();
        prop_assume!(find_peo_tw2(&pattern).is_some());
        let peo = find_peo_tw2(&pattern).unwrap();
        prop_assume!(seeded_graph(tn, 4.0, tseed).is_some());
        let target = seeded_graph(tn, 4.0, tseed).unwrap();
        let ts = ts_of(&target);
        prop_assert_eq!(
            hom_count_peo(&peo, &target, &ts),
            brute_force_hom_count(&pattern, &target).unwrap()
        );
    }

    #[test]
    fn fingerprints_invariant_under_relabeling(n in 5usize..24, deg in 1.5f64..6.0, seed in 0u64..1_000_000, pseed in 0u64..1_000_000) {
        prop_assume!(seeded_graph(n, deg, seed).is_some());
        let g = seeded_graph(n, deg, seed).unwrap();
        let h = relabel(&g, &random_permutation(g.node_count(), pseed));
        for kind in [TestKind::OneWl, TestKind::Nc1Wl, TestKind::Eb1Wl, TestKind::TwoWl] {
            let a = run_stable(kind, &g, None).unwrap();
            let b = run_stable(kind, &h, None).unwrap();
            prop_assert!(b.fingerprint.is_some());
            prop_assert_eq!(a.fingerprint, b.fingerprint);
        }
    }

    #[test]
    fn gnn_forward_is_permutation_invariant(n in 5usize..20, deg in 2.0f64..6.0, seed in 0u64..100_000, pseed in 0u64..100_000) {
        prop_assume!(seeded_graph(n, deg, seed).is_some());
        let g = seeded_graph(n, deg, seed).unwrap();
        let h = relabel(&g, &random_permutation(g.node_count(), pseed));
        let params = init_params(6, 2, seed ^ 0xabcd);
        for pooling in [Pooling::Sum, Pooling::Mean, Pooling::NodeSum] {
            let a = forward(&g, &ts_of(&g), &params, pooling).unwrap();
            let b = forward(&h, &ts_of(&h), &params, pooling).unwrap();
            prop_assert!(relative_linf_diff(&a, &b) < 1e-12);
        }
    }

    // Disjoint unions of cycles with the same total size are refinement-
    // equivalent (2-regular, triangle-free) but usually non-isomorphic; the
    // network output can never exceed the edge-based test, so it must agree
    // to within rounding on every seed.
    #[test]
    fn gnn_respects_the_refinement_upper_bound(parts_seed in 0u64..100_000, wseed in 0u64..100_000) {
        let g1 = cycle_union(24, parts_seed);
        let g2 = cycle_union(24, parts_seed.wrapping_add(1));
        prop_assert!(!distinguish(&g1, &g2, TestKind::Eb1Wl).unwrap().distinguished);
        let verdicts = ebwl_core::ebgnn::gnn_distinguish(
            &g1, &ts_of(&g1), &g2, &ts_of(&g2), 8, 3, &[wseed, wseed ^ 0xff], 1e-9,
        ).unwrap();
        prop_assert!(verdicts.iter().all(|&b| !b));
    }

    // Differing homomorphism counts from a chordal treewidth-2 pattern imply
    // edge-based distinguishability.
    #[test]
    fn hom_count_gap_implies_eb_separation(
        n1 in 6usize..20, n2 in 6usize..20, deg in 2.0f64..6.0,
        seed1 in 0u64..1_000_000, seed2 in 0u64..1_000_000,
    ) {
        prop_assume!(seeded_graph(n1, deg, seed1).is_some());
        prop_assume!(seeded_graph(n2, deg, seed2).is_some());
        let g1 = seeded_graph(n1, deg, seed1).unwrap();
        let g2 = seeded_graph(n2, deg, seed2).unwrap();
        let (t1, t2) = (ts_of(&g1), ts_of(&g2));
        let eb = distinguish(&g1, &g2, TestKind::Eb1Wl).unwrap().distinguished;
        for pattern in tw2_patterns() {
            let peo = find_peo_tw2(&pattern).unwrap();
            if hom_count_peo(&peo, &g1, &t1) != hom_count_peo(&peo, &g2, &t2) {
                prop_assert!(eb, "hom counts differ but eb1wl does not separate");
            }
        }
    }
}

/// Disjoint union of cycles with part sizes >= 4 summing to `total`. Parts
/// of size 3 would be triangles and visible to the edge-based test.
fn cycle_union(total: usize, seed: u64) -> Graph {
    assert!(total >= 4);
    let mut rng = ebwl_core::rng::SplitMix64::new(seed);
    let mut edges = Vec::new();
    let mut base = 0u32;
    let mut remaining = total;
    while remaining > 0 {
        // a part of size 4..=remaining that leaves nothing or another cycle
        let len = loop {
            let cand = 4 + rng.next_below((remaining - 4 + 1) as u64) as usize;
            if remaining - cand == 0 || remaining - cand >= 4 {
                break cand;
            }
        };
        for i in 0..len as u32 {
            edges.push((base + i, base + (i + 1) % len as u32));
        }
        base += len as u32;
        remaining -= len;
    }
    Graph::from_edges(total, &edges).unwrap()
}

fn tw2_patterns() -> Vec<Graph> {
    vec![
        Graph::from_edges(2, &[(0, 1)]).unwrap(),
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(),
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap(),
        ebwl_core::homcount::two_triangles_sharing_an_edge(),
    ]
}
