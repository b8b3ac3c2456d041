//! Helpers shared by the property and acceptance suites: seeded corpora,
//! independent brute-force recognizers, and the per-pair invariant bundle.
#![allow(dead_code)] // each test target uses a different subset

use std::collections::{BTreeSet, HashMap};

use ebwl_core::rng::SplitMix64;
use ebwl_core::*;

pub fn ts_of(g: &Graph) -> TriangleStore {
    enumerate_triangles(g, &degeneracy_order(g))
}

/// Seeded sparse graph with the expected degree clamped to keep p in (0, 1).
pub fn seeded_graph(n: usize, expected_degree: f64, seed: u64) -> Option<Graph> {
    let p = (expected_degree / (n.saturating_sub(1)) as f64).clamp(1e-9, 0.999);
    random_graph(n, p, seed).ok()
}

/// Seeded bipartite (hence triangle-free) graph.
pub fn seeded_bipartite(half: usize, p: f64, seed: u64) -> Option<Graph> {
    let mut rng = SplitMix64::new(seed);
    let threshold = (p * 2f64.powi(64)) as u64;
    let mut edges = Vec::new();
    for i in 0..half as u32 {
        for j in 0..half as u32 {
            if rng.next_u64() < threshold {
                edges.push((i, half as u32 + j));
            }
        }
    }
    if edges.is_empty() {
        return None;
    }
    let nodes: BTreeSet<u32> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let remap: HashMap<u32, u32> = nodes
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let edges: Vec<(u32, u32)> = edges.iter().map(|&(u, v)| (remap[&u], remap[&v])).collect();
    Graph::from_edges(nodes.len(), &edges).ok()
}

/// Small pattern graph from a seeded edge mask; `None` when a node ends up
/// isolated (patterns share the no-isolated-nodes validation).
pub fn seeded_pattern(n: usize, seed: u64) -> Option<Graph> {
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.next_u64() & 1 == 1 {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).ok()
}

/// Cubic triple scan; the ground truth for triangle sets.
pub fn brute_force_triangles(g: &Graph) -> BTreeSet<(u32, u32, u32)> {
    let n = g.node_count() as u32;
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if !g.has_edge(a, b) {
                continue;
            }
            for c in b + 1..n {
                if g.has_edge(a, c) && g.has_edge(b, c) {
                    out.insert((a, b, c));
                }
            }
        }
    }
    out
}

/// Chordality by repeated simplicial-vertex elimination (any clique size).
pub fn is_chordal(g: &Graph) -> bool {
    let n = g.node_count();
    let mut adj: Vec<BTreeSet<u32>> = (0..n as u32)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive = vec![true; n];
    for _ in 0..n {
        let pick = (0..n as u32).find(|&v| {
            if !alive[v as usize] {
                return false;
            }
            let ns: Vec<u32> = adj[v as usize].iter().copied().collect();
            ns.iter()
                .enumerate()
                .all(|(i, &a)| ns[i + 1..].iter().all(|&b| adj[a as usize].contains(&b)))
        });
        match pick {
            None => return false,
            Some(v) => {
                let ns: Vec<u32> = adj[v as usize].iter().copied().collect();
                for &w in &ns {
                    adj[w as usize].remove(&v);
                }
                adj[v as usize].clear();
                alive[v as usize] = false;
            }
        }
    }
    true
}

/// Treewidth <= 2 by series-parallel reduction: repeatedly delete degree-<=1
/// vertices and smooth degree-2 vertices (adding the bypass edge).
pub fn is_treewidth_at_most_2(g: &Graph) -> bool {
    let n = g.node_count();
    let mut adj: Vec<BTreeSet<u32>> = (0..n as u32)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive = vec![true; n];
    let mut remaining = n;
    while remaining > 0 {
        let pick = (0..n as u32).find(|&v| alive[v as usize] && adj[v as usize].len() <= 2);
        match pick {
            None => return false,
            Some(v) => {
                let ns: Vec<u32> = adj[v as usize].iter().copied().collect();
                for &w in &ns {
                    adj[w as usize].remove(&v);
                }
                if let [a, b] = ns[..] {
                    adj[a as usize].insert(b);
                    adj[b as usize].insert(a);
                }
                adj[v as usize].clear();
                alive[v as usize] = false;
                remaining -= 1;
            }
        }
    }
    true
}

/// True when partition `fine` refines partition `coarse` (same index space).
pub fn refines(fine: &[u32], coarse: &[u32]) -> bool {
    let mut class_to_coarse: HashMap<u32, u32> = HashMap::new();
    fine.iter()
        .zip(coarse)
        .all(|(&f, &c)| *class_to_coarse.entry(f).or_insert(c) == c)
}

pub fn partitions_equal(a: &[u32], b: &[u32]) -> bool {
    refines(a, b) && refines(b, a)
}

/// The per-pair invariant bundle: the implication chain across the four
/// tests, reverse-edge consistency of the stable edge coloring, and recovery
/// of the node partition from edge color signatures.
pub fn check_pair_invariants(g1: &Graph, g2: &Graph) -> Result<(), String> {
    let v1 = distinguish(g1, g2, TestKind::OneWl).map_err(|e| e.to_string())?;
    let vn = distinguish(g1, g2, TestKind::Nc1Wl).map_err(|e| e.to_string())?;
    let ve = distinguish(g1, g2, TestKind::Eb1Wl).map_err(|e| e.to_string())?;
    let v2 = distinguish(g1, g2, TestKind::TwoWl).map_err(|e| e.to_string())?;
    if v1.distinguished && !vn.distinguished {
        return Err("1wl distinguished but nc1wl did not".into());
    }
    if vn.distinguished && !ve.distinguished {
        return Err("nc1wl distinguished but eb1wl did not".into());
    }
    if ve.distinguished && !v2.distinguished {
        return Err("eb1wl distinguished but 2wl did not".into());
    }

    // invariants of the shared-palette stable colorings on the union
    let (union, _) = disjoint_union(g1, g2);
    let ts = ts_of(&union);
    let eb = run_eb1wl(
        &union,
        &ts,
        theoretical_round_bound(TestKind::Eb1Wl, &union),
    );
    let nc = run_nc1wl(
        &union,
        &ts,
        theoretical_round_bound(TestKind::Nc1Wl, &union),
    );
    let eb_colors = eb.stable_colors();
    let nc_colors = nc.stable_colors();

    // reverse-edge consistency: eb(u,v) determines eb(v,u)
    let mut rev_of: HashMap<u32, u32> = HashMap::new();
    for e in 0..union.directed_edge_count() as u32 {
        let r = union.edge_index().reverse(e);
        if let Some(prev) = rev_of.insert(eb_colors[e as usize], eb_colors[r as usize]) {
            if prev != eb_colors[r as usize] {
                return Err("reverse-edge consistency violated".into());
            }
        }
    }

    // node-partition recovery: the out-signature partition refines stable nc
    let mut sig_to_nc: HashMap<Vec<u32>, u32> = HashMap::new();
    for u in 0..union.node_count() as u32 {
        let base = union.edge_id(u, union.neighbors(u)[0]).unwrap() as usize;
        let mut sig: Vec<u32> = eb_colors[base..base + union.degree(u)].to_vec();
        sig.sort_unstable();
        if let Some(prev) = sig_to_nc.insert(sig, nc_colors[u as usize]) {
            if prev != nc_colors[u as usize] {
                return Err("node-partition recovery violated".into());
            }
        }
    }
    Ok(())
}
