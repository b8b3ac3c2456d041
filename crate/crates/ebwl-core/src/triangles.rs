//! Degeneracy ordering and triangle enumeration with per-directed-edge
//! common-neighbor tables.
//!
//! The enumeration intersects N(u) and N(v) per edge by scanning the
//! lower-degree endpoint against a membership mark array, never the
//! higher-degree one; summing min(deg u, deg v) over all edges bounds the
//! work by O(alpha * m) where alpha is the arboricity (Chiba & Nishizeki).
//! Degeneracy is the linear-time upper proxy reported for alpha.
//!
//! Each unordered triangle {u, v, y} fans out into six table entries, one per
//! directed edge of the triangle, so that the triangle-mediated aggregations
//! of the refinement and GNN layers are flat scans. Memory is O(m + t).

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::collections::BinaryHeap;

use crate::graph::Graph;

/// Greedy minimum-degree elimination order.
#[derive(Debug, Clone)]
pub struct DegeneracyInfo {
    /// Nodes in elimination order.
    pub order: Vec<u32>,
    /// `position[v]` = index of v in `order`.
    pub position: Vec<u32>,
    /// Maximum remaining degree seen at elimination time.
    pub degeneracy: u32,
}

/// One common neighbor of the endpoints of a directed edge (u, v), with the
/// ids of the two other directed edges of the triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleEntry {
    /// The common neighbor y of u and v.
    pub apex: u32,
    /// Directed edge id of (u, y).
    pub source_edge: u32,
    /// Directed edge id of (v, y).
    pub target_edge: u32,
}

/// Per-directed-edge common-neighbor lists plus the global triangle count.
#[derive(Debug, Clone)]
pub struct TriangleStore {
    offsets: Vec<u32>,
    entries: Vec<TriangleEntry>,
    triangle_count: u64,
}

impl TriangleStore {
    /// Number of unordered triangles, each counted once.
    pub fn triangle_count(&self) -> u64 {
        self.triangle_count
    }

    /// Common neighbors of the endpoints of directed edge `e`, with apexes
    /// ascending. The list for reverse(e) holds the same apexes with
    /// source/target edges swapped.
    pub fn common_neighbors(&self, e: u32) -> &[TriangleEntry] {
        &self.entries[self.offsets[e as usize] as usize..self.offsets[e as usize + 1] as usize]
    }

    /// Number of triangles containing the undirected edge behind `e`.
    pub fn edge_triangle_count(&self, e: u32) -> usize {
        (self.offsets[e as usize + 1] - self.offsets[e as usize]) as usize
    }

    /// Number of triangles containing each node.
    pub fn node_triangle_counts(&self, g: &Graph) -> Vec<u64> {
        let mut counts = vec![0u64; g.node_count()];
        for e in 0..g.directed_edge_count() as u32 {
            let (u, _) = g.edge_endpoints(e);
            // Each triangle at u is seen by both of u's directed edges into it.
            counts[u as usize] += self.edge_triangle_count(e) as u64;
        }
        for c in &mut counts {
            *c /= 2;
        }
        counts
    }
}

/// Repeated minimum-degree elimination, ties broken by smallest node id.
///
/// Uses a lazy heap keyed by (remaining degree, id): O((n + m) log n), with
/// the exact tie-break the rest of the toolkit pins its fixtures on.
pub fn degeneracy_order(g: &Graph) -> DegeneracyInfo {
    let n = g.node_count();
    let mut deg: Vec<u32> = (0..n as u32).map(|v| g.degree(v) as u32).collect();
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> = (0..n as u32)
        .map(|v| Reverse((deg[v as usize], v)))
        .collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut position = vec![0u32; n];
    let mut degeneracy = 0u32;

    while let Some(Reverse((d, v))) = heap.pop() {
        if removed[v as usize] || d != deg[v as usize] {
            continue; // stale entry
        }
        removed[v as usize] = true;
        degeneracy = degeneracy.max(d);
        position[v as usize] = order.len() as u32;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w as usize] {
                deg[w as usize] -= 1;
                heap.push(Reverse((deg[w as usize], w)));
            }
        }
    }
    DegeneracyInfo {
        order,
        position,
        degeneracy,
    }
}

/// Enumerate all triangles and materialize the per-directed-edge
/// common-neighbor tables.
pub fn enumerate_triangles(g: &Graph, info: &DegeneracyInfo) -> TriangleStore {
    let n = g.node_count();
    let two_m = g.directed_edge_count();

    // scan_side(u, v): true when u is the endpoint whose list we scan,
    // i.e. u is smaller under (degree, elimination position).
    let rank = |v: u32| (g.degree(v), info.position[v as usize]);

    // First pass: apex lists per undirected edge, keyed by the canonical
    // directed id of the scan side. marked[w] holds whether w ∈ N(mark side).
    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); two_m];
    let mut marked = vec![false; n];
    for u in 0..n as u32 {
        for &w in g.neighbors(u) {
            marked[w as usize] = true;
        }
        for &v in g.neighbors(u) {
            // u is the mark side; scan v's list only when v is strictly smaller.
            if rank(v) < rank(u) {
                let e = g.edge_id(v, u).expect("adjacent");
                for &w in g.neighbors(v) {
                    if marked[w as usize] {
                        lists[e as usize].push(w);
                    }
                }
            }
        }
        for &w in g.neighbors(u) {
            marked[w as usize] = false;
        }
    }

    // Second pass: fan each apex list out to both orientations with edge
    // cross-references. Scan lists are ascending because neighbor lists are.
    let mut counts = vec![0u32; two_m];
    let mut incidences = 0u64;
    for e in 0..two_m as u32 {
        let len = lists[e as usize].len() as u32;
        if len > 0 {
            counts[e as usize] = len;
            counts[g.edge_index().reverse(e) as usize] = len;
            incidences += len as u64;
        }
    }
    debug_assert_eq!(incidences % 3, 0);
    let triangle_count = incidences / 3;

    let mut offsets = vec![0u32; two_m + 1];
    for e in 0..two_m {
        offsets[e + 1] = offsets[e] + counts[e];
    }
    let mut entries = vec![
        TriangleEntry {
            apex: 0,
            source_edge: 0,
            target_edge: 0
        };
        offsets[two_m] as usize
    ];
    let mut cursor: Vec<u32> = offsets[..two_m].to_vec();
    for e in 0..two_m as u32 {
        if lists[e as usize].is_empty() {
            continue;
        }
        let (u, v) = g.edge_endpoints(e);
        let r = g.edge_index().reverse(e);
        for &y in &lists[e as usize] {
            let e_uy = g.edge_id(u, y).expect("triangle edge");
            let e_vy = g.edge_id(v, y).expect("triangle edge");
            entries[cursor[e as usize] as usize] = TriangleEntry {
                apex: y,
                source_edge: e_uy,
                target_edge: e_vy,
            };
            cursor[e as usize] += 1;
            entries[cursor[r as usize] as usize] = TriangleEntry {
                apex: y,
                source_edge: e_vy,
                target_edge: e_uy,
            };
            cursor[r as usize] += 1;
        }
    }
    TriangleStore {
        offsets,
        entries,
        triangle_count,
    }
}

/// Histogram of per-undirected-edge triangle counts: count -> number of edges.
pub fn edge_triangle_profile(g: &Graph, ts: &TriangleStore) -> BTreeMap<usize, usize> {
    let mut profile = BTreeMap::new();
    for e in 0..g.directed_edge_count() as u32 {
        let (u, v) = g.edge_endpoints(e);
        if u < v {
            *profile.entry(ts.edge_triangle_count(e)).or_insert(0) += 1;
        }
    }
    profile
}
