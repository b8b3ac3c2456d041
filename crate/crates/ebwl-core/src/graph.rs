//! Immutable undirected graphs in compressed sorted-adjacency form, with a
//! directed-edge index layered on top.
//!
//! Layout:
//!   offsets   = prefix sums of degrees, length n+1
//!   neighbors = concatenated sorted neighbor lists, length 2m
//!
//! Every position in `neighbors` doubles as a *directed edge id*: the id of
//! (u, v) is `offsets[u] + rank of v in N(u)`. Edge-based refinement colors
//! these 2m ids; the reverse table pairs id(u,v) with id(v,u).
//!
//! Validation is strict: adjacency must be symmetric, neighbor lists strictly
//! ascending (no self-loops, no parallel edges), and no node may be isolated.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::rng::SplitMix64;

/// Diagnostics for graph construction and edge-list parsing.
#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("malformed header on line {line}: expected `graph <n> <m>`")]
    MalformedHeader { line: usize },
    #[error("malformed edge on line {line}: expected two node ids")]
    MalformedEdge { line: usize },
    #[error("node id {id} out of range (n = {n}) on line {line}")]
    NodeOutOfRange { id: u64, n: usize, line: usize },
    #[error("self-loop at node {node} on line {line}")]
    SelfLoop { node: u32, line: usize },
    #[error("declared m = {declared} but found {found} distinct edges (duplicates collapse)")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("isolated node {node}: graphs must not have isolated nodes")]
    IsolatedNode { node: u32 },
    #[error("circulant requires n >= 3, got {n}")]
    CirculantTooSmall { n: usize },
    #[error("circulant skip {skip} out of range 1..={max} for n = {n}")]
    SkipOutOfRange { skip: usize, max: usize, n: usize },
    #[error("edge probability must lie strictly between 0 and 1, got {p}")]
    InvalidProbability { p: f64 },
    #[error("random graph with n = {n}, p = {p}, seed = {seed} has an empty edge set")]
    EmptyEdgeSet { n: usize, p: f64, seed: u64 },
}

/// Pairing of each directed edge id with its reversal, plus the source node
/// of every id (the target is the adjacency entry itself).
#[derive(Debug, Clone)]
pub struct DirectedEdgeIndex {
    sources: Vec<u32>,
    reverse: Vec<u32>,
}

impl DirectedEdgeIndex {
    /// Source node of directed edge `e`.
    pub fn source(&self, e: u32) -> u32 {
        self.sources[e as usize]
    }

    /// Id of the opposite orientation; an involution without fixed points.
    pub fn reverse(&self, e: u32) -> u32 {
        self.reverse[e as usize]
    }
}

/// Immutable undirected graph. See the module docs for the layout.
#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    index: DirectedEdgeIndex,
}

impl Graph {
    /// Build and validate a graph from an undirected edge set.
    ///
    /// Duplicate edges collapse to one; self-loops, out-of-range ids, and
    /// isolated nodes are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { node: u, line: 0 });
            }
            for id in [u, v] {
                if id as usize >= n {
                    return Err(GraphError::NodeOutOfRange {
                        id: id as u64,
                        n,
                        line: 0,
                    });
                }
            }
            set.insert((u.min(v), u.max(v)));
        }
        Self::from_edge_set(n, &set)
    }

    fn from_edge_set(n: usize, set: &BTreeSet<(u32, u32)>) -> Result<Graph, GraphError> {
        let mut directed: Vec<(u32, u32)> = Vec::with_capacity(set.len() * 2);
        for &(u, v) in set {
            directed.push((u, v));
            directed.push((v, u));
        }
        directed.sort_unstable();

        let mut offsets = vec![0u32; n + 1];
        for &(u, _) in &directed {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors: Vec<u32> = directed.iter().map(|&(_, v)| v).collect();
        let sources: Vec<u32> = directed.iter().map(|&(u, _)| u).collect();

        for v in 0..n {
            if offsets[v] == offsets[v + 1] {
                return Err(GraphError::IsolatedNode { node: v as u32 });
            }
        }

        let mut g = Graph {
            offsets,
            neighbors,
            index: DirectedEdgeIndex {
                sources,
                reverse: Vec::new(),
            },
        };
        let mut reverse = vec![0u32; g.neighbors.len()];
        for e in 0..g.neighbors.len() as u32 {
            let (u, v) = (g.index.sources[e as usize], g.neighbors[e as usize]);
            reverse[e as usize] = g
                .edge_id(v, u)
                .expect("adjacency is symmetric by construction");
        }
        g.index.reverse = reverse;
        assert!(g.check_invariants(), "graph construction broke an adjacency invariant");
        Ok(g)
    }

    /// Symmetry, strict sortedness, and the reverse involution. Cheap; used
    /// by tests and debug assertions on every construction path.
    pub fn check_invariants(&self) -> bool {
        for v in 0..self.node_count() as u32 {
            let ns = self.neighbors(v);
            if !ns.windows(2).all(|w| w[0] < w[1]) {
                return false;
            }
            if ns.contains(&v) {
                return false;
            }
            if ns.iter().any(|&w| !self.has_edge(w, v)) {
                return false;
            }
        }
        (0..self.directed_edge_count() as u32).all(|e| {
            let r = self.index.reverse(e);
            self.index.reverse(r) == e && r != e
        })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// m, the number of undirected edges.
    pub fn undirected_edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// 2m, the number of directed edge ids.
    pub fn directed_edge_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn degree(&self, v: u32) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Directed edge id of the ordered pair (u, v), if {u,v} is an edge.
    pub fn edge_id(&self, u: u32, v: u32) -> Option<u32> {
        self.neighbors(u)
            .binary_search(&v)
            .ok()
            .map(|r| self.offsets[u as usize] + r as u32)
    }

    /// (source, target) of a directed edge id.
    pub fn edge_endpoints(&self, e: u32) -> (u32, u32) {
        (self.index.source(e), self.neighbors[e as usize])
    }

    pub fn edge_index(&self) -> &DirectedEdgeIndex {
        &self.index
    }

    /// Undirected edges as (u, v) with u < v, in lexicographic order.
    pub fn undirected_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.directed_edge_count() as u32).filter_map(move |e| {
            let (u, v) = self.edge_endpoints(e);
            (u < v).then_some((u, v))
        })
    }

    /// Parse the edge-list format: optional `#` comment lines, a `graph <n> <m>`
    /// header, then the edge lines. Duplicate edges collapse; the collapsed
    /// count must match the declared m.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines
            .next()
            .ok_or(GraphError::MalformedHeader { line: 1 })?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("graph") {
            return Err(GraphError::MalformedHeader { line: header_line });
        }
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(GraphError::MalformedHeader { line: header_line })?;
        let m: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(GraphError::MalformedHeader { line: header_line })?;
        if parts.next().is_some() {
            return Err(GraphError::MalformedHeader { line: header_line });
        }

        let mut set = BTreeSet::new();
        for (line, l) in lines {
            let mut it = l.split_whitespace();
            let (a, b) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(GraphError::MalformedEdge { line }),
            };
            let u: u64 = a.parse().map_err(|_| GraphError::MalformedEdge { line })?;
            let v: u64 = b.parse().map_err(|_| GraphError::MalformedEdge { line })?;
            if u >= n as u64 {
                return Err(GraphError::NodeOutOfRange { id: u, n, line });
            }
            if v >= n as u64 {
                return Err(GraphError::NodeOutOfRange { id: v, n, line });
            }
            let (u, v) = (u as u32, v as u32);
            if u == v {
                return Err(GraphError::SelfLoop { node: u, line });
            }
            set.insert((u.min(v), u.max(v)));
        }
        if set.len() != m {
            return Err(GraphError::EdgeCountMismatch {
                declared: m,
                found: set.len(),
            });
        }
        Self::from_edge_set(n, &set)
    }

    /// Canonical writer: header, then edges with u < v sorted lexicographically,
    /// LF line endings, no comments. Round-trips bit-exactly.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "graph {} {}",
            self.node_count(),
            self.undirected_edge_count()
        );
        for (u, v) in self.undirected_edges() {
            let _ = writeln!(out, "{} {}", u, v);
        }
        out
    }
}

/// Circulant graph on vertices 0..n-1 with an edge {i, (i+s) mod n} for every
/// skip s. A skip equal to n/2 contributes one edge per antipodal pair.
pub fn circulant(n: usize, skips: &[usize]) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::CirculantTooSmall { n });
    }
    let max = n / 2;
    let mut seen = BTreeSet::new();
    for &s in skips {
        if s < 1 || s > max {
            return Err(GraphError::SkipOutOfRange { skip: s, max, n });
        }
        seen.insert(s);
    }
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for &s in &seen {
            edges.push((i, (i + s as u32) % n as u32));
        }
    }
    Graph::from_edges(n, &edges)
}

/// The 16-gon pair: all chords at distances {1,2,4} versus {1,3,4}. Both are
/// 6-regular with every node in exactly 6 triangles, but their per-edge
/// triangle profiles differ, which is what edge-based refinement picks up.
pub fn figure2_pair() -> (Graph, Graph) {
    let g = circulant(16, &[1, 2, 4]).expect("fixture");
    let h = circulant(16, &[1, 3, 4]).expect("fixture");
    (g, h)
}

/// An 8-cycle versus the disjoint union of two 4-cycles. Both 2-regular and
/// triangle-free; node-based and edge-based refinement see one class each,
/// while pair refinement separates them.
pub fn figure3_pair() -> (Graph, Graph) {
    // 8-cycle traversal 0-1-2-6-7-5-4-3-0.
    let g1 = Graph::from_edges(
        8,
        &[
            (0, 1),
            (1, 2),
            (2, 6),
            (6, 7),
            (7, 5),
            (5, 4),
            (4, 3),
            (3, 0),
        ],
    )
    .expect("fixture");
    // Two 4-cycles: 0-1-6-2-0 and 3-5-4-7-3.
    let g2 = Graph::from_edges(
        8,
        &[
            (0, 1),
            (1, 6),
            (2, 0),
            (2, 6),
            (3, 5),
            (3, 7),
            (4, 5),
            (7, 4),
        ],
    )
    .expect("fixture");
    (g1, g2)
}

/// Disjoint union with g2's node ids shifted by g1.n; returns the offset.
pub fn disjoint_union(g1: &Graph, g2: &Graph) -> (Graph, u32) {
    let offset = g1.node_count() as u32;
    let mut edges: Vec<(u32, u32)> = g1.undirected_edges().collect();
    edges.extend(g2.undirected_edges().map(|(u, v)| (u + offset, v + offset)));
    let g = Graph::from_edges(g1.node_count() + g2.node_count(), &edges)
        .expect("union of validated graphs is valid");
    (g, offset)
}

/// Seeded G(n, p): each pair {i, j} with i < j in lexicographic order draws one
/// 64-bit word; the edge exists when the word falls below floor(p * 2^64).
/// Isolated nodes are deleted and the survivors renumbered densely, so the
/// returned graph may have fewer than `n` nodes.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(GraphError::InvalidProbability { p });
    }
    let threshold = (p * 2f64.powi(64)) as u64;
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.next_u64() < threshold {
                edges.push((i, j));
            }
        }
    }
    if edges.is_empty() {
        return Err(GraphError::EmptyEdgeSet { n, p, seed });
    }
    let mut keep = vec![false; n];
    for &(u, v) in &edges {
        keep[u as usize] = true;
        keep[v as usize] = true;
    }
    let mut remap = vec![u32::MAX; n];
    let mut next = 0u32;
    for v in 0..n {
        if keep[v] {
            remap[v] = next;
            next += 1;
        }
    }
    let edges: Vec<(u32, u32)> = edges
        .iter()
        .map(|&(u, v)| (remap[u as usize], remap[v as usize]))
        .collect();
    Graph::from_edges(next as usize, &edges)
}

/// Relabel nodes by a permutation: node v becomes `perm[v]`. Used by the
/// isomorphism-invariance tests.
pub fn relabel(g: &Graph, perm: &[u32]) -> Graph {
    assert_eq!(perm.len(), g.node_count());
    let edges: Vec<(u32, u32)> = g
        .undirected_edges()
        .map(|(u, v)| (perm[u as usize], perm[v as usize]))
        .collect();
    Graph::from_edges(g.node_count(), &edges).expect("relabeling preserves validity")
}

/// Seeded uniform permutation of 0..n (Fisher-Yates over a SplitMix64 stream).
pub fn random_permutation(n: usize, seed: u64) -> Vec<u32> {
    let mut rng = SplitMix64::new(seed);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}
