//! Homomorphism counting: a brute-force oracle for small patterns, perfect
//! elimination orders for chordal treewidth-2 patterns, and a weight-folding
//! dynamic program over such orders that exploits the triangle tables.
//!
//! A perfect elimination order v1..vk here means each vertex has at most two
//! earlier neighbors, adjacent to each other when there are two. Vertices are
//! tagged by how they attach to the earlier graph:
//!   free           no earlier neighbor
//!   pendant        exactly one earlier neighbor
//!   triangle-close exactly two earlier neighbors forming an edge
//! Such an order exists exactly for chordal graphs of treewidth at most two.
//!
//! The dynamic program eliminates vertices from vk down to v1, folding each
//! vertex's extension counts into weights on the pattern vertices and pattern
//! edges it attaches to. Pendant folds scan target adjacency; triangle-close
//! folds scan the per-directed-edge common-neighbor lists. Counts are exact
//! big integers throughout, so they never wrap.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::Graph;
use crate::triangles::TriangleStore;

/// Brute force explores target.n^pattern.n maps with pruning; keep it small.
pub const DEFAULT_PATTERN_LIMIT: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomcountError {
    #[error("pattern has {n} vertices, above the brute-force limit {limit}")]
    PatternTooLarge { n: usize, limit: usize },
}

/// How a vertex of a perfect elimination order attaches to its predecessors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EliminationCase {
    /// No earlier neighbor.
    Free,
    /// Exactly one earlier neighbor.
    Pendant,
    /// Exactly two earlier neighbors, adjacent to each other.
    TriangleClose,
}

/// A validated perfect elimination order for a chordal treewidth-2 pattern.
#[derive(Debug, Clone)]
pub struct PatternPeo {
    pub pattern: Graph,
    /// Pattern vertices v1..vk in elimination order (reverse removal order).
    pub order: Vec<u32>,
    /// `position[v]` = index of v in `order`.
    pub position: Vec<u32>,
    /// Earlier neighbors of each order position, ascending by position.
    pub earlier: Vec<Vec<u32>>,
    pub cases: Vec<EliminationCase>,
}

/// Number of edge-preserving maps pattern -> target, by backtracking over
/// pattern vertices in id order with adjacency pruning.
pub fn brute_force_hom_count(pattern: &Graph, target: &Graph) -> Result<BigUint, HomcountError> {
    brute_force_hom_count_with_limit(pattern, target, DEFAULT_PATTERN_LIMIT)
}

pub fn brute_force_hom_count_with_limit(
    pattern: &Graph,
    target: &Graph,
    limit: usize,
) -> Result<BigUint, HomcountError> {
    let k = pattern.node_count();
    if k > limit {
        return Err(HomcountError::PatternTooLarge { n: k, limit });
    }
    // Earlier pattern neighbors of each vertex under the id order.
    let earlier: Vec<Vec<u32>> = (0..k as u32)
        .map(|v| {
            pattern
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| w < v)
                .collect()
        })
        .collect();
    let mut image = vec![0u32; k];
    let mut count = BigUint::ZERO;
    extend(pattern, target, &earlier, 0, &mut image, &mut count);
    Ok(count)
}

fn extend(
    pattern: &Graph,
    target: &Graph,
    earlier: &[Vec<u32>],
    depth: usize,
    image: &mut Vec<u32>,
    count: &mut BigUint,
) {
    let k = pattern.node_count();
    let constraints = &earlier[depth];
    let consistent = |x: u32, img: &[u32]| {
        constraints
            .iter()
            .all(|&w| target.has_edge(img[w as usize], x))
    };
    // Candidates come from the adjacency of one already-assigned neighbor
    // when there is one; only component-opening vertices scan all nodes.
    let candidates: Box<dyn Iterator<Item = u32>> = match constraints.first() {
        Some(&w) => Box::new(target.neighbors(image[w as usize]).iter().copied()),
        None => Box::new(0..target.node_count() as u32),
    };
    if depth + 1 == k {
        let mut leaves = 0u64;
        for x in candidates {
            if consistent(x, image) {
                leaves += 1;
            }
        }
        *count += leaves;
        return;
    }
    let candidates: Vec<u32> = candidates.filter(|&x| consistent(x, image)).collect();
    for x in candidates {
        image[depth] = x;
        extend(pattern, target, earlier, depth + 1, image, count);
    }
}

/// Greedy simplicial elimination restricted to cliques of size <= 2, ties by
/// smallest id. Returns `None` exactly when the pattern is not a chordal
/// graph of treewidth at most two.
pub fn find_peo_tw2(pattern: &Graph) -> Option<PatternPeo> {
    let k = pattern.node_count();
    let mut adj: Vec<BTreeSet<u32>> = (0..k as u32)
        .map(|v| pattern.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive = vec![true; k];
    let mut removal: Vec<(u32, Vec<u32>)> = Vec::with_capacity(k);

    for _ in 0..k {
        let pick = (0..k as u32).find(|&v| {
            if !alive[v as usize] {
                return false;
            }
            let ns: Vec<u32> = adj[v as usize].iter().copied().collect();
            match ns.as_slice() {
                [] | [_] => true,
                [a, b] => adj[*a as usize].contains(b),
                _ => false,
            }
        })?;
        let ns: Vec<u32> = adj[pick as usize].iter().copied().collect();
        for &w in &ns {
            adj[w as usize].remove(&pick);
        }
        adj[pick as usize].clear();
        alive[pick as usize] = false;
        removal.push((pick, ns));
    }

    let mut order = Vec::with_capacity(k);
    let mut remaining = Vec::with_capacity(k);
    for (v, ns) in removal.into_iter().rev() {
        order.push(v);
        remaining.push(ns);
    }
    let mut position = vec![0u32; k];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i as u32;
    }
    let mut earlier = Vec::with_capacity(k);
    let mut cases = Vec::with_capacity(k);
    for ns in remaining {
        let mut ns = ns;
        ns.sort_unstable_by_key(|&w| position[w as usize]);
        debug_assert!(ns
            .iter()
            .all(|&w| (position[w as usize] as usize) < earlier.len() + 1));
        cases.push(match ns.len() {
            0 => EliminationCase::Free,
            1 => EliminationCase::Pendant,
            2 => {
                debug_assert!(pattern.has_edge(ns[0], ns[1]));
                EliminationCase::TriangleClose
            }
            _ => unreachable!("greedy never removes a vertex with more than two neighbors"),
        });
        earlier.push(ns);
    }
    Some(PatternPeo {
        pattern: pattern.clone(),
        order,
        position,
        earlier,
        cases,
    })
}

/// Exact homomorphism count via the elimination order. Equals the brute
/// force on every input; near-linear in the target per pattern vertex.
pub fn hom_count_peo(peo: &PatternPeo, target: &Graph, ts: &TriangleStore) -> BigUint {
    let k = peo.order.len();
    let n = target.node_count();
    let two_m = target.directed_edge_count();
    let one = BigUint::from(1u32);

    // Weights start at one everywhere and stay None until first written.
    let mut node_w: Vec<Option<Vec<BigUint>>> = vec![None; k];
    let mut edge_w: HashMap<(usize, usize), Vec<BigUint>> = HashMap::new();
    let mut total = one.clone();

    for i in (0..k).rev() {
        let wi = node_w[i].take();
        let node_at = |x: u32| wi.as_ref().map_or(&one, |w| &w[x as usize]);
        match peo.cases[i] {
            EliminationCase::Free => {
                let sum = match &wi {
                    None => BigUint::from(n as u64),
                    Some(w) => w.iter().sum(),
                };
                total *= sum;
            }
            EliminationCase::Pendant => {
                let j = peo.position[peo.earlier[i][0] as usize] as usize;
                let ew = edge_w.remove(&(j, i));
                let mut wj = node_w[j].take().unwrap_or_else(|| vec![one.clone(); n]);
                for x in 0..n as u32 {
                    let base = target
                        .edge_id(x, target.neighbors(x)[0])
                        .expect("no isolated");
                    let mut f = BigUint::ZERO;
                    for (off, &y) in target.neighbors(x).iter().enumerate() {
                        let mut term = node_at(y).clone();
                        if let Some(ew) = &ew {
                            term *= &ew[base as usize + off];
                        }
                        f += term;
                    }
                    wj[x as usize] *= f;
                }
                node_w[j] = Some(wj);
            }
            EliminationCase::TriangleClose => {
                let a = peo.position[peo.earlier[i][0] as usize] as usize;
                let b = peo.position[peo.earlier[i][1] as usize] as usize;
                let ew_ai = edge_w.remove(&(a, i));
                let ew_bi = edge_w.remove(&(b, i));
                let ew_ab = edge_w
                    .entry((a, b))
                    .or_insert_with(|| vec![one.clone(); two_m]);
                for e in 0..two_m as u32 {
                    let mut f = BigUint::ZERO;
                    for entry in ts.common_neighbors(e) {
                        let mut term = node_at(entry.apex).clone();
                        if let Some(ew) = &ew_ai {
                            term *= &ew[entry.source_edge as usize];
                        }
                        if let Some(ew) = &ew_bi {
                            term *= &ew[entry.target_edge as usize];
                        }
                        f += term;
                    }
                    ew_ab[e as usize] *= f;
                }
            }
        }
    }
    total
}

/// True when some undirected edge of the target lies in at least k triangles.
pub fn edge_in_k_triangles(g: &Graph, ts: &TriangleStore, k: usize) -> bool {
    (0..g.directed_edge_count() as u32).any(|e| ts.edge_triangle_count(e) >= k)
}

/// The pattern made of two triangles sharing an edge: nodes 0,1 shared,
/// apexes 2 and 3. Homomorphisms from it count ordered edges weighted by the
/// square of their common-neighbor count.
pub fn two_triangles_sharing_an_edge() -> Graph {
    Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)]).expect("fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{circulant, figure2_pair, figure3_pair, Graph};
    use crate::triangles::{degeneracy_order, enumerate_triangles};

    fn ts_of(g: &Graph) -> TriangleStore {
        enumerate_triangles(g, &degeneracy_order(g))
    }

    fn k3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn brute_force_small_cases() {
        let k3 = k3();
        assert_eq!(
            brute_force_hom_count(&k3, &k3).unwrap(),
            BigUint::from(6u32)
        );

        let j = two_triangles_sharing_an_edge();
        assert_eq!(brute_force_hom_count(&j, &k3).unwrap(), BigUint::from(6u32));

        let edge = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let (g, _) = figure2_pair();
        assert_eq!(
            brute_force_hom_count(&edge, &g).unwrap(),
            BigUint::from(g.directed_edge_count() as u64)
        );

        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            brute_force_hom_count(&p3, &k3).unwrap(),
            BigUint::from(12u32)
        );
    }

    #[test]
    fn brute_force_limit() {
        let big = circulant(9, &[1]).unwrap();
        assert_eq!(
            brute_force_hom_count(&big, &k3()),
            Err(HomcountError::PatternTooLarge { n: 9, limit: 8 })
        );
    }

    #[test]
    fn peo_of_shared_edge_triangles() {
        let j = two_triangles_sharing_an_edge();
        let peo = find_peo_tw2(&j).unwrap();
        assert_eq!(
            peo.cases,
            vec![
                EliminationCase::Free,
                EliminationCase::Pendant,
                EliminationCase::TriangleClose,
                EliminationCase::TriangleClose,
            ]
        );
    }

    #[test]
    fn peo_rejects_c4_and_long_holes() {
        let c4 = circulant(4, &[1]).unwrap();
        assert!(find_peo_tw2(&c4).is_none());
        let c6 = circulant(6, &[1]).unwrap();
        assert!(find_peo_tw2(&c6).is_none());
    }

    #[test]
    fn peo_rejects_k4() {
        // chordal, but treewidth 3
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(find_peo_tw2(&k4).is_none());
    }

    #[test]
    fn peo_accepts_trees_with_free_and_pendant_cases() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let peo = find_peo_tw2(&star).unwrap();
        assert_eq!(peo.cases[0], EliminationCase::Free);
        assert!(peo.cases[1..]
            .iter()
            .all(|&c| c == EliminationCase::Pendant));
    }

    #[test]
    fn dp_matches_brute_force_on_fixtures() {
        let j = two_triangles_sharing_an_edge();
        let peo = find_peo_tw2(&j).unwrap();
        let (g, h) = figure2_pair();
        let hom_g = hom_count_peo(&peo, &g, &ts_of(&g));
        let hom_h = hom_count_peo(&peo, &h, &ts_of(&h));
        assert_eq!(hom_g, BigUint::from(448u32));
        assert_eq!(hom_h, BigUint::from(384u32));
        assert_eq!(hom_g, brute_force_hom_count(&j, &g).unwrap());
        assert_eq!(hom_h, brute_force_hom_count(&j, &h).unwrap());
    }

    #[test]
    fn dp_handles_disconnected_patterns() {
        // Two disjoint edges: hom = (2m)^2.
        let p = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let peo = find_peo_tw2(&p).unwrap();
        let g = circulant(7, &[1, 2]).unwrap();
        let expected = BigUint::from((g.directed_edge_count() as u64).pow(2));
        assert_eq!(hom_count_peo(&peo, &g, &ts_of(&g)), expected);
        assert_eq!(brute_force_hom_count(&p, &g).unwrap(), expected);
    }

    #[test]
    fn triangle_pattern_counts_directed_triangles() {
        let tri = k3();
        let peo = find_peo_tw2(&tri).unwrap();
        let (g, _) = figure2_pair();
        // 32 triangles, 6 ordered images each.
        assert_eq!(hom_count_peo(&peo, &g, &ts_of(&g)), BigUint::from(192u32));
    }

    #[test]
    fn psi_predicate_on_fixtures() {
        let (g, h) = figure2_pair();
        assert!(edge_in_k_triangles(&g, &ts_of(&g), 3));
        assert!(!edge_in_k_triangles(&h, &ts_of(&h), 3));
        let (f1, _) = figure3_pair();
        assert!(!edge_in_k_triangles(&f1, &ts_of(&f1), 1));
    }
}
