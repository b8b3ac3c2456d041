//! Graph-refinement toolkit built around edge-based color refinement.
//!
//! The crate provides four refinement engines over one canonical interning
//! substrate (classic node refinement, its neighbor-communication extension,
//! edge-based refinement over directed edges, and dense pair refinement),
//! triangle-enumeration preprocessing in the style of Chiba and Nishizeki,
//! homomorphism counting from chordal treewidth-2 patterns, paper-and-pencil
//! fixture generators, and a deterministic numeric forward pass of the
//! matching edge-based GNN.
//!
//! All structures are immutable after construction and safe to share across
//! threads; engines parallelize within a round but produce bit-identical
//! results at any thread count.

pub mod bench;
pub mod ebgnn;
pub mod graph;
pub mod homcount;
pub mod refinement;
pub mod rng;
pub mod triangles;

pub use graph::{
    circulant, disjoint_union, figure2_pair, figure3_pair, random_graph, DirectedEdgeIndex, Graph,
    GraphError,
};
pub use homcount::{
    brute_force_hom_count, edge_in_k_triangles, find_peo_tw2, hom_count_peo, EliminationCase,
    HomcountError, PatternPeo,
};
pub use refinement::{
    distinguish, distinguish_with, fingerprint, run_1wl, run_2wl, run_eb1wl, run_nc1wl, run_stable,
    theoretical_round_bound, DistinguishOptions, RefineError, RefinementTrace, TestKind, Verdict,
};
pub use triangles::{
    degeneracy_order, edge_triangle_profile, enumerate_triangles, DegeneracyInfo, TriangleEntry,
    TriangleStore,
};
