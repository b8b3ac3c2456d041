//! Scaling measurements for the preprocessing and refinement phases on
//! seeded random graphs of fixed expected degree. The bench only reports raw
//! times; pass/fail thresholds live with the callers.

use std::time::Instant;

use serde::Serialize;

use crate::graph::{random_graph, GraphError};
use crate::refinement::{run_eb1wl, theoretical_round_bound, TestKind};
use crate::rng::RANDOM_GRAPH_ALGORITHM;
use crate::triangles::{degeneracy_order, enumerate_triangles};

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub m: usize,
    pub degeneracy: u32,
    pub triangle_count: u64,
    /// Degeneracy order plus triangle enumeration.
    pub triangle_enum_secs: f64,
    /// One edge-based refinement round.
    pub eb_round_secs: f64,
    /// Full edge-based refinement run to stabilization.
    pub eb_full_secs: f64,
    pub eb_rounds: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub expected_degree: f64,
    pub seed: u64,
    pub prng: &'static str,
    pub records: Vec<BenchRecord>,
}

/// Generate a random graph per size at the given expected degree and time
/// three phases. Sizes are node counts and should ascend; per-size seeds are
/// derived from `seed` by index so reports are reproducible.
pub fn run_bench(
    sizes: &[usize],
    expected_degree: f64,
    seed: u64,
) -> Result<BenchReport, GraphError> {
    let mut records = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let p =
            (expected_degree / (n.saturating_sub(1)) as f64).clamp(f64::MIN_POSITIVE, 0.999_999);
        let g = random_graph(n, p, seed.wrapping_add(i as u64))?;

        let start = Instant::now();
        let info = degeneracy_order(&g);
        let ts = enumerate_triangles(&g, &info);
        let triangle_enum_secs = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let one_round = run_eb1wl(&g, &ts, 1);
        let eb_round_secs = start.elapsed().as_secs_f64();
        debug_assert!(one_round.rounds.len() >= 2);

        let start = Instant::now();
        let full = run_eb1wl(&g, &ts, theoretical_round_bound(TestKind::Eb1Wl, &g));
        let eb_full_secs = start.elapsed().as_secs_f64();

        records.push(BenchRecord {
            n: g.node_count(),
            m: g.undirected_edge_count(),
            degeneracy: info.degeneracy,
            triangle_count: ts.triangle_count(),
            triangle_enum_secs,
            eb_round_secs,
            eb_full_secs,
            eb_rounds: full.rounds.len() - 1,
        });
    }
    Ok(BenchReport {
        expected_degree,
        seed,
        prng: RANDOM_GRAPH_ALGORITHM,
        records,
    })
}
