//! Color-refinement engines over one canonical interning substrate.
//!
//! Four tests share the same driver:
//!   1wl    node colors, update (old, {{neighbor colors}})
//!   nc1wl  node colors, 1wl plus the multiset of color pairs over ordered
//!          adjacent neighbor pairs (assembled from the triangle tables)
//!   eb1wl  directed-edge colors, update (old, {{out-colors at u}},
//!          {{(color(u,y), color(v,y)) : y common neighbor}}, {{out-colors at v}})
//!   2wl    ordered-pair colors, atomic initial types, update appends
//!          {{(color(u,w), color(w,v)) : w in V}}
//!
//! Interning is exact: each object's update tuple is serialized to a
//! canonical u32 key (multisets sorted and run-length encoded) in one flat
//! buffer, and dense ids are assigned by sorting the key set. Ids are
//! therefore a pure function of the colored structure, so per-round
//! histograms and the final digest agree across isomorphic inputs and across
//! runs. Hashing is confined to the content-addressed fingerprint; nothing
//! on the refinement path trusts a hash.
//!
//! Distinguishability runs one refinement over the disjoint union of the two
//! graphs so their colors share a palette, and compares per-graph histograms
//! each round. Once the histograms differ they differ at every later round
//! (new colors determine old), so the first separating round is well defined
//! and early exit is sound.

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{disjoint_union, Graph};
use crate::triangles::{degeneracy_order, enumerate_triangles, TriangleStore};

/// Pair refinement is the desk-scale reference; O(n^3) per round.
pub const DEFAULT_DENSE_LIMIT: usize = 512;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RefineError {
    #[error("graph with {n} nodes exceeds the dense pair-refinement limit {limit}")]
    DenseLimitExceeded { n: usize, limit: usize },
}

/// Which refinement test to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestKind {
    #[serde(rename = "1wl")]
    OneWl,
    #[serde(rename = "nc1wl")]
    Nc1Wl,
    #[serde(rename = "eb1wl")]
    Eb1Wl,
    #[serde(rename = "2wl")]
    TwoWl,
}

impl TestKind {
    pub fn token(self) -> &'static str {
        match self {
            TestKind::OneWl => "1wl",
            TestKind::Nc1Wl => "nc1wl",
            TestKind::Eb1Wl => "eb1wl",
            TestKind::TwoWl => "2wl",
        }
    }

    pub fn parse(s: &str) -> Option<TestKind> {
        match s {
            "1wl" => Some(TestKind::OneWl),
            "nc1wl" => Some(TestKind::Nc1Wl),
            "eb1wl" => Some(TestKind::Eb1Wl),
            "2wl" => Some(TestKind::TwoWl),
            _ => None,
        }
    }

    /// Number of colored objects for this test on `g`.
    pub fn object_count(self, g: &Graph) -> usize {
        match self {
            TestKind::OneWl | TestKind::Nc1Wl => g.node_count(),
            TestKind::Eb1Wl => g.directed_edge_count(),
            TestKind::TwoWl => g.node_count() * g.node_count(),
        }
    }
}

/// Default round cap: the partition can refine strictly at most once per
/// object, so the object count bounds the stabilization round.
pub fn theoretical_round_bound(kind: TestKind, g: &Graph) -> usize {
    kind.object_count(g)
}

/// One refinement round: colors, class count, and class sizes by color id.
#[derive(Debug, Clone)]
pub struct RoundData {
    pub colors: Vec<u32>,
    pub class_count: usize,
    pub histogram: Vec<u64>,
}

/// Full record of a refinement run. `rounds[0]` is the initial coloring;
/// `stable_round` is the first round whose partition equals the previous
/// round's, or `None` when the round cap ended the run first. The
/// fingerprint is only defined for stabilized runs.
#[derive(Debug, Clone)]
pub struct RefinementTrace {
    pub kind: TestKind,
    pub node_count: usize,
    pub object_count: usize,
    pub rounds: Vec<RoundData>,
    pub stable_round: Option<usize>,
    pub fingerprint: Option<String>,
}

impl RefinementTrace {
    pub fn stable_colors(&self) -> &[u32] {
        &self
            .rounds
            .last()
            .expect("at least the initial round")
            .colors
    }

    /// Serde-ready view without the per-object color arrays.
    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            test: self.kind,
            node_count: self.node_count,
            object_count: self.object_count,
            rounds: self
                .rounds
                .iter()
                .map(|r| RoundSummary {
                    classes: r.class_count,
                    histogram: r.histogram.clone(),
                })
                .collect(),
            stable_round: self.stable_round,
            capped: self.stable_round.is_none(),
            fingerprint: self.fingerprint.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundSummary {
    pub classes: usize,
    pub histogram: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub test: TestKind,
    pub node_count: usize,
    pub object_count: usize,
    pub rounds: Vec<RoundSummary>,
    pub stable_round: Option<usize>,
    pub capped: bool,
    pub fingerprint: Option<String>,
}

/// Outcome of a shared-palette comparison of two graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub test: TestKind,
    pub distinguished: bool,
    /// First round whose per-graph histograms differ. `None` either when the
    /// graphs were not distinguished or when an edge-based run separated them
    /// on node count alone, before any round ran.
    pub separating_round: Option<usize>,
}

// ---------------------------------------------------------------------------
// flat key storage and canonical interning

/// All update keys of one round, concatenated. Key i is
/// `data[offsets[i]..offsets[i+1]]`.
#[derive(Default)]
struct KeyBuf {
    data: Vec<u32>,
    offsets: Vec<u32>,
}

impl KeyBuf {
    fn clear(&mut self) {
        self.data.clear();
        self.offsets.clear();
        self.offsets.push(0);
    }

    fn seal_key(&mut self) {
        self.offsets.push(self.data.len() as u32);
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    fn key(&self, i: usize) -> &[u32] {
        &self.data[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Sorted multiset as (value, multiplicity) runs, length-prefixed.
    fn push_rle(&mut self, xs: &mut [u32]) {
        xs.sort_unstable();
        let mark = self.data.len();
        self.data.push(0);
        let mut runs = 0u32;
        let mut i = 0;
        while i < xs.len() {
            let v = xs[i];
            let mut c = 1u32;
            while i + (c as usize) < xs.len() && xs[i + c as usize] == v {
                c += 1;
            }
            self.data.push(v);
            self.data.push(c);
            runs += 1;
            i += c as usize;
        }
        self.data[mark] = runs;
    }

    /// Sorted pair multiset as (a, b, multiplicity) runs, length-prefixed.
    fn push_rle_pairs(&mut self, xs: &mut [(u32, u32)]) {
        xs.sort_unstable();
        let mark = self.data.len();
        self.data.push(0);
        let mut runs = 0u32;
        let mut i = 0;
        while i < xs.len() {
            let v = xs[i];
            let mut c = 1u32;
            while i + (c as usize) < xs.len() && xs[i + c as usize] == v {
                c += 1;
            }
            self.data.push(v.0);
            self.data.push(v.1);
            self.data.push(c);
            runs += 1;
            i += c as usize;
        }
        self.data[mark] = runs;
    }
}

/// The canonical color table of one round: distinct keys in sorted order
/// with their class sizes.
struct ClassTable {
    colors: Vec<u32>,
    keys: Vec<Vec<u32>>,
    histogram: Vec<u64>,
}

/// Assign dense ids to distinct keys, numbered in sorted key order so the
/// assignment is a pure function of the key set.
fn canonical_intern(buf: &KeyBuf) -> ClassTable {
    let count = buf.len();
    let mut idx: Vec<u32> = (0..count as u32).collect();
    idx.sort_unstable_by(|&a, &b| buf.key(a as usize).cmp(buf.key(b as usize)));
    let mut colors = vec![0u32; count];
    let mut keys: Vec<Vec<u32>> = Vec::new();
    let mut histogram: Vec<u64> = Vec::new();
    for &i in &idx {
        let key = buf.key(i as usize);
        if keys.last().map(|k| k.as_slice()) != Some(key) {
            keys.push(key.to_vec());
            histogram.push(0);
        }
        colors[i as usize] = (keys.len() - 1) as u32;
        *histogram.last_mut().unwrap() += 1;
    }
    ClassTable {
        colors,
        keys,
        histogram,
    }
}

// ---------------------------------------------------------------------------
// engines

trait Engine {
    fn kind(&self) -> TestKind;
    fn object_count(&self) -> usize;
    fn node_count(&self) -> usize;
    fn initial_keys(&self, buf: &mut KeyBuf);
    /// Update keys for the next round. The return value is an auxiliary
    /// canonical table (e.g. interned per-node multisets) folded into the
    /// fingerprint so that keys referencing auxiliary ids stay content-addressed.
    fn round_keys(&self, colors: &[u32], buf: &mut KeyBuf) -> Vec<Vec<u32>>;
}

struct OneWlEngine<'g> {
    g: &'g Graph,
}

impl Engine for OneWlEngine<'_> {
    fn kind(&self) -> TestKind {
        TestKind::OneWl
    }
    fn object_count(&self) -> usize {
        self.g.node_count()
    }
    fn node_count(&self) -> usize {
        self.g.node_count()
    }
    fn initial_keys(&self, buf: &mut KeyBuf) {
        for _ in 0..self.g.node_count() {
            buf.seal_key();
        }
    }
    fn round_keys(&self, colors: &[u32], buf: &mut KeyBuf) -> Vec<Vec<u32>> {
        let mut scratch = Vec::new();
        for v in 0..self.g.node_count() as u32 {
            scratch.clear();
            scratch.extend(self.g.neighbors(v).iter().map(|&w| colors[w as usize]));
            buf.data.push(colors[v as usize]);
            buf.push_rle(&mut scratch);
            buf.seal_key();
        }
        Vec::new()
    }
}

struct Nc1WlEngine<'g> {
    g: &'g Graph,
    ts: &'g TriangleStore,
}

impl Engine for Nc1WlEngine<'_> {
    fn kind(&self) -> TestKind {
        TestKind::Nc1Wl
    }
    fn object_count(&self) -> usize {
        self.g.node_count()
    }
    fn node_count(&self) -> usize {
        self.g.node_count()
    }
    fn initial_keys(&self, buf: &mut KeyBuf) {
        for _ in 0..self.g.node_count() {
            buf.seal_key();
        }
    }
    fn round_keys(&self, colors: &[u32], buf: &mut KeyBuf) -> Vec<Vec<u32>> {
        // Ordered adjacent pairs inside N(y): the directed edge (u, w) lists y
        // as an apex exactly when u, w in N(y) and {u,w} in E, so one scan of
        // the triangle tables deposits each orientation at its apex.
        let mut pairs: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.g.node_count()];
        for e in 0..self.g.directed_edge_count() as u32 {
            let (u, w) = self.g.edge_endpoints(e);
            for entry in self.ts.common_neighbors(e) {
                pairs[entry.apex as usize].push((colors[u as usize], colors[w as usize]));
            }
        }
        let mut scratch = Vec::new();
        for v in 0..self.g.node_count() as u32 {
            scratch.clear();
            scratch.extend(self.g.neighbors(v).iter().map(|&w| colors[w as usize]));
            buf.data.push(colors[v as usize]);
            buf.push_rle(&mut scratch);
            buf.push_rle_pairs(&mut pairs[v as usize]);
            buf.seal_key();
        }
        Vec::new()
    }
}

struct Eb1WlEngine<'g> {
    g: &'g Graph,
    ts: &'g TriangleStore,
}

impl Engine for Eb1WlEngine<'_> {
    fn kind(&self) -> TestKind {
        TestKind::Eb1Wl
    }
    fn object_count(&self) -> usize {
        self.g.directed_edge_count()
    }
    fn node_count(&self) -> usize {
        self.g.node_count()
    }
    fn initial_keys(&self, buf: &mut KeyBuf) {
        for _ in 0..self.g.directed_edge_count() {
            buf.seal_key();
        }
    }
    fn round_keys(&self, colors: &[u32], buf: &mut KeyBuf) -> Vec<Vec<u32>> {
        let g = self.g;
        // The out-multiset {{color(u,x) : x in N(u)}} is shared by every edge
        // with source u; interning it per node keeps the round at O(m + t)
        // instead of the sum of squared degrees. Out-edges of u occupy the
        // contiguous id range offsets[u]..offsets[u+1].
        let mut msets = KeyBuf::default();
        msets.clear();
        let mut scratch = Vec::new();
        let mut base = 0usize;
        for u in 0..g.node_count() as u32 {
            let deg = g.degree(u);
            scratch.clear();
            scratch.extend_from_slice(&colors[base..base + deg]);
            msets.push_rle(&mut scratch);
            msets.seal_key();
            base += deg;
        }
        let node_table = canonical_intern(&msets);

        let mut pair_scratch = Vec::new();
        for e in 0..g.directed_edge_count() as u32 {
            let (u, v) = g.edge_endpoints(e);
            pair_scratch.clear();
            pair_scratch.extend(self.ts.common_neighbors(e).iter().map(|t| {
                (
                    colors[t.source_edge as usize],
                    colors[t.target_edge as usize],
                )
            }));
            buf.data.push(colors[e as usize]);
            buf.data.push(node_table.colors[u as usize]);
            buf.data.push(node_table.colors[v as usize]);
            buf.push_rle_pairs(&mut pair_scratch);
            buf.seal_key();
        }
        node_table.keys
    }
}

struct TwoWlEngine<'g> {
    g: &'g Graph,
}

impl Engine for TwoWlEngine<'_> {
    fn kind(&self) -> TestKind {
        TestKind::TwoWl
    }
    fn object_count(&self) -> usize {
        self.g.node_count() * self.g.node_count()
    }
    fn node_count(&self) -> usize {
        self.g.node_count()
    }
    fn initial_keys(&self, buf: &mut KeyBuf) {
        let n = self.g.node_count() as u32;
        for u in 0..n {
            for v in 0..n {
                let atomic = if u == v {
                    0
                } else if self.g.has_edge(u, v) {
                    1
                } else {
                    2
                };
                buf.data.push(atomic);
                buf.seal_key();
            }
        }
    }
    fn round_keys(&self, colors: &[u32], buf: &mut KeyBuf) -> Vec<Vec<u32>> {
        let n = self.g.node_count();
        let mut scratch: Vec<(u32, u32)> = Vec::with_capacity(n);
        for u in 0..n {
            for v in 0..n {
                scratch.clear();
                scratch.extend((0..n).map(|w| (colors[u * n + w], colors[w * n + v])));
                buf.data.push(colors[u * n + v]);
                buf.push_rle_pairs(&mut scratch);
                buf.seal_key();
            }
        }
        Vec::new()
    }
}

// ---------------------------------------------------------------------------
// driver

fn hash_section(hasher: &mut Sha256, tag: u8, table: &[Vec<u32>], histogram: Option<&[u64]>) {
    hasher.update([tag]);
    hasher.update((table.len() as u64).to_le_bytes());
    for (i, key) in table.iter().enumerate() {
        hasher.update((key.len() as u64).to_le_bytes());
        for &x in key {
            hasher.update(x.to_le_bytes());
        }
        if let Some(h) = histogram {
            hasher.update(h[i].to_le_bytes());
        }
    }
}

fn hex_digest(hasher: Sha256) -> String {
    let mut hex = String::with_capacity(64);
    for b in hasher.finalize() {
        hex.push_str(&format!("{:02x}", b));
    }
    hex
}

/// Run an engine to stabilization or the round cap. `on_round` sees every
/// computed round (including round 0) and may stop the run early by
/// returning false; early-stopped runs carry no fingerprint.
fn refine<E: Engine>(
    engine: &E,
    max_rounds: usize,
    mut on_round: impl FnMut(usize, &RoundData) -> bool,
) -> RefinementTrace {
    let mut hasher = Sha256::new();
    hasher.update([match engine.kind() {
        TestKind::OneWl => 1u8,
        TestKind::Nc1Wl => 2,
        TestKind::Eb1Wl => 3,
        TestKind::TwoWl => 4,
    }]);
    hasher.update((engine.node_count() as u64).to_le_bytes());
    hasher.update((engine.object_count() as u64).to_le_bytes());

    let mut buf = KeyBuf::default();
    buf.clear();
    engine.initial_keys(&mut buf);
    let table = canonical_intern(&buf);
    hash_section(&mut hasher, 0xC0, &table.keys, Some(&table.histogram));
    let mut rounds = vec![RoundData {
        class_count: table.keys.len(),
        colors: table.colors,
        histogram: table.histogram,
    }];
    let mut stable_round = None;
    let mut aborted = !on_round(0, &rounds[0]);

    let mut round = 1;
    while !aborted && round <= max_rounds {
        buf.clear();
        let aux = engine.round_keys(&rounds[round - 1].colors, &mut buf);
        let table = canonical_intern(&buf);
        hash_section(&mut hasher, 0xA0, &aux, None);
        hash_section(&mut hasher, 0xC0, &table.keys, Some(&table.histogram));
        let data = RoundData {
            class_count: table.keys.len(),
            colors: table.colors,
            histogram: table.histogram,
        };
        // Keys embed the previous color, so the partition only ever splits;
        // an unchanged class count means an unchanged partition.
        let stable = data.class_count == rounds[round - 1].class_count;
        aborted = !on_round(round, &data);
        rounds.push(data);
        if stable {
            stable_round = Some(round);
            break;
        }
        round += 1;
    }

    let fingerprint = stable_round.map(|_| hex_digest(hasher));
    RefinementTrace {
        kind: engine.kind(),
        node_count: engine.node_count(),
        object_count: engine.object_count(),
        rounds,
        stable_round,
        fingerprint,
    }
}

/// Classic color refinement on nodes.
pub fn run_1wl(g: &Graph, max_rounds: usize) -> RefinementTrace {
    refine(&OneWlEngine { g }, max_rounds, |_, _| true)
}

/// Node refinement that also sees the edges inside each neighborhood.
pub fn run_nc1wl(g: &Graph, ts: &TriangleStore, max_rounds: usize) -> RefinementTrace {
    refine(&Nc1WlEngine { g, ts }, max_rounds, |_, _| true)
}

/// Edge-based refinement over all 2m directed edges.
pub fn run_eb1wl(g: &Graph, ts: &TriangleStore, max_rounds: usize) -> RefinementTrace {
    refine(&Eb1WlEngine { g, ts }, max_rounds, |_, _| true)
}

/// Pair refinement over all ordered node pairs, diagonal included.
pub fn run_2wl(g: &Graph, max_rounds: usize) -> Result<RefinementTrace, RefineError> {
    run_2wl_with_limit(g, max_rounds, DEFAULT_DENSE_LIMIT)
}

pub fn run_2wl_with_limit(
    g: &Graph,
    max_rounds: usize,
    dense_limit: usize,
) -> Result<RefinementTrace, RefineError> {
    if g.node_count() > dense_limit {
        return Err(RefineError::DenseLimitExceeded {
            n: g.node_count(),
            limit: dense_limit,
        });
    }
    Ok(refine(&TwoWlEngine { g }, max_rounds, |_, _| true))
}

/// Convenience wrapper that runs to the theoretical round bound, building
/// triangle tables when the test needs them and none are supplied.
pub fn run_stable(
    kind: TestKind,
    g: &Graph,
    ts: Option<&TriangleStore>,
) -> Result<RefinementTrace, RefineError> {
    let bound = theoretical_round_bound(kind, g);
    let owned;
    let ts = match (kind, ts) {
        (TestKind::OneWl | TestKind::TwoWl, _) => None,
        (_, Some(ts)) => Some(ts),
        (_, None) => {
            owned = enumerate_triangles(g, &degeneracy_order(g));
            Some(&owned)
        }
    };
    Ok(match kind {
        TestKind::OneWl => run_1wl(g, bound),
        TestKind::Nc1Wl => run_nc1wl(g, ts.unwrap(), bound),
        TestKind::Eb1Wl => run_eb1wl(g, ts.unwrap(), bound),
        TestKind::TwoWl => run_2wl(g, bound)?,
    })
}

// ---------------------------------------------------------------------------
// distinguishability

#[derive(Debug, Clone, Copy)]
pub struct DistinguishOptions {
    /// Cap on refinement rounds; defaults to the union's object count.
    pub max_rounds: Option<usize>,
    pub dense_limit: usize,
}

impl Default for DistinguishOptions {
    fn default() -> Self {
        DistinguishOptions {
            max_rounds: None,
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }
}

/// Shared-palette comparison: refine the disjoint union, compare per-graph
/// histograms each round, report the first separating round.
pub fn distinguish(g1: &Graph, g2: &Graph, kind: TestKind) -> Result<Verdict, RefineError> {
    distinguish_with(g1, g2, kind, DistinguishOptions::default())
}

pub fn distinguish_with(
    g1: &Graph,
    g2: &Graph,
    kind: TestKind,
    options: DistinguishOptions,
) -> Result<Verdict, RefineError> {
    // Edge-based colorings never see the node count, so compare it up front.
    if kind == TestKind::Eb1Wl && g1.node_count() != g2.node_count() {
        return Ok(Verdict {
            test: kind,
            distinguished: true,
            separating_round: None,
        });
    }
    let (union, offset) = disjoint_union(g1, g2);
    if kind == TestKind::TwoWl && union.node_count() > options.dense_limit {
        return Err(RefineError::DenseLimitExceeded {
            n: union.node_count(),
            limit: options.dense_limit,
        });
    }
    let max_rounds = options
        .max_rounds
        .unwrap_or_else(|| theoretical_round_bound(kind, &union));

    // Ownership of each colored object: Some(false) = g1, Some(true) = g2,
    // None = cross pairs in 2wl, which belong to neither histogram.
    let n = union.node_count();
    let owner: Vec<Option<bool>> = match kind {
        TestKind::OneWl | TestKind::Nc1Wl => (0..n as u32).map(|v| Some(v >= offset)).collect(),
        TestKind::Eb1Wl => (0..union.directed_edge_count() as u32)
            .map(|e| Some(union.edge_endpoints(e).0 >= offset))
            .collect(),
        TestKind::TwoWl => (0..n * n)
            .map(|p| {
                let (u, v) = ((p / n) as u32, (p % n) as u32);
                match (u >= offset, v >= offset) {
                    (false, false) => Some(false),
                    (true, true) => Some(true),
                    _ => None,
                }
            })
            .collect(),
    };

    let mut separating_round = None;
    let observe = |round: usize, data: &RoundData| {
        let mut h1 = vec![0u64; data.class_count];
        let mut h2 = vec![0u64; data.class_count];
        for (obj, &color) in data.colors.iter().enumerate() {
            match owner[obj] {
                Some(false) => h1[color as usize] += 1,
                Some(true) => h2[color as usize] += 1,
                None => {}
            }
        }
        if h1 != h2 {
            separating_round = Some(round);
            false
        } else {
            true
        }
    };

    let ts;
    match kind {
        TestKind::OneWl => {
            refine(&OneWlEngine { g: &union }, max_rounds, observe);
        }
        TestKind::Nc1Wl => {
            ts = enumerate_triangles(&union, &degeneracy_order(&union));
            refine(&Nc1WlEngine { g: &union, ts: &ts }, max_rounds, observe);
        }
        TestKind::Eb1Wl => {
            ts = enumerate_triangles(&union, &degeneracy_order(&union));
            refine(&Eb1WlEngine { g: &union, ts: &ts }, max_rounds, observe);
        }
        TestKind::TwoWl => {
            refine(&TwoWlEngine { g: &union }, max_rounds, observe);
        }
    }
    Ok(Verdict {
        test: kind,
        distinguished: separating_round.is_some(),
        separating_round,
    })
}

/// Content-addressed digest of a stabilized trace. Identical for isomorphic
/// inputs and across runs; `None` when the round cap ended the run.
pub fn fingerprint(trace: &RefinementTrace) -> Option<&str> {
    trace.fingerprint.as_deref()
}
