//! Scene construction for the browser demo: graph specs to positioned
//! nodes, per-round color classes, and pair verdicts, all as serde values.
//! Pure functions so the whole module tests natively; the wasm layer only
//! shuttles JSON strings.

use serde::{Deserialize, Serialize};

use ebwl_core::refinement::DistinguishOptions;
use ebwl_core::*;

/// Graph selection understood by the page controls.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GraphSpec {
    Circulant { n: usize, skips: Vec<usize> },
    Fig2 { which: String },
    Fig3 { which: String },
    Random { n: usize, p: f64, seed: u64 },
}

pub fn build_graph(spec: &GraphSpec) -> Result<Graph, String> {
    match spec {
        GraphSpec::Circulant { n, skips } => circulant(*n, skips).map_err(|e| e.to_string()),
        GraphSpec::Fig2 { which } => {
            let (g, h) = figure2_pair();
            match which.to_ascii_lowercase().as_str() {
                "g" => Ok(g),
                "h" => Ok(h),
                other => Err(format!("fig2 has graphs g and h, not `{other}`")),
            }
        }
        GraphSpec::Fig3 { which } => {
            let (g1, g2) = figure3_pair();
            match which.to_ascii_lowercase().as_str() {
                "g1" | "1" => Ok(g1),
                "g2" | "2" => Ok(g2),
                other => Err(format!("fig3 has graphs g1 and g2, not `{other}`")),
            }
        }
        GraphSpec::Random { n, p, seed } => random_graph(*n, *p, *seed).map_err(|e| e.to_string()),
    }
}

#[derive(Debug, Serialize)]
pub struct NodeView {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Serialize)]
pub struct EdgeView {
    pub u: u32,
    pub v: u32,
    /// Triangles containing this undirected edge.
    pub triangles: usize,
}

#[derive(Debug, Serialize)]
pub struct Scene {
    pub n: usize,
    pub m: usize,
    pub triangle_count: u64,
    pub degeneracy: u32,
    pub edge_triangle_histogram: std::collections::BTreeMap<usize, usize>,
    pub nodes: Vec<NodeView>,
    pub edges: Vec<EdgeView>,
}

/// One refinement round prepared for drawing: a class per node and a class
/// per undirected edge (whichever the test colors; the other stays empty).
#[derive(Debug, Serialize)]
pub struct RoundView {
    pub node_classes: Vec<u32>,
    pub node_class_count: usize,
    pub edge_classes: Vec<u32>,
    pub edge_class_count: usize,
}

#[derive(Debug, Serialize)]
pub struct RefineView {
    pub test: TestKind,
    pub scene: Scene,
    pub rounds: Vec<RoundView>,
    pub stable_round: Option<usize>,
    pub fingerprint: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct DistinguishView {
    pub verdict: Verdict,
    pub left: Scene,
    pub right: Scene,
}

/// Connected components in smallest-id order.
fn components(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut comp = vec![start];
        seen[start as usize] = true;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in g.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Nodes of one component in drawing order: a closed walk for cycles (so
/// polygons render without crossings), ascending id otherwise.
fn ring_order(g: &Graph, comp: &[u32]) -> Vec<u32> {
    if comp.len() >= 3 && comp.iter().all(|&v| g.degree(v) == 2) {
        let mut order = vec![comp[0]];
        let mut prev = comp[0];
        let mut cur = g.neighbors(comp[0])[0];
        while cur != comp[0] {
            order.push(cur);
            let ns = g.neighbors(cur);
            let next = if ns[0] == prev { ns[1] } else { ns[0] };
            prev = cur;
            cur = next;
        }
        if order.len() == comp.len() {
            return order;
        }
    }
    comp.to_vec()
}

/// Circle layout per component, components packed left to right in the unit
/// square with radius proportional to component size.
fn layout(g: &Graph) -> Vec<NodeView> {
    let comps = components(g);
    let total: usize = comps.iter().map(|c| c.len()).sum();
    let mut nodes: Vec<NodeView> = (0..g.node_count())
        .map(|_| NodeView { x: 0.5, y: 0.5 })
        .collect();
    let mut cursor = 0.0f64;
    for comp in &comps {
        let weight = comp.len() as f64 / total as f64;
        let cx = cursor + weight / 2.0;
        let cy = 0.5;
        let r = 0.42 * weight.min(1.0);
        let order = ring_order(g, comp);
        let k = order.len() as f64;
        for (i, &v) in order.iter().enumerate() {
            let angle = std::f64::consts::TAU * (i as f64) / k - std::f64::consts::FRAC_PI_2;
            nodes[v as usize] = NodeView {
                x: cx + r * angle.cos(),
                y: cy + r * angle.sin(),
            };
        }
        cursor += weight;
    }
    nodes
}

pub fn scene(spec: &GraphSpec) -> Result<Scene, String> {
    let g = build_graph(spec)?;
    Ok(scene_of(&g))
}

fn scene_of(g: &Graph) -> Scene {
    let info = degeneracy_order(g);
    let ts = enumerate_triangles(g, &info);
    let edges = g
        .undirected_edges()
        .map(|(u, v)| EdgeView {
            u,
            v,
            triangles: ts.edge_triangle_count(g.edge_id(u, v).expect("edge")),
        })
        .collect();
    Scene {
        n: g.node_count(),
        m: g.undirected_edge_count(),
        triangle_count: ts.triangle_count(),
        degeneracy: info.degeneracy,
        edge_triangle_histogram: edge_triangle_profile(g, &ts),
        nodes: layout(g),
        edges,
    }
}

/// Dense display classes for the undirected edges of one round. Edge-based
/// rounds color the two orientations separately; an undirected edge is
/// displayed by the unordered pair of its two directed colors.
fn edge_display_classes(g: &Graph, colors: &[u32], per_pair: bool) -> (Vec<u32>, usize) {
    let mut intern = std::collections::HashMap::new();
    let mut classes = Vec::with_capacity(g.undirected_edge_count());
    for (u, v) in g.undirected_edges() {
        let key = if per_pair {
            let n = g.node_count();
            let a = colors[u as usize * n + v as usize];
            let b = colors[v as usize * n + u as usize];
            (a.min(b), a.max(b))
        } else {
            let a = colors[g.edge_id(u, v).expect("edge") as usize];
            let b = colors[g.edge_id(v, u).expect("edge") as usize];
            (a.min(b), a.max(b))
        };
        let next = intern.len() as u32;
        classes.push(*intern.entry(key).or_insert(next));
    }
    let count = intern.len();
    (classes, count)
}

pub fn refine_view(
    spec: &GraphSpec,
    test: TestKind,
    max_rounds: Option<usize>,
) -> Result<RefineView, String> {
    let g = build_graph(spec)?;
    let cap = max_rounds.unwrap_or_else(|| theoretical_round_bound(test, &g));
    let trace = match test {
        TestKind::OneWl => run_1wl(&g, cap),
        TestKind::Nc1Wl | TestKind::Eb1Wl => {
            let ts = enumerate_triangles(&g, &degeneracy_order(&g));
            if test == TestKind::Nc1Wl {
                run_nc1wl(&g, &ts, cap)
            } else {
                run_eb1wl(&g, &ts, cap)
            }
        }
        TestKind::TwoWl => run_2wl(&g, cap).map_err(|e| e.to_string())?,
    };
    let n = g.node_count();
    let rounds = trace
        .rounds
        .iter()
        .map(|round| match test {
            TestKind::OneWl | TestKind::Nc1Wl => RoundView {
                node_classes: round.colors.clone(),
                node_class_count: round.class_count,
                edge_classes: Vec::new(),
                edge_class_count: 0,
            },
            TestKind::Eb1Wl => {
                let (edge_classes, edge_class_count) =
                    edge_display_classes(&g, &round.colors, false);
                RoundView {
                    node_classes: Vec::new(),
                    node_class_count: 0,
                    edge_classes,
                    edge_class_count,
                }
            }
            TestKind::TwoWl => {
                // diagonal colors on nodes, unordered pair colors on edges
                let mut diag: Vec<u32> = (0..n).map(|v| round.colors[v * n + v]).collect();
                let mut intern = std::collections::HashMap::new();
                for c in &mut diag {
                    let next = intern.len() as u32;
                    *c = *intern.entry(*c).or_insert(next);
                }
                let node_class_count = intern.len();
                let (edge_classes, edge_class_count) =
                    edge_display_classes(&g, &round.colors, true);
                RoundView {
                    node_classes: diag,
                    node_class_count,
                    edge_classes,
                    edge_class_count,
                }
            }
        })
        .collect();
    Ok(RefineView {
        test,
        scene: scene_of(&g),
        rounds,
        stable_round: trace.stable_round,
        fingerprint: trace.fingerprint,
    })
}

pub fn distinguish_view(
    left: &GraphSpec,
    right: &GraphSpec,
    test: TestKind,
) -> Result<DistinguishView, String> {
    let g1 = build_graph(left)?;
    let g2 = build_graph(right)?;
    let verdict = distinguish_with(&g1, &g2, test, DistinguishOptions::default())
        .map_err(|e| e.to_string())?;
    Ok(DistinguishView {
        verdict,
        left: scene_of(&g1),
        right: scene_of(&g2),
    })
}
