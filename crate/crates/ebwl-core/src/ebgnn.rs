//! Deterministic forward pass of the edge-based GNN.
//!
//! Every directed edge (u, v) carries a d-dimensional feature; layer i
//! computes
//!
//!   source_sum(u) = sum over x in N(u) of ReLU(A_i f(u,x) + a_i)
//!   pair_sum(u,v) = sum over common neighbors y of ReLU(B_i [f(u,y); f(v,y)] + b_i)
//!   target_sum(v) = sum over z in N(v) of ReLU(C_i f(v,z) + c_i)
//!   g(u,v) = f(u,v) + source_sum(u) + pair_sum(u,v) + target_sum(v)
//!   f'(u,v) = g(u,v) + V_i ReLU(U_i g(u,v) + u_i) + v_i
//!
//! with the input feature fixed to the first standard basis vector. The pair
//! aggregation iterates the precomputed triangle tables, so a layer costs
//! O(m + t) matrix-vector products. All arithmetic is f64; summation orders
//! are fixed by edge and table ids, so outputs are bit-reproducible at any
//! thread count.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::Graph;
use crate::rng::SplitMix64;
use crate::triangles::TriangleStore;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EbgnnError {
    #[error("non-finite feature entry produced by layer {layer}")]
    NonFinite { layer: usize },
}

/// Graph-level pooling of the final edge features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pooling {
    /// Sum over undirected edges: half the sum over all directed edges.
    Sum,
    /// Sum divided by the number of undirected edges.
    Mean,
    /// Sum scaled by |V| / |E|.
    NodeSum,
}

impl Pooling {
    pub fn token(self) -> &'static str {
        match self {
            Pooling::Sum => "sum",
            Pooling::Mean => "mean",
            Pooling::NodeSum => "nodesum",
        }
    }

    pub fn parse(s: &str) -> Option<Pooling> {
        match s {
            "sum" => Some(Pooling::Sum),
            "mean" => Some(Pooling::Mean),
            "nodesum" => Some(Pooling::NodeSum),
            _ => None,
        }
    }
}

/// One layer of weights; matrices row-major.
#[derive(Debug, Clone)]
pub struct LayerParams {
    pub source_mat: Vec<f64>,     // d x d
    pub source_bias: Vec<f64>,    // d
    pub pair_mat: Vec<f64>,       // d x 2d, acts on the concatenated pair
    pub pair_bias: Vec<f64>,      // d
    pub target_mat: Vec<f64>,     // d x d
    pub target_bias: Vec<f64>,    // d
    pub ffn_hidden_mat: Vec<f64>, // d x d
    pub ffn_hidden_bias: Vec<f64>,
    pub ffn_out_mat: Vec<f64>, // d x d
    pub ffn_out_bias: Vec<f64>,
}

/// Immutable weight set, reproducible from (dim, layers, seed).
#[derive(Debug, Clone)]
pub struct EbgnnParams {
    pub dim: usize,
    pub seed: u64,
    pub layers: Vec<LayerParams>,
}

/// Entries i.i.d. uniform on [-1/sqrt(d), 1/sqrt(d)] from one SplitMix64
/// stream, drawn layer-major; within a layer each matrix precedes its bias,
/// in the order source, pair, target, ffn-hidden, ffn-out; matrices row-major.
pub fn init_params(dim: usize, layers: usize, seed: u64) -> EbgnnParams {
    assert!(dim >= 1, "dimension must be at least 1");
    let mut rng = SplitMix64::new(seed);
    let scale = 1.0 / (dim as f64).sqrt();
    let mut draw = |len: usize| -> Vec<f64> {
        (0..len)
            .map(|_| (2.0 * rng.next_f64() - 1.0) * scale)
            .collect()
    };
    let layers = (0..layers)
        .map(|_| LayerParams {
            source_mat: draw(dim * dim),
            source_bias: draw(dim),
            pair_mat: draw(dim * 2 * dim),
            pair_bias: draw(dim),
            target_mat: draw(dim * dim),
            target_bias: draw(dim),
            ffn_hidden_mat: draw(dim * dim),
            ffn_hidden_bias: draw(dim),
            ffn_out_mat: draw(dim * dim),
            ffn_out_bias: draw(dim),
        })
        .collect();
    EbgnnParams { dim, seed, layers }
}

impl EbgnnParams {
    /// Content digest of all entries in draw order; pins seeded inits.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update((self.dim as u64).to_le_bytes());
        hasher.update((self.layers.len() as u64).to_le_bytes());
        for l in &self.layers {
            for part in [
                &l.source_mat,
                &l.source_bias,
                &l.pair_mat,
                &l.pair_bias,
                &l.target_mat,
                &l.target_bias,
                &l.ffn_hidden_mat,
                &l.ffn_hidden_bias,
                &l.ffn_out_mat,
                &l.ffn_out_bias,
            ] {
                for &x in part.iter() {
                    hasher.update(x.to_le_bytes());
                }
            }
        }
        let mut hex = String::with_capacity(64);
        for b in hasher.finalize() {
            hex.push_str(&format!("{:02x}", b));
        }
        hex
    }
}

/// Pooled output plus the flat 2m x d feature matrix after every layer
/// (index 0 is the input layer).
#[derive(Debug, Clone)]
pub struct ForwardResult {
    pub output: Vec<f64>,
    pub layer_features: Vec<Vec<f64>>,
}

/// out += ReLU(mat x + bias), mat of shape rows x cols, row-major.
fn accumulate_relu_affine(mat: &[f64], bias: &[f64], x: &[f64], out: &mut [f64]) {
    let cols = x.len();
    for (r, o) in out.iter_mut().enumerate() {
        let row = &mat[r * cols..(r + 1) * cols];
        let mut acc = bias[r];
        for (w, v) in row.iter().zip(x) {
            acc += w * v;
        }
        if acc > 0.0 {
            *o += acc;
        }
    }
}

pub fn forward(
    g: &Graph,
    ts: &TriangleStore,
    params: &EbgnnParams,
    pooling: Pooling,
) -> Result<Vec<f64>, EbgnnError> {
    forward_with_features(g, ts, params, pooling).map(|r| r.output)
}

pub fn forward_with_features(
    g: &Graph,
    ts: &TriangleStore,
    params: &EbgnnParams,
    pooling: Pooling,
) -> Result<ForwardResult, EbgnnError> {
    let d = params.dim;
    let two_m = g.directed_edge_count();
    let n = g.node_count();

    let mut features = vec![0.0f64; two_m * d];
    for e in 0..two_m {
        features[e * d] = 1.0;
    }
    let mut layer_features = vec![features.clone()];

    for (li, layer) in params.layers.iter().enumerate() {
        let prev = &layer_features[li];
        // Per-node sums over out-edge features; out-edges of a node are the
        // contiguous id range offsets[u]..offsets[u+1].
        let node_sums = |mat: &[f64], bias: &[f64]| -> Vec<f64> {
            let mut sums = vec![0.0f64; n * d];
            sums.par_chunks_mut(d).enumerate().for_each(|(u, out)| {
                let base = g
                    .edge_id(u as u32, g.neighbors(u as u32)[0])
                    .expect("no isolated") as usize;
                for off in 0..g.degree(u as u32) {
                    let x = &prev[(base + off) * d..(base + off + 1) * d];
                    accumulate_relu_affine(mat, bias, x, out);
                }
            });
            sums
        };
        let source_sums = node_sums(&layer.source_mat, &layer.source_bias);
        let target_sums = node_sums(&layer.target_mat, &layer.target_bias);

        let mut next = vec![0.0f64; two_m * d];
        next.par_chunks_mut(d).enumerate().for_each(|(e, out)| {
            let (u, v) = g.edge_endpoints(e as u32);
            let mut combined = prev[e * d..(e + 1) * d].to_vec();
            for i in 0..d {
                combined[i] += source_sums[u as usize * d + i] + target_sums[v as usize * d + i];
            }
            let mut concat = vec![0.0f64; 2 * d];
            for entry in ts.common_neighbors(e as u32) {
                concat[..d].copy_from_slice(
                    &prev[entry.source_edge as usize * d..(entry.source_edge as usize + 1) * d],
                );
                concat[d..].copy_from_slice(
                    &prev[entry.target_edge as usize * d..(entry.target_edge as usize + 1) * d],
                );
                accumulate_relu_affine(&layer.pair_mat, &layer.pair_bias, &concat, &mut combined);
            }
            // feed-forward with residual: g + V ReLU(U g + u) + v
            let mut hidden = vec![0.0f64; d];
            accumulate_relu_affine(
                &layer.ffn_hidden_mat,
                &layer.ffn_hidden_bias,
                &combined,
                &mut hidden,
            );
            out.copy_from_slice(&combined);
            for (r, o) in out.iter_mut().enumerate() {
                let row = &layer.ffn_out_mat[r * d..(r + 1) * d];
                let mut acc = layer.ffn_out_bias[r];
                for (w, hv) in row.iter().zip(&hidden) {
                    acc += w * hv;
                }
                *o += acc;
            }
        });
        if !next.iter().all(|x| x.is_finite()) {
            return Err(EbgnnError::NonFinite { layer: li + 1 });
        }
        layer_features.push(next);
    }

    let last = layer_features.last().unwrap();
    let mut pooled = vec![0.0f64; d];
    for e in 0..two_m {
        for i in 0..d {
            pooled[i] += last[e * d + i];
        }
    }
    // Eq-style undirected sum: every undirected edge contributes once, so
    // halve the directed total rather than pick an orientation.
    for x in &mut pooled {
        *x *= 0.5;
    }
    let m = g.undirected_edge_count() as f64;
    match pooling {
        Pooling::Sum => {}
        Pooling::Mean => pooled.iter_mut().for_each(|x| *x /= m),
        Pooling::NodeSum => pooled.iter_mut().for_each(|x| *x *= n as f64 / m),
    }
    Ok(ForwardResult {
        output: pooled,
        layer_features,
    })
}

/// Largest entrywise difference relative to the larger max-norm (floored at
/// one so near-zero outputs compare absolutely).
pub fn relative_linf_diff(a: &[f64], b: &[f64]) -> f64 {
    let norm = a.iter().chain(b).fold(1.0f64, |acc, &x| acc.max(x.abs()));
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (&x, &y)| acc.max((x - y).abs()))
        / norm
}

/// For each seed: sample weights, run both graphs with sum pooling, report
/// whether the outputs differ beyond the tolerance.
#[allow(clippy::too_many_arguments)]
pub fn gnn_distinguish(
    g1: &Graph,
    ts1: &TriangleStore,
    g2: &Graph,
    ts2: &TriangleStore,
    dim: usize,
    layers: usize,
    seeds: &[u64],
    tol: f64,
) -> Result<Vec<bool>, EbgnnError> {
    let mut verdicts = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let params = init_params(dim, layers, seed);
        let y1 = forward(g1, ts1, &params, Pooling::Sum)?;
        let y2 = forward(g2, ts2, &params, Pooling::Sum)?;
        verdicts.push(relative_linf_diff(&y1, &y2) > tol);
    }
    Ok(verdicts)
}
