//! Command-line surface for the refinement toolkit. Machine-readable output
//! (JSON, or a canonical edge list for `gen`) goes to stdout or `--output`;
//! one-line human summaries go to stderr. Exit code 0 means the command ran;
//! verdict content lives only in the JSON. Usage and validation problems
//! exit nonzero.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use ebwl_core::bench::run_bench;
use ebwl_core::ebgnn;
use ebwl_core::homcount;
use ebwl_core::refinement::DistinguishOptions;
use ebwl_core::rng::RANDOM_GRAPH_ALGORITHM;
use ebwl_core::*;

#[derive(Parser)]
#[command(name = "ebwl", version, about = "Edge-based color refinement toolkit")]
struct Cli {
    /// Write machine output to this path instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads; 0 picks the core count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it in the canonical edge-list format.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Triangle count, degeneracy, and the per-edge triangle histogram.
    Triangles { file: PathBuf },
    /// Run one refinement test and emit the round-by-round trace.
    Refine {
        #[arg(long, value_parser = parse_test)]
        test: TestKind,
        #[arg(long)]
        max_rounds: Option<usize>,
        file: PathBuf,
    },
    /// Compare two graphs under one test via shared-palette refinement.
    Distinguish {
        #[arg(long, value_parser = parse_test)]
        test: TestKind,
        #[arg(long)]
        max_rounds: Option<usize>,
        file1: PathBuf,
        file2: PathBuf,
    },
    /// Count homomorphisms from a pattern graph into a target graph.
    Homcount {
        pattern: PathBuf,
        target: PathBuf,
        #[arg(long, default_value = "auto", value_parser = ["brute", "peo", "auto"])]
        method: String,
    },
    /// Sample random GNN weights per seed and test output separation.
    GnnDistinguish {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        layers: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long)]
        tol: f64,
        file1: PathBuf,
        file2: PathBuf,
    },
    /// Time triangle enumeration and refinement on seeded random graphs.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 8.0)]
        degree: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    /// Vertices 0..n-1 with an edge {i, i+s mod n} per skip s.
    Circulant {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        skips: Vec<usize>,
    },
    /// The 16-gon with chords at distances {1,2,4} (G) or {1,3,4} (H).
    Fig2 {
        #[arg(long, value_parser = ["G", "H", "g", "h"])]
        which: String,
    },
    /// The 8-cycle (g1) or the union of two 4-cycles (g2).
    Fig3 {
        #[arg(long, value_parser = ["g1", "g2", "1", "2"])]
        which: String,
    },
    /// Seeded G(n, p) with isolated nodes deleted.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
    },
}

fn parse_test(s: &str) -> Result<TestKind, String> {
    TestKind::parse(s).ok_or_else(|| format!("unknown test `{s}` (expected 1wl|nc1wl|eb1wl|2wl)"))
}

#[derive(Serialize)]
struct TriangleStats {
    n: usize,
    m: usize,
    t: u64,
    degeneracy: u32,
    edge_triangle_histogram: std::collections::BTreeMap<usize, usize>,
}

#[derive(Serialize)]
struct HomcountOutput {
    /// Decimal string: exact counts outgrow JSON numbers.
    count: String,
    method: &'static str,
    peo_found: bool,
}

#[derive(Serialize)]
struct GnnOutput {
    dim: usize,
    layers: usize,
    tol: f64,
    seeds: Vec<u64>,
    per_seed: Vec<bool>,
    any: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: could not configure {} threads: {e}", cli.threads);
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command, cli.output.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, output: Option<&std::path::Path>) -> Result<(), String> {
    match command {
        Command::Gen { family } => {
            let (g, label) = match family {
                GenFamily::Circulant { n, skips } => {
                    let g = circulant(n, &skips).map_err(|e| e.to_string())?;
                    (g, format!("circulant n={n} skips={skips:?}"))
                }
                GenFamily::Fig2 { which } => {
                    let (g, h) = figure2_pair();
                    if which.eq_ignore_ascii_case("g") {
                        (g, "16-gon with chords {1,2,4}".to_string())
                    } else {
                        (h, "16-gon with chords {1,3,4}".to_string())
                    }
                }
                GenFamily::Fig3 { which } => {
                    let (g1, g2) = figure3_pair();
                    if which.ends_with('1') {
                        (g1, "8-cycle".to_string())
                    } else {
                        (g2, "two 4-cycles".to_string())
                    }
                }
                GenFamily::Random { n, p, seed } => {
                    let g = random_graph(n, p, seed).map_err(|e| e.to_string())?;
                    (
                        g,
                        format!("random n={n} p={p} seed={seed} prng={RANDOM_GRAPH_ALGORITHM}"),
                    )
                }
            };
            eprintln!(
                "gen: {label}: n={} m={}",
                g.node_count(),
                g.undirected_edge_count()
            );
            emit(output, &g.to_edge_list())
        }
        Command::Triangles { file } => {
            let g = load(&file)?;
            let info = degeneracy_order(&g);
            let ts = enumerate_triangles(&g, &info);
            let stats = TriangleStats {
                n: g.node_count(),
                m: g.undirected_edge_count(),
                t: ts.triangle_count(),
                degeneracy: info.degeneracy,
                edge_triangle_histogram: edge_triangle_profile(&g, &ts),
            };
            eprintln!(
                "triangles: t={} degeneracy={} on n={} m={}",
                stats.t, stats.degeneracy, stats.n, stats.m
            );
            emit_json(output, &stats)
        }
        Command::Refine {
            test,
            max_rounds,
            file,
        } => {
            let g = load(&file)?;
            let cap = max_rounds.unwrap_or_else(|| theoretical_round_bound(test, &g));
            let trace = match test {
                TestKind::OneWl => run_1wl(&g, cap),
                TestKind::Nc1Wl => {
                    let ts = enumerate_triangles(&g, &degeneracy_order(&g));
                    run_nc1wl(&g, &ts, cap)
                }
                TestKind::Eb1Wl => {
                    let ts = enumerate_triangles(&g, &degeneracy_order(&g));
                    run_eb1wl(&g, &ts, cap)
                }
                TestKind::TwoWl => run_2wl(&g, cap).map_err(|e| e.to_string())?,
            };
            match trace.stable_round {
                Some(r) => eprintln!(
                    "refine {}: stable at round {r} with {} classes",
                    test.token(),
                    trace.rounds.last().unwrap().class_count
                ),
                None => eprintln!(
                    "refine {}: round cap {cap} hit before stabilization",
                    test.token()
                ),
            }
            emit_json(output, &trace.summary())
        }
        Command::Distinguish {
            test,
            max_rounds,
            file1,
            file2,
        } => {
            let g1 = load(&file1)?;
            let g2 = load(&file2)?;
            let verdict = distinguish_with(
                &g1,
                &g2,
                test,
                DistinguishOptions {
                    max_rounds,
                    ..DistinguishOptions::default()
                },
            )
            .map_err(|e| e.to_string())?;
            match (verdict.distinguished, verdict.separating_round) {
                (true, Some(r)) => {
                    eprintln!("distinguish {}: separated at round {r}", test.token())
                }
                (true, None) => eprintln!("distinguish {}: separated on node count", test.token()),
                (false, _) => eprintln!("distinguish {}: not separated", test.token()),
            }
            emit_json(output, &verdict)
        }
        Command::Homcount {
            pattern,
            target,
            method,
        } => {
            let p = load(&pattern)?;
            let t = load(&target)?;
            let peo = homcount::find_peo_tw2(&p);
            let brute = |p: &Graph, t: &Graph| -> Result<String, String> {
                Ok(brute_force_hom_count(p, t)
                    .map_err(|e| e.to_string())?
                    .to_string())
            };
            let by_peo = |peo: &homcount::PatternPeo, t: &Graph| {
                let ts = enumerate_triangles(t, &degeneracy_order(t));
                hom_count_peo(peo, t, &ts).to_string()
            };
            let (count, used) =
                match (method.as_str(), &peo) {
                    ("brute", _) => (brute(&p, &t)?, "brute"),
                    ("peo", Some(peo)) => (by_peo(peo, &t), "peo"),
                    ("peo", None) => return Err(
                        "pattern admits no perfect elimination order with cliques of size <= 2 \
                         (not chordal of treewidth <= 2); use --method brute"
                            .into(),
                    ),
                    (_, Some(peo)) => (by_peo(peo, &t), "peo"),
                    (_, None) => (brute(&p, &t)?, "brute"),
                };
            eprintln!("homcount: {count} maps ({used})");
            emit_json(
                output,
                &HomcountOutput {
                    count,
                    method: used,
                    peo_found: peo.is_some(),
                },
            )
        }
        Command::GnnDistinguish {
            dim,
            layers,
            seeds,
            tol,
            file1,
            file2,
        } => {
            let g1 = load(&file1)?;
            let g2 = load(&file2)?;
            let ts1 = enumerate_triangles(&g1, &degeneracy_order(&g1));
            let ts2 = enumerate_triangles(&g2, &degeneracy_order(&g2));
            let per_seed = ebgnn::gnn_distinguish(&g1, &ts1, &g2, &ts2, dim, layers, &seeds, tol)
                .map_err(|e| e.to_string())?;
            let any = per_seed.iter().any(|&b| b);
            eprintln!(
                "gnn-distinguish: {} of {} seeds separated the graphs",
                per_seed.iter().filter(|&&b| b).count(),
                per_seed.len()
            );
            emit_json(
                output,
                &GnnOutput {
                    dim,
                    layers,
                    tol,
                    seeds,
                    per_seed,
                    any,
                },
            )
        }
        Command::Bench {
            sizes,
            degree,
            seed,
        } => {
            let report = run_bench(&sizes, degree, seed).map_err(|e| e.to_string())?;
            for r in &report.records {
                eprintln!(
                    "bench: n={} m={} degeneracy={} t={} enum={:.4}s round={:.4}s full={:.4}s ({} rounds)",
                    r.n, r.m, r.degeneracy, r.triangle_count,
                    r.triangle_enum_secs, r.eb_round_secs, r.eb_full_secs, r.eb_rounds
                );
            }
            emit_json(output, &report)
        }
    }
}

fn load(path: &std::path::Path) -> Result<Graph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Graph::parse_edge_list(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit_json<T: Serialize>(output: Option<&std::path::Path>, value: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    emit(output, &text)
}

fn emit(output: Option<&std::path::Path>, text: &str) -> Result<(), String> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}
