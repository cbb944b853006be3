use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use blockgraph::decompose::{block_tree_width, build_block_tree, synth_block_structured, to_junction_tree, DEFAULT_CANDIDATE_BUDGET};
use blockgraph::graph::{gen_grid, gen_random_regular, NodeSet, UndirectedGraph};
use blockgraph::harness::{emit_results, per_m_curve, run_experiment, summarize, write_csv, write_per_m_csv, ExperimentConfig, OutputFormat};
use blockgraph::inference::{generalized_inference, BeliefPropagation, BpSettings, BruteForce, ExactElimination, InferenceEngine, RootPolicy, Schedule};
use blockgraph::model::{ising_model, FactorModel, IsingConfig, NormalParameter, PotentialKind, DEFAULT_FIELD_SCALE};
use blockgraph::{build_block_graph, build_block_graph_random, girth_proxy};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "blockgraph", version, about = "Block-tree / block-graph decompositions and cluster-level BP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a block-tree and print it with its width.
    Decompose {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated node ids, or min-degree | greedy-degree | greedy-fillin.
        #[arg(long, default_value = "min-degree")]
        root: String,
        #[arg(long, default_value_t = DEFAULT_CANDIDATE_BUDGET)]
        budget: usize,
        /// Also print the junction tree.
        #[arg(long)]
        junction_tree: bool,
    },
    /// Build a block-graph with clusters of at most m nodes.
    Blockgraph {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "min-degree")]
        root: String,
        #[arg(long, default_value_t = DEFAULT_CANDIDATE_BUDGET)]
        budget: usize,
        /// Split oversized block-tree clusters at random instead.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compute node marginals of a model file.
    Infer(InferArgs),
    /// Run a seeded multi-trial experiment.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Result format; guessed from the output extension when omitted.
        #[arg(long)]
        format: Option<String>,
        /// Also write mean error against cluster size to this CSV.
        #[arg(long)]
        per_m: Option<PathBuf>,
        /// Overrides the config's worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Generate graphs and models.
    #[command(subcommand)]
    Synth(Synth),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineKind {
    Bp,
    Exact,
    Brute,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "bp")]
    engine: EngineKind,
    /// Run on the block-graph with clusters of at most m nodes.
    #[arg(long)]
    m: Option<usize>,
    /// Graph for the block-graph; defaults to the model's interaction graph.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value = "min-degree")]
    root: String,
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value = "seq")]
    schedule: String,
    #[arg(long, default_value_t = 0.0)]
    damping: f64,
}

#[derive(Subcommand)]
enum Synth {
    /// rows x cols grid, ids row-major.
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Connected random regular graph.
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Planted block structure with clusters of k nodes.
    Block {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        removal: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ising model on a graph file.
    Ising {
        #[arg(long)]
        graph: PathBuf,
        /// REP, ATT or MIX.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_FIELD_SCALE)]
        field_scale: f64,
        /// Read sigma and field scale as variances.
        #[arg(long)]
        variance: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn root_policy(spec: &str, budget: usize) -> Result<RootPolicy> {
    if !spec.starts_with(|c: char| c.is_ascii_digit()) {
        return Ok(RootPolicy::Heuristic { heuristic: spec.parse()?, budget });
    }
    let ids = spec
        .split(',')
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad node id {t:?} in --root")))
        .collect::<Result<Vec<_>>>()?;
    Ok(RootPolicy::Explicit(NodeSet::new(ids)))
}

fn parse_root(g: &UndirectedGraph, spec: &str, budget: usize) -> Result<NodeSet> {
    Ok(root_policy(spec, budget)?.resolve(g)?)
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    Ok(writeln!(out)?)
}

fn with_field(mut v: Value, key: &str, x: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert(key.to_string(), x);
    }
    v
}

fn read_graph(path: &Path) -> Result<UndirectedGraph> {
    UndirectedGraph::read_edge_list(path).with_context(|| format!("reading graph {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Decompose { graph, root, budget, junction_tree } => {
            let g = read_graph(&graph)?;
            let root = parse_root(&g, &root, budget)?;
            let bt = build_block_tree(&g, &root)?;
            let mut out = with_field(serde_json::to_value(&bt)?, "width", json!(block_tree_width(&bt)));
            if junction_tree {
                out = with_field(out, "junction_tree", serde_json::to_value(to_junction_tree(&bt))?);
            }
            print_json(&out)
        }
        Command::Blockgraph { graph, m, root, budget, random, seed } => {
            let g = read_graph(&graph)?;
            let root = parse_root(&g, &root, budget)?;
            let bg = if random {
                build_block_graph_random(&g, &root, m, &mut ChaCha8Rng::seed_from_u64(seed))?
            } else {
                build_block_graph(&g, &root, m)?
            };
            let out = with_field(serde_json::to_value(&bg)?, "girth", json!(girth_proxy(&bg)));
            print_json(&out)
        }
        Command::Infer(args) => {
            let model = FactorModel::read(&args.model)
                .with_context(|| format!("reading model {}", args.model.display()))?;
            let settings = BpSettings {
                max_iterations: args.max_iter,
                convergence_tolerance: args.tol,
                schedule: args.schedule.parse::<Schedule>()?,
                damping: args.damping,
            };
            settings.validate()?;
            let bp = BeliefPropagation(settings);
            let engine: &dyn InferenceEngine = match args.engine {
                EngineKind::Bp => &bp,
                EngineKind::Exact => &ExactElimination,
                EngineKind::Brute => &BruteForce,
            };
            let report = match args.m {
                None => engine.infer(&model)?,
                Some(m) => {
                    let g = match &args.graph {
                        Some(p) => read_graph(p)?,
                        None => model.interaction_graph()?,
                    };
                    generalized_inference(&model, &g, m, &root_policy(&args.root, args.budget)?, engine)?
                }
            };
            print_json(&serde_json::to_value(&report)?)
        }
        Command::Experiment { config, output, format, per_m, workers } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let records = run_experiment(&cfg)?;
            if let Some(p) = &per_m {
                write_per_m_csv(&per_m_curve(&records), p)?;
            }
            match output.or(cfg.output.clone()) {
                Some(path) => {
                    let fmt = match format {
                        Some(f) => f.parse()?,
                        None => OutputFormat::from_path(&path),
                    };
                    emit_results(&records, fmt, &path)?;
                    print_json(&serde_json::to_value(summarize(&records))?)
                }
                None => match format.as_deref().map(str::parse::<OutputFormat>).transpose()? {
                    Some(OutputFormat::Json) => print_json(&serde_json::to_value(&records)?),
                    _ => Ok(write_csv(&records, std::io::stdout().lock())?),
                },
            }
        }
        Command::Synth(s) => match s {
            Synth::Grid { rows, cols, out } => emit_text(&gen_grid(rows, cols)?.to_edge_list(), out.as_deref()),
            Synth::Regular { n, degree, seed, out } => {
                let g = gen_random_regular(n, degree, &mut ChaCha8Rng::seed_from_u64(seed))?;
                emit_text(&g.to_edge_list(), out.as_deref())
            }
            Synth::Block { n, k, removal, seed, out } => {
                let g = synth_block_structured(n, k, removal, &mut ChaCha8Rng::seed_from_u64(seed))?;
                emit_text(&g.to_edge_list(), out.as_deref())
            }
            Synth::Ising { graph, kind, sigma, field_scale, variance, seed, out } => {
                let g = read_graph(&graph)?;
                let kind: PotentialKind = kind.parse()?;
                let parameter = if variance { NormalParameter::Variance } else { NormalParameter::StdDev };
                let cfg = IsingConfig { kind, sigma, field_scale, parameter, seed };
                emit_text(&ising_model(&g, &cfg)?.to_json()?, out.as_deref())
            }
        },
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = c
            .downcast_ref::<std::io::Error>()
            .map(std::io::Error::kind)
            .or_else(|| c.downcast_ref::<serde_json::Error>().and_then(serde_json::Error::io_error_kind));
        io == Some(std::io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.downcast_ref::<blockgraph::Error>().map_or("cli", blockgraph::Error::kind);
            let report = json!({ "error": { "kind": kind, "message": format!("{e:#}") } });
            eprintln!("{report}");
            if matches!(kind, "argument" | "cli" | "parse") {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
