use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metric::mean_abs_error;
use crate::blockgraph::build_block_graph_random;
use crate::error::{arg_err, Error, Result};
use crate::graph::{gen_grid, gen_random_regular, UndirectedGraph};
use crate::inference::{
    belief_propagation, check_elimination_feasible, exact_elimination, generalized_inference,
    inference_on_block_graph, BeliefPropagation, BpSettings, InferenceReport, RootPolicy,
};
use crate::model::{ising_model_with_rng, NormalParameter, PotentialKind, DEFAULT_FIELD_SCALE};
use crate::par;

/// Graph the experiment runs on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSpec {
    Grid { rows: usize, cols: usize },
    /// A fresh random regular graph is drawn for every trial.
    RandomRegular { n: usize, degree: usize },
    File { path: PathBuf },
}

/// One inference method compared in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    /// Plain loopy BP on the original model.
    Bp,
    /// BP on the lifted model of the block-graph with clusters of size <= m.
    Block(usize),
    /// Same, on a block-tree whose oversized clusters are split at random.
    RandomBlock(usize),
    /// The exact oracle itself (error 0, useful for timing).
    Exact,
}

impl Algorithm {
    pub fn label(&self) -> String {
        match self {
            Algorithm::Bp => "BP".to_string(),
            Algorithm::Block(m) => format!("B{m}-BP"),
            Algorithm::RandomBlock(m) => format!("RandB{m}-BP"),
            Algorithm::Exact => "Exact".to_string(),
        }
    }

    /// Cluster size bound, with plain BP counting as m = 1.
    pub fn cluster_size(&self) -> Option<usize> {
        match self {
            Algorithm::Bp => Some(1),
            Algorithm::Block(m) => Some(*m),
            Algorithm::RandomBlock(_) | Algorithm::Exact => None,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_m = |digits: &str| -> Result<usize> {
            match digits.parse::<usize>() {
                Ok(m) if m >= 1 => Ok(m),
                _ => arg_err(format!("bad cluster size in algorithm {s:?}")),
            }
        };
        match s {
            "BP" => Ok(Algorithm::Bp),
            "Exact" => Ok(Algorithm::Exact),
            _ => {
                if let Some(rest) = s.strip_prefix("RandB").and_then(|r| r.strip_suffix("-BP")) {
                    Ok(Algorithm::RandomBlock(parse_m(rest)?))
                } else if let Some(rest) = s.strip_prefix('B').and_then(|r| r.strip_suffix("-BP")) {
                    Ok(Algorithm::Block(parse_m(rest)?))
                } else {
                    arg_err(format!("unknown algorithm {s:?}; expected BP, B<m>-BP, RandB<m>-BP or Exact"))
                }
            }
        }
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.label()
    }
}

fn default_field_scale() -> f64 {
    DEFAULT_FIELD_SCALE
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub potentials: Vec<PotentialKind>,
    pub sigmas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub bp: BpSettings,
    /// Root of the block-graphs built for `B<m>-BP` and `RandB<m>-BP`.
    #[serde(default)]
    pub root: RootPolicy,
    #[serde(default = "default_field_scale")]
    pub field_scale: f64,
    /// Whether sigma and field_scale are standard deviations or variances.
    #[serde(default)]
    pub normal_parameter: NormalParameter,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Worker threads for running trials; 0 uses the global pool. Does not
    /// affect the records.
    #[serde(default)]
    pub workers: usize,
    /// When false every `time_s` is written as 0 so result files are
    /// byte-comparable between runs.
    #[serde(default = "yes")]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(graph: GraphSpec, potentials: Vec<PotentialKind>, sigmas: Vec<f64>, algorithms: Vec<Algorithm>) -> Self {
        ExperimentConfig {
            graph,
            potentials,
            sigmas,
            algorithms,
            trials: 1,
            master_seed: 0,
            bp: BpSettings::default(),
            root: RootPolicy::default(),
            field_scale: DEFAULT_FIELD_SCALE,
            normal_parameter: NormalParameter::StdDev,
            output: None,
            workers: 0,
            record_timing: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return arg_err("trials must be at least 1");
        }
        if self.potentials.is_empty() || self.sigmas.is_empty() || self.algorithms.is_empty() {
            return arg_err("potentials, sigmas and algorithms must all be non-empty");
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return arg_err(format!("sigma must be finite and >= 0, got {s}"));
        }
        if self.algorithms.iter().any(|a| matches!(a, Algorithm::Block(0) | Algorithm::RandomBlock(0))) {
            return arg_err("cluster sizes must be at least 1");
        }
        if !(self.field_scale.is_finite() && self.field_scale >= 0.0) {
            return arg_err(format!("field scale must be finite and >= 0, got {}", self.field_scale));
        }
        self.bp.validate()
    }
}

/// Result of running one algorithm on one trial's model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub algorithm: String,
    pub potential: PotentialKind,
    pub sigma: f64,
    pub trial: usize,
    pub seed: u64,
    pub error: f64,
    pub time_s: f64,
    pub converged: bool,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(words: &[u64]) -> u64 {
    words.iter().fold(0u64, |h, &w| splitmix64(h ^ w))
}

/// Seed of one trial; depends only on its own coordinates.
pub fn trial_seed(master_seed: u64, trial: usize, sigma: f64, potential: PotentialKind) -> u64 {
    let kind = match potential {
        PotentialKind::Repulsive => 1,
        PotentialKind::Attractive => 2,
        PotentialKind::Mixed => 3,
    };
    mix(&[master_seed, trial as u64, sigma.to_bits(), kind])
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    potential: PotentialKind,
    sigma: f64,
    trial: usize,
    seed: u64,
}

fn fixed_graph(spec: &GraphSpec) -> Result<Option<UndirectedGraph>> {
    match spec {
        GraphSpec::Grid { rows, cols } => gen_grid(*rows, *cols).map(Some),
        GraphSpec::File { path } => UndirectedGraph::read_edge_list(path).map(Some),
        GraphSpec::RandomRegular { .. } => Ok(None),
    }
}

fn trial_graph(spec: &GraphSpec, fixed: &Option<UndirectedGraph>, rng: &mut ChaCha8Rng) -> Result<UndirectedGraph> {
    match (spec, fixed) {
        (_, Some(g)) => Ok(g.clone()),
        (GraphSpec::RandomRegular { n, degree }, None) => gen_random_regular(*n, *degree, rng),
        _ => Err(Error::Internal("fixed graph missing".into())),
    }
}

/// Runs every configured algorithm on `trials` seeded Ising models per
/// (potential, sigma) cell. Records come out ordered by potential, sigma,
/// trial, then algorithm as configured, whatever the worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let fixed = fixed_graph(&cfg.graph)?;
    let mut cells = Vec::new();
    for &potential in &cfg.potentials {
        for &sigma in &cfg.sigmas {
            for trial in 0..cfg.trials {
                cells.push(Cell { potential, sigma, trial, seed: trial_seed(cfg.master_seed, trial, sigma, potential) });
            }
        }
    }

    par::with_workers(cfg.workers, || {
        match &fixed {
            Some(g) => check_elimination_feasible(g, 2)?,
            None => {
                for r in par::map_ordered(&cells, |c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
                    check_elimination_feasible(&trial_graph(&cfg.graph, &fixed, &mut rng)?, 2)
                }) {
                    r?;
                }
            }
        }
        let per_cell = par::map_ordered(&cells, |c| run_trial(cfg, &fixed, c));
        let mut records = Vec::with_capacity(cells.len() * cfg.algorithms.len());
        for r in per_cell {
            records.extend(r?);
        }
        Ok(records)
    })
}

fn run_trial(cfg: &ExperimentConfig, fixed: &Option<UndirectedGraph>, cell: &Cell) -> Result<Vec<TrialRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cell.seed);
    let g = trial_graph(&cfg.graph, fixed, &mut rng)?;
    let p = cfg.normal_parameter;
    let model = ising_model_with_rng(&g, cell.potential, p.std_dev(cell.sigma), p.std_dev(cfg.field_scale), &mut rng)?;
    let truth = exact_elimination(&model)?;
    let engine = BeliefPropagation(cfg.bp);

    cfg.algorithms
        .iter()
        .map(|alg| {
            let report: InferenceReport = match *alg {
                Algorithm::Bp => belief_propagation(&model, &cfg.bp)?,
                Algorithm::Block(m) => generalized_inference(&model, &g, m, &cfg.root, &engine)?,
                Algorithm::RandomBlock(m) => {
                    let start = Instant::now();
                    let mut split_rng = ChaCha8Rng::seed_from_u64(mix(&[cell.seed, 0x5EED, m as u64]));
                    let root = cfg.root.resolve(&g)?;
                    let bg = build_block_graph_random(&g, &root, m, &mut split_rng)?;
                    let mut r = inference_on_block_graph(&model, &bg, &engine)?;
                    r.seconds = start.elapsed().as_secs_f64();
                    r
                }
                Algorithm::Exact => truth.clone(),
            };
            Ok(TrialRecord {
                algorithm: alg.label(),
                potential: cell.potential,
                sigma: cell.sigma,
                trial: cell.trial,
                seed: cell.seed,
                error: mean_abs_error(&report.marginals, &truth.marginals)?,
                time_s: if cfg.record_timing { report.seconds } else { 0.0 },
                converged: report.converged,
            })
        })
        .collect()
}
