use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::factor::{Factor, FactorModel};
use crate::error::{arg_err, Result};
use crate::graph::UndirectedGraph;

/// Standard deviation of the node fields.
pub const DEFAULT_FIELD_SCALE: f64 = 0.1;

/// Sign convention of the pairwise couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PotentialKind {
    /// `exp(-|b| x_i x_j)`: neighbors prefer opposite spins.
    #[serde(rename = "REP")]
    Repulsive,
    /// `exp(|b| x_i x_j)`: neighbors prefer equal spins.
    #[serde(rename = "ATT")]
    Attractive,
    /// `exp(-b x_i x_j)` with signed `b`.
    #[serde(rename = "MIX")]
    Mixed,
}

impl PotentialKind {
    pub fn label(self) -> &'static str {
        match self {
            PotentialKind::Repulsive => "REP",
            PotentialKind::Attractive => "ATT",
            PotentialKind::Mixed => "MIX",
        }
    }

    fn coupling(self, b: f64) -> f64 {
        match self {
            PotentialKind::Repulsive => -b.abs(),
            PotentialKind::Attractive => b.abs(),
            PotentialKind::Mixed => -b,
        }
    }
}

impl std::fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for PotentialKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "REP" | "REPULSIVE" => Ok(PotentialKind::Repulsive),
            "ATT" | "ATTRACTIVE" => Ok(PotentialKind::Attractive),
            "MIX" | "MIXED" => Ok(PotentialKind::Mixed),
            other => arg_err(format!("unknown potential kind {other:?}")),
        }
    }
}

/// How the second parameter of the field and coupling normals is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalParameter {
    #[default]
    StdDev,
    Variance,
}

impl NormalParameter {
    pub fn std_dev(self, parameter: f64) -> f64 {
        match self {
            NormalParameter::StdDev => parameter,
            NormalParameter::Variance => parameter.sqrt(),
        }
    }
}

impl std::str::FromStr for NormalParameter {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "std" | "std-dev" | "stddev" => Ok(NormalParameter::StdDev),
            "var" | "variance" => Ok(NormalParameter::Variance),
            other => arg_err(format!("unknown normal parameter convention {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingConfig {
    pub kind: PotentialKind,
    /// Spread of the couplings.
    pub sigma: f64,
    /// Spread of the node fields.
    #[serde(default = "default_field_scale")]
    pub field_scale: f64,
    #[serde(default)]
    pub parameter: NormalParameter,
    pub seed: u64,
}

fn default_field_scale() -> f64 {
    DEFAULT_FIELD_SCALE
}

impl IsingConfig {
    pub fn new(kind: PotentialKind, sigma: f64, seed: u64) -> Self {
        IsingConfig { kind, sigma, field_scale: DEFAULT_FIELD_SCALE, parameter: NormalParameter::StdDev, seed }
    }
}

/// Random binary pairwise model on `g` with states ordered `(-1, +1)`.
pub fn ising_model(g: &UndirectedGraph, cfg: &IsingConfig) -> Result<FactorModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if cfg.sigma < 0.0 || cfg.field_scale < 0.0 {
        return arg_err("sigma and field scale must be >= 0");
    }
    let (sigma, field) = (cfg.parameter.std_dev(cfg.sigma), cfg.parameter.std_dev(cfg.field_scale));
    ising_model_with_rng(g, cfg.kind, sigma, field, &mut rng)
}

/// Like [`ising_model`] but drawing from a caller-supplied stream: one field
/// per node in id order, then one coupling per edge in lexicographic order.
/// Both spreads are standard deviations here.
pub fn ising_model_with_rng<R: Rng + ?Sized>(
    g: &UndirectedGraph,
    kind: PotentialKind,
    sigma: f64,
    field_scale: f64,
    rng: &mut R,
) -> Result<FactorModel> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return arg_err(format!("interaction strength must be finite and >= 0, got {sigma}"));
    }
    if !(field_scale >= 0.0 && field_scale.is_finite()) {
        return arg_err(format!("field scale must be finite and >= 0, got {field_scale}"));
    }
    let field = Normal::new(0.0, field_scale).map_err(|e| crate::Error::Argument(e.to_string()))?;
    let coupling = Normal::new(0.0, sigma).map_err(|e| crate::Error::Argument(e.to_string()))?;

    let mut factors = Vec::with_capacity(g.node_count() + g.edge_count());
    for v in g.nodes() {
        let a: f64 = field.sample(rng);
        // phi(x) = exp(-a x) at x = -1, +1
        factors.push(Factor::new(vec![v], vec![a.exp(), (-a).exp()]));
    }
    for (u, v) in g.edges() {
        let j = kind.coupling(coupling.sample(rng));
        // psi(x_u, x_v) = exp(j x_u x_v) over (-,-), (-,+), (+,-), (+,+)
        let (same, diff) = (j.exp(), (-j).exp());
        factors.push(Factor::new(vec![u, v], vec![same, diff, diff, same]));
    }
    FactorModel::new(vec![2; g.node_count()], factors)
}
