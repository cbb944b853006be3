//! Running an engine on the cluster-level model of a block-graph.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::bp::{belief_propagation, BpSettings};
use super::exact::{exact_brute_force, exact_elimination};
use super::InferenceReport;
use crate::blockgraph::{build_block_graph, BlockGraph};
use crate::decompose::{select_root, RootHeuristic, DEFAULT_CANDIDATE_BUDGET};
use crate::error::{arg_err, Result};
use crate::graph::{NodeSet, UndirectedGraph};
use crate::model::{lift_to_block_graph, project_node_marginals, FactorModel};

/// Anything that maps a factor model to per-variable marginals.
pub trait InferenceEngine: Sync {
    fn name(&self) -> &str;
    fn infer(&self, model: &FactorModel) -> Result<InferenceReport>;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BeliefPropagation(pub BpSettings);

impl InferenceEngine for BeliefPropagation {
    fn name(&self) -> &str {
        "BP"
    }

    fn infer(&self, model: &FactorModel) -> Result<InferenceReport> {
        belief_propagation(model, &self.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExactElimination;

impl InferenceEngine for ExactElimination {
    fn name(&self) -> &str {
        "Exact"
    }

    fn infer(&self, model: &FactorModel) -> Result<InferenceReport> {
        exact_elimination(model)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BruteForce;

impl InferenceEngine for BruteForce {
    fn name(&self) -> &str {
        "BruteForce"
    }

    fn infer(&self, model: &FactorModel) -> Result<InferenceReport> {
        exact_brute_force(model)
    }
}

/// How the root cluster of the block-graph is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootPolicy {
    Heuristic { heuristic: RootHeuristic, budget: usize },
    Explicit(NodeSet),
}

impl Default for RootPolicy {
    fn default() -> Self {
        RootPolicy::Heuristic { heuristic: RootHeuristic::MinDegree, budget: DEFAULT_CANDIDATE_BUDGET }
    }
}

impl RootPolicy {
    pub fn resolve(&self, g: &UndirectedGraph) -> Result<NodeSet> {
        match self {
            RootPolicy::Heuristic { heuristic, budget } => select_root(g, *heuristic, *budget),
            RootPolicy::Explicit(root) => Ok(root.clone()),
        }
    }
}

/// Builds the block-graph of `g` with clusters of at most `m` nodes, runs
/// `engine` on the lifted model and projects back to node marginals. The
/// reported time covers the whole pipeline.
pub fn generalized_inference(
    model: &FactorModel,
    g: &UndirectedGraph,
    m: usize,
    root: &RootPolicy,
    engine: &dyn InferenceEngine,
) -> Result<InferenceReport> {
    let start = Instant::now();
    if g.node_count() != model.variable_count() {
        return arg_err(format!(
            "graph has {} nodes but the model has {} variables",
            g.node_count(),
            model.variable_count()
        ));
    }
    let root = root.resolve(g)?;
    let bg = build_block_graph(g, &root, m)?;
    let mut report = inference_on_block_graph(model, &bg, engine)?;
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Same as [`generalized_inference`] for an already built block-graph.
pub fn inference_on_block_graph(
    model: &FactorModel,
    bg: &BlockGraph,
    engine: &dyn InferenceEngine,
) -> Result<InferenceReport> {
    let start = Instant::now();
    let lifted = lift_to_block_graph(model, bg)?;
    let inner = engine.infer(&lifted.model)?;
    Ok(InferenceReport {
        marginals: project_node_marginals(&lifted, &inner.marginals)?,
        converged: inner.converged,
        iterations: inner.iterations,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_grid;
    use crate::model::{ising_model, IsingConfig, PotentialKind};

    #[test]
    fn m1_equals_plain_bp() {
        let g = gen_grid(4, 4).unwrap();
        let model = ising_model(&g, &IsingConfig::new(PotentialKind::Mixed, 0.7, 9)).unwrap();
        let engine = BeliefPropagation::default();
        let plain = engine.infer(&model).unwrap();
        let lifted = generalized_inference(&model, &g, 1, &RootPolicy::default(), &engine).unwrap();
        assert_eq!(plain.marginals, lifted.marginals);
        assert_eq!(plain.iterations, lifted.iterations);
    }

    #[test]
    fn exact_engine_is_exact_for_any_m() {
        let g = gen_grid(3, 3).unwrap();
        let model = ising_model(&g, &IsingConfig::new(PotentialKind::Repulsive, 1.0, 2)).unwrap();
        let truth = exact_brute_force(&model).unwrap().marginals;
        for m in 1..=4 {
            let r = generalized_inference(&model, &g, m, &RootPolicy::default(), &ExactElimination).unwrap();
            assert!(r.marginals.max_abs_diff(&truth) < 1e-12);
        }
    }

    #[test]
    fn bp_on_block_tree_is_exact() {
        let g = gen_grid(3, 3).unwrap();
        let model = ising_model(&g, &IsingConfig::new(PotentialKind::Attractive, 1.0, 4)).unwrap();
        let truth = exact_brute_force(&model).unwrap().marginals;
        let r = generalized_inference(&model, &g, 9, &RootPolicy::default(), &BeliefPropagation::default()).unwrap();
        assert!(r.marginals.max_abs_diff(&truth) < 1e-9);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let g = gen_grid(2, 2).unwrap();
        let model = FactorModel::new(vec![2; 3], vec![]).unwrap();
        assert!(generalized_inference(&model, &g, 2, &RootPolicy::default(), &BruteForce).is_err());
    }
}
