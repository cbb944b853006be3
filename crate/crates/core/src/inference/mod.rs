//! Inference engines: loopy BP, exact oracles, and the block-graph wrapper.

mod bp;
mod exact;
mod table;
mod wrapper;

use serde::{Deserialize, Serialize};

use crate::model::MarginalSet;

pub use bp::{belief_propagation, BpSettings, Schedule};
pub use exact::{check_elimination_feasible, exact_brute_force, exact_elimination, BRUTE_FORCE_CAP, ELIMINATION_CAP};
pub use wrapper::{
    generalized_inference, inference_on_block_graph, BeliefPropagation, BruteForce, ExactElimination,
    InferenceEngine, RootPolicy,
};

/// Marginals plus run statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceReport {
    pub marginals: MarginalSet,
    pub converged: bool,
    pub iterations: usize,
    pub seconds: f64,
}
