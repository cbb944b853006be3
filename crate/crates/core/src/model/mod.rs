//! Discrete factor models and their re-expression over block-graph clusters.

mod factor;
mod ising;
mod lift;

pub use factor::{decode_state, encode_state, Factor, FactorModel, MarginalSet, MODEL_FILE_COMMENT};
pub use ising::{ising_model, ising_model_with_rng, IsingConfig, NormalParameter, PotentialKind, DEFAULT_FIELD_SCALE};
pub use lift::{lift_to_block_graph, lift_with_cap, project_node_marginals, LiftedModel, DEFAULT_STATE_CAP};
