//! Block-tree and block-graph decompositions of undirected graphs, and a
//! wrapper that runs belief propagation over the resulting non-overlapping
//! clusters.
//!
//! The pipeline is:
//!
//! 1. [`graph`]: undirected graphs, BFS layering and induced components.
//! 2. [`decompose`]: block-trees, widths, elimination orders, junction trees.
//! 3. [`blockgraph`]: splitting oversized clusters into a block-graph.
//! 4. [`model`]: discrete factor models, Ising generators and lifting onto clusters.
//! 5. [`inference`]: loopy BP, exact oracles and the generalized wrapper.
//! 6. [`harness`]: seeded multi-trial experiments and result files.
//!
//! With the default `parallel` feature, independent work items (experiment
//! trials, candidate roots) are evaluated on the rayon pool. Results are
//! identical with the feature disabled.

pub mod blockgraph;
pub mod decompose;
pub mod error;
pub mod graph;
pub mod harness;
pub mod inference;
pub mod model;
mod par;

pub use blockgraph::{build_block_graph, build_block_graph_random, girth_proxy, BlockGraph};
pub use decompose::{
    block_tree_width, build_block_tree, select_root, synth_block_structured, to_junction_tree,
    triangulate, BlockTree, EliminationOrder, JunctionTree, RootHeuristic,
};
pub use error::{Error, Result};
pub use graph::{NodeId, NodeSet, UndirectedGraph};
pub use inference::{
    belief_propagation, exact_brute_force, exact_elimination, generalized_inference, BpSettings,
    InferenceEngine, InferenceReport, RootPolicy, Schedule,
};
pub use model::{
    ising_model, lift_to_block_graph, project_node_marginals, FactorModel, IsingConfig,
    LiftedModel, MarginalSet, NormalParameter, PotentialKind,
};
