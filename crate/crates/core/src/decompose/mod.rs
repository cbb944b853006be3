//! Block-tree construction, widths, elimination orders, root selection and
//! junction-tree conversion.

pub(crate) mod block_tree;
pub(crate) mod elimination;
mod junction;
mod root;
mod synth;

pub use block_tree::{block_tree_width, build_block_tree, BlockTree};
pub use elimination::{greedy_degree_order, greedy_fillin_order, triangulate, EliminationOrder, Triangulation};
pub use junction::{to_junction_tree, JunctionTree};
pub use root::{select_root, RootHeuristic, DEFAULT_CANDIDATE_BUDGET};
pub use synth::synth_block_structured;
