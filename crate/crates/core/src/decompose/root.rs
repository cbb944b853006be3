use serde::{Deserialize, Serialize};

use super::block_tree::{block_tree_width, build_block_tree};
use super::elimination::{greedy_degree_order, greedy_fillin_order, triangulate};
use crate::error::{arg_err, Result};
use crate::graph::{NodeSet, UndirectedGraph};
use crate::par;

/// Number of triangulation cliques tried as root clusters by default.
pub const DEFAULT_CANDIDATE_BUDGET: usize = 10;

/// Strategy for choosing the root cluster of a block-tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootHeuristic {
    /// The lowest-id node of minimal degree.
    MinDegree,
    /// Cliques from eliminating nodes by increasing initial degree.
    GreedyDegree,
    /// Cliques from a dynamic min-fill elimination.
    GreedyFillin,
}

impl std::str::FromStr for RootHeuristic {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "min-degree" | "mindegree" => Ok(RootHeuristic::MinDegree),
            "greedy-degree" | "greedydegree" => Ok(RootHeuristic::GreedyDegree),
            "greedy-fillin" | "greedyfillin" | "min-fill" => Ok(RootHeuristic::GreedyFillin),
            other => arg_err(format!("unknown root heuristic {other:?}")),
        }
    }
}

/// Picks a root cluster for `build_block_tree`.
///
/// For the elimination-based heuristics, up to `candidate_budget` of the
/// largest triangulation cliques are tried as roots and the one giving the
/// smallest block-tree width wins (ties go to the lexicographically
/// smallest cluster).
pub fn select_root(
    g: &UndirectedGraph,
    heuristic: RootHeuristic,
    candidate_budget: usize,
) -> Result<NodeSet> {
    if candidate_budget < 1 {
        return arg_err("candidate budget must be at least 1");
    }
    g.require_connected()?;
    let order = match heuristic {
        RootHeuristic::MinDegree => {
            let v = g.nodes().min_by_key(|&v| (g.degree(v), v)).expect("graph has nodes");
            return Ok(NodeSet::singleton(v));
        }
        RootHeuristic::GreedyDegree => greedy_degree_order(g),
        RootHeuristic::GreedyFillin => greedy_fillin_order(g),
    };
    let mut cliques = triangulate(g, &order)?.cliques;
    cliques.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    cliques.truncate(candidate_budget);

    let scored = par::map_ordered(&cliques, |root| {
        build_block_tree(g, root).map(|bt| (block_tree_width(&bt), root.clone()))
    });
    let mut best: Option<(usize, NodeSet)> = None;
    for item in scored {
        let item = item?;
        if best.as_ref().is_none_or(|b| item < *b) {
            best = Some(item);
        }
    }
    Ok(best.expect("at least one candidate").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_grid;

    #[test]
    fn min_degree_on_grid() {
        let g = gen_grid(3, 3).unwrap();
        assert_eq!(select_root(&g, RootHeuristic::MinDegree, 10).unwrap(), NodeSet::from([1]));
    }

    #[test]
    fn path_roots_are_edges() {
        let g = UndirectedGraph::new(4, [(1, 2), (2, 3), (3, 4)]).unwrap();
        for h in [RootHeuristic::GreedyDegree, RootHeuristic::GreedyFillin] {
            let root = select_root(&g, h, 10).unwrap();
            let bt = build_block_tree(&g, &root).unwrap();
            assert_eq!(root, NodeSet::from([1, 2]), "{h:?}");
            assert_eq!(block_tree_width(&bt), 3);
        }
    }

    #[test]
    fn budget_must_be_positive() {
        let g = gen_grid(2, 2).unwrap();
        assert!(select_root(&g, RootHeuristic::GreedyFillin, 0).is_err());
    }

    #[test]
    fn parses_names() {
        assert_eq!("GreedyFillin".parse::<RootHeuristic>().unwrap(), RootHeuristic::GreedyFillin);
        assert_eq!("min-degree".parse::<RootHeuristic>().unwrap(), RootHeuristic::MinDegree);
        assert!("nope".parse::<RootHeuristic>().is_err());
    }
}
