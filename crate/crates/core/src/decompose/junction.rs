use serde::{Deserialize, Serialize};

use super::block_tree::BlockTree;
use crate::error::{Error, Result};
use crate::graph::NodeSet;

/// Tree of overlapping cliques with separators on its edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JunctionTree {
    pub cliques: Vec<NodeSet>,
    pub edges: Vec<(usize, usize)>,
    pub separators: Vec<NodeSet>,
}

impl JunctionTree {
    /// Largest clique size minus one.
    pub fn width(&self) -> usize {
        self.cliques.iter().map(NodeSet::len).max().unwrap_or(1).saturating_sub(1)
    }

    /// Checks that the edges form a tree, separators match, and the cliques
    /// holding any node form a connected subtree.
    pub fn check_running_intersection(&self) -> Result<()> {
        let k = self.cliques.len();
        if k == 0 {
            return Err(Error::Internal("junction tree has no cliques".into()));
        }
        if self.edges.len() + 1 != k || self.separators.len() != self.edges.len() {
            return Err(Error::Internal("junction tree edge count is not cliques - 1".into()));
        }
        for (&(a, b), sep) in self.edges.iter().zip(&self.separators) {
            if *sep != self.cliques[a].intersection(&self.cliques[b]) {
                return Err(Error::Internal(format!("separator of ({a},{b}) is not the intersection")));
            }
        }
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let max_node = self.cliques.iter().filter_map(|c| c.as_slice().last().copied()).max().unwrap_or(0);
        for v in 1..=max_node {
            let holders: Vec<usize> = (0..k).filter(|&c| self.cliques[c].contains(v)).collect();
            let Some(&start) = holders.first() else { continue };
            let mut seen = vec![false; k];
            let mut stack = vec![start];
            seen[start] = true;
            let mut count = 1;
            while let Some(c) = stack.pop() {
                for &d in &adj[c] {
                    if !seen[d] && self.cliques[d].contains(v) {
                        seen[d] = true;
                        count += 1;
                        stack.push(d);
                    }
                }
            }
            if count != holders.len() {
                return Err(Error::Internal(format!("cliques containing node {v} are not connected")));
            }
        }
        // the clique graph must itself be connected
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Internal("junction tree is disconnected".into()));
        }
        Ok(())
    }
}

/// Turns each block-tree edge into one clique (the union of its two
/// clusters). The clique of a child edge hangs off the clique of its
/// parent's edge; cliques of the root's child edges are chained together.
pub fn to_junction_tree(bt: &BlockTree) -> JunctionTree {
    let clusters = bt.clusters();
    if clusters.len() == 1 {
        return JunctionTree { cliques: vec![clusters[0].clone()], edges: Vec::new(), separators: Vec::new() };
    }
    let parents = bt.parents();
    // clique index keyed by child cluster
    let mut clique_of = vec![usize::MAX; clusters.len()];
    let mut cliques = Vec::with_capacity(clusters.len() - 1);
    for (c, parent) in parents.iter().enumerate() {
        if let Some(p) = parent {
            clique_of[c] = cliques.len();
            cliques.push(clusters[*p].union(&clusters[c]));
        }
    }
    let root = bt.root_index();
    let mut first_root_clique = None;
    let mut edges = Vec::new();
    for (c, parent) in parents.iter().enumerate() {
        let Some(p) = *parent else { continue };
        let me = clique_of[c];
        if p == root {
            match first_root_clique {
                None => first_root_clique = Some(me),
                Some(first) => edges.push((first.min(me), first.max(me))),
            }
        } else {
            let up = clique_of[p];
            edges.push((up.min(me), up.max(me)));
        }
    }
    edges.sort_unstable();
    let separators = edges.iter().map(|&(a, b)| cliques[a].intersection(&cliques[b])).collect();
    JunctionTree { cliques, edges, separators }
}
