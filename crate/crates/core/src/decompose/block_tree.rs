use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeSet, UndirectedGraph};

/// Tree over non-overlapping clusters of the nodes of a graph.
///
/// Clusters are stored layer by layer (root first) and, inside a layer, by
/// smallest member. Edges are `(i, j)` cluster-index pairs with `i < j`,
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTree {
    clusters: Vec<NodeSet>,
    edges: Vec<(usize, usize)>,
    /// 1-based BFS layer of each cluster.
    layers: Vec<usize>,
    root: usize,
}

impl BlockTree {
    pub fn clusters(&self) -> &[NodeSet] {
        &self.clusters
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn layer_of(&self, cluster: usize) -> usize {
        self.layers[cluster]
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn root_index(&self) -> usize {
        self.root
    }

    pub fn root_cluster(&self) -> &NodeSet {
        &self.clusters[self.root]
    }

    pub fn max_cluster_size(&self) -> usize {
        self.clusters.iter().map(NodeSet::len).max().unwrap_or(0)
    }

    /// Cluster index for every node id (index 0 unused).
    pub fn cluster_map(&self) -> Vec<usize> {
        cluster_map(&self.clusters)
    }

    /// Parent cluster of each cluster in the tree rooted at the root cluster.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut adj = vec![Vec::new(); self.clusters.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; self.clusters.len()];
        let mut seen = vec![false; self.clusters.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(c) = stack.pop() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    parent[d] = Some(c);
                    stack.push(d);
                }
            }
        }
        parent
    }

    /// Checks every structural invariant of a block-tree for `g`.
    pub fn check_invariants(&self, g: &UndirectedGraph) -> Result<()> {
        let owner = check_partition(g, &self.clusters)?;
        let k = self.clusters.len();
        if self.edges.len() + 1 != k {
            return Err(Error::Internal(format!("{} clusters but {} edges", k, self.edges.len())));
        }
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; k];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(c) = stack.pop() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Internal("block-tree edges do not connect all clusters".into()));
        }
        for (c, nbrs) in adj.iter().enumerate() {
            if self.layers[c] >= 2 {
                let up = nbrs.iter().filter(|&&d| self.layers[d] + 1 == self.layers[c]).count();
                if up != 1 {
                    return Err(Error::Internal(format!(
                        "cluster {c} in layer {} has {up} neighbors in the previous layer",
                        self.layers[c]
                    )));
                }
            }
        }
        check_edge_coverage(g, &owner, &self.edges)
    }
}

pub(crate) fn cluster_map(clusters: &[NodeSet]) -> Vec<usize> {
    let n = clusters.iter().map(NodeSet::len).sum::<usize>();
    let mut owner = vec![usize::MAX; n + 1];
    for (ci, c) in clusters.iter().enumerate() {
        for v in c.iter() {
            if v < owner.len() {
                owner[v] = ci;
            }
        }
    }
    owner
}

/// Verifies that `clusters` partition the nodes of `g`; returns the owner map.
pub(crate) fn check_partition(g: &UndirectedGraph, clusters: &[NodeSet]) -> Result<Vec<usize>> {
    let mut owner = vec![usize::MAX; g.node_count() + 1];
    for (ci, c) in clusters.iter().enumerate() {
        if c.is_empty() {
            return Err(Error::Internal(format!("cluster {ci} is empty")));
        }
        for v in c.iter() {
            if !g.contains_node(v) {
                return Err(Error::Internal(format!("cluster {ci} has unknown node {v}")));
            }
            if owner[v] != usize::MAX {
                return Err(Error::Internal(format!("node {v} is in clusters {} and {ci}", owner[v])));
            }
            owner[v] = ci;
        }
    }
    if let Some(v) = (1..=g.node_count()).find(|&v| owner[v] == usize::MAX) {
        return Err(Error::Internal(format!("node {v} is in no cluster")));
    }
    Ok(owner)
}

/// Cluster-graph edges must be exactly those induced by crossing edges of `g`.
pub(crate) fn check_edge_coverage(
    g: &UndirectedGraph,
    owner: &[usize],
    edges: &[(usize, usize)],
) -> Result<()> {
    let induced = induced_cluster_edges(g, owner);
    let mut given = edges.to_vec();
    given.sort_unstable();
    if induced != given {
        return Err(Error::Internal(format!(
            "cluster edges {given:?} differ from induced edges {induced:?}"
        )));
    }
    Ok(())
}

/// Sorted, deduplicated `(a, b)` cluster pairs (`a < b`) joined by an edge of `g`.
pub(crate) fn induced_cluster_edges(g: &UndirectedGraph, owner: &[usize]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .filter_map(|(u, v)| {
            let (a, b) = (owner[u], owner[v]);
            (a != b).then(|| (a.min(b), a.max(b)))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Forward pass: BFS layers split into induced components. The root layer
/// stays one cluster even when the root set is not connected.
pub(crate) fn layered_components(g: &UndirectedGraph, root: &NodeSet) -> Result<Vec<Vec<NodeSet>>> {
    if root.is_empty() {
        return Err(Error::Argument("root cluster is empty".into()));
    }
    let layers = g.bfs_layers(root)?;
    Ok(layers
        .iter()
        .enumerate()
        .map(|(k, layer)| if k == 0 { vec![layer.clone()] } else { g.components_unchecked(layer) })
        .collect())
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Builds a block-tree rooted at `root` with a forward BFS pass and a
/// backward merging pass.
///
/// Going from the deepest layer up, every cluster of layer `i` pulls all the
/// clusters of layer `i - 1` it touches into one, so each cluster ends up
/// with a single parent.
pub fn build_block_tree(g: &UndirectedGraph, root: &NodeSet) -> Result<BlockTree> {
    let mut layers = layered_components(g, root)?;
    let n = g.node_count();
    // position of each node inside its layer's component list
    let mut slot = vec![0usize; n + 1];
    for layer in &layers {
        for (ci, c) in layer.iter().enumerate() {
            for v in c.iter() {
                slot[v] = ci;
            }
        }
    }
    let mut layer_index = vec![0usize; n + 1];
    for (k, layer) in layers.iter().enumerate() {
        for c in layer {
            for v in c.iter() {
                layer_index[v] = k;
            }
        }
    }

    for i in (2..layers.len()).rev() {
        let prev = i - 1;
        let mut uf: Vec<usize> = (0..layers[prev].len()).collect();
        for comp in &layers[i] {
            let mut first: Option<usize> = None;
            for v in comp.iter() {
                for &w in g.neighbors(v) {
                    if layer_index[w] != prev {
                        continue;
                    }
                    let r = find(&mut uf, slot[w]);
                    match first {
                        None => first = Some(r),
                        Some(f) => {
                            let f = find(&mut uf, f);
                            if f != r {
                                let (lo, hi) = (f.min(r), f.max(r));
                                uf[hi] = lo;
                            }
                        }
                    }
                }
            }
        }
        let mut groups: Vec<Vec<NodeId>> = vec![Vec::new(); layers[prev].len()];
        for (ci, comp) in layers[prev].iter().enumerate() {
            let r = find(&mut uf, ci);
            groups[r].extend(comp.iter());
        }
        let mut merged: Vec<NodeSet> =
            groups.into_iter().filter(|g| !g.is_empty()).map(NodeSet::new).collect();
        merged.sort_by_key(|c| c.min());
        for (ci, c) in merged.iter().enumerate() {
            for v in c.iter() {
                slot[v] = ci;
            }
        }
        layers[prev] = merged;
    }

    let mut clusters = Vec::new();
    let mut layer_numbers = Vec::new();
    for (k, layer) in layers.into_iter().enumerate() {
        for c in layer {
            clusters.push(c);
            layer_numbers.push(k + 1);
        }
    }
    let owner = cluster_map(&clusters);
    let edges = induced_cluster_edges(g, &owner);
    Ok(BlockTree { clusters, edges, layers: layer_numbers, root: 0 })
}

/// Largest sum of sizes of two adjacent clusters; the root size for a
/// single-cluster tree.
pub fn block_tree_width(bt: &BlockTree) -> usize {
    if bt.edges.is_empty() {
        return bt.clusters.first().map_or(0, NodeSet::len);
    }
    bt.edges
        .iter()
        .map(|&(a, b)| bt.clusters[a].len() + bt.clusters[b].len())
        .max()
        .unwrap_or(0)
}
