//! Block-graphs: non-overlapping clusters of bounded size whose cluster
//! adjacency may contain cycles.
//!
//! [`build_block_graph`] follows the block-tree construction but caps every
//! cluster at `m` nodes. Oversized layer components are cut into connected
//! chunks, and small clusters of a layer are merged pairwise only when they
//! touch a common cluster of the next layer, which removes one edge of the
//! final cluster graph per merge and so pushes cycles to be longer.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decompose::block_tree::{check_edge_coverage, check_partition, induced_cluster_edges, layered_components};
use crate::decompose::build_block_tree;
use crate::error::{arg_err, Error, Result};
use crate::graph::{NodeSet, UndirectedGraph};

/// Clusters of at most `m` nodes partitioning a graph, with the cluster
/// edges induced by crossing graph edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockGraph {
    /// Ordered by smallest member.
    clusters: Vec<NodeSet>,
    edges: Vec<(usize, usize)>,
    /// Index of the cluster holding the smallest root node, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<usize>,
    /// 1-based BFS layer per cluster; empty for hand-built block-graphs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    layers: Vec<usize>,
    m: usize,
}

impl BlockGraph {
    /// Builds a block-graph from an explicit clustering of `g`.
    pub fn from_clusters(g: &UndirectedGraph, clusters: Vec<NodeSet>, m: usize) -> Result<Self> {
        Self::assemble(g, clusters.into_iter().map(|c| (c, 0)).collect(), None, m)
    }

    fn assemble(
        g: &UndirectedGraph,
        mut tagged: Vec<(NodeSet, usize)>,
        root_node: Option<usize>,
        m: usize,
    ) -> Result<Self> {
        if m < 1 {
            return arg_err("maximum cluster size m must be at least 1");
        }
        tagged.sort_by_key(|(c, _)| c.min());
        let (clusters, layers): (Vec<NodeSet>, Vec<usize>) = tagged.into_iter().unzip();
        let owner = check_partition(g, &clusters).map_err(|e| Error::Argument(e.to_string()))?;
        if let Some((i, c)) = clusters.iter().enumerate().find(|(_, c)| c.len() > m) {
            return arg_err(format!("cluster {i} has {} nodes, more than m = {m}", c.len()));
        }
        let edges = induced_cluster_edges(g, &owner);
        let root = root_node.map(|v| owner[v]);
        let layers = if layers.iter().all(|&l| l > 0) { layers } else { Vec::new() };
        Ok(BlockGraph { clusters, edges, root, layers, m })
    }

    pub fn clusters(&self) -> &[NodeSet] {
        &self.clusters
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn max_cluster_size(&self) -> usize {
        self.m
    }

    pub fn root_index(&self) -> Option<usize> {
        self.root
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    /// Cluster index for every node id (index 0 unused).
    pub fn cluster_map(&self) -> Vec<usize> {
        crate::decompose::block_tree::cluster_map(&self.clusters)
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.clusters.len() && girth_proxy(self) == 0
    }

    /// Partition, size bound and induced-edge invariants.
    pub fn check_invariants(&self, g: &UndirectedGraph) -> Result<()> {
        let owner = check_partition(g, &self.clusters)?;
        if let Some(c) = self.clusters.iter().find(|c| c.len() > self.m) {
            return Err(Error::Internal(format!("cluster {c:?} exceeds m = {}", self.m)));
        }
        check_edge_coverage(g, &owner, &self.edges)
    }
}

/// Cuts `component` into chunks of at most `m` nodes along a BFS order of
/// its induced subgraph, so each chunk is connected whenever the component is.
fn split_connected(g: &UndirectedGraph, component: &NodeSet, m: usize) -> Vec<NodeSet> {
    g.induced_bfs_order(component).chunks(m).map(|c| NodeSet::new(c.to_vec())).collect()
}

/// Greedily merges clusters that touch a common next-layer cluster while the
/// merged size stays within `m`. `next_of[i]` lists the next-layer clusters
/// adjacent to `small[i]`.
fn merge_shared_neighbors(small: Vec<NodeSet>, mut next_of: Vec<BTreeSet<usize>>, m: usize) -> Vec<NodeSet> {
    let mut clusters: Vec<Option<NodeSet>> = small.into_iter().map(Some).collect();
    loop {
        let mut changed = false;
        for i in 0..clusters.len() {
            if clusters[i].is_none() {
                continue;
            }
            for j in i + 1..clusters.len() {
                let (Some(a), Some(b)) = (&clusters[i], &clusters[j]) else { continue };
                if a.len() + b.len() > m || next_of[i].is_disjoint(&next_of[j]) {
                    continue;
                }
                let merged = a.union(b);
                let moved = std::mem::take(&mut next_of[j]);
                next_of[i].extend(moved);
                clusters[i] = Some(merged);
                clusters[j] = None;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    clusters.into_iter().flatten().collect()
}

/// Block-graph with every cluster of size at most `m`, built layer by layer
/// from the deepest BFS layer up to the root.
pub fn build_block_graph(g: &UndirectedGraph, root: &NodeSet, m: usize) -> Result<BlockGraph> {
    if m < 1 {
        return arg_err("maximum cluster size m must be at least 1");
    }
    let layers = layered_components(g, root)?;
    let n = g.node_count();
    // final cluster index within the layer below the one being processed
    let mut next_owner = vec![usize::MAX; n + 1];
    let mut tagged = Vec::new();

    for k in (0..layers.len()).rev() {
        let mut pieces = Vec::new();
        let mut small = Vec::new();
        for comp in &layers[k] {
            if comp.len() > m {
                pieces.extend(split_connected(g, comp, m));
            } else {
                small.push(comp.clone());
            }
        }
        if k + 1 < layers.len() && small.len() > 1 {
            let next_of = small
                .iter()
                .map(|c| {
                    c.iter()
                        .flat_map(|v| g.neighbors(v).iter().copied())
                        .filter(|&w| next_owner[w] != usize::MAX)
                        .map(|w| next_owner[w])
                        .collect::<BTreeSet<usize>>()
                })
                .collect();
            small = merge_shared_neighbors(small, next_of, m);
        }
        let mut finals = small;
        finals.extend(pieces);
        finals.sort_by_key(|c| c.min());
        next_owner.iter_mut().for_each(|o| *o = usize::MAX);
        for (ci, c) in finals.iter().enumerate() {
            for v in c.iter() {
                next_owner[v] = ci;
            }
        }
        tagged.extend(finals.into_iter().map(|c| (c, k + 1)));
    }
    BlockGraph::assemble(g, tagged, root.min(), m)
}

/// Baseline: build the block-tree, then cut every cluster larger than `m`
/// into random parts of at most `m` nodes. No merging.
pub fn build_block_graph_random<R: Rng + ?Sized>(
    g: &UndirectedGraph,
    root: &NodeSet,
    m: usize,
    rng: &mut R,
) -> Result<BlockGraph> {
    if m < 1 {
        return arg_err("maximum cluster size m must be at least 1");
    }
    let bt = build_block_tree(g, root)?;
    let mut tagged = Vec::new();
    for (ci, cluster) in bt.clusters().iter().enumerate() {
        let layer = bt.layer_of(ci);
        if cluster.len() <= m {
            tagged.push((cluster.clone(), layer));
        } else {
            let mut nodes = cluster.as_slice().to_vec();
            nodes.shuffle(rng);
            tagged.extend(nodes.chunks(m).map(|c| (NodeSet::new(c.to_vec()), layer)));
        }
    }
    BlockGraph::assemble(g, tagged, root.min(), m)
}

/// Length of the shortest cycle in the cluster graph; 0 when it is a forest.
pub fn girth_proxy(bg: &BlockGraph) -> usize {
    let k = bg.clusters.len();
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in &bg.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; k];
    let mut parent = vec![usize::MAX; k];
    let mut queue = VecDeque::new();
    for s in 0..k {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        parent[s] = usize::MAX;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    if best == usize::MAX {
        0
    } else {
        best
    }
}
