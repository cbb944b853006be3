#![allow(dead_code)]

use blockgraph::graph::{NodeId, NodeSet, UndirectedGraph};
use blockgraph::model::{Factor, FactorModel};
use rand::seq::index::sample;
use rand::Rng;

/// Random spanning tree plus each remaining pair with probability `p`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, p: f64) -> UndirectedGraph {
    let mut edges = Vec::new();
    for v in 2..=n {
        edges.push((rng.random_range(1..v), v));
    }
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    UndirectedGraph::new(n, edges).expect("valid edge list")
}

/// Random tree on `n` nodes.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> UndirectedGraph {
    random_connected(rng, n, 0.0)
}

/// Non-empty random node subset of at most `max` nodes.
pub fn random_root<R: Rng>(rng: &mut R, g: &UndirectedGraph, max: usize) -> NodeSet {
    let n = g.node_count();
    let k = rng.random_range(1..=max.min(n));
    NodeSet::new(sample(rng, n, k).into_iter().map(|i| i + 1).collect())
}

fn random_table<R: Rng>(rng: &mut R, size: usize) -> Vec<f64> {
    (0..size).map(|_| rng.random_range(0.2..3.0)).collect()
}

/// Binary model on `g`: random unaries, one factor per edge, and a factor
/// over every triangle `(u, v, w)` with `u < v < w` found with probability `p3`.
pub fn random_binary_model<R: Rng>(rng: &mut R, g: &UndirectedGraph, p3: f64) -> FactorModel {
    let mut factors = Vec::new();
    for v in g.nodes() {
        if rng.random_bool(0.7) {
            factors.push(Factor::new(vec![v], random_table(rng, 2)));
        }
    }
    let edges: Vec<(NodeId, NodeId)> = g.edges().collect();
    for &(u, v) in &edges {
        factors.push(Factor::new(vec![u, v], random_table(rng, 4)));
        for &w in g.neighbors(v) {
            if w > v && g.has_edge(u, w) && rng.random_bool(p3) {
                factors.push(Factor::new(vec![u, v, w], random_table(rng, 8)));
            }
        }
    }
    FactorModel::new(vec![2; g.node_count()], factors).expect("valid model")
}
