use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::graph::{NodeId, NodeSet, UndirectedGraph};

/// A permutation of the node ids `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EliminationOrder(Vec<NodeId>);

impl EliminationOrder {
    pub fn new(order: Vec<NodeId>, node_count: usize) -> Result<Self> {
        if order.len() != node_count {
            return arg_err(format!("order has {} entries, expected {node_count}", order.len()));
        }
        let mut seen = vec![false; node_count + 1];
        for &v in &order {
            if v == 0 || v > node_count || seen[v] {
                return arg_err(format!("order is not a permutation of 1..={node_count} (at {v})"));
            }
            seen[v] = true;
        }
        Ok(EliminationOrder(order))
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Result of eliminating a graph along an order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    /// Added edges `(u, v)` with `u < v`, in the order they were created.
    pub fill_edges: Vec<(NodeId, NodeId)>,
    /// Maximal cliques of the chordal completion, in elimination order.
    pub cliques: Vec<NodeSet>,
}

impl Triangulation {
    /// Largest clique size minus one.
    pub fn width(&self) -> usize {
        self.cliques.iter().map(NodeSet::len).max().unwrap_or(1).saturating_sub(1)
    }
}

type Adjacency = Vec<BTreeSet<NodeId>>;

fn adjacency(g: &UndirectedGraph) -> Adjacency {
    let mut adj = vec![BTreeSet::new(); g.node_count() + 1];
    for v in g.nodes() {
        adj[v].extend(g.neighbors(v).iter().copied());
    }
    adj
}

/// Removes `v` from the working graph, connecting its remaining neighbors.
/// Returns the elimination clique `{v} ∪ N(v)` and pushes new fill edges.
fn eliminate(adj: &mut Adjacency, v: NodeId, fill: &mut Vec<(NodeId, NodeId)>) -> NodeSet {
    let nbrs: Vec<NodeId> = adj[v].iter().copied().collect();
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if adj[a].insert(b) {
                adj[b].insert(a);
                fill.push((a.min(b), a.max(b)));
            }
        }
    }
    for &a in &nbrs {
        adj[a].remove(&v);
    }
    adj[v].clear();
    let mut clique = nbrs;
    clique.push(v);
    NodeSet::new(clique)
}

fn fill_count(adj: &Adjacency, v: NodeId) -> usize {
    let nbrs: Vec<NodeId> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Simulates elimination along `order` and returns the fill edges and the
/// maximal cliques of the triangulated graph.
pub fn triangulate(g: &UndirectedGraph, order: &EliminationOrder) -> Result<Triangulation> {
    if order.len() != g.node_count() {
        return arg_err(format!("order covers {} nodes, graph has {}", order.len(), g.node_count()));
    }
    let mut adj = adjacency(g);
    let mut fill_edges = Vec::new();
    let elim: Vec<NodeSet> = order.as_slice().iter().map(|&v| eliminate(&mut adj, v, &mut fill_edges)).collect();
    Ok(Triangulation { fill_edges, cliques: maximal_only(elim) })
}

/// Elimination clique `{v} ∪ later neighbors` of each node, in `order`.
pub(crate) fn elimination_cliques(g: &UndirectedGraph, order: &EliminationOrder) -> Vec<NodeSet> {
    let mut adj = adjacency(g);
    let mut fill = Vec::new();
    order.as_slice().iter().map(|&v| eliminate(&mut adj, v, &mut fill)).collect()
}

/// Drops cliques contained in another one, keeping the first occurrence.
fn maximal_only(cliques: Vec<NodeSet>) -> Vec<NodeSet> {
    let mut keep = vec![true; cliques.len()];
    for i in 0..cliques.len() {
        for j in 0..cliques.len() {
            if i == j || !keep[j] {
                continue;
            }
            let contained = cliques[i].len() < cliques[j].len() && cliques[i].is_subset(&cliques[j]);
            let duplicate = cliques[i] == cliques[j] && j < i;
            if contained || duplicate {
                keep[i] = false;
                break;
            }
        }
    }
    cliques.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect()
}

/// Static order: nodes sorted by initial degree, ties by id.
pub fn greedy_degree_order(g: &UndirectedGraph) -> EliminationOrder {
    let mut order: Vec<NodeId> = g.nodes().collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    EliminationOrder(order)
}

/// Dynamic min-fill order: repeatedly eliminate the node whose
/// elimination adds the fewest edges, ties by id.
pub fn greedy_fillin_order(g: &UndirectedGraph) -> EliminationOrder {
    let n = g.node_count();
    let mut adj = adjacency(g);
    let mut fills: Vec<usize> = (0..=n).map(|v| if v == 0 { 0 } else { fill_count(&adj, v) }).collect();
    let mut alive = vec![true; n + 1];
    alive[0] = false;
    let mut order = Vec::with_capacity(n);
    let mut scratch = Vec::new();
    for _ in 0..n {
        let v = (1..=n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fills[v], v))
            .expect("a node remains");
        let nbrs: Vec<NodeId> = adj[v].iter().copied().collect();
        eliminate(&mut adj, v, &mut scratch);
        alive[v] = false;
        order.push(v);
        // only nodes within distance two of v can see their fill change
        let mut touched = BTreeSet::new();
        for &a in &nbrs {
            touched.insert(a);
            touched.extend(adj[a].iter().copied());
        }
        for u in touched {
            if alive[u] {
                fills[u] = fill_count(&adj, u);
            }
        }
    }
    EliminationOrder(order)
}
