//! Undirected simple graphs with 1-based node ids and the traversal
//! primitives used by the decompositions.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};

/// Node identifier. Ids are contiguous and start at 1.
pub type NodeId = usize;

/// Default number of pairing-model attempts for [`gen_random_regular`].
pub const DEFAULT_REGULAR_RETRIES: usize = 1000;

/// A sorted set of distinct node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSet(Vec<NodeId>);

impl NodeSet {
    /// Builds a set from arbitrary ids, sorting and removing duplicates.
    pub fn new(mut ids: Vec<NodeId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        NodeSet(ids)
    }

    pub fn singleton(id: NodeId) -> Self {
        NodeSet(vec![id])
    }

    pub fn empty() -> Self {
        NodeSet(Vec::new())
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<NodeId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    /// Smallest member, or `None` for the empty set.
    pub fn min(&self) -> Option<NodeId> {
        self.0.first().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        NodeSet(out)
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }
}

impl From<Vec<NodeId>> for NodeSet {
    fn from(ids: Vec<NodeId>) -> Self {
        NodeSet::new(ids)
    }
}

impl<const N: usize> From<[NodeId; N]> for NodeSet {
    fn from(ids: [NodeId; N]) -> Self {
        NodeSet::new(ids.to_vec())
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        NodeSet::new(iter.into_iter().collect())
    }
}

/// Simple undirected graph over nodes `1..=node_count`.
///
/// Neighbor lists are kept sorted, so every traversal here is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    // adj[0] is unused so ids index directly.
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl UndirectedGraph {
    /// Builds a graph, rejecting out-of-range ids, self-loops and duplicate edges.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        if node_count == 0 {
            return arg_err("graph must have at least one node");
        }
        let mut adj = vec![Vec::new(); node_count + 1];
        let mut edge_count = 0;
        for (u, v) in edges {
            if u == 0 || v == 0 || u > node_count || v > node_count {
                return arg_err(format!("edge ({u},{v}) has an id outside 1..={node_count}"));
            }
            if u == v {
                return arg_err(format!("self-loop on node {u}"));
            }
            adj[u].push(v);
            adj[v].push(u);
            edge_count += 1;
        }
        for (u, list) in adj.iter_mut().enumerate().skip(1) {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return arg_err(format!("duplicate edge ({u},{})", w[0]));
            }
        }
        Ok(UndirectedGraph { adj, edge_count })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        1..=self.node_count()
    }

    pub fn all_nodes(&self) -> NodeSet {
        NodeSet((1..=self.node_count()).collect())
    }

    /// Sorted neighbors of `v`. Panics if `v` is not a node.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.contains_node(u) && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        v >= 1 && v <= self.node_count()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .skip(1)
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub(crate) fn check_set(&self, s: &NodeSet) -> Result<()> {
        match s.iter().find(|&v| !self.contains_node(v)) {
            Some(v) => arg_err(format!("node id {v} outside 1..={}", self.node_count())),
            None => Ok(()),
        }
    }

    /// Nodes outside `s` adjacent to some member of `s`.
    pub fn neighbors_of_set(&self, s: &NodeSet) -> Result<NodeSet> {
        if s.is_empty() {
            return arg_err("neighbors_of_set needs a non-empty set");
        }
        self.check_set(s)?;
        let mut mark = vec![false; self.node_count() + 1];
        for v in s.iter() {
            mark[v] = true;
        }
        let mut out = Vec::new();
        for v in s.iter() {
            for &w in &self.adj[v] {
                if !mark[w] {
                    mark[w] = true;
                    out.push(w);
                }
            }
        }
        Ok(NodeSet::new(out))
    }

    /// BFS layering from `root`: the first layer is `root`, and each later
    /// layer holds the unvisited neighbors of the previous one.
    ///
    /// Fails if some node is unreachable from the root.
    pub fn bfs_layers(&self, root: &NodeSet) -> Result<Vec<NodeSet>> {
        if root.is_empty() {
            return arg_err("root set is empty");
        }
        self.check_set(root)?;
        let mut seen = vec![false; self.node_count() + 1];
        for v in root.iter() {
            seen[v] = true;
        }
        let mut layers = vec![root.clone()];
        let mut reached = root.len();
        loop {
            let last = layers.last().expect("at least the root layer");
            let mut next = Vec::new();
            for v in last.iter() {
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            reached += next.len();
            layers.push(NodeSet::new(next));
        }
        if reached < self.node_count() {
            let missing = (1..=self.node_count()).find(|&v| !seen[v]).unwrap_or(0);
            return Err(Error::Decomposition(format!(
                "graph is disconnected: node {missing} is not reachable from the root"
            )));
        }
        Ok(layers)
    }

    /// Connected components of the subgraph induced by `subset`, ordered by
    /// smallest member.
    pub fn connected_components(&self, subset: &NodeSet) -> Result<Vec<NodeSet>> {
        self.check_set(subset)?;
        Ok(self.components_unchecked(subset))
    }

    pub(crate) fn components_unchecked(&self, subset: &NodeSet) -> Vec<NodeSet> {
        let n = self.node_count();
        let mut inside = vec![false; n + 1];
        for v in subset.iter() {
            inside[v] = true;
        }
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        // subset is ascending, so components come out ordered by min id.
        for start in subset.iter() {
            if !inside[start] {
                continue;
            }
            inside[start] = false;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if inside[w] {
                        inside[w] = false;
                        queue.push_back(w);
                    }
                }
            }
            out.push(NodeSet::new(comp));
        }
        out
    }

    /// Nodes of `subset` in BFS order over the induced subgraph, starting at
    /// its smallest member and restarting at the next unvisited member if
    /// the subset is disconnected.
    pub(crate) fn induced_bfs_order(&self, subset: &NodeSet) -> Vec<NodeId> {
        let mut inside = vec![false; self.node_count() + 1];
        for v in subset.iter() {
            inside[v] = true;
        }
        let mut order = Vec::with_capacity(subset.len());
        let mut queue = VecDeque::new();
        for start in subset.iter() {
            if !inside[start] {
                continue;
            }
            inside[start] = false;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in &self.adj[v] {
                    if inside[w] {
                        inside[w] = false;
                        queue.push_back(w);
                    }
                }
            }
        }
        order
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n + 1];
        let mut stack = vec![1];
        seen[1] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            let reach = self.components_unchecked(&self.all_nodes());
            let stray = reach.get(1).and_then(NodeSet::min).unwrap_or(0);
            Err(Error::Decomposition(format!(
                "graph is disconnected: node {stray} is not reachable from node 1"
            )))
        }
    }

    /// Parses the edge-list text format.
    ///
    /// Each non-comment line is `u v`; `#` starts a comment line and an
    /// optional `p <node_count>` header fixes the node count (otherwise the
    /// largest id seen is used).
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let first = parts.next().unwrap_or_default();
            let parse_id = |tok: Option<&str>| -> Result<usize> {
                let tok = tok.ok_or_else(|| Error::Parse { line: lineno, msg: "missing field".into() })?;
                tok.parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("bad id {tok:?}: {e}"),
                })
            };
            if first == "p" {
                if declared.is_some() || !edges.is_empty() {
                    return Err(Error::Parse { line: lineno, msg: "header must come before edges".into() });
                }
                declared = Some(parse_id(parts.next())?);
            } else {
                let u = parse_id(Some(first))?;
                let v = parse_id(parts.next())?;
                edges.push((u, v));
            }
            if parts.next().is_some() {
                return Err(Error::Parse { line: lineno, msg: "trailing tokens".into() });
            }
        }
        let inferred = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0);
        let n = declared.unwrap_or(inferred);
        if n < inferred {
            return arg_err(format!("header declares {n} nodes but edge uses id {inferred}"));
        }
        UndirectedGraph::new(n, edges)
    }

    /// Serializes to the edge-list format with a `p` header and edges sorted.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("p {}\n", self.node_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

/// `rows x cols` 4-neighbor lattice with row-major ids.
pub fn gen_grid(rows: usize, cols: usize) -> Result<UndirectedGraph> {
    if rows == 0 || cols == 0 {
        return arg_err(format!("grid dimensions must be positive, got {rows}x{cols}"));
    }
    let id = |r: usize, c: usize| r * cols + c + 1;
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    UndirectedGraph::new(rows * cols, edges)
}

/// Connected simple `degree`-regular graph on `n` nodes from the pairing
/// model, rejecting draws with loops, multi-edges or more than one component.
pub fn gen_random_regular<R: Rng + ?Sized>(
    n: usize,
    degree: usize,
    rng: &mut R,
) -> Result<UndirectedGraph> {
    gen_random_regular_with_retries(n, degree, DEFAULT_REGULAR_RETRIES, rng)
}

pub fn gen_random_regular_with_retries<R: Rng + ?Sized>(
    n: usize,
    degree: usize,
    retries: usize,
    rng: &mut R,
) -> Result<UndirectedGraph> {
    if n == 0 || degree == 0 {
        return arg_err("random regular graph needs n >= 1 and degree >= 1");
    }
    if degree >= n {
        return arg_err(format!("degree {degree} must be smaller than n = {n}"));
    }
    if (n * degree) % 2 == 1 {
        return arg_err(format!("n * degree = {} is odd", n * degree));
    }
    let mut points: Vec<NodeId> = (1..=n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    'attempt: for _ in 0..retries {
        points.shuffle(rng);
        let mut adj = vec![Vec::with_capacity(degree); n + 1];
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj[u].contains(&v) {
                continue 'attempt;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let edges = points.chunks_exact(2).map(|p| (p[0], p[1]));
        let g = UndirectedGraph::new(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "no simple connected {degree}-regular graph on {n} nodes after {retries} attempts"
    )))
}
