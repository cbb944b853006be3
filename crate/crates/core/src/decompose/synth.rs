use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{arg_err, Result};
use crate::graph::{NodeId, UndirectedGraph};

/// Uniform random labelled tree on `count` vertices (0-based) via a random
/// Prüfer sequence.
fn random_tree<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<(usize, usize)> {
    match count {
        0 | 1 => return Vec::new(),
        2 => return vec![(0, 1)],
        _ => {}
    }
    let seq: Vec<usize> = (0..count - 2).map(|_| rng.random_range(0..count)).collect();
    let mut degree = vec![1usize; count];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..count).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(count - 1);
    for &s in &seq {
        let leaf = leaves.pop_first().expect("a leaf always exists");
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let a = leaves.pop_first().expect("two leaves remain");
    let b = leaves.pop_first().expect("two leaves remain");
    edges.push((a, b));
    edges
}

fn connected_without(adj: &[BTreeSet<NodeId>], n: usize) -> bool {
    let mut seen = vec![false; n + 1];
    let mut stack = vec![1];
    seen[1] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Graph with planted block structure: consecutive clusters of `k` nodes are
/// made cliques, clusters adjacent in a random tree are fully joined, and
/// then `removal_fraction` of the edges are deleted at random wherever that
/// keeps the graph connected.
pub fn synth_block_structured<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    removal_fraction: f64,
    rng: &mut R,
) -> Result<UndirectedGraph> {
    if k == 0 || k > n {
        return arg_err(format!("need 1 <= k <= n, got k = {k}, n = {n}"));
    }
    if !(0.0..1.0).contains(&removal_fraction) {
        return arg_err(format!("removal fraction {removal_fraction} not in [0, 1)"));
    }
    let count = n.div_ceil(k);
    let members = |c: usize| (c * k + 1)..=((c + 1) * k).min(n);

    let mut adj = vec![BTreeSet::new(); n + 1];
    let add = |adj: &mut Vec<BTreeSet<NodeId>>, u: NodeId, v: NodeId| {
        adj[u].insert(v);
        adj[v].insert(u);
    };
    for c in 0..count {
        for u in members(c) {
            for v in members(c) {
                if u < v {
                    add(&mut adj, u, v);
                }
            }
        }
    }
    for (a, b) in random_tree(count, rng) {
        for u in members(a) {
            for v in members(b) {
                add(&mut adj, u, v);
            }
        }
    }

    let mut edges: Vec<(NodeId, NodeId)> = (1..=n)
        .flat_map(|u| adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)).collect::<Vec<_>>())
        .collect();
    let target = (removal_fraction * edges.len() as f64).round() as usize;
    edges.shuffle(rng);
    let mut removed = 0;
    for &(u, v) in &edges {
        if removed == target {
            break;
        }
        adj[u].remove(&v);
        adj[v].remove(&u);
        if connected_without(&adj, n) {
            removed += 1;
        } else {
            add(&mut adj, u, v);
        }
    }

    let remaining = (1..=n).flat_map(|u| adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)).collect::<Vec<_>>());
    UndirectedGraph::new(n, remaining)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{greedy_fillin_order, triangulate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_clusters_make_k6() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = synth_block_structured(6, 3, 0.0, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 15);
    }

    #[test]
    fn width_bounded_by_construction() {
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = synth_block_structured(9, 3, 0.0, &mut rng).unwrap();
            let t = triangulate(&g, &greedy_fillin_order(&g)).unwrap();
            assert!(t.width() <= 5, "seed {seed}: width {}", t.width());
        }
    }

    #[test]
    fn removal_keeps_connectivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let full = synth_block_structured(30, 4, 0.0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let g = synth_block_structured(30, 4, 0.2, &mut rng).unwrap();
        assert!(g.is_connected());
        assert!(g.edge_count() < full.edge_count());
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(synth_block_structured(3, 4, 0.0, &mut rng).is_err());
        assert!(synth_block_structured(3, 1, 1.0, &mut rng).is_err());
    }

    #[test]
    fn prufer_trees_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for count in 1..12 {
            let edges = random_tree(count, &mut rng);
            assert_eq!(edges.len(), count.saturating_sub(1));
            let g = UndirectedGraph::new(count, edges.iter().map(|&(a, b)| (a + 1, b + 1))).unwrap();
            assert!(g.is_connected());
        }
    }
}
