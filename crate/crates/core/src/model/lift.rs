use std::collections::HashMap;

use super::factor::{decode_state, Factor, FactorModel, MarginalSet};
use crate::blockgraph::BlockGraph;
use crate::error::{arg_err, Error, Result};
use crate::graph::NodeSet;

/// Largest table a lifted factor may have.
pub const DEFAULT_STATE_CAP: usize = 1 << 24;

/// A factor model over cluster variables whose joint, decoded back to node
/// states, equals the original joint.
///
/// Cluster variable `c + 1` corresponds to cluster `c` of the block-graph.
/// Its state index is the mixed-radix code of its members' states (members
/// ascending, last member fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedModel {
    pub model: FactorModel,
    members: Vec<NodeSet>,
    member_cards: Vec<Vec<usize>>,
    provenance: Vec<Vec<usize>>,
    node_count: usize,
}

impl LiftedModel {
    pub fn members(&self, cluster: usize) -> &NodeSet {
        &self.members[cluster]
    }

    pub fn clusters(&self) -> &[NodeSet] {
        &self.members
    }

    pub fn member_cards(&self, cluster: usize) -> &[usize] {
        &self.member_cards[cluster]
    }

    /// Original factor indices folded into each lifted factor; empty for
    /// the constant filler factors.
    pub fn provenance(&self) -> &[Vec<usize>] {
        &self.provenance
    }

    /// Member states of `cluster` in its state `index`.
    pub fn decode(&self, cluster: usize, index: usize) -> Vec<usize> {
        decode_state(index, &self.member_cards[cluster])
    }

    /// Cluster-variable assignment for a full node assignment (0-based states).
    pub fn encode_assignment(&self, node_states: &[usize]) -> Vec<usize> {
        self.members
            .iter()
            .zip(&self.member_cards)
            .map(|(m, cards)| m.iter().zip(cards).fold(0, |acc, (v, &c)| acc * c + node_states[v - 1]))
            .collect()
    }
}

/// [`lift_with_cap`] with the default cap.
pub fn lift_to_block_graph(model: &FactorModel, bg: &BlockGraph) -> Result<LiftedModel> {
    lift_with_cap(model, bg, DEFAULT_STATE_CAP)
}

/// Re-expresses `model` over the clusters of `bg`.
///
/// Each original factor goes to the lifted factor whose scope is the set of
/// clusters covering it. Factors inside one cluster become unary cluster
/// factors. Lifted factors keep the order in which their first original
/// factor appears, and every block-graph edge that no lifted factor spans
/// gets a constant-1 factor appended at the end.
pub fn lift_with_cap(model: &FactorModel, bg: &BlockGraph, cap: usize) -> Result<LiftedModel> {
    let owner = bg.cluster_map();
    let clusters = bg.clusters();
    let covered = clusters.iter().map(NodeSet::len).sum::<usize>();
    if covered != model.variable_count() || owner.len() != model.variable_count() + 1 {
        return arg_err(format!(
            "block-graph covers {covered} nodes but the model has {} variables",
            model.variable_count()
        ));
    }
    let member_cards: Vec<Vec<usize>> =
        clusters.iter().map(|c| c.iter().map(|v| model.cardinality(v)).collect()).collect();
    let mut cluster_cards = Vec::with_capacity(clusters.len());
    for (ci, cards) in member_cards.iter().enumerate() {
        let size = cards.iter().try_fold(1usize, |a, &c| a.checked_mul(c)).filter(|&s| s <= cap);
        match size {
            Some(s) => cluster_cards.push(s),
            None => {
                return Err(Error::Capacity(format!(
                    "cluster {ci} {:?} has more than {cap} joint states",
                    clusters[ci].as_slice()
                )))
            }
        }
    }

    let k = clusters.len();
    let mut adjacent = vec![Vec::new(); k];
    for &(a, b) in bg.edges() {
        adjacent[a].push(b);
        adjacent[b].push(a);
    }

    let mut scopes: Vec<Vec<usize>> = Vec::new();
    let mut provenance: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<Vec<usize>, usize> = HashMap::new();
    for (fi, f) in model.factors().iter().enumerate() {
        let mut cover: Vec<usize> = f.scope.iter().map(|&v| owner[v]).collect();
        cover.sort_unstable();
        cover.dedup();
        for (i, &a) in cover.iter().enumerate() {
            if let Some(&b) = cover[i + 1..].iter().find(|&&b| !adjacent[a].contains(&b)) {
                return arg_err(format!(
                    "factor {fi} spans clusters {a} and {b}, which are not adjacent in the block-graph"
                ));
            }
        }
        let idx = *slot.entry(cover.clone()).or_insert_with(|| {
            scopes.push(cover);
            provenance.push(Vec::new());
            scopes.len() - 1
        });
        provenance[idx].push(fi);
    }
    for &(a, b) in bg.edges() {
        let spanned = scopes.iter().any(|s| s.contains(&a) && s.contains(&b));
        if !spanned {
            scopes.push(vec![a, b]);
            provenance.push(Vec::new());
        }
    }

    let mut factors = Vec::with_capacity(scopes.len());
    for (scope, origin) in scopes.iter().zip(&provenance) {
        factors.push(lifted_table(model, scope, origin, clusters, &member_cards, &cluster_cards, cap)?);
    }
    let lifted = FactorModel::new(cluster_cards, factors)?;
    Ok(LiftedModel {
        model: lifted,
        members: clusters.to_vec(),
        member_cards,
        provenance,
        node_count: model.variable_count(),
    })
}

fn lifted_table(
    model: &FactorModel,
    scope: &[usize],
    origin: &[usize],
    clusters: &[NodeSet],
    member_cards: &[Vec<usize>],
    cluster_cards: &[usize],
    cap: usize,
) -> Result<Factor> {
    let size = scope
        .iter()
        .try_fold(1usize, |a, &c| a.checked_mul(cluster_cards[c]))
        .filter(|&s| s <= cap)
        .ok_or_else(|| {
            let sets: Vec<&[usize]> = scope.iter().map(|&c| clusters[c].as_slice()).collect();
            Error::Capacity(format!("lifted factor over clusters {sets:?} exceeds {cap} entries"))
        })?;

    // The lifted index is mixed radix over the concatenated member list.
    let layout: Vec<usize> = scope.iter().flat_map(|&c| clusters[c].iter()).collect();
    let layout_cards: Vec<usize> = scope.iter().flat_map(|&c| member_cards[c].iter().copied()).collect();
    let position = |v: usize| layout.iter().position(|&w| w == v).expect("scope member is in layout");
    // per original factor: (layout position, stride in the original table)
    let accessors: Vec<(&Factor, Vec<(usize, usize)>)> = origin
        .iter()
        .map(|&fi| {
            let f = &model.factors()[fi];
            let mut stride = 1;
            let mut acc: Vec<(usize, usize)> = f
                .scope
                .iter()
                .rev()
                .map(|&v| {
                    let item = (position(v), stride);
                    stride *= model.cardinality(v);
                    item
                })
                .collect();
            acc.reverse();
            (f, acc)
        })
        .collect();

    let mut table = vec![1.0; size];
    let mut digits = vec![0usize; layout.len()];
    for entry in table.iter_mut() {
        for (f, acc) in &accessors {
            let idx: usize = acc.iter().map(|&(p, s)| digits[p] * s).sum();
            *entry *= f.table[idx];
        }
        for p in (0..digits.len()).rev() {
            digits[p] += 1;
            if digits[p] < layout_cards[p] {
                break;
            }
            digits[p] = 0;
        }
    }
    Ok(Factor::new(scope.iter().map(|&c| c + 1).collect(), table))
}

/// Sums each cluster marginal down to its members' node marginals.
pub fn project_node_marginals(lifted: &LiftedModel, cluster_marginals: &MarginalSet) -> Result<MarginalSet> {
    if cluster_marginals.len() != lifted.members.len() {
        return arg_err(format!(
            "got {} cluster marginals for {} clusters",
            cluster_marginals.len(),
            lifted.members.len()
        ));
    }
    let mut nodes: Vec<Option<Vec<f64>>> = vec![None; lifted.node_count];
    for (ci, members) in lifted.members.iter().enumerate() {
        let p = cluster_marginals.get(ci + 1);
        let cards = &lifted.member_cards[ci];
        if members.len() == 1 {
            nodes[members.as_slice()[0] - 1] = Some(p.to_vec());
            continue;
        }
        let mut acc: Vec<Vec<f64>> = cards.iter().map(|&c| vec![0.0; c]).collect();
        for (idx, &mass) in p.iter().enumerate() {
            for (slot, d) in acc.iter_mut().zip(decode_state(idx, cards)) {
                slot[d] += mass;
            }
        }
        for (v, mut m) in members.iter().zip(acc) {
            let total: f64 = m.iter().sum();
            m.iter_mut().for_each(|x| *x /= total);
            nodes[v - 1] = Some(m);
        }
    }
    let marginals = nodes
        .into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| Error::Internal(format!("node {} belongs to no cluster", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    MarginalSet::new(marginals)
}
