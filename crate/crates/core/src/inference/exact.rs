//! Exact marginals: full enumeration for tiny models and junction-tree
//! calibration along a min-fill elimination order.

use std::time::Instant;

use super::table::Table;
use super::InferenceReport;
use crate::decompose::elimination::elimination_cliques;
use crate::decompose::greedy_fillin_order;
use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeSet, UndirectedGraph};
use crate::model::{decode_state, FactorModel, MarginalSet};

/// Largest joint state space [`exact_brute_force`] will enumerate.
pub const BRUTE_FORCE_CAP: usize = 1 << 22;
/// Largest clique table [`exact_elimination`] will allocate.
pub const ELIMINATION_CAP: usize = 1 << 24;

fn report(marginals: MarginalSet, start: Instant) -> InferenceReport {
    InferenceReport { marginals, converged: true, iterations: 1, seconds: start.elapsed().as_secs_f64() }
}

/// Marginals by summing the unnormalized joint over every state.
pub fn exact_brute_force(model: &FactorModel) -> Result<InferenceReport> {
    let start = Instant::now();
    let total = match model.joint_state_count() {
        Some(t) if t <= BRUTE_FORCE_CAP => t,
        _ => {
            return Err(Error::Capacity(format!(
                "brute force over {} variables exceeds {BRUTE_FORCE_CAP} joint states",
                model.variable_count()
            )))
        }
    };
    let cards = model.cardinalities();
    let mut acc: Vec<Vec<f64>> = cards.iter().map(|&c| vec![0.0; c]).collect();
    for idx in 0..total {
        let x = decode_state(idx, cards);
        let p = model.unnormalized(&x);
        for (slot, &d) in acc.iter_mut().zip(&x) {
            slot[d] += p;
        }
    }
    Ok(report(MarginalSet::from_unnormalized(acc)?, start))
}

/// Exact marginals by two-pass message passing on the elimination tree of a
/// min-fill order over the model's interaction graph.
pub fn exact_elimination(model: &FactorModel) -> Result<InferenceReport> {
    let start = Instant::now();
    let g = model.interaction_graph()?;
    let order = greedy_fillin_order(&g);
    let cliques = elimination_cliques(&g, &order);
    let n = model.variable_count();
    let order = order.as_slice();
    let mut pos = vec![0usize; n + 1];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }

    check_clique_sizes(&cliques, |v| model.cardinality(v))?;

    // clique i belongs to order[i]; its parent is the clique of the earliest
    // eliminated other member, its separator the other members
    let parent: Vec<Option<usize>> = cliques
        .iter()
        .zip(order)
        .map(|(c, &v)| c.iter().filter(|&w| w != v).map(|w| pos[w]).min())
        .collect();
    let separators: Vec<Vec<usize>> =
        cliques.iter().zip(order).map(|(c, &v)| c.iter().filter(|&w| w != v).collect()).collect();
    let mut children = vec![Vec::new(); n];
    for (i, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(i);
        }
    }

    let mut potentials: Vec<Table> = cliques.iter().map(|c| Table::ones(c.as_slice().to_vec(), model)).collect();
    for f in model.factors() {
        let home = f.scope.iter().map(|&v| pos[v]).min().expect("scopes are non-empty");
        potentials[home].mul_assign(&Table::from_factor(f, model));
        potentials[home].normalize();
    }

    let mut up: Vec<Option<Table>> = vec![None; n];
    let mut beliefs = potentials;
    for i in 0..n {
        for &c in &children[i] {
            let msg = up[c].as_ref().expect("children are eliminated first");
            beliefs[i].mul_assign(msg);
        }
        check_mass(beliefs[i].normalize())?;
        if parent[i].is_some() {
            let mut msg = beliefs[i].marginalize(&separators[i]);
            check_mass(msg.normalize())?;
            up[i] = Some(msg);
        }
    }
    // beliefs[i] now holds the upward belief; root cliques are calibrated
    for i in (0..n).rev() {
        for &c in &children[i] {
            let mut down = beliefs[i].marginalize(&separators[c]);
            down.div_assign(up[c].as_ref().expect("child has an upward message"));
            check_mass(down.normalize())?;
            beliefs[c].mul_assign(&down);
            check_mass(beliefs[c].normalize())?;
        }
    }

    let marginals = (1..=n)
        .map(|v| {
            let mut t = beliefs[pos[v]].marginalize(&[v]);
            t.normalize();
            t.data
        })
        .collect();
    Ok(report(MarginalSet::from_unnormalized(marginals)?, start))
}

fn check_clique_sizes(cliques: &[NodeSet], card: impl Fn(NodeId) -> usize) -> Result<()> {
    for c in cliques {
        let size = c.iter().try_fold(1usize, |acc, v| acc.checked_mul(card(v)));
        if size.is_none_or(|s| s > ELIMINATION_CAP) {
            return Err(Error::Capacity(format!(
                "elimination clique of {} variables exceeds {ELIMINATION_CAP} states; \
                 try brute force on a smaller model",
                c.len()
            )));
        }
    }
    Ok(())
}

/// Fails with the same capacity error [`exact_elimination`] would raise for
/// a model on `g` whose variables all have `cardinality` states.
pub fn check_elimination_feasible(g: &UndirectedGraph, cardinality: usize) -> Result<()> {
    let order = greedy_fillin_order(g);
    check_clique_sizes(&elimination_cliques(g, &order), |_| cardinality)
}

fn check_mass(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::Numerical(format!("clique table has total mass {s}")))
    }
}
