//! Sum-product belief propagation on the factor graph of a [`FactorModel`].

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::InferenceReport;
use crate::error::{arg_err, Error, Result};
use crate::model::{FactorModel, MarginalSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// Factor-to-variable messages updated in place, factors in model order
    /// and scope positions ascending.
    #[default]
    SequentialFixed,
    /// All messages recomputed from the previous sweep, then swapped in.
    Parallel,
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seq" | "sequential" | "sequential-fixed" => Ok(Schedule::SequentialFixed),
            "par" | "parallel" => Ok(Schedule::Parallel),
            other => arg_err(format!("unknown schedule {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BpSettings {
    pub max_iterations: usize,
    /// Stop once the mean absolute change of all belief entries falls below this.
    pub convergence_tolerance: f64,
    pub schedule: Schedule,
    /// Weight of the old message in `new = (1 - d) * update + d * old`.
    pub damping: f64,
}

impl Default for BpSettings {
    fn default() -> Self {
        BpSettings { max_iterations: 1000, convergence_tolerance: 1e-9, schedule: Schedule::SequentialFixed, damping: 0.0 }
    }
}

impl BpSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return arg_err("max_iterations must be at least 1");
        }
        if self.convergence_tolerance.is_nan() || self.convergence_tolerance <= 0.0 {
            return arg_err("convergence tolerance must be positive");
        }
        if !(0.0..1.0).contains(&self.damping) {
            return arg_err(format!("damping {} not in [0, 1)", self.damping));
        }
        Ok(())
    }
}

/// Factor graph connectivity: one edge per (factor, scope position).
struct Graph<'a> {
    model: &'a FactorModel,
    /// First edge id of each factor.
    offset: Vec<usize>,
    /// Edge ids incident to each variable (index id - 1), in factor order.
    var_edges: Vec<Vec<usize>>,
    /// Variable (id - 1) of each edge.
    edge_var: Vec<usize>,
}

impl<'a> Graph<'a> {
    fn new(model: &'a FactorModel) -> Self {
        let mut offset = Vec::with_capacity(model.factors().len());
        let mut var_edges = vec![Vec::new(); model.variable_count()];
        let mut edge_var = Vec::new();
        for f in model.factors() {
            offset.push(edge_var.len());
            for &v in &f.scope {
                var_edges[v - 1].push(edge_var.len());
                edge_var.push(v - 1);
            }
        }
        Graph { model, offset, var_edges, edge_var }
    }

    /// Variable-to-factor message along edge `e`: product of the other
    /// factor messages reaching that variable, normalized.
    fn var_to_factor(&self, msgs: &[Vec<f64>], e: usize, out: &mut Vec<f64>) {
        let v = self.edge_var[e];
        out.clear();
        out.resize(self.model.cardinalities()[v], 1.0);
        for &other in &self.var_edges[v] {
            if other != e {
                for (o, m) in out.iter_mut().zip(&msgs[other]) {
                    *o *= m;
                }
            }
        }
        let s: f64 = out.iter().sum();
        out.iter_mut().for_each(|x| *x /= s);
    }

    /// New (unnormalized, undamped) message from factor `a` to its variable at `pos`.
    fn factor_to_var(&self, msgs: &[Vec<f64>], a: usize, pos: usize, incoming: &mut [Vec<f64>], out: &mut [f64]) {
        let f = &self.model.factors()[a];
        let cards: Vec<usize> = f.scope.iter().map(|&v| self.model.cardinality(v)).collect();
        for (q, inc) in incoming.iter_mut().enumerate().take(f.scope.len()) {
            if q != pos {
                self.var_to_factor(msgs, self.offset[a] + q, inc);
            }
        }
        out.iter_mut().for_each(|x| *x = 0.0);
        let mut digits = vec![0usize; cards.len()];
        for &t in &f.table {
            let mut w = t;
            for (q, &d) in digits.iter().enumerate() {
                if q != pos {
                    w *= incoming[q][d];
                }
            }
            out[digits[pos]] += w;
            for p in (0..digits.len()).rev() {
                digits[p] += 1;
                if digits[p] < cards[p] {
                    break;
                }
                digits[p] = 0;
            }
        }
    }

    fn beliefs(&self, msgs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.var_edges
            .iter()
            .enumerate()
            .map(|(v, edges)| {
                let mut b = vec![1.0; self.model.cardinalities()[v]];
                for &e in edges {
                    for (x, m) in b.iter_mut().zip(&msgs[e]) {
                        *x *= m;
                    }
                }
                let s: f64 = b.iter().sum();
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Numerical(format!("belief of variable {} has mass {s}", v + 1)));
                }
                b.iter_mut().for_each(|x| *x /= s);
                Ok(b)
            })
            .collect()
    }
}

fn finish_message(new: &mut [f64], old: &[f64], damping: f64) -> Result<()> {
    let s: f64 = new.iter().sum();
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::Numerical(format!("message lost all mass (sum {s})")));
    }
    new.iter_mut().for_each(|x| *x /= s);
    if damping > 0.0 {
        for (x, o) in new.iter_mut().zip(old) {
            *x = (1.0 - damping) * *x + damping * o;
        }
        let s: f64 = new.iter().sum();
        new.iter_mut().for_each(|x| *x /= s);
    }
    Ok(())
}

/// Loopy sum-product BP with normalized messages and uniform initialization.
/// Exact when the factor graph is acyclic.
pub fn belief_propagation(model: &FactorModel, settings: &BpSettings) -> Result<InferenceReport> {
    settings.validate()?;
    let start = Instant::now();
    let graph = Graph::new(model);
    let cards = model.cardinalities();
    let mut msgs: Vec<Vec<f64>> =
        graph.edge_var.iter().map(|&v| vec![1.0 / cards[v] as f64; cards[v]]).collect();
    let max_arity = model.factors().iter().map(|f| f.scope.len()).max().unwrap_or(0);
    let mut incoming: Vec<Vec<f64>> = vec![Vec::new(); max_arity];
    let mut beliefs = graph.beliefs(&msgs)?;
    let entries: usize = beliefs.iter().map(Vec::len).sum();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        iterations += 1;
        match settings.schedule {
            Schedule::SequentialFixed => {
                for a in 0..model.factors().len() {
                    for pos in 0..model.factors()[a].scope.len() {
                        let e = graph.offset[a] + pos;
                        let mut fresh = vec![0.0; msgs[e].len()];
                        graph.factor_to_var(&msgs, a, pos, &mut incoming, &mut fresh);
                        finish_message(&mut fresh, &msgs[e], settings.damping)?;
                        msgs[e] = fresh;
                    }
                }
            }
            Schedule::Parallel => {
                let mut next = msgs.clone();
                for a in 0..model.factors().len() {
                    for pos in 0..model.factors()[a].scope.len() {
                        let e = graph.offset[a] + pos;
                        graph.factor_to_var(&msgs, a, pos, &mut incoming, &mut next[e]);
                        finish_message(&mut next[e], &msgs[e], settings.damping)?;
                    }
                }
                msgs = next;
            }
        }
        let fresh = graph.beliefs(&msgs)?;
        let change: f64 = fresh
            .iter()
            .zip(&beliefs)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .sum::<f64>()
            / entries.max(1) as f64;
        beliefs = fresh;
        if change < settings.convergence_tolerance {
            converged = true;
            break;
        }
    }

    Ok(InferenceReport {
        marginals: MarginalSet::new(beliefs)?,
        converged,
        iterations,
        seconds: start.elapsed().as_secs_f64(),
    })
}
