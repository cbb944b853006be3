use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::graph::{NodeId, UndirectedGraph};

/// Header comment written into every model file.
pub const MODEL_FILE_COMMENT: &str = "tables are dense over the scope in mixed radix: scope ids ascending, \
the last scope variable varies fastest; entries must be strictly positive";

/// Mixed-radix digits of `index` (last digit fastest).
pub fn decode_state(mut index: usize, cards: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; cards.len()];
    for (d, &c) in digits.iter_mut().zip(cards).rev() {
        *d = index % c;
        index /= c;
    }
    digits
}

/// Inverse of [`decode_state`].
pub fn encode_state(digits: &[usize], cards: &[usize]) -> usize {
    digits.iter().zip(cards).fold(0, |acc, (&d, &c)| acc * c + d)
}

/// Positive table over the joint states of `scope`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub scope: Vec<NodeId>,
    pub table: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<NodeId>, table: Vec<f64>) -> Self {
        Factor { scope, table }
    }
}

/// Discrete model `p(x) ∝ Π_f table_f(x_scope(f))` over variables `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    cards: Vec<usize>,
    factors: Vec<Factor>,
}

impl FactorModel {
    /// Validates scopes, table sizes and positivity.
    pub fn new(cards: Vec<usize>, factors: Vec<Factor>) -> Result<Self> {
        if cards.is_empty() {
            return arg_err("model needs at least one variable");
        }
        if let Some(v) = cards.iter().position(|&c| c == 0) {
            return arg_err(format!("variable {} has cardinality 0", v + 1));
        }
        let n = cards.len();
        for (fi, f) in factors.iter().enumerate() {
            if f.scope.is_empty() {
                return arg_err(format!("factor {fi} has an empty scope"));
            }
            if f.scope.windows(2).any(|w| w[0] >= w[1]) {
                return arg_err(format!("factor {fi} scope {:?} is not strictly ascending", f.scope));
            }
            if f.scope.iter().any(|&v| v == 0 || v > n) {
                return arg_err(format!("factor {fi} scope {:?} has an id outside 1..={n}", f.scope));
            }
            let size: usize = f.scope.iter().map(|&v| cards[v - 1]).product();
            if f.table.len() != size {
                return arg_err(format!("factor {fi} table has {} entries, expected {size}", f.table.len()));
            }
            if let Some(x) = f.table.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return arg_err(format!("factor {fi} has non-positive or non-finite entry {x}"));
            }
        }
        Ok(FactorModel { cards, factors })
    }

    pub fn variable_count(&self) -> usize {
        self.cards.len()
    }

    pub fn cardinality(&self, v: NodeId) -> usize {
        self.cards[v - 1]
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Number of joint states, or `None` if it overflows `usize`.
    pub fn joint_state_count(&self) -> Option<usize> {
        self.cards.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c))
    }

    /// Graph with an edge between every two variables sharing a factor.
    pub fn interaction_graph(&self) -> Result<UndirectedGraph> {
        let mut edges = Vec::new();
        for f in &self.factors {
            for (i, &a) in f.scope.iter().enumerate() {
                for &b in &f.scope[i + 1..] {
                    edges.push((a, b));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        UndirectedGraph::new(self.cards.len(), edges)
    }

    /// Index into `factor.table` for a full assignment (0-based states, indexed by id - 1).
    pub(crate) fn table_index(&self, factor: &Factor, assignment: &[usize]) -> usize {
        factor.scope.iter().fold(0, |acc, &v| acc * self.cards[v - 1] + assignment[v - 1])
    }

    /// Unnormalized probability of a full assignment.
    pub fn unnormalized(&self, assignment: &[usize]) -> f64 {
        self.factors.iter().map(|f| f.table[self.table_index(f, assignment)]).product()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.into_model()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile::from_model(self))?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct VariableEntry {
    id: NodeId,
    cardinality: usize,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    #[serde(default)]
    comment: String,
    variables: Vec<VariableEntry>,
    factors: Vec<Factor>,
}

impl ModelFile {
    fn from_model(m: &FactorModel) -> Self {
        ModelFile {
            comment: MODEL_FILE_COMMENT.to_string(),
            variables: m
                .cards
                .iter()
                .enumerate()
                .map(|(i, &cardinality)| VariableEntry { id: i + 1, cardinality })
                .collect(),
            factors: m.factors.clone(),
        }
    }

    fn into_model(self) -> Result<FactorModel> {
        let n = self.variables.len();
        let mut cards = vec![0; n];
        for v in &self.variables {
            if v.id == 0 || v.id > n || cards[v.id - 1] != 0 {
                return arg_err(format!("variable ids must be exactly 1..={n}; got {}", v.id));
            }
            cards[v.id - 1] = v.cardinality;
        }
        FactorModel::new(cards, self.factors)
    }
}

/// One probability vector per variable (indexed by id - 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarginalSet(Vec<Vec<f64>>);

impl MarginalSet {
    /// Wraps per-variable vectors, checking they are distributions.
    pub fn new(marginals: Vec<Vec<f64>>) -> Result<Self> {
        for (i, p) in marginals.iter().enumerate() {
            let sum: f64 = p.iter().sum();
            if p.is_empty() || p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Numerical(format!("marginal of variable {} is not a distribution: {p:?}", i + 1)));
            }
        }
        Ok(MarginalSet(marginals))
    }

    /// Normalizes each vector; fails on a zero or non-finite total.
    pub fn from_unnormalized(mut marginals: Vec<Vec<f64>>) -> Result<Self> {
        for (i, p) in marginals.iter_mut().enumerate() {
            let sum: f64 = p.iter().sum();
            if !(sum.is_finite() && sum > 0.0) {
                return Err(Error::Numerical(format!("variable {} has total mass {sum}", i + 1)));
            }
            p.iter_mut().for_each(|x| *x /= sum);
        }
        MarginalSet::new(marginals)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Marginal of variable `v` (1-based).
    pub fn get(&self, v: NodeId) -> &[f64] {
        &self.0[v - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.0.iter().map(Vec::as_slice)
    }

    pub fn as_vecs(&self) -> &[Vec<f64>] {
        &self.0
    }

    /// Largest entrywise absolute difference; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &MarginalSet) -> f64 {
        assert_eq!(self.len(), other.len(), "marginal sets differ in length");
        self.0
            .iter()
            .zip(&other.0)
            .flat_map(|(a, b)| {
                assert_eq!(a.len(), b.len(), "marginals differ in cardinality");
                a.iter().zip(b).map(|(x, y)| (x - y).abs())
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_radix() {
        let cards = [2, 3, 2];
        assert_eq!(decode_state(0, &cards), vec![0, 0, 0]);
        assert_eq!(decode_state(1, &cards), vec![0, 0, 1]);
        assert_eq!(decode_state(2, &cards), vec![0, 1, 0]);
        assert_eq!(decode_state(11, &cards), vec![1, 2, 1]);
        for i in 0..12 {
            assert_eq!(encode_state(&decode_state(i, &cards), &cards), i);
        }
    }

    #[test]
    fn validation() {
        assert!(FactorModel::new(vec![2, 2], vec![Factor::new(vec![1, 2], vec![1.0; 4])]).is_ok());
        assert!(FactorModel::new(vec![2, 2], vec![Factor::new(vec![2, 1], vec![1.0; 4])]).is_err());
        assert!(FactorModel::new(vec![2, 2], vec![Factor::new(vec![1, 2], vec![1.0; 3])]).is_err());
        assert!(FactorModel::new(vec![2, 2], vec![Factor::new(vec![1], vec![1.0, 0.0])]).is_err());
        assert!(FactorModel::new(vec![2], vec![Factor::new(vec![3], vec![1.0, 1.0])]).is_err());
    }

    #[test]
    fn json_file_round_trip() {
        let m = FactorModel::new(
            vec![2, 3],
            vec![Factor::new(vec![1], vec![0.25, 1.5]), Factor::new(vec![1, 2], (1..=6).map(f64::from).collect())],
        )
        .unwrap();
        let text = m.to_json().unwrap();
        assert!(text.contains("\"comment\""));
        assert_eq!(FactorModel::from_json(&text).unwrap(), m);
    }

    #[test]
    fn last_scope_variable_is_fastest() {
        let m = FactorModel::new(vec![2, 3], vec![Factor::new(vec![1, 2], (0..6).map(f64::from).map(|x| x + 1.0).collect())])
            .unwrap();
        // x1 = 1, x2 = 0 -> row-major index 3
        assert_eq!(m.unnormalized(&[1, 0]), 4.0);
        assert_eq!(m.unnormalized(&[0, 2]), 3.0);
    }

    #[test]
    fn marginal_set_checks() {
        assert!(MarginalSet::new(vec![vec![0.5, 0.5]]).is_ok());
        assert!(MarginalSet::new(vec![vec![0.5, 0.6]]).is_err());
        let m = MarginalSet::from_unnormalized(vec![vec![1.0, 3.0]]).unwrap();
        assert_eq!(m.get(1), &[0.25, 0.75]);
        assert!(MarginalSet::from_unnormalized(vec![vec![0.0, 0.0]]).is_err());
    }
}
