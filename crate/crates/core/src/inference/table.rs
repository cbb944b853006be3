//! Dense potential tables over ascending variable lists, used by the
//! elimination oracle.

use crate::graph::NodeId;
use crate::model::{Factor, FactorModel};

#[derive(Debug, Clone)]
pub(crate) struct Table {
    pub vars: Vec<NodeId>,
    pub cards: Vec<usize>,
    pub data: Vec<f64>,
}

impl Table {
    pub fn ones(vars: Vec<NodeId>, model: &FactorModel) -> Self {
        let cards: Vec<usize> = vars.iter().map(|&v| model.cardinality(v)).collect();
        let size = cards.iter().product();
        Table { vars, cards, data: vec![1.0; size] }
    }

    pub fn from_factor(f: &Factor, model: &FactorModel) -> Self {
        Table {
            vars: f.scope.clone(),
            cards: f.scope.iter().map(|&v| model.cardinality(v)).collect(),
            data: f.table.clone(),
        }
    }

    /// Stride of each of our variables inside `sub`, 0 where absent.
    fn strides_into(&self, sub: &Table) -> Vec<usize> {
        let mut sub_strides = vec![0usize; sub.vars.len()];
        let mut s = 1;
        for i in (0..sub.vars.len()).rev() {
            sub_strides[i] = s;
            s *= sub.cards[i];
        }
        self.vars
            .iter()
            .map(|v| sub.vars.iter().position(|w| w == v).map_or(0, |i| sub_strides[i]))
            .collect()
    }

    /// Visits every entry of `self` together with the matching index in `sub`.
    fn zip_with<F: FnMut(usize, usize)>(&self, sub: &Table, mut f: F) {
        debug_assert!(sub.vars.iter().all(|v| self.vars.contains(v)));
        let strides = self.strides_into(sub);
        let mut digits = vec![0usize; self.vars.len()];
        let mut j = 0usize;
        let total: usize = self.cards.iter().product();
        for i in 0..total {
            f(i, j);
            for p in (0..digits.len()).rev() {
                digits[p] += 1;
                j += strides[p];
                if digits[p] < self.cards[p] {
                    break;
                }
                j -= strides[p] * self.cards[p];
                digits[p] = 0;
            }
        }
    }

    pub fn mul_assign(&mut self, sub: &Table) {
        let mut data = std::mem::take(&mut self.data);
        self.zip_with(sub, |i, j| data[i] *= sub.data[j]);
        self.data = data;
    }

    pub fn div_assign(&mut self, sub: &Table) {
        let mut data = std::mem::take(&mut self.data);
        self.zip_with(sub, |i, j| data[i] /= sub.data[j]);
        self.data = data;
    }

    /// Sums out every variable not in `keep` (which must be ascending and a subset).
    pub fn marginalize(&self, keep: &[NodeId]) -> Table {
        let cards: Vec<usize> =
            keep.iter().map(|v| self.cards[self.vars.iter().position(|w| w == v).expect("subset")]).collect();
        let size = cards.iter().product();
        let mut out = Table { vars: keep.to_vec(), cards, data: vec![0.0; size] };
        let mut data = std::mem::take(&mut out.data);
        self.zip_with(&out, |i, j| data[j] += self.data[i]);
        out.data = data;
        out
    }

    /// Scales to unit sum and returns the previous sum.
    pub fn normalize(&mut self) -> f64 {
        let s: f64 = self.data.iter().sum();
        if s > 0.0 && s.is_finite() {
            self.data.iter_mut().for_each(|x| *x /= s);
        }
        s
    }
}
