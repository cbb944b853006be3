use crate::error::{arg_err, Result};
use crate::model::MarginalSet;

/// Sum over variables and states of `|est - truth|`, divided by the number
/// of variables. Lies in `[0, 2]` for normalized inputs.
pub fn mean_abs_error(est: &MarginalSet, truth: &MarginalSet) -> Result<f64> {
    if est.len() != truth.len() {
        return arg_err(format!("estimate has {} variables, truth has {}", est.len(), truth.len()));
    }
    if est.is_empty() {
        return arg_err("no variables to compare");
    }
    let mut total = 0.0;
    for (v, (a, b)) in est.iter().zip(truth.iter()).enumerate() {
        if a.len() != b.len() {
            return arg_err(format!("variable {} has {} vs {} states", v + 1, a.len(), b.len()));
        }
        total += a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>();
    }
    Ok(total / est.len() as f64)
}
