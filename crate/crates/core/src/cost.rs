//! Expected path cost, evaluated two ways.
//!
//! [`expected_cost_direct`] sums the probability-weighted cumulative length
//! over every possible terminal vertex. [`expected_cost_q`] uses the
//! equivalent running-survival form `sum_i q_i * c(v_i, v_{i+1})`, with
//! `q_i` the product of `1 - p` over the first `i` vertices. The solver works
//! in the second form; the first stays as an independent check.

use crate::error::Result;
use crate::instance::{Instance, Path};

/// Expected cost of a full solution path, term by term over the terminal vertex.
///
/// The last term carries no termination factor: a robot that has not stopped
/// before the final vertex walks the whole path regardless.
pub fn expected_cost_direct(inst: &Instance, path: &Path) -> Result<f64> {
    path.validate_solution(inst)?;
    let order = path.as_slice();
    let m = order.len();
    if m < 2 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut length = 0.0;
    for k in 1..m {
        length += inst.cost(order[k - 1], order[k]);
        // probability of surviving the first k vertices
        let survive: f64 = order[..k].iter().map(|&v| 1.0 - inst.prob(v)).product();
        let terminal = if k + 1 == m { 1.0 } else { inst.prob(order[k]) };
        total += survive * terminal * length;
    }
    Ok(total)
}

/// Survival-weighted edge sum; accepts partial paths (prefix expected cost).
pub fn expected_cost_q(inst: &Instance, path: &Path) -> Result<f64> {
    path.validate_prefix(inst)?;
    Ok(prefix_cost(inst, path.as_slice()))
}

/// Unchecked prefix evaluation, numerically identical to the solver's
/// incremental `g` update.
pub(crate) fn prefix_cost(inst: &Instance, order: &[usize]) -> f64 {
    let Some(&first) = order.first() else {
        return 0.0;
    };
    let mut q = 1.0 - inst.prob(first);
    let mut g = 0.0;
    for w in order.windows(2) {
        g += q * inst.cost(w[0], w[1]);
        q *= 1.0 - inst.prob(w[1]);
    }
    g
}

/// Plain (probability-blind) length of an ordered vertex sequence.
pub fn path_length(inst: &Instance, order: &[usize]) -> f64 {
    order.windows(2).map(|w| inst.cost(w[0], w[1])).sum()
}
