//! Reference solvers scored on the same expected-cost objective:
//! exhaustive enumeration, greedy-by-probability, and a probability-blind
//! shortest Hamiltonian path (nearest neighbour + 2-opt).

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::cost::{path_length, prefix_cost};
use crate::instance::{Instance, Path};
use crate::solver::{SearchStats, SolveResult};

/// Largest instance the enumeration oracle accepts by default (11! orderings).
pub const DEFAULT_ORACLE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    Oracle,
    Greedy,
    BlindHpp,
}

impl BaselineKind {
    pub fn solve(self, inst: &Instance) -> Result<SolveResult, BaselineError> {
        match self {
            BaselineKind::Oracle => oracle_solve(inst),
            BaselineKind::Greedy => Ok(greedy_solve(inst)),
            BaselineKind::BlindHpp => Ok(blind_hpp_solve(inst)),
        }
    }
}

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("oracle refuses n = {n} (cap {cap})")]
    OracleRefused { n: usize, cap: usize },

    #[error("invalid tour: {0}")]
    InvalidTour(String),
}

fn result(inst: &Instance, order: Vec<usize>, stats: SearchStats) -> SolveResult {
    let cost = prefix_cost(inst, &order);
    SolveResult {
        path: Path(order),
        cost,
        stats,
    }
}

pub fn oracle_solve(inst: &Instance) -> Result<SolveResult, BaselineError> {
    oracle_solve_with_cap(inst, DEFAULT_ORACLE_CAP)
}

/// Enumerates every ordering of the non-start vertices in lexicographic
/// order and keeps the first one of minimum expected cost.
pub fn oracle_solve_with_cap(inst: &Instance, cap: usize) -> Result<SolveResult, BaselineError> {
    let n = inst.n();
    if n > cap {
        return Err(BaselineError::OracleRefused { n, cap });
    }
    let started = Instant::now();
    let start = inst.start();
    let mut rest: Vec<usize> = (0..n).filter(|&v| v != start).collect();
    let mut order = vec![start];
    let mut best = (f64::INFINITY, vec![start]);
    let mut leaves = 0u64;
    enumerate(
        inst,
        &mut order,
        &mut rest,
        0.0,
        1.0 - inst.prob(start),
        &mut best,
        &mut leaves,
    );
    let stats = SearchStats {
        expansions: leaves,
        generations: leaves,
        wall_time: started.elapsed(),
        ..SearchStats::default()
    };
    Ok(SolveResult {
        path: Path(best.1),
        cost: best.0,
        stats,
    })
}

fn enumerate(
    inst: &Instance,
    order: &mut Vec<usize>,
    rest: &mut Vec<usize>,
    g: f64,
    q: f64,
    best: &mut (f64, Vec<usize>),
    leaves: &mut u64,
) {
    if rest.is_empty() {
        *leaves += 1;
        if g < best.0 {
            best.0 = g;
            best.1.clone_from(order);
        }
        return;
    }
    let last = *order.last().expect("order starts non-empty");
    // `rest` stays sorted, so children are visited in lexicographic order.
    for i in 0..rest.len() {
        let v = rest.remove(i);
        order.push(v);
        enumerate(
            inst,
            order,
            rest,
            g + q * inst.cost(last, v),
            q * (1.0 - inst.prob(v)),
            best,
            leaves,
        );
        order.pop();
        rest.insert(i, v);
    }
}

/// Visits the remaining vertices by decreasing probability, ties by index.
pub fn greedy_solve(inst: &Instance) -> SolveResult {
    let started = Instant::now();
    let start = inst.start();
    let mut rest: Vec<usize> = (0..inst.n()).filter(|&v| v != start).collect();
    rest.sort_by(|&a, &b| inst.prob(b).total_cmp(&inst.prob(a)).then(a.cmp(&b)));
    let mut order = Vec::with_capacity(inst.n());
    order.push(start);
    order.extend(rest);
    result(
        inst,
        order,
        SearchStats {
            wall_time: started.elapsed(),
            ..SearchStats::default()
        },
    )
}

/// Nearest-neighbour path from the start vertex, ties by index.
pub fn nearest_neighbor_path(inst: &Instance) -> Vec<usize> {
    let n = inst.n();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = inst.start();
    used[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let row = inst.row(cur);
        let next = (0..n)
            .filter(|&v| !used[v])
            .min_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)))
            .expect("an unvisited vertex remains");
        used[next] = true;
        order.push(next);
        cur = next;
    }
    order
}

/// Upper bound on full 2-opt passes; each pass that applies no move ends the search.
pub const MAX_TWO_OPT_PASSES: usize = 1000;

/// First-improvement 2-opt on an open path whose first vertex stays fixed
/// and whose last vertex is free. Returns the number of applied moves.
pub fn two_opt_path(inst: &Instance, order: &mut [usize]) -> usize {
    let m = order.len();
    if m < 3 {
        return 0;
    }
    let symmetric = inst.is_symmetric();
    let mut moves = 0;
    for _ in 0..MAX_TWO_OPT_PASSES {
        let mut improved = false;
        let scale = path_length(inst, order).max(1.0);
        for i in 0..m - 2 {
            for j in i + 2..m {
                let delta = if symmetric {
                    let (a, b, c) = (order[i], order[i + 1], order[j]);
                    let mut d = inst.cost(a, c) - inst.cost(a, b);
                    if j + 1 < m {
                        let e = order[j + 1];
                        d += inst.cost(b, e) - inst.cost(c, e);
                    }
                    d
                } else {
                    reversal_delta(inst, order, i, j)
                };
                if delta < -1e-12 * scale {
                    order[i + 1..=j].reverse();
                    moves += 1;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    moves
}

fn reversal_delta(inst: &Instance, order: &[usize], i: usize, j: usize) -> f64 {
    let m = order.len();
    let mut old = inst.cost(order[i], order[i + 1]);
    let mut new = inst.cost(order[i], order[j]);
    for k in i + 1..j {
        old += inst.cost(order[k], order[k + 1]);
        new += inst.cost(order[k + 1], order[k]);
    }
    if j + 1 < m {
        old += inst.cost(order[j], order[j + 1]);
        new += inst.cost(order[i + 1], order[j + 1]);
    }
    new - old
}

/// Short Hamiltonian path on the plain edge costs, scored by expected cost.
pub fn blind_hpp_solve(inst: &Instance) -> SolveResult {
    let started = Instant::now();
    let mut order = nearest_neighbor_path(inst);
    let moves = two_opt_path(inst, &mut order);
    result(
        inst,
        order,
        SearchStats {
            expansions: moves as u64,
            wall_time: started.elapsed(),
            ..SearchStats::default()
        },
    )
}

/// Scores an externally computed tour (for instance from LKH). A cyclic tour
/// not starting at the start vertex is rotated to begin there.
pub fn blind_hpp_from_tour(inst: &Instance, tour: &[usize]) -> Result<SolveResult, BaselineError> {
    let n = inst.n();
    if tour.len() != n {
        return Err(BaselineError::InvalidTour(format!(
            "tour has {} vertices, instance has {n}",
            tour.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in tour {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(BaselineError::InvalidTour(format!(
                "vertex {v} is out of range or repeated"
            )));
        }
    }
    let at = tour
        .iter()
        .position(|&v| v == inst.start())
        .expect("tour is a permutation");
    let mut order = tour.to_vec();
    order.rotate_left(at);
    Ok(result(inst, order, SearchStats::default()))
}
