//! Best-first search over `(vertex, g, q, visited)` states.
//!
//! With `epsilon = 0` states are extracted in `f = g + h` order and the first
//! complete state is optimal. With `epsilon > 0` a FOCAL list holds the open
//! states with `f <= (1 + epsilon) * f_min`, ordered by how many vertices are
//! still unvisited; the returned path is then within `1 + epsilon` of the
//! optimum.

mod frontier;
mod heuristic;
mod search;
mod state;

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::instance::{Instance, Path};

pub use frontier::FrontierSet;
pub use heuristic::{heuristic_value, HeuristicTable};
pub use state::{dominates, SearchState, StateId, VisitedSet, DOMINANCE_TOLERANCE, MAX_VERTICES};

/// Per-instance time limit used unless the caller overrides it.
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

/// Ordering among OPEN states with equal `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// More visited vertices first, then smaller `g`, then insertion order.
    #[default]
    DeepestFirst,
    /// Insertion order only.
    Fifo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Sub-optimality slack; zero runs the exact search.
    pub epsilon: f64,
    /// Off replaces the heuristic with `h = 0`.
    pub use_heuristic: bool,
    /// Off disables dominance pruning entirely.
    pub prune: bool,
    pub time_limit: Option<Duration>,
    pub tie_break: TieBreak,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 0.0,
            use_heuristic: true,
            prune: true,
            time_limit: Some(DEFAULT_TIME_LIMIT),
            tie_break: TieBreak::DeepestFirst,
        }
    }
}

impl SolverConfig {
    pub fn focal(epsilon: f64) -> Self {
        SolverConfig {
            epsilon,
            ..Self::default()
        }
    }

    pub fn with_time_limit(mut self, limit: Option<Duration>) -> Self {
        self.time_limit = limit;
        self
    }

    pub fn without_heuristic(mut self) -> Self {
        self.use_heuristic = false;
        self
    }

    pub fn without_pruning(mut self) -> Self {
        self.prune = false;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchStats {
    /// States extracted and not pruned, including the returned goal state.
    pub expansions: u64,
    /// States constructed, including the initial state.
    pub generations: u64,
    pub prunes_at_extraction: u64,
    pub prunes_at_generation: u64,
    pub peak_open: u64,
    #[serde(serialize_with = "as_millis")]
    pub wall_time: Duration,
}

impl SearchStats {
    pub fn prunes(&self) -> u64 {
        self.prunes_at_extraction + self.prunes_at_generation
    }
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub path: Path,
    pub cost: f64,
    pub stats: SearchStats,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance has {n} vertices, the search supports at most {max}")]
    TooManyVertices { n: usize, max: usize },

    #[error("time limit of {limit:?} exceeded after {} expansions", stats.expansions)]
    Timeout { limit: Duration, stats: SearchStats },

    #[error("search exhausted without a solution")]
    Infeasible { stats: SearchStats },
}

impl SolveError {
    pub fn stats(&self) -> Option<&SearchStats> {
        match self {
            SolveError::Timeout { stats, .. } | SolveError::Infeasible { stats } => Some(stats),
            _ => None,
        }
    }
}

/// Hooks into the search loop, used by tests and diagnostics.
pub trait SearchObserver {
    /// Called for every constructed state; `pruned` marks generation-time pruning.
    fn on_generate(&mut self, _state: &SearchState, _pruned: bool) {}
    /// Called for every extracted state; `pruned` marks extraction-time pruning.
    fn on_extract(&mut self, _state: &SearchState, _pruned: bool) {}
    /// Focal mode only: the current minimum open `f` and the selected state.
    fn on_focal_select(&mut self, _f_min: f64, _selected: &SearchState) {}
}

/// Observer that ignores every event.
pub struct NoObserver;

impl SearchObserver for NoObserver {}

pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    solve_observed(inst, cfg, &mut NoObserver)
}

pub fn solve_observed<O: SearchObserver>(
    inst: &Instance,
    cfg: &SolverConfig,
    observer: &mut O,
) -> Result<SolveResult, SolveError> {
    if !(cfg.epsilon >= 0.0 && cfg.epsilon.is_finite()) {
        return Err(SolveError::InvalidConfig(format!(
            "epsilon = {}, must be finite and non-negative",
            cfg.epsilon
        )));
    }
    if inst.n() > MAX_VERTICES {
        return Err(SolveError::TooManyVertices {
            n: inst.n(),
            max: MAX_VERTICES,
        });
    }
    let table = cfg.use_heuristic.then(|| HeuristicTable::build(inst));
    search::Search::new(inst, cfg, table.as_ref(), observer).run()
}
