use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::instance::{Instance, Path};

use super::frontier::FrontierSet;
use super::heuristic::HeuristicTable;
use super::state::{SearchState, StateId, VisitedSet};
use super::{SearchObserver, SearchStats, SolveError, SolveResult, SolverConfig, TieBreak};

/// Iterations between wall-clock checks.
const CLOCK_STRIDE: u64 = 512;

/// OPEN ordering: `f` ascending, then depth descending, `g` ascending and
/// insertion order. Under [`TieBreak::Fifo`] depth and `g` are zeroed.
#[derive(Debug, Clone, Copy)]
struct OpenKey {
    f: f64,
    depth: u32,
    g: f64,
    id: u32,
}

impl OpenKey {
    fn cmp_min(&self, other: &Self) -> Ordering {
        self.f
            .total_cmp(&other.f)
            .then_with(|| other.depth.cmp(&self.depth))
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| self.id.cmp(&other.id))
    }
}

impl PartialEq for OpenKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for OpenKey {}
impl PartialOrd for OpenKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenKey {
    // BinaryHeap is a max-heap; invert so the smallest key pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cmp_min(self)
    }
}

/// FOCAL ordering: fewest unvisited vertices first, then `f`, `g`, insertion order.
#[derive(Debug, Clone, Copy)]
struct FocalKey {
    remaining: u32,
    f: f64,
    g: f64,
    id: u32,
}

impl FocalKey {
    fn cmp_min(&self, other: &Self) -> Ordering {
        self.remaining
            .cmp(&other.remaining)
            .then_with(|| self.f.total_cmp(&other.f))
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| self.id.cmp(&other.id))
    }
}

impl PartialEq for FocalKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for FocalKey {}
impl PartialOrd for FocalKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FocalKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cmp_min(self)
    }
}

/// FOCAL bookkeeping. `open` holds every open state (closed ones are
/// skipped lazily) and yields `f_min`; `focal` holds exactly the open states
/// with `f <= bound`; `pending` holds the rest. The bound only moves when
/// `f_min` strictly increases, at which point `pending` is drained into
/// `focal` up to the new bound.
struct Focal {
    epsilon: f64,
    f_min: f64,
    bound: f64,
    focal: BinaryHeap<FocalKey>,
    pending: BinaryHeap<OpenKey>,
    closed: Vec<bool>,
}

pub(super) struct Search<'a, O> {
    inst: &'a Instance,
    cfg: &'a SolverConfig,
    table: Option<&'a HeuristicTable>,
    observer: &'a mut O,
    arena: Vec<SearchState>,
    frontiers: Vec<FrontierSet>,
    open: BinaryHeap<OpenKey>,
    open_live: u64,
    focal: Option<Focal>,
    stats: SearchStats,
}

impl<'a, O: SearchObserver> Search<'a, O> {
    pub(super) fn new(
        inst: &'a Instance,
        cfg: &'a SolverConfig,
        table: Option<&'a HeuristicTable>,
        observer: &'a mut O,
    ) -> Self {
        let focal = (cfg.epsilon > 0.0).then(|| Focal {
            epsilon: cfg.epsilon,
            f_min: f64::NEG_INFINITY,
            bound: f64::NEG_INFINITY,
            focal: BinaryHeap::new(),
            pending: BinaryHeap::new(),
            closed: Vec::new(),
        });
        Search {
            inst,
            cfg,
            table,
            observer,
            arena: Vec::new(),
            frontiers: vec![FrontierSet::new(); inst.n()],
            open: BinaryHeap::new(),
            open_live: 0,
            focal,
            stats: SearchStats::default(),
        }
    }

    fn heuristic(&self, v: usize, q: f64, visited: &VisitedSet) -> f64 {
        match self.table {
            Some(t) => t.value(self.inst, v, q, self.inst.n() - visited.len()),
            None => 0.0,
        }
    }

    fn open_key(&self, s: &SearchState, id: u32) -> OpenKey {
        match self.cfg.tie_break {
            TieBreak::DeepestFirst => OpenKey {
                f: s.f,
                depth: s.visited.len() as u32,
                g: s.g,
                id,
            },
            TieBreak::Fifo => OpenKey {
                f: s.f,
                depth: 0,
                g: 0.0,
                id,
            },
        }
    }

    fn push(&mut self, state: SearchState) {
        let id = self.arena.len() as u32;
        let key = self.open_key(&state, id);
        self.open.push(key);
        if let Some(fc) = &mut self.focal {
            fc.closed.push(false);
            if state.f <= fc.bound {
                fc.focal.push(FocalKey {
                    remaining: (self.inst.n() - state.visited.len()) as u32,
                    f: state.f,
                    g: state.g,
                    id,
                });
            } else {
                fc.pending.push(key);
            }
        }
        self.arena.push(state);
        self.open_live += 1;
        self.stats.peak_open = self.stats.peak_open.max(self.open_live);
    }

    /// Next state to process, or `None` once OPEN is empty.
    fn pop(&mut self) -> Option<u32> {
        let Some(fc) = &mut self.focal else {
            let key = self.open.pop()?;
            self.open_live -= 1;
            return Some(key.id);
        };
        while let Some(top) = self.open.peek() {
            if fc.closed[top.id as usize] {
                self.open.pop();
            } else {
                break;
            }
        }
        let f_min = self.open.peek()?.f;
        if f_min > fc.f_min {
            fc.f_min = f_min;
            fc.bound = (1.0 + fc.epsilon) * f_min;
            while let Some(top) = fc.pending.peek() {
                if top.f > fc.bound {
                    break;
                }
                let key = fc.pending.pop().expect("peeked");
                let s = &self.arena[key.id as usize];
                fc.focal.push(FocalKey {
                    remaining: (self.inst.n() - s.visited.len()) as u32,
                    f: s.f,
                    g: s.g,
                    id: key.id,
                });
            }
        }
        let chosen = fc
            .focal
            .pop()
            .expect("the f_min state is always within the focal bound");
        fc.closed[chosen.id as usize] = true;
        self.open_live -= 1;
        self.observer
            .on_focal_select(f_min, &self.arena[chosen.id as usize]);
        Some(chosen.id)
    }

    fn reconstruct(&self, mut id: u32) -> Path {
        let mut order = Vec::with_capacity(self.inst.n());
        loop {
            let s = &self.arena[id as usize];
            order.push(s.vertex());
            match s.parent {
                Some(StateId(p)) => id = p,
                None => break,
            }
        }
        order.reverse();
        Path(order)
    }

    pub(super) fn run(mut self) -> Result<SolveResult, SolveError> {
        let started = Instant::now();
        let inst = self.inst;
        let n = inst.n();
        let start = inst.start();

        let visited = VisitedSet::singleton(start);
        let q = 1.0 - inst.prob(start);
        let h = self.heuristic(start, q, &visited);
        let s0 = SearchState {
            vertex: start as u32,
            g: 0.0,
            q,
            visited,
            h,
            f: h,
            parent: None,
        };
        self.stats.generations = 1;
        self.observer.on_generate(&s0, false);
        self.push(s0);

        let mut iterations = 0u64;
        while let Some(id) = self.pop() {
            iterations += 1;
            if iterations % CLOCK_STRIDE == 0 {
                if let Some(limit) = self.cfg.time_limit {
                    if started.elapsed() > limit {
                        self.stats.wall_time = started.elapsed();
                        return Err(SolveError::Timeout {
                            limit,
                            stats: self.stats,
                        });
                    }
                }
            }

            let s = self.arena[id as usize];
            let v = s.vertex();
            if self.cfg.prune {
                if self.frontiers[v].is_dominated(s.g, &s.visited) {
                    self.stats.prunes_at_extraction += 1;
                    self.observer.on_extract(&s, true);
                    continue;
                }
                self.frontiers[v].filter_and_add(s.g, s.visited);
            }
            self.stats.expansions += 1;
            self.observer.on_extract(&s, false);

            if s.visited.len() == n {
                self.stats.wall_time = started.elapsed();
                let path = self.reconstruct(id);
                return Ok(SolveResult {
                    path,
                    cost: s.g,
                    stats: self.stats,
                });
            }

            let row = inst.row(v);
            for next in 0..n {
                if s.visited.contains(next) {
                    continue;
                }
                let g = s.g + s.q * row[next];
                let q = s.q * (1.0 - inst.prob(next));
                let visited = s.visited.with(next);
                let h = self.heuristic(next, q, &visited);
                let child = SearchState {
                    vertex: next as u32,
                    g,
                    q,
                    visited,
                    h,
                    f: g + h,
                    parent: Some(StateId(id)),
                };
                self.stats.generations += 1;
                if self.cfg.prune && self.frontiers[next].is_dominated(g, &visited) {
                    self.stats.prunes_at_generation += 1;
                    self.observer.on_generate(&child, true);
                    continue;
                }
                self.observer.on_generate(&child, false);
                self.push(child);
            }
        }

        self.stats.wall_time = started.elapsed();
        Err(SolveError::Infeasible { stats: self.stats })
    }
}
