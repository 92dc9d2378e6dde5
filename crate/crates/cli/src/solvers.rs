use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::Args;
use hpppt_core::baselines::{
    blind_hpp_from_tour, blind_hpp_solve, greedy_solve, oracle_solve_with_cap, DEFAULT_ORACLE_CAP,
};
use hpppt_core::io::{load_instance, load_tour, MetricPolicy};
use hpppt_core::{solve, Instance, SolveError, SolveResult, SolverConfig};
use serde::Serialize;

use crate::output::sink;
use crate::GlobalArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Rpt,
    Greedy,
    Blind,
    Oracle,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Rpt => "rpt",
            SolverKind::Greedy => "greedy",
            SolverKind::Blind => "blind",
            SolverKind::Oracle => "oracle",
        }
    }
}

/// A solver with its settings. Written `rpt`, `rpt:EPS`, `rpt-noh`,
/// `rpt-noh:EPS`, `greedy`, `blind` or `oracle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSpec {
    pub kind: SolverKind,
    pub epsilon: f64,
    pub heuristic: bool,
}

impl SolverSpec {
    pub fn rpt(epsilon: f64, heuristic: bool) -> Self {
        SolverSpec {
            kind: SolverKind::Rpt,
            epsilon,
            heuristic,
        }
    }

    pub fn baseline(kind: SolverKind) -> Self {
        SolverSpec {
            kind,
            epsilon: 0.0,
            heuristic: false,
        }
    }

    pub fn is_rpt(&self) -> bool {
        self.kind == SolverKind::Rpt
    }
}

impl FromStr for SolverSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, eps) = match s.split_once(':') {
            Some((h, e)) => {
                let eps: f64 = e.parse().with_context(|| format!("bad epsilon in `{s}`"))?;
                if !(eps >= 0.0 && eps.is_finite()) {
                    bail!("epsilon must be a finite non-negative number in `{s}`");
                }
                (h, Some(eps))
            }
            None => (s, None),
        };
        let spec = match head {
            "rpt" => SolverSpec::rpt(eps.unwrap_or(0.0), true),
            "rpt-noh" => SolverSpec::rpt(eps.unwrap_or(0.0), false),
            "greedy" => SolverSpec::baseline(SolverKind::Greedy),
            "blind" | "blind-hpp" => SolverSpec::baseline(SolverKind::Blind),
            "oracle" => SolverSpec::baseline(SolverKind::Oracle),
            _ => bail!("unknown solver `{head}` (expected rpt, rpt-noh, greedy, blind or oracle)"),
        };
        if eps.is_some() && !spec.is_rpt() {
            bail!("`{head}` takes no epsilon");
        }
        Ok(spec)
    }
}

impl fmt::Display for SolverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.heuristic) {
            (SolverKind::Rpt, true) => write!(f, "rpt:{}", self.epsilon),
            (SolverKind::Rpt, false) => write!(f, "rpt-noh:{}", self.epsilon),
            (k, _) => f.write_str(k.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
    /// The oracle declined an instance above its size cap.
    Refused,
    Error,
}

impl Status {
    pub fn accepted(self) -> bool {
        matches!(self, Status::Ok | Status::Timeout)
    }
}

/// Everything one solver run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub result: Option<SolveResult>,
    pub expansions: u64,
    pub generations: u64,
    pub prunes: u64,
    pub wall: Duration,
    pub error: Option<String>,
}

/// Extra knobs of a single run.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub time_limit: Option<Duration>,
    pub oracle_cap: Option<usize>,
    pub tour: Option<Vec<usize>>,
    pub prune: bool,
}

pub fn run_solver(inst: &Instance, spec: &SolverSpec, opts: &RunOptions) -> Outcome {
    let started = Instant::now();
    let res: Result<SolveResult, (Status, String, Option<hpppt_core::solver::SearchStats>)> =
        match spec.kind {
            SolverKind::Rpt => {
                let mut cfg = SolverConfig::focal(spec.epsilon).with_time_limit(opts.time_limit);
                cfg.use_heuristic = spec.heuristic;
                cfg.prune = opts.prune;
                solve(inst, &cfg).map_err(|e| match e {
                    SolveError::Timeout { ref stats, .. } => {
                        (Status::Timeout, e.to_string(), Some(stats.clone()))
                    }
                    _ => (Status::Error, e.to_string(), e.stats().cloned()),
                })
            }
            SolverKind::Greedy => Ok(greedy_solve(inst)),
            SolverKind::Blind => match &opts.tour {
                Some(t) => blind_hpp_from_tour(inst, t).map_err(|e| (Status::Error, e.to_string(), None)),
                None => Ok(blind_hpp_solve(inst)),
            },
            SolverKind::Oracle => {
                oracle_solve_with_cap(inst, opts.oracle_cap.unwrap_or(DEFAULT_ORACLE_CAP))
                    .map_err(|e| (Status::Refused, e.to_string(), None))
            }
        };
    let wall = started.elapsed();
    match res {
        Ok(r) => Outcome {
            status: Status::Ok,
            expansions: r.stats.expansions,
            generations: r.stats.generations,
            prunes: r.stats.prunes(),
            wall,
            result: Some(r),
            error: None,
        },
        Err((status, message, stats)) => {
            let stats = stats.unwrap_or_default();
            Outcome {
                status,
                result: None,
                expansions: stats.expansions,
                generations: stats.generations,
                prunes: stats.prunes(),
                wall,
                error: Some(message),
            }
        }
    }
}

/// Name of an instance for reports: the file name when it came from disk.
pub fn instance_label(path: &std::path::Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file (`.hpt`, or TSPLIB when it ends in `.tsp`).
    pub instance: PathBuf,
    /// rpt, greedy, blind or oracle.
    #[arg(long, default_value = "rpt")]
    pub solver: String,
    /// Sub-optimality slack for rpt; 0 is exact.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Run rpt with a zero heuristic.
    #[arg(long)]
    pub no_heuristic: bool,
    /// Run rpt without dominance pruning.
    #[arg(long)]
    pub no_pruning: bool,
    /// Repair triangle-inequality violations instead of rejecting the instance.
    #[arg(long)]
    pub metric_closure: bool,
    /// Precomputed tour for the blind baseline, one line of vertex indices.
    #[arg(long)]
    pub tour: Option<PathBuf>,
    /// Largest instance the oracle accepts.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    pub oracle_cap: usize,
}

#[derive(Debug, Serialize)]
pub struct SolveRecord<'a> {
    pub instance: &'a str,
    pub n: usize,
    pub solver: &'static str,
    pub eps: f64,
    pub heuristic: bool,
    pub status: Status,
    pub cost: Option<f64>,
    pub path: Option<&'a [usize]>,
    pub expansions: u64,
    pub generations: u64,
    pub prunes: u64,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<&'a str>,
}

pub fn run_solve(g: &GlobalArgs, a: &SolveArgs) -> Result<bool> {
    let mut spec: SolverSpec = a.solver.parse()?;
    if spec.is_rpt() {
        if !(a.eps >= 0.0 && a.eps.is_finite()) {
            bail!("--eps must be a finite non-negative number");
        }
        spec.epsilon = a.eps;
        spec.heuristic = !a.no_heuristic;
    } else if a.eps != 0.0 || a.no_heuristic || a.no_pruning {
        bail!("--eps, --no-heuristic and --no-pruning only apply to rpt");
    }
    if a.tour.is_some() && spec.kind != SolverKind::Blind {
        bail!("--tour only applies to the blind solver");
    }
    let policy = if a.metric_closure {
        MetricPolicy::Repair
    } else {
        MetricPolicy::Reject
    };
    let inst = load_instance(&a.instance, policy)
        .with_context(|| format!("loading {}", a.instance.display()))?;
    let tour = a
        .tour
        .as_ref()
        .map(|p| load_tour(p).with_context(|| format!("loading {}", p.display())))
        .transpose()?;
    let opts = RunOptions {
        time_limit: Some(g.time_limit()?),
        oracle_cap: Some(a.oracle_cap),
        tour,
        prune: !a.no_pruning,
    };
    let out = run_solver(&inst, &spec, &opts);
    let label = instance_label(&a.instance);
    let record = SolveRecord {
        instance: &label,
        n: inst.n(),
        solver: spec.kind.name(),
        eps: spec.epsilon,
        heuristic: spec.heuristic,
        status: out.status,
        cost: out.result.as_ref().map(|r| r.cost),
        path: out.result.as_ref().map(|r| r.path.as_slice()),
        expansions: out.expansions,
        generations: out.generations,
        prunes: out.prunes,
        wall_ms: out.wall.as_secs_f64() * 1e3,
        error: out.error.as_deref(),
    };
    let mut w = sink(g.out.as_deref())?;
    serde_json::to_writer(&mut w, &record)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(out.status.accepted())
}
