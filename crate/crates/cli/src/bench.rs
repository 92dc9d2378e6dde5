use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use hpppt_core::baselines::{oracle_solve, DEFAULT_ORACLE_CAP};
use hpppt_core::generate::DEFAULT_P_MAX;
use hpppt_core::io::{load_instance, MetricPolicy};
use hpppt_core::Instance;
use rayon::prelude::*;
use serde::Serialize;

use crate::gen::sweep_instance;
use crate::output::{sink, write_csv};
use crate::solvers::{instance_label, run_solver, Outcome, RunOptions, SolverKind, SolverSpec, Status};
use crate::lists::{parse_list, parse_sizes};
use crate::GlobalArgs;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Instance files or directories (every `.hpt` and `.tsp` inside, sorted).
    pub instances: Vec<PathBuf>,
    /// Generate instances for these sizes instead of, or as well as, files.
    #[arg(long)]
    pub generate: Option<String>,
    /// Generated instances per size.
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    /// Comma-separated solvers: rpt, rpt:EPS, rpt-noh, rpt-noh:EPS, greedy, blind, oracle.
    #[arg(long, default_value = "rpt,greedy,blind")]
    pub solvers: String,
    /// Repetitions of every (instance, solver) pair.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    /// Repair triangle-inequality violations in loaded files.
    #[arg(long)]
    pub metric_closure: bool,
    /// Where to write the per-size summary. Defaults to `<out>.summary.csv`
    /// next to `--out`, or standard error when writing rows to standard output.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

/// A benchmark description, independent of how it was given on the command line.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub instances: Vec<(String, Instance)>,
    pub solvers: Vec<SolverSpec>,
    pub reps: usize,
    pub time_limit: std::time::Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub solver: &'static str,
    pub eps: Option<f64>,
    pub heuristic: Option<bool>,
    pub rep: usize,
    pub status: Status,
    pub cost: Option<f64>,
    pub cost_ratio: Option<f64>,
    pub expansions: u64,
    pub generations: u64,
    pub prunes: u64,
    pub wall_ms: f64,
}

pub const BENCH_HEADER: [&str; 13] = [
    "instance",
    "n",
    "solver",
    "eps",
    "heuristic",
    "rep",
    "status",
    "cost",
    "cost_ratio",
    "expansions",
    "generations",
    "prunes",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub solver: &'static str,
    pub eps: Option<f64>,
    pub heuristic: Option<bool>,
    pub runs: usize,
    pub ok: usize,
    pub timeout: usize,
    pub failed: usize,
    pub success_rate: f64,
    pub mean_cost_ratio: Option<f64>,
    pub mean_expansions: Option<f64>,
}

pub const SUMMARY_HEADER: [&str; 11] = [
    "n",
    "solver",
    "eps",
    "heuristic",
    "runs",
    "ok",
    "timeout",
    "failed",
    "success_rate",
    "mean_cost_ratio",
    "mean_expansions",
];

fn collect_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inside: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.extension()
                        .is_some_and(|e| e.eq_ignore_ascii_case("hpt") || e.eq_ignore_ascii_case("tsp"))
                })
                .collect();
            inside.sort();
            out.extend(inside);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Best-known cost per instance: the oracle for small instances, otherwise
/// the cheapest successful rpt run of the grid.
fn reference_costs(spec: &BenchSpec, outcomes: &[(usize, usize, usize, Outcome)]) -> Vec<Option<f64>> {
    spec.instances
        .par_iter()
        .enumerate()
        .map(|(i, (_, inst))| {
            if inst.n() <= DEFAULT_ORACLE_CAP {
                let from_grid = outcomes.iter().find_map(|(ii, s, _, o)| {
                    (*ii == i && spec.solvers[*s].kind == SolverKind::Oracle)
                        .then(|| o.result.as_ref().map(|r| r.cost))
                        .flatten()
                });
                return from_grid.or_else(|| oracle_solve(inst).ok().map(|r| r.cost));
            }
            outcomes
                .iter()
                .filter(|(ii, s, _, o)| *ii == i && spec.solvers[*s].is_rpt() && o.status == Status::Ok)
                .filter_map(|(_, _, _, o)| o.result.as_ref().map(|r| r.cost))
                .reduce(f64::min)
        })
        .collect()
}

fn ratio(cost: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        cost / reference
    } else if cost == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Runs the grid and returns rows in (instance, solver, repetition) order.
pub fn run_grid(spec: &BenchSpec, pool: &rayon::ThreadPool) -> Vec<BenchRow> {
    let tasks: Vec<(usize, usize, usize)> = (0..spec.instances.len())
        .flat_map(|i| (0..spec.solvers.len()).flat_map(move |s| (0..spec.reps).map(move |r| (i, s, r))))
        .collect();
    let opts = RunOptions {
        time_limit: Some(spec.time_limit),
        oracle_cap: None,
        tour: None,
        prune: true,
    };
    pool.install(|| {
        let outcomes: Vec<(usize, usize, usize, Outcome)> = tasks
            .par_iter()
            .map(|&(i, s, r)| (i, s, r, run_solver(&spec.instances[i].1, &spec.solvers[s], &opts)))
            .collect();
        let refs = reference_costs(spec, &outcomes);
        outcomes
            .into_iter()
            .map(|(i, s, rep, o)| {
                let (name, inst) = &spec.instances[i];
                let sv = &spec.solvers[s];
                let cost = o.result.as_ref().map(|r| r.cost);
                BenchRow {
                    instance: name.clone(),
                    n: inst.n(),
                    solver: sv.kind.name(),
                    eps: sv.is_rpt().then_some(sv.epsilon),
                    heuristic: sv.is_rpt().then_some(sv.heuristic),
                    rep,
                    status: o.status,
                    cost,
                    cost_ratio: cost.zip(refs[i]).map(|(c, r)| ratio(c, r)),
                    expansions: o.expansions,
                    generations: o.generations,
                    prunes: o.prunes,
                    wall_ms: o.wall.as_secs_f64() * 1e3,
                }
            })
            .collect()
    })
}

/// Success rates and means per (size, solver configuration), sorted by size
/// and then by the solver's position in the grid.
pub fn summarize(spec: &BenchSpec, rows: &[BenchRow]) -> Vec<SummaryRow> {
    let per_solver = spec.reps;
    let mut groups: BTreeMap<(usize, usize), Vec<&BenchRow>> = BTreeMap::new();
    for (k, row) in rows.iter().enumerate() {
        let solver_index = (k / per_solver) % spec.solvers.len();
        groups.entry((row.n, solver_index)).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|((n, s), rs)| {
            let sv = &spec.solvers[s];
            let count = |st: Status| rs.iter().filter(|r| r.status == st).count();
            let ok: Vec<&&BenchRow> = rs.iter().filter(|r| r.status == Status::Ok).collect();
            let ratios: Vec<f64> = ok.iter().filter_map(|r| r.cost_ratio).collect();
            SummaryRow {
                n,
                solver: sv.kind.name(),
                eps: sv.is_rpt().then_some(sv.epsilon),
                heuristic: sv.is_rpt().then_some(sv.heuristic),
                runs: rs.len(),
                ok: ok.len(),
                timeout: count(Status::Timeout),
                failed: rs.len() - ok.len() - count(Status::Timeout),
                success_rate: ok.len() as f64 / rs.len() as f64,
                mean_cost_ratio: (!ratios.is_empty())
                    .then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
                mean_expansions: (!ok.is_empty())
                    .then(|| ok.iter().map(|r| r.expansions as f64).sum::<f64>() / ok.len() as f64),
            }
        })
        .collect()
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.csv"))
}

pub fn run(g: &GlobalArgs, a: &BenchArgs) -> Result<bool> {
    if a.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let solvers: Vec<SolverSpec> = parse_list(&a.solvers)
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    if solvers.is_empty() {
        bail!("--solvers names no solver");
    }
    let policy = if a.metric_closure {
        MetricPolicy::Repair
    } else {
        MetricPolicy::Reject
    };
    let mut instances = Vec::new();
    for path in collect_files(&a.instances)? {
        let inst = load_instance(&path, policy).with_context(|| format!("loading {}", path.display()))?;
        instances.push((instance_label(&path), inst));
    }
    if let Some(sizes) = &a.generate {
        for n in parse_sizes(sizes)? {
            for i in 0..a.count {
                let inst = sweep_instance(g.seed, n, i, DEFAULT_P_MAX)?;
                instances.push((inst.name().to_string(), inst));
            }
        }
    }
    let spec = BenchSpec {
        instances,
        solvers,
        reps: a.reps,
        time_limit: g.time_limit()?,
    };
    let rows = run_grid(&spec, &g.pool()?);
    let summary = summarize(&spec, &rows);
    write_csv(sink(g.out.as_deref())?, &BENCH_HEADER, &rows)?;
    match (&a.summary, &g.out) {
        (Some(p), _) => write_csv(sink(Some(p))?, &SUMMARY_HEADER, &summary)?,
        (None, Some(out)) => write_csv(sink(Some(&summary_path(out)))?, &SUMMARY_HEADER, &summary)?,
        (None, None) => write_csv(Box::new(std::io::stderr()), &SUMMARY_HEADER, &summary)?,
    }
    Ok(rows.iter().all(|r| r.status.accepted()))
}
