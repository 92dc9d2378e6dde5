use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use hpppt_core::io::{load_instance, MetricPolicy};
use hpppt_core::{Instance, Seed};
use hpppt_sim::bayes::{lifelong_scenario, run_mission, GroundTruth, MissionConfig, SensorModel};
use hpppt_sim::grid::{
    forest_world, load_world, run_exploration, scenario_prior, write_world, ExplorationConfig,
    ForestConfig, PriorCondition, WorldModel,
};
use hpppt_sim::{PlannerConfig, PlannerKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{sink, write_csv};
use crate::lists::parse_list;
use crate::GlobalArgs;

fn parse_planners(text: &str) -> Result<Vec<PlannerKind>> {
    let planners: Vec<PlannerKind> = parse_list(text)
        .iter()
        .map(|p| p.parse().map_err(anyhow::Error::from))
        .collect::<Result<_>>()?;
    if planners.is_empty() {
        bail!("--planners names no planner");
    }
    Ok(planners)
}

fn planner_config(g: &GlobalArgs) -> Result<PlannerConfig> {
    Ok(PlannerConfig {
        time_limit: Some(g.time_limit()?),
        ..PlannerConfig::default()
    })
}

fn write_log(dir: Option<&Path>, name: &str, write: impl FnOnce(&mut dyn std::io::Write) -> std::io::Result<()>) -> Result<()> {
    let Some(dir) = dir else { return Ok(()) };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut f = std::io::BufWriter::new(
        std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    );
    write(&mut f).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Error,
}

#[derive(Debug, Args)]
pub struct LifelongArgs {
    /// Comma-separated planners: rpt, greedy, blind.
    #[arg(long, default_value = "rpt,greedy,blind")]
    pub planners: String,
    /// Missions per planner; trial k uses seed `--seed + k`.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Vertices of each generated graph.
    #[arg(long, default_value_t = 13)]
    pub vertices: usize,
    /// Vertices that hold a target.
    #[arg(long, default_value_t = 3)]
    pub targets: usize,
    /// Use this instance (its probabilities are the initial beliefs) instead of generated graphs.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Comma-separated target vertices for `--instance`; sampled from the seed when absent.
    #[arg(long)]
    pub target_vertices: Option<String>,
    /// Start every belief at this value instead of the sampled probabilities.
    #[arg(long)]
    pub initial_belief: Option<f64>,
    /// True positive rate of the sensor.
    #[arg(long, default_value_t = 0.8)]
    pub alpha1: f64,
    /// False positive rate of the sensor.
    #[arg(long, default_value_t = 0.4)]
    pub alpha2: f64,
    /// Use a perfect sensor (overrides the rates).
    #[arg(long)]
    pub noiseless: bool,
    /// Retire a vertex as "present" once its belief exceeds this.
    #[arg(long, default_value_t = 0.98)]
    pub p_high: f64,
    /// Retire a vertex as "absent" once its belief drops below this.
    #[arg(long, default_value_t = 0.15)]
    pub p_low: f64,
    /// Observation budget per mission.
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    /// Directory for per-mission step logs (JSON lines).
    #[arg(long)]
    pub log_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifelongRow {
    pub instance: String,
    pub planner: PlannerKind,
    pub trial: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub duration: Option<f64>,
    pub steps: Option<usize>,
    pub classification: Option<String>,
    pub truth: String,
    pub misclassified: Option<usize>,
    pub unresolved: Option<usize>,
    pub complete: Option<bool>,
    pub fallbacks: Option<usize>,
}

pub const LIFELONG_HEADER: [&str; 13] = [
    "instance",
    "planner",
    "trial",
    "seed",
    "status",
    "duration",
    "steps",
    "classification",
    "truth",
    "misclassified",
    "unresolved",
    "complete",
    "fallbacks",
];

fn truth_code(t: &GroundTruth) -> String {
    t.0.iter().map(|&p| if p { 'P' } else { 'A' }).collect()
}

fn lifelong_setup(g: &GlobalArgs, a: &LifelongArgs, trial: usize) -> Result<(Instance, GroundTruth)> {
    let seed = Seed(g.seed + trial as u64);
    let (inst, truth) = match &a.instance {
        Some(path) => {
            let inst = load_instance(path, MetricPolicy::Reject)
                .with_context(|| format!("loading {}", path.display()))?;
            let truth = match &a.target_vertices {
                Some(list) => {
                    let targets: Vec<usize> = parse_list(list)
                        .iter()
                        .map(|t| t.parse().with_context(|| format!("bad target vertex `{t}`")))
                        .collect::<Result<_>>()?;
                    GroundTruth::with_targets(inst.n(), &targets)?
                }
                None => GroundTruth::sample(inst.n(), a.targets, seed.derive(2))?,
            };
            (inst, truth)
        }
        None => lifelong_scenario(a.vertices, a.targets, seed)?,
    };
    let inst = match a.initial_belief {
        Some(b) => inst.with_probabilities(vec![b; truth.0.len()])?,
        None => inst,
    };
    Ok((inst, truth))
}

pub fn run_lifelong(g: &GlobalArgs, a: &LifelongArgs) -> Result<bool> {
    let planners = parse_planners(&a.planners)?;
    let sensor = if a.noiseless {
        SensorModel::NOISELESS
    } else {
        SensorModel::new(a.alpha1, a.alpha2)?
    };
    if a.target_vertices.is_some() && a.instance.is_none() {
        bail!("--target-vertices needs --instance");
    }
    let pcfg = planner_config(g)?;
    let setups: Vec<(Instance, GroundTruth)> = (0..a.trials)
        .map(|t| lifelong_setup(g, a, t))
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, PlannerKind)> = (0..a.trials)
        .flat_map(|t| planners.iter().map(move |&p| (t, p)))
        .collect();
    let results: Vec<(LifelongRow, Option<hpppt_sim::bayes::MissionLog>)> = g.pool()?.install(|| {
        tasks
            .par_iter()
            .map(|&(trial, planner)| {
                let (inst, truth) = &setups[trial];
                let seed = g.seed + trial as u64;
                let cfg = MissionConfig {
                    p_high: a.p_high,
                    p_low: a.p_low,
                    planner_config: pcfg.clone(),
                    max_steps: a.max_steps,
                    ..MissionConfig::new(planner, seed)
                };
                let mut row = LifelongRow {
                    instance: inst.name().to_string(),
                    planner,
                    trial,
                    seed,
                    status: RunStatus::Error,
                    duration: None,
                    steps: None,
                    classification: None,
                    truth: truth_code(truth),
                    misclassified: None,
                    unresolved: None,
                    complete: None,
                    fallbacks: None,
                };
                match run_mission(inst, truth, &sensor, &cfg) {
                    Ok(log) => {
                        let s = &log.summary;
                        row.status = RunStatus::Ok;
                        row.duration = Some(s.duration);
                        row.steps = Some(s.steps);
                        row.classification = Some(s.classification.clone());
                        row.misclassified = Some(s.misclassified);
                        row.unresolved = Some(s.unresolved);
                        row.complete = Some(s.complete);
                        row.fallbacks = Some(s.planner_fallbacks);
                        (row, Some(log))
                    }
                    Err(e) => {
                        eprintln!("{planner} trial {trial}: {e}");
                        (row, None)
                    }
                }
            })
            .collect()
    });
    for (row, log) in &results {
        if let Some(log) = log {
            let name = format!("{}_t{}.jsonl", row.planner, row.trial);
            write_log(a.log_dir.as_deref(), &name, |w| log.write_jsonl(w))?;
        }
    }
    let rows: Vec<LifelongRow> = results.into_iter().map(|(r, _)| r).collect();
    write_csv(sink(g.out.as_deref())?, &LIFELONG_HEADER, &rows)?;
    Ok(rows.iter().all(|r| r.status == RunStatus::Ok))
}

/// A prior choice on the command line: a scripted condition or whatever
/// the world's sidecar declares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorChoice {
    Sidecar,
    Scripted(PriorCondition),
}

impl PriorChoice {
    pub fn name(self) -> &'static str {
        match self {
            PriorChoice::Sidecar => "sidecar",
            PriorChoice::Scripted(c) => c.name(),
        }
    }
}

impl std::str::FromStr for PriorChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "sidecar" {
            Ok(PriorChoice::Sidecar)
        } else {
            Ok(PriorChoice::Scripted(s.parse()?))
        }
    }
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    /// World map files (`.` free, `#` occupied, `T` target, `R` robot) with
    /// optional `<file>.toml` sidecars. A seeded forest is generated when absent.
    #[arg(long = "world")]
    pub worlds: Vec<PathBuf>,
    /// Seed of the generated forest; defaults to `--seed`.
    #[arg(long)]
    pub world_seed: Option<u64>,
    /// Write the generated forest map to this file.
    #[arg(long)]
    pub save_world: Option<PathBuf>,
    /// Comma-separated priors: sidecar, none, accurate, misleading.
    #[arg(long, default_value = "sidecar")]
    pub prior: String,
    /// Comma-separated planners: rpt, greedy, blind.
    #[arg(long, default_value = "rpt,greedy,blind")]
    pub planners: String,
    /// Runs per (world, prior, planner); trial k jitters the scan with seed `--seed + k`.
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    /// Grid moves allowed per run.
    #[arg(long, default_value_t = 20_000)]
    pub max_steps: usize,
    /// Directory for per-run step logs (JSON lines).
    #[arg(long)]
    pub log_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExploreRow {
    pub world: String,
    pub prior: &'static str,
    pub planner: PlannerKind,
    pub trial: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub outcome: Option<hpppt_sim::grid::Outcome>,
    pub duration: Option<f64>,
    pub steps: Option<usize>,
    pub replans: Option<usize>,
    pub revealed: Option<usize>,
    pub fallbacks: Option<usize>,
}

pub const EXPLORE_HEADER: [&str; 12] = [
    "world", "prior", "planner", "trial", "seed", "status", "outcome", "duration", "steps",
    "replans", "revealed", "fallbacks",
];

fn prior_for(world: &WorldModel, choice: PriorChoice) -> Result<hpppt_sim::grid::PriorField> {
    Ok(match choice {
        PriorChoice::Sidecar => world.config.prior_field()?,
        PriorChoice::Scripted(c) => scenario_prior(world, c)?,
    })
}

pub fn run_explore(g: &GlobalArgs, a: &ExploreArgs) -> Result<bool> {
    let planners = parse_planners(&a.planners)?;
    let priors: Vec<PriorChoice> = parse_list(&a.prior)
        .iter()
        .map(|p| p.parse())
        .collect::<Result<_>>()?;
    if priors.is_empty() {
        bail!("--prior names no prior");
    }
    let mut worlds: Vec<(String, WorldModel)> = Vec::new();
    for path in &a.worlds {
        let w = load_world(path).with_context(|| format!("loading {}", path.display()))?;
        worlds.push((crate::solvers::instance_label(path), w));
    }
    if worlds.is_empty() {
        let seed = a.world_seed.unwrap_or(g.seed);
        let w = forest_world(&ForestConfig::default(), Seed(seed))?;
        if let Some(p) = &a.save_world {
            std::fs::write(p, write_world(&w)).with_context(|| format!("writing {}", p.display()))?;
        }
        worlds.push((format!("forest_s{seed}"), w));
    } else if a.save_world.is_some() {
        bail!("--save-world only applies to a generated forest");
    }
    let mut fields = Vec::new();
    for (wi, (_, w)) in worlds.iter().enumerate() {
        for (pi, &p) in priors.iter().enumerate() {
            fields.push(((wi, pi), prior_for(w, p)?));
        }
    }
    let pcfg = planner_config(g)?;
    let mut tasks = Vec::new();
    for wi in 0..worlds.len() {
        for pi in 0..priors.len() {
            for &planner in &planners {
                for trial in 0..a.trials {
                    tasks.push((wi, pi, planner, trial));
                }
            }
        }
    }
    let results: Vec<(ExploreRow, Option<hpppt_sim::grid::ExplorationLog>)> = g.pool()?.install(|| {
        tasks
            .par_iter()
            .map(|&(wi, pi, planner, trial)| {
                let (name, world) = &worlds[wi];
                let prior = &fields[wi * priors.len() + pi].1;
                let seed = g.seed + trial as u64;
                let mut cfg = ExplorationConfig::new(planner, seed).with_world_overrides(world);
                cfg.planner_config = pcfg.clone();
                cfg.max_steps = a.max_steps;
                let mut row = ExploreRow {
                    world: name.clone(),
                    prior: priors[pi].name(),
                    planner,
                    trial,
                    seed,
                    status: RunStatus::Error,
                    outcome: None,
                    duration: None,
                    steps: None,
                    replans: None,
                    revealed: None,
                    fallbacks: None,
                };
                match run_exploration(world, prior, &cfg) {
                    Ok(log) => {
                        let s = &log.summary;
                        row.status = RunStatus::Ok;
                        row.outcome = Some(s.outcome);
                        row.duration = Some(s.duration);
                        row.steps = Some(s.steps);
                        row.replans = Some(s.replans);
                        row.revealed = Some(s.revealed);
                        row.fallbacks = Some(s.planner_fallbacks);
                        (row, Some(log))
                    }
                    Err(e) => {
                        eprintln!("{name} {} {planner} trial {trial}: {e}", priors[pi].name());
                        (row, None)
                    }
                }
            })
            .collect()
    });
    for (row, log) in &results {
        if let Some(log) = log {
            let name = format!("{}_{}_{}_t{}.jsonl", row.world, row.prior, row.planner, row.trial);
            write_log(a.log_dir.as_deref(), &name, |w| log.write_jsonl(w))?;
        }
    }
    let rows: Vec<ExploreRow> = results.into_iter().map(|(r, _)| r).collect();
    write_csv(sink(g.out.as_deref())?, &EXPLORE_HEADER, &rows)?;
    Ok(rows.iter().all(|r| r.status == RunStatus::Ok))
}
