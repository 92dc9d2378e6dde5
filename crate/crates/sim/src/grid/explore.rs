use std::collections::VecDeque;
use std::f64::consts::PI;
use std::io::Write;

use hpppt_core::Seed;
use serde::Serialize;

use super::cluster::{cluster_goals, ClusterConfig};
use super::graph::{bfs_distances, build_search_graph, shortest_path};
use super::sensing::{assign_probability, cast_reveal, PriorField, ProbabilityConfig, Weights};
use super::world::WorldModel;
use super::{CellPos, OccupancyGrid};
use crate::counter_uniform;
use crate::error::Result;
use crate::planner::{plan, PlannerConfig, PlannerKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplorationConfig {
    pub planner: PlannerKind,
    #[serde(skip)]
    pub planner_config: PlannerConfig,
    pub weights: Weights,
    pub probability: ProbabilityConfig,
    pub cluster: ClusterConfig,
    /// Rays in the 360° mapping scan.
    pub reveal_rays: usize,
    /// Relative change in frontier count that forces a replan.
    pub replan_change: f64,
    pub max_steps: usize,
    /// Drives the angular jitter of the mapping scan.
    pub seed: u64,
}

impl ExplorationConfig {
    pub fn new(planner: PlannerKind, seed: u64) -> Self {
        ExplorationConfig {
            planner,
            planner_config: PlannerConfig::default(),
            weights: Weights::default(),
            probability: ProbabilityConfig::default(),
            cluster: ClusterConfig::default(),
            reveal_rays: 180,
            replan_change: 0.2,
            max_steps: 20_000,
            seed,
        }
    }

    /// Applies the overrides carried by a world's sidecar.
    pub fn with_world_overrides(mut self, world: &WorldModel) -> Self {
        if let Some(w) = world.config.weights {
            self.weights = w;
        }
        if let Some(c) = world.config.cluster {
            self.cluster = c;
        }
        if let Some(p) = world.config.probability {
            self.probability = p;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Target seen and within the success radius.
    Success,
    /// No reachable frontier remains.
    Exhausted,
    /// The step cap ran out first.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplorationStep {
    pub step: usize,
    pub robot: CellPos,
    /// Distance travelled so far, metres.
    pub duration: f64,
    pub revealed: usize,
    pub frontiers: usize,
    pub clusters: usize,
    pub replanned: bool,
    pub goal: Option<CellPos>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplorationSummary {
    pub planner: PlannerKind,
    pub seed: u64,
    pub outcome: Outcome,
    pub duration: f64,
    pub steps: usize,
    pub replans: usize,
    pub revealed: usize,
    pub planner_fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationLog {
    pub steps: Vec<ExplorationStep>,
    pub summary: ExplorationSummary,
    /// Map as known when the run ended.
    pub known: OccupancyGrid,
}

impl ExplorationLog {
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for s in &self.steps {
            serde_json::to_writer(&mut out, s)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

struct Leg {
    goal: CellPos,
    path: VecDeque<CellPos>,
    frontiers_at_plan: usize,
    clusters: usize,
}

fn nearest_frontier_distance(goal: CellPos, frontiers: &[CellPos]) -> f64 {
    frontiers
        .iter()
        .map(|&f| {
            let (dx, dy) = (f.0 as f64 - goal.0 as f64, f.1 as f64 - goal.1 as f64);
            (dx * dx + dy * dy).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Explore-plan-move loop. Each iteration scans, checks for success, replans
/// if the current leg is finished or stale, then moves one cell.
pub fn run_exploration(
    world: &WorldModel,
    prior: &PriorField,
    cfg: &ExplorationConfig,
) -> Result<ExplorationLog> {
    cfg.weights.validate()?;
    cfg.cluster.validate()?;
    let res = world.config.resolution;
    let truth = &world.truth;
    let mut known = OccupancyGrid::unknown(truth.width(), truth.height(), res);
    let range = world.config.sensor_radius / res;
    let seed = Seed(cfg.seed);
    let mut robot = world.robot;
    let mut heading = world.config.heading;
    let mut duration = 0.0;
    let mut replans = 0;
    let mut fallbacks = 0;
    let mut leg: Option<Leg> = None;
    let mut steps = Vec::new();

    let outcome = loop {
        let step = steps.len();
        let offset = counter_uniform(seed, step as u64) * 2.0 * PI / cfg.reveal_rays as f64;
        cast_reveal(&mut known, truth, robot, 0.0, 2.0 * PI, cfg.reveal_rays, range, offset);

        if let Some(t) = world.target {
            let [rx, ry] = known.center(robot);
            let [tx, ty] = known.center(t);
            let close = ((rx - tx).powi(2) + (ry - ty).powi(2)).sqrt() < world.config.success_radius;
            if close && known.get(t) != super::Cell::Unknown {
                steps.push(ExplorationStep {
                    step,
                    robot,
                    duration,
                    revealed: known.known_count(),
                    frontiers: 0,
                    clusters: 0,
                    replanned: false,
                    goal: None,
                });
                break Outcome::Success;
            }
        }

        let reach = bfs_distances(&known, robot);
        let frontiers: Vec<CellPos> = known
            .frontiers()
            .into_iter()
            .filter(|&f| reach[known.index(f)].is_some() && f != robot)
            .collect();
        let record = |leg: &Option<Leg>, replanned: bool| ExplorationStep {
            step,
            robot,
            duration,
            revealed: known.known_count(),
            frontiers: frontiers.len(),
            clusters: leg.as_ref().map_or(0, |l| l.clusters),
            replanned,
            goal: leg.as_ref().map(|l| l.goal),
        };
        // a sighted target that has not been reached yet becomes the goal
        let sighted = world
            .target
            .filter(|&t| known.get(t) != super::Cell::Unknown && reach[known.index(t)].is_some());
        if frontiers.is_empty() && sighted.is_none() {
            steps.push(record(&None, false));
            break Outcome::Exhausted;
        }
        if step >= cfg.max_steps {
            steps.push(record(&leg, false));
            break Outcome::Truncated;
        }

        let stale = match (&leg, sighted) {
            (Some(l), Some(t)) => l.goal != t || l.path.is_empty(),
            (None, _) => true,
            (Some(l), None) => {
                let base = l.frontiers_at_plan.max(1) as f64;
                l.path.is_empty()
                    || nearest_frontier_distance(l.goal, &frontiers) > cfg.cluster.bandwidth
                    || (frontiers.len() as f64 - base).abs() > cfg.replan_change * base
            }
        };
        if let (true, Some(t)) = (stale, sighted) {
            let path = shortest_path(&known, robot, t).expect("the target is reachable");
            leg = Some(Leg {
                goal: t,
                path: path.into(),
                frontiers_at_plan: frontiers.len(),
                clusters: 0,
            });
            replans += 1;
        } else if stale {
            let probs = assign_probability(
                &known,
                &frontiers,
                prior,
                &cfg.weights,
                &cfg.probability,
                robot,
                heading,
            )?;
            let goals = cluster_goals(&known, &frontiers, &probs, Some(robot), &cfg.cluster)?;
            let graph = build_search_graph(&known, &goals, robot)?;
            let clusters = graph.goals.len();
            let goal = if graph.instance.n() > 1 {
                let p = plan(cfg.planner, &graph.instance, &cfg.planner_config)?;
                fallbacks += p.fallback as usize;
                graph.cells[p.order[1]]
            } else {
                // every cluster snapped onto the robot or out of reach
                *frontiers
                    .iter()
                    .min_by_key(|&&f| reach[known.index(f)])
                    .expect("frontiers is non-empty")
            };
            let path = shortest_path(&known, robot, goal).expect("goals are reachable");
            leg = Some(Leg {
                goal,
                path: path.into(),
                frontiers_at_plan: frontiers.len(),
                clusters,
            });
            replans += 1;
        }
        steps.push(record(&leg, stale));

        let l = leg.as_mut().expect("a leg was planned");
        let next = l.path.pop_front().expect("stale legs are replanned");
        heading = (next.1 as f64 - robot.1 as f64).atan2(next.0 as f64 - robot.0 as f64);
        robot = next;
        duration += res;
    };

    let summary = ExplorationSummary {
        planner: cfg.planner,
        seed: cfg.seed,
        outcome,
        duration,
        steps: steps.len() - 1,
        replans,
        revealed: known.known_count(),
        planner_fallbacks: fallbacks,
    };
    Ok(ExplorationLog {
        steps,
        summary,
        known,
    })
}
