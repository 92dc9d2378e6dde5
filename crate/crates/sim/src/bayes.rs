//! Lifelong search on a known graph with an unreliable binary detector.
//!
//! Each vertex carries an independent Bernoulli belief that a target sits
//! there. The robot repeatedly plans a visiting order over the unresolved
//! vertices (using their beliefs as terminal probabilities), travels to the
//! first vertex of the plan, takes one observation, and updates that
//! vertex's belief. A vertex is retired as present or absent once its
//! belief crosses the upper or lower threshold.

use std::io::Write;

use hpppt_core::generate::{assign_probabilities, generate_random};
use hpppt_core::{Instance, Seed};
use rand::seq::index::sample;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::planner::{plan, PlannerConfig, PlannerKind};

/// Largest belief handed to a planner; probabilities must stay below one.
pub const MAX_PLANNING_PROBABILITY: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensorModel {
    /// P(z = 1 | target present).
    pub alpha1: f64,
    /// P(z = 1 | target absent).
    pub alpha2: f64,
}

impl SensorModel {
    pub const NOISELESS: SensorModel = SensorModel {
        alpha1: 1.0,
        alpha2: 0.0,
    };

    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
            if !(0.0..=1.0).contains(&a) {
                return Err(SimError::InvalidArgument(format!(
                    "{name} = {a} is outside [0, 1]"
                )));
            }
        }
        Ok(SensorModel { alpha1, alpha2 })
    }

    /// Observations carry no information when both rates coincide.
    pub fn is_uninformative(&self) -> bool {
        self.alpha1 == self.alpha2
    }

    /// (P(z | present), P(z | absent)).
    pub fn likelihoods(&self, z: bool) -> (f64, f64) {
        if z {
            (self.alpha1, self.alpha2)
        } else {
            (1.0 - self.alpha1, 1.0 - self.alpha2)
        }
    }
}

/// Posterior for one vertex after observing `z`, from prior `prior`.
pub fn bayes_update(prior: f64, z: bool, sensor: &SensorModel) -> Result<f64> {
    let (present, absent) = sensor.likelihoods(z);
    let numerator = present * prior;
    let denominator = numerator + absent * (1.0 - prior);
    if denominator == 0.0 {
        return Err(SimError::Degenerate(format!(
            "observation z = {} has zero probability under prior {prior}",
            z as u8
        )));
    }
    Ok(numerator / denominator)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Belief(pub Vec<f64>);

impl Belief {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(b) = values.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(SimError::InvalidArgument(format!(
                "belief {b} is outside [0, 1]"
            )));
        }
        Ok(Belief(values))
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Belief::new(vec![value; n])
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Targets never move, so the motion step leaves every belief unchanged.
    pub fn predict(&self) -> Belief {
        self.clone()
    }

    /// Updates the entry of the observed vertex only.
    pub fn update(&mut self, v: usize, z: bool, sensor: &SensorModel) -> Result<()> {
        if v >= self.0.len() {
            return Err(SimError::InvalidArgument(format!(
                "vertex {v} out of range for {} beliefs",
                self.0.len()
            )));
        }
        self.0[v] = bayes_update(self.0[v], z, sensor)?;
        Ok(())
    }
}

/// Which vertices really hold a target. Only used to sample observations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroundTruth(pub Vec<bool>);

impl GroundTruth {
    pub fn with_targets(n: usize, targets: &[usize]) -> Result<Self> {
        let mut present = vec![false; n];
        for &t in targets {
            *present.get_mut(t).ok_or_else(|| {
                SimError::InvalidArgument(format!("target {t} out of range for {n} vertices"))
            })? = true;
        }
        Ok(GroundTruth(present))
    }

    /// `count` distinct target vertices drawn from `seed`.
    pub fn sample(n: usize, count: usize, seed: Seed) -> Result<Self> {
        if count > n {
            return Err(SimError::InvalidArgument(format!(
                "{count} targets requested on {n} vertices"
            )));
        }
        let mut rng = seed.rng();
        let mut picked = sample(&mut rng, n, count).into_vec();
        picked.sort_unstable();
        GroundTruth::with_targets(n, &picked)
    }

    pub fn is_present(&self, v: usize) -> bool {
        self.0[v]
    }
}

/// Counter-based observation noise: the draw for step `k` depends only on
/// the mission seed and `k`.
#[derive(Debug, Clone, Copy)]
pub struct ObservationStream {
    seed: Seed,
}

impl ObservationStream {
    pub fn new(seed: Seed) -> Self {
        ObservationStream { seed }
    }

    pub fn uniform(&self, step: u64) -> f64 {
        crate::counter_uniform(self.seed, step)
    }

    pub fn observe(&self, truth: &GroundTruth, v: usize, sensor: &SensorModel, step: u64) -> bool {
        let rate = if truth.is_present(v) {
            sensor.alpha1
        } else {
            sensor.alpha2
        };
        self.uniform(step) < rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Present,
    Absent,
    Unresolved,
}

impl Classification {
    pub fn code(self) -> char {
        match self {
            Classification::Present => 'P',
            Classification::Absent => 'A',
            Classification::Unresolved => '?',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionConfig {
    pub p_high: f64,
    pub p_low: f64,
    pub planner: PlannerKind,
    #[serde(skip)]
    pub planner_config: PlannerConfig,
    pub seed: u64,
    pub max_steps: usize,
}

impl MissionConfig {
    pub fn new(planner: PlannerKind, seed: u64) -> Self {
        MissionConfig {
            p_high: 0.98,
            p_low: 0.15,
            planner,
            planner_config: PlannerConfig::default(),
            seed,
            max_steps: 10_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0 < self.p_low && self.p_low < self.p_high && self.p_high < 1.0) {
            return Err(SimError::InvalidArgument(format!(
                "thresholds must satisfy 0 < p_low < p_high < 1, got {} and {}",
                self.p_low, self.p_high
            )));
        }
        Ok(())
    }
}

/// One arrival-and-observation event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionStep {
    pub step: u64,
    pub vertex: usize,
    pub travel: f64,
    /// Accumulated travel cost, the mission's time proxy.
    pub duration: f64,
    pub observation: bool,
    pub belief: f64,
    pub retired: Option<Classification>,
    pub survivors: usize,
    /// Planned visiting order (original vertex ids) that selected this vertex.
    pub plan: Vec<usize>,
    pub beliefs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionSummary {
    pub planner: PlannerKind,
    pub seed: u64,
    pub duration: f64,
    pub steps: usize,
    /// One character per vertex: `P` present, `A` absent, `?` unresolved.
    pub classification: String,
    pub misclassified: usize,
    pub unresolved: usize,
    pub complete: bool,
    pub planner_fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionLog {
    pub steps: Vec<MissionStep>,
    pub classification: Vec<Classification>,
    pub summary: MissionSummary,
}

impl MissionLog {
    /// One JSON object per step.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for s in &self.steps {
            serde_json::to_writer(&mut out, s)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Runs one mission. The instance's start vertex is observed on arrival at
/// step 0; its probabilities are the initial beliefs.
pub fn run_mission(
    inst: &Instance,
    truth: &GroundTruth,
    sensor: &SensorModel,
    cfg: &MissionConfig,
) -> Result<MissionLog> {
    cfg.validate()?;
    let n = inst.n();
    if truth.0.len() != n {
        return Err(SimError::InvalidArgument(format!(
            "ground truth covers {} vertices, instance has {n}",
            truth.0.len()
        )));
    }
    let stream = ObservationStream::new(Seed(cfg.seed));
    let mut belief = Belief::new(inst.probs().to_vec())?;
    let mut class = vec![Classification::Unresolved; n];
    let mut alive = vec![true; n];
    let mut steps = Vec::new();
    let mut current = inst.start();
    let mut duration = 0.0;
    let mut fallbacks = 0;
    let mut travel = 0.0;
    let mut planned = vec![current];

    let mut step = 0u64;
    let complete = loop {
        // arrive at `current`, observe once
        let z = stream.observe(truth, current, sensor, step);
        belief = belief.predict();
        belief.update(current, z, sensor)?;
        let b = belief.get(current);
        let retired = if b > cfg.p_high {
            Some(Classification::Present)
        } else if b < cfg.p_low {
            Some(Classification::Absent)
        } else {
            None
        };
        if let Some(c) = retired {
            class[current] = c;
            alive[current] = false;
        }
        let survivors = alive.iter().filter(|&&a| a).count();
        steps.push(MissionStep {
            step,
            vertex: current,
            travel,
            duration,
            observation: z,
            belief: b,
            retired,
            survivors,
            plan: std::mem::take(&mut planned),
            beliefs: belief.0.clone(),
        });

        // planning graph: the robot's location plus every unresolved vertex
        let mut vertices = vec![current];
        vertices.extend((0..n).filter(|&v| alive[v] && v != current));
        if vertices.len() <= 1 {
            break true;
        }
        if steps.len() >= cfg.max_steps {
            break false;
        }
        let probs: Vec<f64> = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if i == 0 {
                    0.0
                } else {
                    belief.get(v).clamp(0.0, MAX_PLANNING_PROBABILITY)
                }
            })
            .collect();
        let sub = inst.induced(&vertices, probs)?;
        let p = plan(cfg.planner, &sub, &cfg.planner_config)?;
        fallbacks += p.fallback as usize;
        planned = p.order.iter().map(|&i| vertices[i]).collect();
        let next = planned[1];
        travel = inst.cost(current, next);
        duration += travel;
        current = next;
        step += 1;
    };

    let misclassified = class
        .iter()
        .zip(&truth.0)
        .filter(|(c, &t)| {
            matches!(
                (c, t),
                (Classification::Present, false) | (Classification::Absent, true)
            )
        })
        .count();
    let unresolved = class
        .iter()
        .filter(|c| **c == Classification::Unresolved)
        .count();
    let summary = MissionSummary {
        planner: cfg.planner,
        seed: cfg.seed,
        duration,
        steps: steps.len(),
        classification: class.iter().map(|c| c.code()).collect(),
        misclassified,
        unresolved,
        complete,
        planner_fallbacks: fallbacks,
    };
    Ok(MissionLog {
        steps,
        classification: class,
        summary,
    })
}

/// Side length of the square the scenario generator scatters vertices over.
pub const SCENARIO_EXTENT: f64 = 80.0;

/// A seeded lifelong scenario: `n` locations in an 80 m square, initial
/// beliefs uniform in `[0, 0.9]`, and `targets` of them holding a target.
pub fn lifelong_scenario(n: usize, targets: usize, seed: Seed) -> Result<(Instance, GroundTruth)> {
    let inst = generate_random(n, SCENARIO_EXTENT, 5.0, 0.9, seed)?;
    let inst = assign_probabilities(&inst, seed, 0.9)?.with_name(format!("lifelong{n}_s{}", seed.0));
    let truth = GroundTruth::sample(n, targets, seed.derive(2))?;
    Ok((inst, truth))
}
