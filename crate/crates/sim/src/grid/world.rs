use std::path::Path;

use hpppt_core::Seed;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cluster::ClusterConfig;
use super::graph::bfs_distances;
use super::sensing::{Gaussian, PriorField, ProbabilityConfig, Weights};
use super::{Cell, CellPos, OccupancyGrid};
use crate::error::{Result, SimError};

/// A prior component as written in a sidecar file: either a full
/// covariance or an isotropic standard deviation, in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cov: Option<[[f64; 2]; 2]>,
}

impl GaussianSpec {
    pub fn build(&self) -> Result<Gaussian> {
        match (self.sigma, self.cov) {
            (Some(s), None) => Gaussian::isotropic(self.mean, s),
            (None, Some(c)) => Gaussian::new(self.mean, c),
            _ => Err(SimError::InvalidArgument(
                "a prior component needs exactly one of `sigma` or `cov`".into(),
            )),
        }
    }
}

/// Sidecar settings that accompany a world map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    /// Metres per cell.
    pub resolution: f64,
    /// Range of the mapping sensor, metres.
    pub sensor_radius: f64,
    /// The search succeeds once the robot is closer than this to the target, metres.
    pub success_radius: f64,
    /// Initial heading, radians.
    pub heading: f64,
    pub prior: Vec<GaussianSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Weights>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster: Option<ClusterConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<ProbabilityConfig>,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            resolution: 1.0,
            sensor_radius: 10.0,
            success_radius: 5.0,
            heading: 0.0,
            prior: Vec::new(),
            weights: None,
            cluster: None,
            probability: None,
        }
    }
}

impl WorldConfig {
    pub fn prior_field(&self) -> Result<PriorField> {
        Ok(PriorField {
            gaussians: self
                .prior
                .iter()
                .map(GaussianSpec::build)
                .collect::<Result<_>>()?,
        })
    }
}

/// Ground truth for an exploration run.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldModel {
    /// Fully labelled map (free or occupied only).
    pub truth: OccupancyGrid,
    /// `None` for a map without a target, which ends in exhaustion.
    pub target: Option<CellPos>,
    pub robot: CellPos,
    pub config: WorldConfig,
}

fn world_err(line: usize, message: impl Into<String>) -> SimError {
    SimError::World {
        line,
        message: message.into(),
    }
}

/// Parses a character map: `.` free, `#` occupied, `T` target, `R` robot.
/// Blank lines and lines starting with `;` are skipped.
pub fn parse_world(text: &str, config: WorldConfig) -> Result<WorldModel> {
    let mut rows: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        rows.push((i + 1, line));
    }
    let Some(&(_, first)) = rows.first() else {
        return Err(world_err(1, "empty map"));
    };
    let width = first.chars().count();
    if !(config.resolution > 0.0 && config.resolution.is_finite()) {
        return Err(SimError::InvalidArgument(format!(
            "resolution {} must be positive",
            config.resolution
        )));
    }
    let mut truth = OccupancyGrid::filled(width, rows.len(), config.resolution, Cell::Free);
    let mut target = None;
    let mut robot = None;
    for (y, &(line_no, row)) in rows.iter().enumerate() {
        if row.chars().count() != width {
            return Err(world_err(
                line_no,
                format!("row has {} cells, expected {width}", row.chars().count()),
            ));
        }
        for (x, ch) in row.chars().enumerate() {
            match ch {
                '.' => {}
                '#' => truth.set((x, y), Cell::Occupied),
                'T' | 'R' => {
                    let slot = if ch == 'T' { &mut target } else { &mut robot };
                    if slot.replace((x, y)).is_some() {
                        return Err(world_err(line_no, format!("second `{ch}` marker")));
                    }
                }
                other => return Err(world_err(line_no, format!("unexpected character `{other}`"))),
            }
        }
    }
    let robot = robot.ok_or_else(|| world_err(rows.len(), "no robot `R` marker"))?;
    Ok(WorldModel {
        truth,
        target,
        robot,
        config,
    })
}

pub fn write_world(world: &WorldModel) -> String {
    let g = &world.truth;
    let mut out = String::with_capacity((g.width() + 1) * g.height());
    for y in 0..g.height() {
        for x in 0..g.width() {
            let ch = if (x, y) == world.robot {
                'R'
            } else if Some((x, y)) == world.target {
                'T'
            } else if g.get((x, y)) == Cell::Occupied {
                '#'
            } else {
                '.'
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

/// Reads a map and its sidecar (`<map>.toml`, optional).
pub fn load_world(path: &Path) -> Result<WorldModel> {
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let sidecar = path.with_extension("toml");
    let config = if sidecar.exists() {
        load_world_config(&sidecar)?
    } else {
        WorldConfig::default()
    };
    parse_world(&text, config)
}

pub fn load_world_config(path: &Path) -> Result<WorldConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| SimError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Parameters of the synthetic forest generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub width: usize,
    pub height: usize,
    /// Expected number of trees per cell.
    pub density: f64,
    /// Trunk radius range, in cells.
    pub min_radius: f64,
    pub max_radius: f64,
    pub robot: CellPos,
    /// Smallest robot-to-target distance, in cells.
    pub min_target_distance: f64,
    /// Trees are kept this far (cells) from the robot and the target.
    pub clearance: f64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            width: 100,
            height: 100,
            density: 0.008,
            min_radius: 1.0,
            max_radius: 2.5,
            robot: (10, 50),
            min_target_distance: 60.0,
            clearance: 4.0,
        }
    }
}

/// Bound on placement retries before the generator gives up.
const MAX_FOREST_ATTEMPTS: usize = 100;

/// A seeded forest: round trunks scattered over open ground, a robot at the
/// configured cell and a target at least `min_target_distance` away that
/// the robot can reach.
pub fn forest_world(cfg: &ForestConfig, seed: Seed) -> Result<WorldModel> {
    let (w, h) = (cfg.width, cfg.height);
    if cfg.robot.0 >= w || cfg.robot.1 >= h {
        return Err(SimError::InvalidArgument(format!(
            "robot {:?} lies outside a {w}x{h} map",
            cfg.robot
        )));
    }
    let mut rng = seed.rng();
    for _ in 0..MAX_FOREST_ATTEMPTS {
        let target = loop {
            let t = (rng.random_range(0..w), rng.random_range(0..h));
            let d = ((t.0 as f64 - cfg.robot.0 as f64).powi(2)
                + (t.1 as f64 - cfg.robot.1 as f64).powi(2))
            .sqrt();
            if d >= cfg.min_target_distance {
                break t;
            }
        };
        let mut truth = OccupancyGrid::filled(w, h, 1.0, Cell::Free);
        let trees = (cfg.density * (w * h) as f64).round() as usize;
        for _ in 0..trees {
            let cx = rng.random_range(0.0..w as f64);
            let cy = rng.random_range(0.0..h as f64);
            let r = rng.random_range(cfg.min_radius..=cfg.max_radius);
            let keep_clear = [cfg.robot, target].iter().any(|&(x, y)| {
                ((x as f64 + 0.5 - cx).powi(2) + (y as f64 + 0.5 - cy).powi(2)).sqrt()
                    < r + cfg.clearance
            });
            if keep_clear {
                continue;
            }
            let (x0, x1) = (((cx - r).floor().max(0.0)) as usize, ((cx + r).ceil() as usize).min(w));
            let (y0, y1) = (((cy - r).floor().max(0.0)) as usize, ((cy + r).ceil() as usize).min(h));
            for y in y0..y1 {
                for x in x0..x1 {
                    if (x as f64 + 0.5 - cx).powi(2) + (y as f64 + 0.5 - cy).powi(2) <= r * r {
                        truth.set((x, y), Cell::Occupied);
                    }
                }
            }
        }
        if bfs_distances(&truth, cfg.robot)[truth.index(target)].is_some() {
            return Ok(WorldModel {
                truth,
                target: Some(target),
                robot: cfg.robot,
                config: WorldConfig::default(),
            });
        }
    }
    Err(SimError::InvalidArgument(format!(
        "no connected forest after {MAX_FOREST_ATTEMPTS} attempts"
    )))
}

/// Spread of the scripted prior components, metres.
pub const SCENARIO_PRIOR_SIGMA: f64 = 30.0;

/// What the planner is told about the target before an exploration run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorCondition {
    /// No prior at all.
    None,
    /// One component centred on the true target.
    Accurate,
    /// The accurate component plus a decoy at the target's mirror image
    /// through the robot, clamped to the map.
    Misleading,
}

impl PriorCondition {
    pub const ALL: [PriorCondition; 3] =
        [PriorCondition::None, PriorCondition::Accurate, PriorCondition::Misleading];

    pub fn name(self) -> &'static str {
        match self {
            PriorCondition::None => "none",
            PriorCondition::Accurate => "accurate",
            PriorCondition::Misleading => "misleading",
        }
    }
}

impl std::fmt::Display for PriorCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PriorCondition {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        PriorCondition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| SimError::InvalidArgument(format!("unknown prior condition `{s}`")))
    }
}

/// Builds the prior for a scripted condition. Worlds without a target only
/// support [`PriorCondition::None`].
pub fn scenario_prior(world: &WorldModel, condition: PriorCondition) -> Result<PriorField> {
    if condition == PriorCondition::None {
        return Ok(PriorField::default());
    }
    let target = world.target.ok_or_else(|| {
        SimError::InvalidArgument(format!("the {condition} prior needs a world with a target"))
    })?;
    let t = world.truth.center(target);
    let r = world.truth.center(world.robot);
    let mut gaussians = vec![Gaussian::isotropic(t, SCENARIO_PRIOR_SIGMA)?];
    if condition == PriorCondition::Misleading {
        let (w, h) = (
            world.truth.width() as f64 * world.config.resolution,
            world.truth.height() as f64 * world.config.resolution,
        );
        let decoy = [
            (2.0 * r[0] - t[0]).clamp(0.0, w),
            (2.0 * r[1] - t[1]).clamp(0.0, h),
        ];
        gaussians.push(Gaussian::isotropic(decoy, SCENARIO_PRIOR_SIGMA)?);
    }
    Ok(PriorField { gaussians })
}
