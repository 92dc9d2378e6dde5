use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use hpppt_core::baselines::{blind_hpp_solve, greedy_solve};
use hpppt_core::{solve, Instance, SolveError, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Which ordering rule drives a simulated robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlannerKind {
    #[serde(rename = "rpt")]
    Rpt,
    #[serde(rename = "greedy")]
    Greedy,
    #[serde(rename = "blind")]
    BlindHpp,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [PlannerKind::Rpt, PlannerKind::Greedy, PlannerKind::BlindHpp];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Rpt => "rpt",
            PlannerKind::Greedy => "greedy",
            PlannerKind::BlindHpp => "blind",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rpt" => Ok(PlannerKind::Rpt),
            "greedy" => Ok(PlannerKind::Greedy),
            "blind" | "blind-hpp" => Ok(PlannerKind::BlindHpp),
            other => Err(SimError::InvalidArgument(format!(
                "unknown planner `{other}` (expected rpt, greedy or blind)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    /// Graphs with more vertices than this are solved with the focal variant.
    pub exact_max_vertices: usize,
    pub focal_epsilon: f64,
    pub time_limit: Option<Duration>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            exact_max_vertices: 40,
            focal_epsilon: 0.01,
            time_limit: Some(Duration::from_secs(10)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub order: Vec<usize>,
    pub cost: f64,
    /// Set when the search timed out and the blind ordering was used instead.
    pub fallback: bool,
}

pub fn plan(kind: PlannerKind, inst: &Instance, cfg: &PlannerConfig) -> Result<Plan> {
    let result = match kind {
        PlannerKind::Greedy => greedy_solve(inst),
        PlannerKind::BlindHpp => blind_hpp_solve(inst),
        PlannerKind::Rpt => {
            let epsilon = if inst.n() > cfg.exact_max_vertices {
                cfg.focal_epsilon
            } else {
                0.0
            };
            let solver = SolverConfig::focal(epsilon).with_time_limit(cfg.time_limit);
            match solve(inst, &solver) {
                Ok(r) => r,
                Err(SolveError::Timeout { .. }) => {
                    let r = blind_hpp_solve(inst);
                    return Ok(Plan {
                        order: r.path.0,
                        cost: r.cost,
                        fallback: true,
                    });
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(Plan {
        order: result.path.0,
        cost: result.cost,
        fallback: false,
    })
}
