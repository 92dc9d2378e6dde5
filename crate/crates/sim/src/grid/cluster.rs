use serde::{Deserialize, Serialize};

use super::{Cell, CellPos, OccupancyGrid};
use crate::error::{Result, SimError};

/// Mean-shift parameters, all in cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusterConfig {
    pub bandwidth: f64,
    /// Iteration stops once a step moves less than this.
    pub convergence: f64,
    /// Converged centres closer than this are merged.
    pub merge_distance: f64,
    pub max_iterations: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            bandwidth: 8.0,
            convergence: 0.1,
            merge_distance: 4.0,
            max_iterations: 100,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.bandwidth, self.convergence, self.merge_distance]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
            && self.max_iterations > 0;
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidArgument(format!(
                "cluster parameters must be positive: {self:?}"
            )))
        }
    }
}

/// A clustered search goal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Goal {
    /// Free cell nearest to the merged centre.
    pub cell: CellPos,
    /// Merged mean-shift centre, in cell coordinates.
    pub center: [f64; 2],
    /// Largest probability among member frontiers.
    pub probability: f64,
    pub members: usize,
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Runs the weighted mean shift from `start` until a step is shorter than
/// the convergence threshold. Returns the centre and the iteration count.
/// A point whose kernel weights all vanish stays where it is.
pub fn mean_shift_point(
    start: [f64; 2],
    points: &[[f64; 2]],
    weights: &[f64],
    cfg: &ClusterConfig,
) -> ([f64; 2], usize) {
    let inv = 1.0 / (2.0 * cfg.bandwidth * cfg.bandwidth);
    let mut c = start;
    for it in 1..=cfg.max_iterations {
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for (p, &w) in points.iter().zip(weights) {
            let k = w * (-dist2(c, *p) * inv).exp();
            sx += k * p[0];
            sy += k * p[1];
            sw += k;
        }
        if sw == 0.0 {
            return (c, it);
        }
        let next = [sx / sw, sy / sw];
        let moved = dist2(next, c).sqrt();
        c = next;
        if moved < cfg.convergence {
            return (c, it);
        }
    }
    (c, cfg.max_iterations)
}

fn nearest_free(grid: &OccupancyGrid, c: [f64; 2]) -> Option<CellPos> {
    let mut best: Option<(f64, CellPos)> = None;
    for y in 0..grid.height() {
        for x in 0..grid.width() {
            if grid.get((x, y)) != Cell::Free {
                continue;
            }
            let d = dist2(c, [x as f64, y as f64]);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, (x, y)));
            }
        }
    }
    best.map(|(_, p)| p)
}

/// Groups scored frontiers into goals.
///
/// Every frontier runs its own mean shift (with uniform weights when every
/// probability is zero); converged centres within the merge distance of an
/// existing cluster's mean join it. Each cluster is snapped to the nearest
/// known free cell, clusters landing on the same cell are fused, and a goal
/// on the robot's own cell is dropped.
pub fn cluster_goals(
    grid: &OccupancyGrid,
    frontiers: &[CellPos],
    probs: &[f64],
    robot: Option<CellPos>,
    cfg: &ClusterConfig,
) -> Result<Vec<Goal>> {
    cfg.validate()?;
    if frontiers.len() != probs.len() {
        return Err(SimError::InvalidArgument(format!(
            "{} frontiers but {} probabilities",
            frontiers.len(),
            probs.len()
        )));
    }
    let points: Vec<[f64; 2]> = frontiers.iter().map(|&(x, y)| [x as f64, y as f64]).collect();
    let weights: Vec<f64> = if probs.iter().all(|&p| p == 0.0) {
        vec![1.0; probs.len()]
    } else {
        probs.to_vec()
    };

    struct Cluster {
        sum: [f64; 2],
        count: usize,
        pmax: f64,
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let (c, _) = mean_shift_point(p, &points, &weights, cfg);
        let join = clusters.iter_mut().find(|k| {
            let mean = [k.sum[0] / k.count as f64, k.sum[1] / k.count as f64];
            dist2(mean, c).sqrt() <= cfg.merge_distance
        });
        match join {
            Some(k) => {
                k.sum[0] += c[0];
                k.sum[1] += c[1];
                k.count += 1;
                k.pmax = k.pmax.max(probs[i]);
            }
            None => clusters.push(Cluster {
                sum: c,
                count: 1,
                pmax: probs[i],
            }),
        }
    }

    let mut goals: Vec<Goal> = Vec::new();
    for k in clusters {
        let center = [k.sum[0] / k.count as f64, k.sum[1] / k.count as f64];
        let Some(cell) = nearest_free(grid, center) else {
            continue;
        };
        if Some(cell) == robot {
            continue;
        }
        match goals.iter_mut().find(|g| g.cell == cell) {
            Some(g) => {
                g.probability = g.probability.max(k.pmax);
                g.members += k.count;
            }
            None => goals.push(Goal {
                cell,
                center,
                probability: k.pmax,
                members: k.count,
            }),
        }
    }
    Ok(goals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(w: usize, h: usize) -> OccupancyGrid {
        OccupancyGrid::filled(w, h, 1.0, Cell::Free)
    }

    #[test]
    fn single_frontier() {
        let g = free(10, 10);
        let goals = cluster_goals(&g, &[(3, 4)], &[0.4], None, &ClusterConfig::default()).unwrap();
        assert_eq!(goals.len(), 1);
        assert_eq!(goals[0].cell, (3, 4));
        assert!((goals[0].center[0] - 3.0).abs() < 1e-12 && (goals[0].center[1] - 4.0).abs() < 1e-12);
        assert_eq!(goals[0].probability, 0.4);
    }

    #[test]
    fn empty_input() {
        let g = free(4, 4);
        assert!(cluster_goals(&g, &[], &[], None, &ClusterConfig::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn equal_pair_merges_at_midpoint() {
        let g = free(20, 20);
        let goals =
            cluster_goals(&g, &[(4, 10), (8, 10)], &[0.5, 0.5], None, &ClusterConfig::default())
                .unwrap();
        assert_eq!(goals.len(), 1);
        assert!((goals[0].center[0] - 6.0).abs() < 0.2);
        assert_eq!(goals[0].cell, (6, 10));
        assert_eq!(goals[0].members, 2);
    }

    #[test]
    fn heavier_point_pulls_the_centre() {
        let pts = [[0.0, 0.0], [2.0, 0.0]];
        let w = [0.9, 0.1];
        let cfg = ClusterConfig {
            convergence: 1e-12,
            ..ClusterConfig::default()
        };
        let (c, it) = mean_shift_point(pts[0], &pts, &w, &cfg);
        assert!(it < cfg.max_iterations);
        // fixed point of c = 2 k1 / (k0 + k1), k_i being the weighted kernels
        let mut x: f64 = 0.0;
        for _ in 0..10_000 {
            let k0 = 0.9 * (-(x * x) / 128.0).exp();
            let k1 = 0.1 * (-((x - 2.0) * (x - 2.0)) / 128.0).exp();
            x = 2.0 * k1 / (k0 + k1);
        }
        assert!((c[0] - x).abs() < 1e-9);
        assert!(c[0] < 1.0 && c[0] > 0.0);
    }

    #[test]
    fn all_zero_probabilities_fall_back_to_uniform() {
        let g = free(20, 20);
        let goals =
            cluster_goals(&g, &[(4, 10), (8, 10)], &[0.0, 0.0], None, &ClusterConfig::default())
                .unwrap();
        assert_eq!(goals.len(), 1);
        assert_eq!(goals[0].cell, (6, 10));
        assert_eq!(goals[0].probability, 0.0);
    }

    #[test]
    fn distant_groups_stay_apart_and_robot_goal_is_dropped() {
        let g = free(80, 10);
        let cfg = ClusterConfig::default();
        let f = [(2, 5), (3, 5), (70, 5), (71, 5)];
        let p = [0.3, 0.3, 0.6, 0.2];
        let goals = cluster_goals(&g, &f, &p, None, &cfg).unwrap();
        assert_eq!(goals.len(), 2);
        assert_eq!(goals[1].probability, 0.6);
        let without = cluster_goals(&g, &f, &p, Some(goals[0].cell), &cfg).unwrap();
        assert_eq!(without.len(), 1);
    }

    #[test]
    fn snapping_avoids_obstacles() {
        let mut g = free(11, 11);
        g.set((5, 5), Cell::Occupied);
        let goals =
            cluster_goals(&g, &[(4, 5), (6, 5)], &[0.5, 0.5], None, &ClusterConfig::default())
                .unwrap();
        assert_eq!(goals.len(), 1);
        assert_ne!(goals[0].cell, (5, 5));
        assert_eq!(g.get(goals[0].cell), Cell::Free);
    }
}
