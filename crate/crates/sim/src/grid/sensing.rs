use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Cell, CellPos, OccupancyGrid};
use crate::error::{Result, SimError};

/// Ray marching increment, in cells.
const RAY_STEP: f64 = 0.5;

/// Upper clamp applied to frontier probabilities before planning.
pub const MAX_FRONTIER_PROBABILITY: f64 = 1.0 - 1e-9;

/// Marches a fan of rays from the centre of `origin`, revealing every cell
/// the rays pass through. A ray stops at the first occupied cell (which is
/// revealed), at the map border, or at `range` cells. `offset` rotates the
/// whole fan. Returns the number of newly revealed cells.
#[allow(clippy::too_many_arguments)]
pub fn cast_reveal(
    known: &mut OccupancyGrid,
    truth: &OccupancyGrid,
    origin: CellPos,
    heading: f64,
    fov: f64,
    rays: usize,
    range: f64,
    offset: f64,
) -> usize {
    let mut revealed = known.reveal(origin, truth.get(origin)) as usize;
    let (ox, oy) = (origin.0 as f64 + 0.5, origin.1 as f64 + 0.5);
    for i in 0..rays {
        let angle = heading - fov / 2.0 + (i as f64 + 0.5) * fov / rays as f64 + offset;
        let (dx, dy) = (angle.cos(), angle.sin());
        let mut t = RAY_STEP;
        while t <= range {
            let (x, y) = ((ox + t * dx).floor() as i64, (oy + t * dy).floor() as i64);
            if !truth.in_bounds(x, y) {
                break;
            }
            let p = (x as usize, y as usize);
            let label = truth.get(p);
            revealed += known.reveal(p, label) as usize;
            if label == Cell::Occupied {
                break;
            }
            t += RAY_STEP;
        }
    }
    revealed
}

/// Share of unknown cells in the `(2w+1)²` square around `cell`, clipped to the map.
pub fn phi_unknown(grid: &OccupancyGrid, cell: CellPos, window: usize) -> f64 {
    let x0 = cell.0.saturating_sub(window);
    let y0 = cell.1.saturating_sub(window);
    let x1 = (cell.0 + window).min(grid.width() - 1);
    let y1 = (cell.1 + window).min(grid.height() - 1);
    let mut unknown = 0usize;
    for y in y0..=y1 {
        for x in x0..=x1 {
            unknown += (grid.get((x, y)) == Cell::Unknown) as usize;
        }
    }
    unknown as f64 / ((x1 - x0 + 1) * (y1 - y0 + 1)) as f64
}

/// Fraction of a view cone centred on `heading` that reaches unknown space.
///
/// `rays` evenly spaced rays leave the centre of `cell`. A ray counts as
/// visible when it enters an unknown in-bounds cell before any occupied
/// cell, within `range` cells. Rays leaving the map count as not visible.
pub fn phi_geometric(
    grid: &OccupancyGrid,
    cell: CellPos,
    heading: f64,
    fov: f64,
    rays: usize,
    range: f64,
) -> f64 {
    if rays == 0 {
        return 0.0;
    }
    let (ox, oy) = (cell.0 as f64 + 0.5, cell.1 as f64 + 0.5);
    let mut visible = 0usize;
    for i in 0..rays {
        let angle = heading - fov / 2.0 + (i as f64 + 0.5) * fov / rays as f64;
        let (dx, dy) = (angle.cos(), angle.sin());
        let mut t = RAY_STEP;
        while t <= range {
            let (x, y) = ((ox + t * dx).floor() as i64, (oy + t * dy).floor() as i64);
            if !grid.in_bounds(x, y) {
                break;
            }
            match grid.get((x as usize, y as usize)) {
                Cell::Unknown => {
                    visible += 1;
                    break;
                }
                Cell::Occupied => break,
                Cell::Free => {}
            }
            t += RAY_STEP;
        }
    }
    visible as f64 / rays as f64
}

/// A bivariate Gaussian scaled so its peak is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gaussian {
    mean: [f64; 2],
    cov: [[f64; 2]; 2],
    inv: [[f64; 2]; 2],
}

impl Gaussian {
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = cov;
        let det = a * d - b * c;
        let scale = a.abs().max(d.abs()).max(1.0);
        if !(mean.iter().chain(cov.iter().flatten()).all(|v| v.is_finite())
            && (b - c).abs() <= 1e-12 * scale
            && a > 0.0
            && det > 0.0)
        {
            return Err(SimError::InvalidArgument(format!(
                "covariance {cov:?} is not symmetric positive definite"
            )));
        }
        Ok(Gaussian {
            mean,
            cov,
            inv: [[d / det, -b / det], [-c / det, a / det]],
        })
    }

    pub fn isotropic(mean: [f64; 2], sigma: f64) -> Result<Self> {
        Gaussian::new(mean, [[sigma * sigma, 0.0], [0.0, sigma * sigma]])
    }

    pub fn mean(&self) -> [f64; 2] {
        self.mean
    }

    pub fn covariance(&self) -> [[f64; 2]; 2] {
        self.cov
    }

    pub fn value(&self, p: [f64; 2]) -> f64 {
        let (dx, dy) = (p[0] - self.mean[0], p[1] - self.mean[1]);
        let m = dx * (self.inv[0][0] * dx + self.inv[0][1] * dy)
            + dy * (self.inv[1][0] * dx + self.inv[1][1] * dy);
        (-0.5 * m).exp()
    }
}

/// Prior belief about where the target is, as a mixture of Gaussians in metres.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PriorField {
    pub gaussians: Vec<Gaussian>,
}

/// Largest peak-normalised component value at `p` (metres); 0 for an empty prior.
pub fn phi_object(prior: &PriorField, p: [f64; 2]) -> f64 {
    prior
        .gaussians
        .iter()
        .map(|g| g.value(p))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub unknown: f64,
    pub geometric: f64,
    pub object: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            unknown: 0.3,
            geometric: 0.2,
            object: 0.5,
        }
    }
}

impl Weights {
    pub fn new(unknown: f64, geometric: f64, object: f64) -> Result<Self> {
        let w = Weights {
            unknown,
            geometric,
            object,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.unknown, self.geometric, self.object];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(SimError::InvalidArgument(format!(
                "weights {all:?} must be non-negative"
            )));
        }
        if all.iter().sum::<f64>() > 1.0 + 1e-12 {
            return Err(SimError::InvalidArgument(format!(
                "weights {all:?} sum above 1"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbabilityConfig {
    /// Half-width of the unknown-share window, in cells.
    pub window: usize,
    /// Opening angle of the visibility cone, in radians.
    pub fov: f64,
    pub rays: usize,
    /// Visibility range in cells.
    pub range: f64,
}

impl Default for ProbabilityConfig {
    fn default() -> Self {
        ProbabilityConfig {
            window: 5,
            fov: PI / 2.0,
            rays: 180,
            range: 10.0,
        }
    }
}

/// `w_u * u + w_g * g + w_o * o`, clamped to `[0, 1 - 1e-9]`.
pub fn combine(weights: &Weights, u: f64, g: f64, o: f64) -> f64 {
    (weights.unknown * u + weights.geometric * g + weights.object * o)
        .clamp(0.0, MAX_FRONTIER_PROBABILITY)
}

/// Weighted score of each frontier, clamped to `[0, 1 - 1e-9]`. The view
/// cone at a frontier points along the bearing from the robot to it.
pub fn assign_probability(
    grid: &OccupancyGrid,
    frontiers: &[CellPos],
    prior: &PriorField,
    weights: &Weights,
    cfg: &ProbabilityConfig,
    robot: CellPos,
    robot_heading: f64,
) -> Result<Vec<f64>> {
    weights.validate()?;
    Ok(frontiers
        .iter()
        .map(|&f| {
            let heading = if f == robot {
                robot_heading
            } else {
                (f.1 as f64 - robot.1 as f64).atan2(f.0 as f64 - robot.0 as f64)
            };
            let u = if weights.unknown > 0.0 {
                phi_unknown(grid, f, cfg.window)
            } else {
                0.0
            };
            let g = if weights.geometric > 0.0 {
                phi_geometric(grid, f, heading, cfg.fov, cfg.rays, cfg.range)
            } else {
                0.0
            };
            let o = if weights.object > 0.0 {
                phi_object(prior, grid.center(f))
            } else {
                0.0
            };
            combine(weights, u, g, o)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_share() {
        let known = OccupancyGrid::filled(9, 9, 1.0, Cell::Free);
        assert_eq!(phi_unknown(&known, (4, 4), 2), 0.0);

        let mut g = OccupancyGrid::filled(3, 3, 1.0, Cell::Free);
        for p in [(0, 0), (1, 0), (2, 0), (0, 1)] {
            g.set(p, Cell::Unknown);
        }
        assert!((phi_unknown(&g, (1, 1), 1) - 4.0 / 9.0).abs() < 1e-15);

        // clipped corner window: 2x2 cells, one known
        let mut u = OccupancyGrid::unknown(5, 5, 1.0);
        u.reveal((0, 0), Cell::Free);
        assert_eq!(phi_unknown(&u, (0, 0), 1), 0.75);
    }

    #[test]
    fn geometric_extremes() {
        let mut walled = OccupancyGrid::filled(5, 5, 1.0, Cell::Occupied);
        walled.set((2, 2), Cell::Free);
        assert_eq!(phi_geometric(&walled, (2, 2), 0.0, PI / 2.0, 180, 10.0), 0.0);

        let mut open = OccupancyGrid::unknown(41, 41, 1.0);
        open.reveal((20, 20), Cell::Free);
        assert_eq!(phi_geometric(&open, (20, 20), 1.0, PI / 2.0, 180, 10.0), 1.0);
    }

    #[test]
    fn half_blocked_cone() {
        // diagonal through the cell centre: occupied below it, unknown above
        let mut g = OccupancyGrid::unknown(41, 41, 1.0);
        for y in 0..41 {
            for x in 0..41 {
                if y > x {
                    g.set((x, y), Cell::Occupied);
                } else if y == x {
                    g.set((x, y), Cell::Free);
                }
            }
        }
        let k = 180;
        // the cone straddles the diagonal, so half of its rays meet the wall
        let phi = phi_geometric(&g, (20, 20), PI / 4.0, PI / 2.0, k, 10.0);
        assert!((phi - 0.5).abs() <= 1.0 / k as f64 + 1e-12, "phi = {phi}");
    }

    #[test]
    fn object_factor() {
        assert_eq!(phi_object(&PriorField::default(), [1.0, 2.0]), 0.0);
        let a = Gaussian::isotropic([0.0, 0.0], 3.0).unwrap();
        let b = Gaussian::isotropic([10.0, 0.0], 3.0).unwrap();
        let one = PriorField { gaussians: vec![a] };
        assert_eq!(phi_object(&one, [0.0, 0.0]), 1.0);
        let ab = PriorField {
            gaussians: vec![a, b],
        };
        let ba = PriorField {
            gaussians: vec![b, a],
        };
        let mid = [5.0, 0.0];
        assert_eq!(phi_object(&ab, mid), phi_object(&ba, mid));
        assert_eq!(phi_object(&ab, mid), a.value(mid));
        assert!((a.value(mid) - (-25.0f64 / 18.0).exp()).abs() < 1e-15);
        assert!(Gaussian::new([0.0; 2], [[1.0, 2.0], [2.0, 1.0]]).is_err());
        assert!(Gaussian::new([0.0; 2], [[1.0, 0.5], [0.0, 1.0]]).is_err());
        assert!(Gaussian::new([0.0; 2], [[-1.0, 0.0], [0.0, -1.0]]).is_err());
    }

    #[test]
    fn weighted_scores() {
        let mut g = OccupancyGrid::unknown(21, 21, 1.0);
        for x in 5..=15 {
            for y in 5..=15 {
                g.reveal((x, y), Cell::Free);
            }
        }
        let fr = g.frontiers();
        let prior = PriorField {
            gaussians: vec![Gaussian::isotropic([10.5, 5.5], 2.0).unwrap()],
        };
        let cfg = ProbabilityConfig::default();
        let only_u = assign_probability(&g, &fr, &prior, &Weights::new(1.0, 0.0, 0.0).unwrap(), &cfg, (10, 10), 0.0).unwrap();
        for (p, &f) in only_u.iter().zip(&fr) {
            assert_eq!(*p, phi_unknown(&g, f, cfg.window));
        }
        let zero = assign_probability(&g, &fr, &prior, &Weights::new(0.0, 0.0, 0.0).unwrap(), &cfg, (10, 10), 0.0).unwrap();
        assert!(zero.iter().all(|&p| p == 0.0));
        assert!(Weights::new(0.5, 0.4, 0.2).is_err());

        let w = Weights::new(0.3, 0.3, 0.4).unwrap();
        assert_eq!(combine(&w, 1.0, 1.0, 1.0), MAX_FRONTIER_PROBABILITY);
        assert_eq!(combine(&w, 0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn reveal_stops_at_obstacles() {
        let mut truth = OccupancyGrid::filled(11, 1, 1.0, Cell::Free);
        truth.set((6, 0), Cell::Occupied);
        let mut known = OccupancyGrid::unknown(11, 1, 1.0);
        cast_reveal(&mut known, &truth, (2, 0), 0.0, 2.0 * PI, 180, 20.0, 0.0);
        assert_eq!(known.get((6, 0)), Cell::Occupied);
        assert_eq!(known.get((7, 0)), Cell::Unknown);
        assert_eq!(known.get((0, 0)), Cell::Free);
    }
}
