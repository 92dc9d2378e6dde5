//! Target search in an initially unknown 2D environment.
//!
//! The robot maintains an occupancy grid revealed by a range sensor. Free
//! cells bordering unknown space (frontiers) are scored by how much unknown
//! space surrounds them, how much of it is visible, and a prior over target
//! locations; scored frontiers are clustered into goals, the goals become a
//! graph with probabilistic terminals, and the planner's first goal is
//! pursued until the picture changes enough to replan.

mod cluster;
mod explore;
mod graph;
mod sensing;
mod world;

use serde::Serialize;

pub use cluster::{cluster_goals, mean_shift_point, ClusterConfig, Goal};
pub use explore::{
    run_exploration, ExplorationConfig, ExplorationLog, ExplorationStep, ExplorationSummary,
    Outcome,
};
pub use graph::{bfs_distances, build_search_graph, shortest_path, SearchGraph};
pub use sensing::{
    assign_probability, cast_reveal, combine, phi_geometric, phi_object, phi_unknown, Gaussian,
    PriorField, ProbabilityConfig, Weights, MAX_FRONTIER_PROBABILITY,
};
pub use world::{
    forest_world, load_world, load_world_config, parse_world, scenario_prior, write_world,
    ForestConfig, GaussianSpec, PriorCondition, WorldConfig, WorldModel, SCENARIO_PRIOR_SIGMA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cell {
    Unknown,
    Free,
    Occupied,
}

/// Integer cell coordinates: `x` is the column, `y` the row (row 0 first in files).
pub type CellPos = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<Cell>,
}

impl OccupancyGrid {
    pub fn unknown(width: usize, height: usize, resolution: f64) -> Self {
        OccupancyGrid::filled(width, height, resolution, Cell::Unknown)
    }

    pub fn filled(width: usize, height: usize, resolution: f64, cell: Cell) -> Self {
        assert!(resolution > 0.0, "resolution must be positive");
        OccupancyGrid {
            width,
            height,
            resolution,
            cells: vec![cell; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Metres per cell side.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn index(&self, (x, y): CellPos) -> usize {
        y * self.width + x
    }

    pub fn pos(&self, index: usize) -> CellPos {
        (index % self.width, index / self.width)
    }

    pub fn get(&self, (x, y): CellPos) -> Cell {
        self.cells[y * self.width + x]
    }

    /// Label at signed coordinates; anything outside the map reads as unknown.
    pub fn get_signed(&self, x: i64, y: i64) -> Cell {
        if self.in_bounds(x, y) {
            self.cells[y as usize * self.width + x as usize]
        } else {
            Cell::Unknown
        }
    }

    /// Overwrites a label. Used to build ground-truth maps.
    pub fn set(&mut self, p: CellPos, cell: Cell) {
        let i = self.index(p);
        self.cells[i] = cell;
    }

    /// Reveals a cell. Known cells keep their label; returns whether it changed.
    pub fn reveal(&mut self, p: CellPos, cell: Cell) -> bool {
        let i = self.index(p);
        if self.cells[i] == Cell::Unknown && cell != Cell::Unknown {
            self.cells[i] = cell;
            true
        } else {
            false
        }
    }

    pub fn known_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != Cell::Unknown).count()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// In-bounds 4-neighbours of a cell.
    pub fn neighbors4(&self, (x, y): CellPos) -> impl Iterator<Item = CellPos> + '_ {
        const STEPS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        STEPS.iter().filter_map(move |&(dx, dy)| {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            self.in_bounds(nx, ny).then_some((nx as usize, ny as usize))
        })
    }

    /// Free cells with at least one unknown in-bounds 4-neighbour, in row-major order.
    pub fn frontiers(&self) -> Vec<CellPos> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get((x, y)) == Cell::Free
                    && self
                        .neighbors4((x, y))
                        .any(|n| self.get(n) == Cell::Unknown)
                {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Centre of a cell in metres.
    pub fn center(&self, (x, y): CellPos) -> [f64; 2] {
        [
            (x as f64 + 0.5) * self.resolution,
            (y as f64 + 0.5) * self.resolution,
        ]
    }
}

/// Free cells bordering unknown space; see [`OccupancyGrid::frontiers`].
pub fn extract_frontiers(grid: &OccupancyGrid) -> Vec<CellPos> {
    grid.frontiers()
}
