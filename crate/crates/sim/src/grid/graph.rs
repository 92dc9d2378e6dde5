use std::collections::VecDeque;

use hpppt_core::Instance;

use super::cluster::Goal;
use super::{Cell, CellPos, OccupancyGrid};
use crate::error::{Result, SimError};

/// 4-connected step counts from `from` through known free cells; `None`
/// marks cells that cannot be reached.
pub fn bfs_distances(grid: &OccupancyGrid, from: CellPos) -> Vec<Option<u32>> {
    let mut dist = vec![None; grid.width() * grid.height()];
    if grid.get(from) != Cell::Free {
        return dist;
    }
    let mut queue = VecDeque::new();
    dist[grid.index(from)] = Some(0);
    queue.push_back(from);
    while let Some(p) = queue.pop_front() {
        let d = dist[grid.index(p)].expect("queued cells have a distance");
        for n in grid.neighbors4(p) {
            let i = grid.index(n);
            if dist[i].is_none() && grid.get(n) == Cell::Free {
                dist[i] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Cells from `from` (exclusive) to `to` (inclusive) along a shortest
/// free-space route, or `None` if `to` is unreachable.
pub fn shortest_path(grid: &OccupancyGrid, from: CellPos, to: CellPos) -> Option<Vec<CellPos>> {
    // distances measured from the goal, so walking downhill from `from` reaches it
    let dist = bfs_distances(grid, to);
    let mut d = dist[grid.index(from)]?;
    let mut at = from;
    let mut path = Vec::with_capacity(d as usize);
    while d > 0 {
        at = grid
            .neighbors4(at)
            .find(|&n| dist[grid.index(n)] == Some(d - 1))
            .expect("a downhill neighbour exists on a shortest route");
        path.push(at);
        d -= 1;
    }
    Some(path)
}

/// A planning instance over the robot cell and the reachable goals.
#[derive(Debug, Clone)]
pub struct SearchGraph {
    /// Vertex 0 is the robot; vertex `i > 0` is `goals[i - 1]`.
    pub instance: Instance,
    pub cells: Vec<CellPos>,
    pub goals: Vec<Goal>,
    /// Goals without a free-space route from the robot.
    pub dropped: Vec<CellPos>,
}

/// Builds the complete graph whose edge costs are free-space route lengths
/// in metres. The robot vertex has probability zero.
pub fn build_search_graph(
    grid: &OccupancyGrid,
    goals: &[Goal],
    robot: CellPos,
) -> Result<SearchGraph> {
    if grid.get(robot) != Cell::Free {
        return Err(SimError::InvalidArgument(format!(
            "robot cell {robot:?} is not known free space"
        )));
    }
    let from_robot = bfs_distances(grid, robot);
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for g in goals {
        if g.cell != robot && from_robot[grid.index(g.cell)].is_some() {
            kept.push(g.clone());
        } else {
            dropped.push(g.cell);
        }
    }
    let mut cells = vec![robot];
    cells.extend(kept.iter().map(|g| g.cell));
    let n = cells.len();
    let mut cost = vec![vec![0.0; n]; n];
    for (i, &c) in cells.iter().enumerate() {
        let dist = if i == 0 {
            from_robot.clone()
        } else {
            bfs_distances(grid, c)
        };
        for (j, &d) in cells.iter().enumerate() {
            if i != j {
                let steps = dist[grid.index(d)].expect("goals share the robot's component");
                cost[i][j] = steps as f64 * grid.resolution();
            }
        }
    }
    let mut prob = vec![0.0];
    prob.extend(kept.iter().map(|g| g.probability));
    let instance = Instance::from_matrix("search-graph", cost, prob, 0)?;
    Ok(SearchGraph {
        instance,
        cells,
        goals: kept,
        dropped,
    })
}
