//! Nearest-frontier baseline: greedy selection over the seen/unseen boundary
//! with BFS shortest-path motion. Exists for relative comparison against the
//! gap strategy only; the robot is treated as a point moving cell to cell.

use std::collections::VecDeque;

use crate::grid::{Cell, CellState, CoverageLedger, OccupancyGrid};

/// A frontier cell: free, not yet seen, and 4-adjacent to a seen free cell.
pub fn is_frontier(grid: &OccupancyGrid, ledger: &CoverageLedger, cell: Cell) -> bool {
    if grid.get(cell) != CellState::Free || ledger.is_seen(grid.index(cell)) {
        return false;
    }
    neighbors(grid, cell).into_iter().flatten().any(|n| {
        grid.get(n) == CellState::Free && ledger.is_seen(grid.index(n))
    })
}

fn neighbors(grid: &OccupancyGrid, c: Cell) -> [Option<Cell>; 4] {
    [
        (c.x + 1 < grid.width()).then(|| Cell::new(c.x + 1, c.y)),
        (c.x > 0).then(|| Cell::new(c.x - 1, c.y)),
        (c.y + 1 < grid.height()).then(|| Cell::new(c.x, c.y + 1)),
        (c.y > 0).then(|| Cell::new(c.x, c.y - 1)),
    ]
}

/// BFS over free cells from `from` to the nearest frontier cell. Returns the
/// cell path including both endpoints, or `None` when no frontier remains
/// reachable. Deterministic: fixed neighbor order, FIFO expansion.
pub fn nearest_frontier_path(
    grid: &OccupancyGrid,
    ledger: &CoverageLedger,
    from: Cell,
) -> Option<Vec<Cell>> {
    let w = grid.width();
    let mut parent: Vec<u32> = vec![u32::MAX; grid.cell_count()];
    let mut queue = VecDeque::new();
    let from_idx = grid.index(from);
    parent[from_idx] = from_idx as u32;
    queue.push_back(from);

    let mut goal: Option<Cell> = None;
    'search: while let Some(c) = queue.pop_front() {
        if is_frontier(grid, ledger, c) {
            goal = Some(c);
            break 'search;
        }
        for n in neighbors(grid, c).into_iter().flatten() {
            let idx = grid.index(n);
            if parent[idx] == u32::MAX && grid.get(n) == CellState::Free {
                parent[idx] = grid.index(c) as u32;
                queue.push_back(n);
            }
        }
    }

    let goal = goal?;
    let mut path = vec![goal];
    let mut idx = grid.index(goal);
    while parent[idx] as usize != idx {
        idx = parent[idx] as usize;
        path.push(Cell::new(idx % w, idx / w));
    }
    path.reverse();
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_nearest_unseen_cell() {
        let grid = OccupancyGrid::filled(10, 10, 1.0, CellState::Free);
        let mut ledger = CoverageLedger::new(grid.cell_count());
        // seen: the 3x3 block around (1,1)
        for cy in 0..3 {
            for cx in 0..3 {
                ledger.mark(grid.index(Cell::new(cx, cy)));
            }
        }
        let path = nearest_frontier_path(&grid, &ledger, Cell::new(1, 1)).unwrap();
        assert_eq!(path.first(), Some(&Cell::new(1, 1)));
        let goal = *path.last().unwrap();
        assert!(is_frontier(&grid, &ledger, goal));
        assert_eq!(path.len(), 3); // two steps from (1,1) out of the seen block
    }

    #[test]
    fn none_when_everything_seen() {
        let grid = OccupancyGrid::filled(4, 4, 1.0, CellState::Free);
        let mut ledger = CoverageLedger::new(grid.cell_count());
        for idx in 0..grid.cell_count() {
            ledger.mark(idx);
        }
        assert!(nearest_frontier_path(&grid, &ledger, Cell::new(0, 0)).is_none());
    }

    #[test]
    fn walls_are_not_frontiers_and_block_paths() {
        let mut grid = OccupancyGrid::filled(5, 5, 1.0, CellState::Free);
        for cy in 0..5 {
            grid.set(Cell::new(2, cy), CellState::Occupied);
        }
        let mut ledger = CoverageLedger::new(grid.cell_count());
        for cy in 0..5 {
            for cx in 0..2 {
                ledger.mark(grid.index(Cell::new(cx, cy)));
            }
        }
        // left half fully seen, right half unseen but unreachable
        assert!(nearest_frontier_path(&grid, &ledger, Cell::new(0, 0)).is_none());
    }
}
