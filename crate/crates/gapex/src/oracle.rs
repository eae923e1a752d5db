//! Independent reference implementations used to cross-check the fast paths.
//!
//! Everything here deliberately avoids the algorithms used by the
//! implementation it validates: ray marching instead of cell stepping,
//! whole-grid scans instead of windowed ones, label propagation instead of
//! BFS. These run in tests and in the `selfcheck` command.

use crate::grid::{Cell, CellState, MapError, OccupancyGrid};
use crate::lidar::Scan;
use crate::pose::{unit_vec_deg, Point};

/// Fixed-step ray marching: march from the origin in `step` increments and
/// report the first distance whose cell is non-free. Cells outside the grid
/// are transparent, matching the sensor model.
pub fn march_ray(
    grid: &OccupancyGrid,
    origin: Point,
    dir_deg: f64,
    max_range: f64,
    step: f64,
) -> f64 {
    debug_assert!(step > 0.0);
    let (dx, dy) = unit_vec_deg(dir_deg);
    let mut t = step;
    while t <= max_range {
        let p = Point::new(origin.x + t * dx, origin.y + t * dy);
        if let Some(cell) = grid.cell_at(p) {
            if grid.get(cell) != CellState::Free {
                return t;
            }
        }
        t += step;
    }
    f64::INFINITY
}

/// Per-bearing brute force gap labeling: classify every bearing safe/unsafe,
/// group runs by scanning left to right, then apply the width and clearance
/// filters. Returns `(lo, hi)` bearing pairs sorted by bearing.
pub fn gaps_by_degree(
    scan: &Scan,
    robot_radius: f64,
    step_distance: f64,
    obstacle_threshold: f64,
) -> Vec<(f64, f64)> {
    let n = scan.rays.len();
    let mut out = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..=n {
        let safe = i < n && scan.rays[i].range_m > obstacle_threshold;
        match (run_start, safe) {
            (None, true) => run_start = Some(i),
            (Some(s), false) => {
                let e = i - 1;
                run_start = None;
                if e == s {
                    continue;
                }
                let lo = scan.rays[s].bearing_deg;
                let hi = scan.rays[e].bearing_deg;
                let width = hi - lo;
                let chord = 2.0 * step_distance * (width / 2.0).to_radians().sin();
                let admits = chord >= 2.0 * robot_radius
                    || scan.rays[s].range_m.is_infinite()
                    || scan.rays[e].range_m.is_infinite();
                if admits {
                    out.push((lo, hi));
                }
            }
            _ => {}
        }
    }
    out
}

/// Whole-grid disc overlap scan: true when some cell intersecting the closed
/// disc is non-free or the disc leaves the map.
pub fn disc_blocked_exhaustive(grid: &OccupancyGrid, p: Point, r: f64) -> bool {
    if p.x - r < grid.origin().x
        || p.y - r < grid.origin().y
        || p.x + r > grid.extent_x()
        || p.y + r > grid.extent_y()
    {
        return true;
    }
    for cy in 0..grid.height() {
        for cx in 0..grid.width() {
            let cell = Cell::new(cx, cy);
            if grid.distance_to_cell(p, cell) <= r && grid.get(cell) != CellState::Free {
                return true;
            }
        }
    }
    false
}

/// Reachability by iterated label propagation (sweeps until fixpoint)
/// instead of a queue. Returns the reachable mask and its count.
pub fn reachable_by_sweeps(grid: &OccupancyGrid, start: Cell) -> (Vec<bool>, usize) {
    let w = grid.width();
    let h = grid.height();
    let mut mark = vec![false; w * h];
    if grid.get(start) != CellState::Free {
        return (mark, 0);
    }
    mark[start.y * w + start.x] = true;
    loop {
        let mut changed = false;
        for cy in 0..h {
            for cx in 0..w {
                let idx = cy * w + cx;
                if mark[idx] || grid.get(Cell::new(cx, cy)) != CellState::Free {
                    continue;
                }
                let neighbor_marked = (cx > 0 && mark[idx - 1])
                    || (cx + 1 < w && mark[idx + 1])
                    || (cy > 0 && mark[idx - w])
                    || (cy + 1 < h && mark[idx + w]);
                if neighbor_marked {
                    mark[idx] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let count = mark.iter().filter(|m| **m).count();
    (mark, count)
}

/// Exact ray/cell overlap by the slab method: the `(t_enter, t_exit)`
/// parameter interval along which the ray from `origin` in direction
/// `dir_deg` lies inside the cell's closed rectangle. `None` when the ray
/// misses the cell.
pub fn ray_cell_overlap(
    grid: &OccupancyGrid,
    origin: Point,
    dir_deg: f64,
    cell: Cell,
) -> Option<(f64, f64)> {
    let (dx, dy) = unit_vec_deg(dir_deg);
    let res = grid.resolution();
    let x0 = grid.origin().x + cell.x as f64 * res;
    let y0 = grid.origin().y + cell.y as f64 * res;
    let axis = |o: f64, d: f64, lo: f64, hi: f64| -> Option<(f64, f64)> {
        if d == 0.0 {
            if o >= lo && o <= hi {
                Some((f64::NEG_INFINITY, f64::INFINITY))
            } else {
                None
            }
        } else {
            let (a, b) = ((lo - o) / d, (hi - o) / d);
            Some(if a <= b { (a, b) } else { (b, a) })
        }
    };
    let (tx0, tx1) = axis(origin.x, dx, x0, x0 + res)?;
    let (ty0, ty1) = axis(origin.y, dy, y0, y0 + res)?;
    let enter = tx0.max(ty0);
    let exit = tx1.min(ty1);
    (enter <= exit && exit >= 0.0).then_some((enter.max(0.0), exit))
}

/// Whether a reported hit at `hit_dist` is a thin corner clip that a
/// fixed-step marcher is allowed to tunnel through: some non-free cell
/// incident to the hit point overlaps the ray starting at `hit_dist` for
/// less than `max_gap` of path length.
pub fn corner_clip_explains(
    grid: &OccupancyGrid,
    origin: Point,
    dir_deg: f64,
    hit_dist: f64,
    max_gap: f64,
) -> bool {
    let (dx, dy) = unit_vec_deg(dir_deg);
    let p = Point::new(origin.x + hit_dist * dx, origin.y + hit_dist * dy);
    let res = grid.resolution();
    // the hit point sits on a cell boundary; examine all incident cells
    let cx = ((p.x - grid.origin().x) / res).round() as i64;
    let cy = ((p.y - grid.origin().y) / res).round() as i64;
    for gx in [cx - 1, cx] {
        for gy in [cy - 1, cy] {
            if gx < 0 || gy < 0 || gx >= grid.width() as i64 || gy >= grid.height() as i64 {
                continue;
            }
            let cell = Cell::new(gx as usize, gy as usize);
            if grid.get(cell) == CellState::Free {
                continue;
            }
            if let Some((enter, exit)) = ray_cell_overlap(grid, origin, dir_deg, cell) {
                if (enter - hit_dist).abs() <= 1e-6 && exit - enter < max_gap {
                    return true;
                }
            }
        }
    }
    false
}

/// Distance from a point to the nearest occupied cell within `cap`, by
/// scanning every cell whose rectangle could lie that close. `None` means no
/// occupied cell is within `cap`.
pub fn min_distance_to_occupied_within(grid: &OccupancyGrid, p: Point, cap: f64) -> Option<f64> {
    let res = grid.resolution();
    let cx0 = (((p.x - cap - grid.origin().x) / res).floor().max(0.0)) as usize;
    let cy0 = (((p.y - cap - grid.origin().y) / res).floor().max(0.0)) as usize;
    let cx1 = ((((p.x + cap - grid.origin().x) / res).floor()).max(0.0) as usize)
        .min(grid.width().saturating_sub(1));
    let cy1 = ((((p.y + cap - grid.origin().y) / res).floor()).max(0.0) as usize)
        .min(grid.height().saturating_sub(1));
    let mut best: Option<f64> = None;
    for cy in cy0..=cy1 {
        for cx in cx0..=cx1 {
            let cell = Cell::new(cx, cy);
            if grid.get(cell) == CellState::Occupied {
                let d = grid.distance_to_cell(p, cell);
                if d <= cap && best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
    }
    best
}

/// Reference PGM (P5) decoder with its own parsing structure, for
/// cross-checking the map loader. Returns `(width, height, pixels)` with
/// pixels in file order (top row first).
pub fn decode_pgm_reference(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>), MapError> {
    #[derive(PartialEq)]
    enum St {
        Magic,
        Width,
        Height,
        Maxval,
    }
    let mut state = St::Magic;
    let mut fields: Vec<usize> = Vec::new();
    let mut token = String::new();
    let mut i = 0usize;
    let bad = |m: &str| MapError::MalformedMap(m.to_string());

    while i < bytes.len() {
        let b = bytes[i];
        if b == b'#' && token.is_empty() {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if b.is_ascii_whitespace() {
            if !token.is_empty() {
                match state {
                    St::Magic => {
                        if token != "P5" {
                            return Err(bad("not P5"));
                        }
                        state = St::Width;
                    }
                    St::Width => {
                        fields.push(token.parse().map_err(|_| bad("bad width"))?);
                        state = St::Height;
                    }
                    St::Height => {
                        fields.push(token.parse().map_err(|_| bad("bad height"))?);
                        state = St::Maxval;
                    }
                    St::Maxval => {
                        fields.push(token.parse().map_err(|_| bad("bad maxval"))?);
                        i += 1;
                        break; // this whitespace byte ends the header
                    }
                }
                token.clear();
            }
            i += 1;
            continue;
        }
        token.push(b as char);
        i += 1;
    }
    if fields.len() != 3 {
        return Err(bad("truncated header"));
    }
    let (w, h, maxval) = (fields[0], fields[1], fields[2]);
    if maxval == 0 || maxval > 255 {
        return Err(bad("unsupported maxval"));
    }
    let data = &bytes[i..];
    if data.len() != w * h {
        return Err(bad("pixel count mismatch"));
    }
    Ok((w, h, data.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::reachable_free;

    #[test]
    fn march_finds_wall() {
        let mut g = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        for cy in 0..100 {
            g.set(Cell::new(70, cy), CellState::Occupied);
        }
        let d = march_ray(&g, Point::new(5.0, 5.0), 0.0, 5.0, 0.01);
        assert!((d - 2.0).abs() < 0.02);
        let clear = march_ray(&g, Point::new(5.0, 5.0), 180.0, 5.0, 0.01);
        assert!(clear.is_infinite());
    }

    #[test]
    fn sweeps_match_bfs() {
        let mut g = OccupancyGrid::filled(20, 20, 0.5, CellState::Free);
        for i in 0..15 {
            g.set(Cell::new(10, i), CellState::Occupied);
        }
        let (mask, count) = reachable_by_sweeps(&g, Cell::new(2, 2));
        let bfs = reachable_free(&g, Cell::new(2, 2));
        assert_eq!(count, bfs.count());
        for idx in 0..g.cell_count() {
            assert_eq!(mask[idx], bfs.contains(idx));
        }
    }

    #[test]
    fn min_distance_window() {
        let mut g = OccupancyGrid::filled(50, 50, 0.1, CellState::Free);
        g.set(Cell::new(30, 30), CellState::Occupied); // cell [3.0,3.1]^2
        let d = min_distance_to_occupied_within(&g, Point::new(2.5, 3.05), 1.0).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!(min_distance_to_occupied_within(&g, Point::new(1.0, 1.0), 0.5).is_none());
    }
}
