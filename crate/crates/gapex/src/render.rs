//! Deterministic raster rendering of an episode to binary PPM (P6), one
//! pixel per grid cell. No compression, no external encoders: identical
//! inputs yield byte-identical output.

use crate::grid::{Cell, CellState, CoverageLedger, OccupancyGrid};
use crate::pose::Pose;

const OCCUPIED: [u8; 3] = [0, 0, 0];
const FREE_SEEN: [u8; 3] = [255, 255, 255];
const FREE_UNSEEN: [u8; 3] = [160, 160, 160];
const UNKNOWN: [u8; 3] = [80, 80, 80];
const PATH: [u8; 3] = [220, 40, 40];
const WAYPOINT: [u8; 3] = [40, 40, 220];
const START: [u8; 3] = [40, 160, 40];
const END: [u8; 3] = [160, 40, 160];

struct Raster {
    w: usize,
    h: usize,
    px: Vec<u8>,
}

impl Raster {
    fn set(&mut self, x: i64, y: i64, color: [u8; 3]) {
        if x < 0 || y < 0 || x >= self.w as i64 || y >= self.h as i64 {
            return;
        }
        let i = (y as usize * self.w + x as usize) * 3;
        self.px[i..i + 3].copy_from_slice(&color);
    }

    fn line(&mut self, mut x0: i64, mut y0: i64, x1: i64, y1: i64, color: [u8; 3]) {
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let sx = if x0 < x1 { 1 } else { -1 };
        let sy = if y0 < y1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.set(x0, y0, color);
            if x0 == x1 && y0 == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x0 += sx;
            }
            if e2 <= dx {
                err += dx;
                y0 += sy;
            }
        }
    }

    fn square3(&mut self, x: i64, y: i64, color: [u8; 3]) {
        for dy in -1..=1 {
            for dx in -1..=1 {
                self.set(x + dx, y + dy, color);
            }
        }
    }
}

/// Render the world, the coverage state and the waypoint trace.
///
/// Colors: occupied black, free-and-seen white, free-unseen gray, unknown
/// dark gray; path polyline in red, waypoint markers in blue, start and end
/// 3x3 glyphs in green and purple.
pub fn render_episode(
    grid: &OccupancyGrid,
    ledger: &CoverageLedger,
    waypoints: &[Pose],
) -> Vec<u8> {
    let w = grid.width();
    let h = grid.height();
    let mut raster = Raster {
        w,
        h,
        px: vec![0; w * h * 3],
    };

    for cy in 0..h {
        for cx in 0..w {
            let cell = Cell::new(cx, cy);
            let color = match grid.get(cell) {
                CellState::Occupied => OCCUPIED,
                CellState::Unknown => UNKNOWN,
                CellState::Free => {
                    if ledger.is_seen(grid.index(cell)) {
                        FREE_SEEN
                    } else {
                        FREE_UNSEEN
                    }
                }
            };
            // image row 0 is the top of the map
            raster.set(cx as i64, (h - 1 - cy) as i64, color);
        }
    }

    let to_px = |p: &Pose| -> (i64, i64) {
        let cx = ((p.x - grid.origin().x) / grid.resolution()).floor() as i64;
        let cy = ((p.y - grid.origin().y) / grid.resolution()).floor() as i64;
        (cx, h as i64 - 1 - cy)
    };

    for pair in waypoints.windows(2) {
        let (x0, y0) = to_px(&pair[0]);
        let (x1, y1) = to_px(&pair[1]);
        raster.line(x0, y0, x1, y1, PATH);
    }
    for p in waypoints {
        let (x, y) = to_px(p);
        raster.set(x, y, WAYPOINT);
    }
    if let Some(first) = waypoints.first() {
        let (x, y) = to_px(first);
        raster.square3(x, y, START);
    }
    if let Some(last) = waypoints.last() {
        let (x, y) = to_px(last);
        raster.square3(x, y, END);
    }

    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.extend_from_slice(&raster.px);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pixel(bytes: &[u8], w: usize, x: usize, y: usize) -> [u8; 3] {
        let header_end = bytes.windows(4).position(|w| w == b"255\n").unwrap() + 4;
        let i = header_end + (y * w + x) * 3;
        [bytes[i], bytes[i + 1], bytes[i + 2]]
    }

    #[test]
    fn unseen_free_is_gray_seen_is_white() {
        let grid = OccupancyGrid::filled(4, 4, 1.0, CellState::Free);
        let mut ledger = CoverageLedger::new(grid.cell_count());
        let empty = render_episode(&grid, &ledger, &[]);
        assert_eq!(pixel(&empty, 4, 0, 0), FREE_UNSEEN);

        for idx in 0..grid.cell_count() {
            ledger.mark(idx);
        }
        let full = render_episode(&grid, &ledger, &[]);
        assert_eq!(pixel(&full, 4, 0, 0), FREE_SEEN);
        assert_eq!(pixel(&full, 4, 3, 3), FREE_SEEN);
    }

    #[test]
    fn occupied_and_unknown_colors() {
        let mut grid = OccupancyGrid::filled(3, 3, 1.0, CellState::Free);
        grid.set(Cell::new(0, 2), CellState::Occupied); // top-left pixel
        grid.set(Cell::new(2, 0), CellState::Unknown); // bottom-right pixel
        let ledger = CoverageLedger::new(grid.cell_count());
        let img = render_episode(&grid, &ledger, &[]);
        assert_eq!(pixel(&img, 3, 0, 0), OCCUPIED);
        assert_eq!(pixel(&img, 3, 2, 2), UNKNOWN);
    }

    #[test]
    fn deterministic_bytes() {
        let grid = OccupancyGrid::filled(8, 8, 0.5, CellState::Free);
        let mut ledger = CoverageLedger::new(grid.cell_count());
        ledger.mark(3);
        let wps = [Pose::new(0.5, 0.5, 0.0), Pose::new(3.0, 3.0, 45.0)];
        assert_eq!(
            render_episode(&grid, &ledger, &wps),
            render_episode(&grid, &ledger, &wps)
        );
    }

    #[test]
    fn header_is_plain_p6() {
        let grid = OccupancyGrid::filled(5, 7, 1.0, CellState::Free);
        let ledger = CoverageLedger::new(grid.cell_count());
        let img = render_episode(&grid, &ledger, &[]);
        assert!(img.starts_with(b"P6\n5 7\n255\n"));
        assert_eq!(img.len(), 11 + 5 * 7 * 3);
    }
}
