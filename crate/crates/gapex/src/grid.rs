//! Static 2D occupancy world: map I/O, traversability queries and
//! explored-area accounting.
//!
//! Cells are stored row-major with row 0 at the *bottom* of the world
//! (x rightward, y upward, world origin at the bottom-left map corner).
//! The ASCII file format lists rows top-down; loading and saving flip rows
//! so that `save(load(m))` is byte-identical for canonical maps.

use std::fmt;

use thiserror::Error;

use crate::pose::Point;

/// State of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellState {
    Free,
    Occupied,
    Unknown,
}

impl CellState {
    fn to_char(self) -> char {
        match self {
            CellState::Free => '.',
            CellState::Occupied => '#',
            CellState::Unknown => '?',
        }
    }
}

/// Cell coordinates: `x` is the column, `y` the row counted from the bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Cell { x, y }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("malformed map: {0}")]
    MalformedMap(String),
    #[error("map contains no free cell")]
    NoFreeCells,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Supported map file formats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapFormat {
    Ascii,
    /// Binary PGM (P5). The format carries no scale, so the cell size in
    /// meters must be supplied.
    Pgm { resolution: f64 },
}

/// Discretized 2D world.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point,
    cells: Vec<CellState>,
}

impl OccupancyGrid {
    /// Build a grid from raw parts. The cell vector is row-major with row 0
    /// at the bottom.
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        cells: Vec<CellState>,
    ) -> Result<Self, MapError> {
        if width == 0 || height == 0 {
            return Err(MapError::MalformedMap("zero width or height".into()));
        }
        if !(resolution > 0.0) {
            return Err(MapError::MalformedMap("zero resolution".into()));
        }
        if cells.len() != width * height {
            return Err(MapError::MalformedMap(format!(
                "dimension mismatch: {}x{} declared but {} cells",
                width,
                height,
                cells.len()
            )));
        }
        Ok(OccupancyGrid {
            width,
            height,
            resolution,
            origin: Point::new(0.0, 0.0),
            cells,
        })
    }

    /// Uniformly filled grid, mostly useful in tests.
    pub fn filled(width: usize, height: usize, resolution: f64, state: CellState) -> Self {
        OccupancyGrid::new(width, height, resolution, vec![state; width * height])
            .expect("valid dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// World coordinates of the corner of cell (0, 0).
    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// World-frame width in meters.
    pub fn extent_x(&self) -> f64 {
        self.origin.x + self.width as f64 * self.resolution
    }

    /// World-frame height in meters.
    pub fn extent_y(&self) -> f64 {
        self.origin.y + self.height as f64 * self.resolution
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(cell.x < self.width && cell.y < self.height);
        cell.y * self.width + cell.x
    }

    #[inline]
    pub fn get(&self, cell: Cell) -> CellState {
        self.cells[self.index(cell)]
    }

    pub fn set(&mut self, cell: Cell, state: CellState) {
        let idx = self.index(cell);
        self.cells[idx] = state;
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == CellState::Free).count()
    }

    /// True when the point lies inside the grid's bounding box
    /// (half-open on the upper edges).
    pub fn contains_point(&self, p: Point) -> bool {
        p.x >= self.origin.x
            && p.y >= self.origin.y
            && p.x < self.extent_x()
            && p.y < self.extent_y()
    }

    /// Cell containing a world point, if inside the grid.
    pub fn cell_at(&self, p: Point) -> Option<Cell> {
        if !self.contains_point(p) {
            return None;
        }
        let cx = ((p.x - self.origin.x) / self.resolution) as usize;
        let cy = ((p.y - self.origin.y) / self.resolution) as usize;
        Some(Cell::new(cx.min(self.width - 1), cy.min(self.height - 1)))
    }

    /// World coordinates of a cell's center.
    pub fn cell_center(&self, cell: Cell) -> Point {
        Point::new(
            self.origin.x + (cell.x as f64 + 0.5) * self.resolution,
            self.origin.y + (cell.y as f64 + 0.5) * self.resolution,
        )
    }

    /// Distance from a point to the closed rectangle of a cell.
    pub fn distance_to_cell(&self, p: Point, cell: Cell) -> f64 {
        let x0 = self.origin.x + cell.x as f64 * self.resolution;
        let y0 = self.origin.y + cell.y as f64 * self.resolution;
        let x1 = x0 + self.resolution;
        let y1 = y0 + self.resolution;
        let dx = (x0 - p.x).max(p.x - x1).max(0.0);
        let dy = (y0 - p.y).max(p.y - y1).max(0.0);
        dx.hypot(dy)
    }

    /// True iff the closed disc of radius `r` centered at `p` lies inside the
    /// grid and every cell it intersects is free. Unknown cells block.
    ///
    /// Uses exact disc/rectangle overlap, not center sampling, so clearance
    /// statements are exact at grid resolution.
    pub fn is_traversable(&self, p: Point, r: f64) -> bool {
        debug_assert!(r > 0.0);
        if p.x - r < self.origin.x
            || p.y - r < self.origin.y
            || p.x + r > self.extent_x()
            || p.y + r > self.extent_y()
        {
            return false;
        }
        let res = self.resolution;
        let cx0 = (((p.x - r - self.origin.x) / res).floor().max(0.0)) as usize;
        let cy0 = (((p.y - r - self.origin.y) / res).floor().max(0.0)) as usize;
        let cx1 = ((((p.x + r - self.origin.x) / res).floor()) as usize).min(self.width - 1);
        let cy1 = ((((p.y + r - self.origin.y) / res).floor()) as usize).min(self.height - 1);
        for cy in cy0..=cy1 {
            for cx in cx0..=cx1 {
                let cell = Cell::new(cx, cy);
                if self.distance_to_cell(p, cell) <= r && self.get(cell) != CellState::Free {
                    return false;
                }
            }
        }
        true
    }

    /// Parse the ASCII map format: header `W H RES`, then H rows of
    /// `.`/`#`/`?` characters, row 0 at the top of the map.
    pub fn from_ascii(text: &str) -> Result<Self, MapError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| MapError::MalformedMap("empty map file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(MapError::MalformedMap(format!(
                "header must be `W H RES`, got `{header}`"
            )));
        }
        let width: usize = fields[0]
            .parse()
            .map_err(|_| MapError::MalformedMap(format!("bad width `{}`", fields[0])))?;
        let height: usize = fields[1]
            .parse()
            .map_err(|_| MapError::MalformedMap(format!("bad height `{}`", fields[1])))?;
        let resolution: f64 = fields[2]
            .parse()
            .map_err(|_| MapError::MalformedMap(format!("bad resolution `{}`", fields[2])))?;
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(MapError::MalformedMap("zero resolution".into()));
        }
        if width == 0 || height == 0 {
            return Err(MapError::MalformedMap("zero width or height".into()));
        }

        let mut cells = vec![CellState::Unknown; width * height];
        let mut rows_read = 0usize;
        for (row, line) in lines.enumerate() {
            let line = line.trim_end_matches('\r');
            if row >= height {
                if line.is_empty() {
                    continue;
                }
                return Err(MapError::MalformedMap(format!(
                    "dimension mismatch: more than {height} rows"
                )));
            }
            if line.chars().count() != width {
                return Err(MapError::MalformedMap(format!(
                    "dimension mismatch: row {} has {} cells, expected {}",
                    row,
                    line.chars().count(),
                    width
                )));
            }
            let cy = height - 1 - row;
            for (cx, ch) in line.chars().enumerate() {
                let state = match ch {
                    '.' => CellState::Free,
                    '#' => CellState::Occupied,
                    '?' => CellState::Unknown,
                    other => {
                        return Err(MapError::MalformedMap(format!(
                            "illegal symbol `{other}` at row {row}, column {cx}"
                        )))
                    }
                };
                cells[cy * width + cx] = state;
            }
            rows_read += 1;
        }
        if rows_read != height {
            return Err(MapError::MalformedMap(format!(
                "dimension mismatch: {rows_read} rows, expected {height}"
            )));
        }
        OccupancyGrid::new(width, height, resolution, cells)
    }

    /// Serialize to the canonical ASCII map format (top row first).
    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * (self.height + 1) + 32);
        out.push_str(&format!("{} {} {}\n", self.width, self.height, self.resolution));
        for cy in (0..self.height).rev() {
            for cx in 0..self.width {
                out.push(self.get(Cell::new(cx, cy)).to_char());
            }
            out.push('\n');
        }
        out
    }

    /// Parse a binary PGM (P5) image. Pixel value thresholds: `< 64` is
    /// occupied, `> 191` free, anything between unknown. Rows are top-down
    /// as in the ASCII format.
    pub fn from_pgm(bytes: &[u8], resolution: f64) -> Result<Self, MapError> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(MapError::MalformedMap("zero resolution".into()));
        }
        let mut pos = 0usize;

        fn next_token(bytes: &[u8], pos: &mut usize) -> Result<Vec<u8>, MapError> {
            // skip whitespace and `#` comments
            loop {
                while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                    *pos += 1;
                }
                if *pos < bytes.len() && bytes[*pos] == b'#' {
                    while *pos < bytes.len() && bytes[*pos] != b'\n' {
                        *pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = *pos;
            while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if start == *pos {
                return Err(MapError::MalformedMap("truncated pgm header".into()));
            }
            Ok(bytes[start..*pos].to_vec())
        }

        let magic = next_token(bytes, &mut pos)?;
        if magic != b"P5" {
            return Err(MapError::MalformedMap(format!(
                "not a binary pgm (magic `{}`)",
                String::from_utf8_lossy(&magic)
            )));
        }
        let parse_num = |tok: Vec<u8>| -> Result<usize, MapError> {
            String::from_utf8_lossy(&tok)
                .parse::<usize>()
                .map_err(|_| MapError::MalformedMap("bad pgm header number".into()))
        };
        let width = parse_num(next_token(bytes, &mut pos)?)?;
        let height = parse_num(next_token(bytes, &mut pos)?)?;
        let maxval = parse_num(next_token(bytes, &mut pos)?)?;
        if width == 0 || height == 0 {
            return Err(MapError::MalformedMap("zero width or height".into()));
        }
        if maxval == 0 || maxval > 255 {
            return Err(MapError::MalformedMap(format!(
                "unsupported pgm maxval {maxval}"
            )));
        }
        // exactly one whitespace byte separates the header from pixel data
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(MapError::MalformedMap("truncated pgm header".into()));
        }
        pos += 1;
        let data = &bytes[pos..];
        if data.len() != width * height {
            return Err(MapError::MalformedMap(format!(
                "dimension mismatch: {}x{} declared but {} pixel bytes",
                width,
                height,
                data.len()
            )));
        }
        let mut cells = vec![CellState::Unknown; width * height];
        for (i, &v) in data.iter().enumerate() {
            let row = i / width;
            let cx = i % width;
            let cy = height - 1 - row;
            cells[cy * width + cx] = if v < 64 {
                CellState::Occupied
            } else if v > 191 {
                CellState::Free
            } else {
                CellState::Unknown
            };
        }
        OccupancyGrid::new(width, height, resolution, cells)
    }
}

/// Parse a map from raw bytes in the given format.
pub fn load_map(bytes: &[u8], format: MapFormat) -> Result<OccupancyGrid, MapError> {
    match format {
        MapFormat::Ascii => {
            let text = std::str::from_utf8(bytes)
                .map_err(|_| MapError::MalformedMap("map file is not valid utf-8".into()))?;
            OccupancyGrid::from_ascii(text)
        }
        MapFormat::Pgm { resolution } => OccupancyGrid::from_pgm(bytes, resolution),
    }
}

/// Bitmask over grid cells recording which cells any sensor ray has touched.
///
/// Bits are only ever set, never cleared, so the count is monotone
/// non-decreasing over an episode.
#[derive(Debug, Clone)]
pub struct CoverageLedger {
    bits: Vec<u64>,
    len: usize,
    seen_count: usize,
}

impl CoverageLedger {
    pub fn new(cell_count: usize) -> Self {
        CoverageLedger {
            bits: vec![0; cell_count.div_ceil(64)],
            len: cell_count,
            seen_count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn seen_count(&self) -> usize {
        self.seen_count
    }

    #[inline]
    pub fn is_seen(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len);
        self.bits[idx / 64] & (1 << (idx % 64)) != 0
    }

    /// Set one bit; returns true when the cell was newly seen.
    #[inline]
    pub fn mark(&mut self, idx: usize) -> bool {
        debug_assert!(idx < self.len);
        let word = &mut self.bits[idx / 64];
        let mask = 1u64 << (idx % 64);
        if *word & mask == 0 {
            *word |= mask;
            self.seen_count += 1;
            true
        } else {
            false
        }
    }

    /// Mark every listed cell as seen. Idempotent.
    pub fn mark_cells(&mut self, grid: &OccupancyGrid, cells: &[Cell]) {
        for &c in cells {
            self.mark(grid.index(c));
        }
    }
}

/// Set of free cells reachable from a start cell by 4-connected moves,
/// computed once per episode. Serves as the coverage denominator.
#[derive(Debug, Clone)]
pub struct ReachableSet {
    bits: Vec<u64>,
    count: usize,
}

impl ReachableSet {
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        self.bits[idx / 64] & (1 << (idx % 64)) != 0
    }
}

/// Breadth-first flood fill over free cells from `start`.
pub fn reachable_free(grid: &OccupancyGrid, start: Cell) -> ReachableSet {
    let n = grid.cell_count();
    let mut bits = vec![0u64; n.div_ceil(64)];
    let mut count = 0usize;
    if grid.get(start) != CellState::Free {
        return ReachableSet { bits, count };
    }
    let mut queue = std::collections::VecDeque::new();
    bits[grid.index(start) / 64] |= 1 << (grid.index(start) % 64);
    count += 1;
    queue.push_back(start);
    while let Some(c) = queue.pop_front() {
        for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            let nx = c.x as i64 + dx;
            let ny = c.y as i64 + dy;
            if nx < 0 || ny < 0 || nx >= grid.width() as i64 || ny >= grid.height() as i64 {
                continue;
            }
            let cell = Cell::new(nx as usize, ny as usize);
            let idx = grid.index(cell);
            if bits[idx / 64] & (1 << (idx % 64)) == 0 && grid.get(cell) == CellState::Free {
                bits[idx / 64] |= 1 << (idx % 64);
                count += 1;
                queue.push_back(cell);
            }
        }
    }
    ReachableSet { bits, count }
}

/// Fraction of reachable free cells that have been seen, in `[0, 1]`.
pub fn coverage_fraction(
    ledger: &CoverageLedger,
    grid: &OccupancyGrid,
    reachable: &ReachableSet,
) -> Result<f64, MapError> {
    if grid.free_count() == 0 {
        return Err(MapError::NoFreeCells);
    }
    if reachable.count() == 0 {
        return Ok(0.0);
    }
    let mut seen = 0usize;
    for idx in 0..grid.cell_count() {
        if reachable.contains(idx) && ledger.is_seen(idx) {
            seen += 1;
        }
    }
    Ok(seen as f64 / reachable.count() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3(center: CellState) -> OccupancyGrid {
        let mut g = OccupancyGrid::filled(3, 3, 1.0, CellState::Free);
        g.set(Cell::new(1, 1), center);
        g
    }

    #[test]
    fn ascii_all_free() {
        let g = OccupancyGrid::from_ascii("3 3 1.0\n...\n...\n...\n").unwrap();
        assert_eq!(g.free_count(), 9);
        assert_eq!(g.width(), 3);
        assert_eq!(g.height(), 3);
        assert_eq!(g.resolution(), 1.0);
    }

    #[test]
    fn ascii_center_occupied() {
        let g = OccupancyGrid::from_ascii("3 3 1.0\n...\n.#.\n...\n").unwrap();
        assert_eq!(g.free_count(), 8);
        assert_eq!(g.get(Cell::new(1, 1)), CellState::Occupied);
    }

    #[test]
    fn ascii_rows_are_top_down() {
        // top row occupied -> highest world y
        let g = OccupancyGrid::from_ascii("2 2 0.5\n##\n..\n").unwrap();
        assert_eq!(g.get(Cell::new(0, 1)), CellState::Occupied);
        assert_eq!(g.get(Cell::new(0, 0)), CellState::Free);
    }

    #[test]
    fn ascii_errors() {
        assert!(matches!(
            OccupancyGrid::from_ascii("3 3 0\n...\n...\n...\n"),
            Err(MapError::MalformedMap(_))
        ));
        assert!(matches!(
            OccupancyGrid::from_ascii("3 3 1.0\n...\n..\n...\n"),
            Err(MapError::MalformedMap(_))
        ));
        assert!(matches!(
            OccupancyGrid::from_ascii("3 3 1.0\n...\n.X.\n...\n"),
            Err(MapError::MalformedMap(_))
        ));
        assert!(matches!(
            OccupancyGrid::from_ascii("3 3 1.0\n...\n...\n"),
            Err(MapError::MalformedMap(_))
        ));
    }

    #[test]
    fn ascii_round_trip() {
        let src = "4 3 0.25\n..#.\n.?..\n####\n";
        let g = OccupancyGrid::from_ascii(src).unwrap();
        assert_eq!(g.to_ascii(), src);
    }

    #[test]
    fn pgm_thresholds() {
        let mut bytes = b"P5\n4 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 63, 64, 128, 191, 192, 255, 100]);
        let g = OccupancyGrid::from_pgm(&bytes, 0.05).unwrap();
        // row 0 of the file is the top row (cy = 1)
        assert_eq!(g.get(Cell::new(0, 1)), CellState::Occupied); // 0
        assert_eq!(g.get(Cell::new(1, 1)), CellState::Occupied); // 63
        assert_eq!(g.get(Cell::new(2, 1)), CellState::Unknown); // 64
        assert_eq!(g.get(Cell::new(3, 1)), CellState::Unknown); // 128
        assert_eq!(g.get(Cell::new(0, 0)), CellState::Unknown); // 191
        assert_eq!(g.get(Cell::new(1, 0)), CellState::Free); // 192
        assert_eq!(g.get(Cell::new(2, 0)), CellState::Free); // 255
        assert_eq!(g.get(Cell::new(3, 0)), CellState::Unknown); // 100
    }

    #[test]
    fn pgm_with_comment_and_bad_sizes() {
        let mut bytes = b"P5\n# a comment\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 255, 0, 0]);
        assert!(OccupancyGrid::from_pgm(&bytes, 0.1).is_ok());

        let mut short = b"P5\n2 2\n255\n".to_vec();
        short.extend_from_slice(&[255, 255, 0]);
        assert!(matches!(
            OccupancyGrid::from_pgm(&short, 0.1),
            Err(MapError::MalformedMap(_))
        ));
    }

    #[test]
    fn traversable_empty_map() {
        let g = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        assert!(g.is_traversable(Point::new(5.0, 5.0), 0.3));
    }

    #[test]
    fn traversable_blocked_near_obstacle() {
        let mut g = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        g.set(Cell::new(50, 50), CellState::Occupied); // world [5.0,5.1]x[5.0,5.1]
        assert!(!g.is_traversable(Point::new(5.05, 5.05), 0.3));
        assert!(!g.is_traversable(Point::new(4.8, 5.05), 0.3));
        assert!(g.is_traversable(Point::new(4.6, 5.05), 0.3));
    }

    #[test]
    fn traversable_unknown_blocks() {
        let mut g = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        g.set(Cell::new(50, 50), CellState::Unknown);
        assert!(!g.is_traversable(Point::new(5.05, 5.05), 0.3));
    }

    #[test]
    fn traversable_out_of_bounds_disc() {
        let g = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        assert!(!g.is_traversable(Point::new(0.2, 5.0), 0.3));
        assert!(!g.is_traversable(Point::new(9.9, 5.0), 0.3));
        assert!(!g.is_traversable(Point::new(-1.0, 5.0), 0.3));
    }

    #[test]
    fn ledger_counts_and_idempotence() {
        let g = OccupancyGrid::filled(10, 10, 1.0, CellState::Free);
        let mut ledger = CoverageLedger::new(g.cell_count());
        let cells = [
            Cell::new(0, 0),
            Cell::new(1, 0),
            Cell::new(2, 0),
            Cell::new(3, 0),
            Cell::new(4, 0),
        ];
        ledger.mark_cells(&g, &cells);
        assert_eq!(ledger.seen_count(), 5);
        ledger.mark_cells(&g, &cells);
        assert_eq!(ledger.seen_count(), 5);
    }

    #[test]
    fn coverage_zero_then_one() {
        let g = grid3(CellState::Free);
        let reach = reachable_free(&g, Cell::new(0, 0));
        let mut ledger = CoverageLedger::new(g.cell_count());
        assert_eq!(coverage_fraction(&ledger, &g, &reach).unwrap(), 0.0);
        for cy in 0..3 {
            for cx in 0..3 {
                ledger.mark(g.index(Cell::new(cx, cy)));
            }
        }
        assert_eq!(coverage_fraction(&ledger, &g, &reach).unwrap(), 1.0);
    }

    #[test]
    fn coverage_excludes_unreachable_room() {
        // right column walled off by the middle column
        let mut g = OccupancyGrid::filled(3, 3, 1.0, CellState::Free);
        for cy in 0..3 {
            g.set(Cell::new(1, cy), CellState::Occupied);
        }
        let reach = reachable_free(&g, Cell::new(0, 0));
        assert_eq!(reach.count(), 3);
        let mut ledger = CoverageLedger::new(g.cell_count());
        for cy in 0..3 {
            ledger.mark(g.index(Cell::new(0, cy)));
            ledger.mark(g.index(Cell::new(2, cy))); // seen but unreachable
        }
        assert_eq!(coverage_fraction(&ledger, &g, &reach).unwrap(), 1.0);
    }

    #[test]
    fn no_free_cells_error() {
        let g = OccupancyGrid::filled(2, 2, 1.0, CellState::Occupied);
        let reach = reachable_free(&g, Cell::new(0, 0));
        let ledger = CoverageLedger::new(g.cell_count());
        assert!(matches!(
            coverage_fraction(&ledger, &g, &reach),
            Err(MapError::NoFreeCells)
        ));
    }

    #[test]
    fn world_cell_round_trip() {
        let g = OccupancyGrid::filled(7, 5, 0.3, CellState::Free);
        for cy in 0..5 {
            for cx in 0..7 {
                let c = Cell::new(cx, cy);
                assert_eq!(g.cell_at(g.cell_center(c)), Some(c));
            }
        }
        assert_eq!(g.cell_at(Point::new(-0.1, 0.0)), None);
        // upper edges are half-open
        assert_eq!(g.cell_at(Point::new(0.0, 5.0 * 0.3)), None);
        assert_eq!(g.cell_at(Point::new(0.0, 1.49)), Some(Cell::new(0, 4)));
    }
}
