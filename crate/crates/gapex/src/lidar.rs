//! Simulated forward-facing semicircular range sensor.
//!
//! Rays are traced with exact integer cell stepping (no fixed-step sampling),
//! which is deterministic and cannot tunnel through cell corners. Cells
//! outside the grid are transparent: a ray that leaves the map reports no
//! obstacle. Unknown cells are opaque, same as occupied ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::grid::{Cell, CellState, OccupancyGrid};
use crate::pose::{unit_vec_deg, Point, Pose};

/// Default angular resolution: gap boundaries resolved to the degree.
pub const DEFAULT_ANGULAR_STEP_DEG: f64 = 1.0;

/// One sensor ray. `range_m` is `f64::INFINITY` when no obstacle lies on the
/// ray within the scan's maximum range, and in `(0, max_range]` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    /// Bearing relative to the scan pose's heading, degrees in `[-90, 90]`.
    pub bearing_deg: f64,
    pub range_m: f64,
}

impl Ray {
    pub fn is_clear(&self) -> bool {
        self.range_m.is_infinite()
    }
}

/// One semicircular sweep: rays ordered by strictly increasing bearing from
/// -90 to +90 inclusive, plus the grid cells the rays traversed (for
/// coverage accounting).
#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub pose: Pose,
    pub max_range: f64,
    pub angular_step_deg: f64,
    pub rays: Vec<Ray>,
    pub covered: Vec<Cell>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScanError {
    #[error("pose ({x}, {y}) is outside the grid bounds")]
    PoseOutOfBounds { x: f64, y: f64 },
    #[error("pose ({x}, {y}) is inside a non-free cell")]
    PoseInsideObstacle { x: f64, y: f64 },
    #[error("angular step {0} does not evenly divide 180")]
    BadAngularStep(f64),
}

fn bearings(angular_step_deg: f64) -> Result<Vec<f64>, ScanError> {
    if !(angular_step_deg > 0.0) {
        return Err(ScanError::BadAngularStep(angular_step_deg));
    }
    let n = 180.0 / angular_step_deg;
    if (n - n.round()).abs() > 1e-9 {
        return Err(ScanError::BadAngularStep(angular_step_deg));
    }
    let n = n.round() as usize;
    Ok((0..=n).map(|i| -90.0 + i as f64 * angular_step_deg).collect())
}

/// Walk the grid along a world-frame direction. Returns the distance to the
/// boundary of the first non-free cell (infinity if none within `max_range`)
/// and every cell the ray touched, the blocking cell included.
pub fn cast_ray(
    grid: &OccupancyGrid,
    origin: Point,
    dir_deg: f64,
    max_range: f64,
) -> (f64, Vec<Cell>) {
    let res = grid.resolution();
    let (dx, dy) = unit_vec_deg(dir_deg);
    let ox = origin.x - grid.origin().x;
    let oy = origin.y - grid.origin().y;
    let w = grid.width() as i64;
    let h = grid.height() as i64;
    let mut cx = (ox / res).floor() as i64;
    let mut cy = (oy / res).floor() as i64;

    let mut cells = Vec::new();
    if cx >= 0 && cy >= 0 && cx < w && cy < h {
        cells.push(Cell::new(cx as usize, cy as usize));
    }

    // Amanatides-Woo style stepping: advance to the next cell boundary on
    // whichever axis is crossed first.
    let axis = |o: f64, d: f64, c: i64| -> (i64, f64, f64) {
        if d > 0.0 {
            (1, ((c + 1) as f64 * res - o) / d, res / d)
        } else if d < 0.0 {
            (-1, (o - c as f64 * res) / -d, res / -d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_x, mut t_max_x, t_delta_x) = axis(ox, dx, cx);
    let (step_y, mut t_max_y, t_delta_y) = axis(oy, dy, cy);

    loop {
        let t;
        if t_max_x <= t_max_y {
            t = t_max_x;
            cx += step_x;
            t_max_x += t_delta_x;
        } else {
            t = t_max_y;
            cy += step_y;
            t_max_y += t_delta_y;
        }
        if t > max_range {
            return (f64::INFINITY, cells);
        }
        if cx < 0 || cy < 0 || cx >= w || cy >= h {
            // left the map; outside cells never block
            return (f64::INFINITY, cells);
        }
        let cell = Cell::new(cx as usize, cy as usize);
        cells.push(cell);
        if grid.get(cell) != CellState::Free {
            return (t, cells);
        }
    }
}

fn validate_pose(grid: &OccupancyGrid, pose: &Pose) -> Result<(), ScanError> {
    let p = pose.position();
    if !grid.contains_point(p) {
        return Err(ScanError::PoseOutOfBounds { x: p.x, y: p.y });
    }
    let cell = grid.cell_at(p).expect("in bounds");
    if grid.get(cell) != CellState::Free {
        return Err(ScanError::PoseInsideObstacle { x: p.x, y: p.y });
    }
    Ok(())
}

fn assemble_scan(
    grid: &OccupancyGrid,
    pose: Pose,
    max_range: f64,
    angular_step_deg: f64,
    per_ray: Vec<(f64, f64, Vec<Cell>)>,
) -> Scan {
    let mut rays = Vec::with_capacity(per_ray.len());
    let mut covered = Vec::new();
    let mut dedup = vec![0u64; grid.cell_count().div_ceil(64)];
    for (bearing_deg, range_m, cells) in per_ray {
        rays.push(Ray { bearing_deg, range_m });
        for c in cells {
            let idx = grid.index(c);
            if dedup[idx / 64] & (1 << (idx % 64)) == 0 {
                dedup[idx / 64] |= 1 << (idx % 64);
                covered.push(c);
            }
        }
    }
    Scan {
        pose,
        max_range,
        angular_step_deg,
        rays,
        covered,
    }
}

/// Sequential scan acquisition. Always available; the reference path the
/// parallel implementation is benchmarked against.
pub fn acquire_scan_seq(
    grid: &OccupancyGrid,
    pose: &Pose,
    max_range: f64,
    angular_step_deg: f64,
) -> Result<Scan, ScanError> {
    validate_pose(grid, pose)?;
    let per_ray: Vec<(f64, f64, Vec<Cell>)> = bearings(angular_step_deg)?
        .into_iter()
        .map(|b| {
            let (range, cells) = cast_ray(grid, pose.position(), pose.theta_deg + b, max_range);
            (b, range, cells)
        })
        .collect();
    Ok(assemble_scan(grid, *pose, max_range, angular_step_deg, per_ray))
}

/// Scan acquisition with the rays traced in parallel. Output is identical to
/// [`acquire_scan_seq`]: rays are collected in bearing order.
#[cfg(feature = "parallel")]
pub fn acquire_scan_par(
    grid: &OccupancyGrid,
    pose: &Pose,
    max_range: f64,
    angular_step_deg: f64,
) -> Result<Scan, ScanError> {
    use rayon::prelude::*;
    validate_pose(grid, pose)?;
    let per_ray: Vec<(f64, f64, Vec<Cell>)> = bearings(angular_step_deg)?
        .into_par_iter()
        .map(|b| {
            let (range, cells) = cast_ray(grid, pose.position(), pose.theta_deg + b, max_range);
            (b, range, cells)
        })
        .collect();
    Ok(assemble_scan(grid, *pose, max_range, angular_step_deg, per_ray))
}

/// Acquire one semicircular scan at `pose`. For each bearing the reported
/// range is the distance to the first non-free cell boundary along the ray,
/// or clear when nothing blocks within `max_range`.
pub fn acquire_scan(
    grid: &OccupancyGrid,
    pose: &Pose,
    max_range: f64,
    angular_step_deg: f64,
) -> Result<Scan, ScanError> {
    #[cfg(feature = "parallel")]
    {
        acquire_scan_par(grid, pose, max_range, angular_step_deg)
    }
    #[cfg(not(feature = "parallel"))]
    {
        acquire_scan_seq(grid, pose, max_range, angular_step_deg)
    }
}

/// Perturb every finite range with zero-mean Gaussian noise, truncated so the
/// result stays in `(0, max_range]`. Deterministic for a given seed;
/// `sigma = 0` returns the scan unchanged.
pub fn add_range_noise(scan: &Scan, sigma: f64, seed: u64) -> Scan {
    debug_assert!(sigma >= 0.0);
    if sigma == 0.0 {
        return scan.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma >= 0");
    let mut out = scan.clone();
    for ray in &mut out.rays {
        if ray.range_m.is_finite() {
            let noisy = ray.range_m + normal.sample(&mut rng);
            ray.range_m = noisy.clamp(1e-9, scan.max_range);
        }
    }
    out
}

/// Serialize a scan: a `# pose=x,y,theta max_range=l` header, then one
/// `bearing_deg,range_m` row per ray with `inf` for clear rays.
pub fn scan_to_csv(scan: &Scan) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# pose={},{},{} max_range={}\n",
        scan.pose.x, scan.pose.y, scan.pose.theta_deg, scan.max_range
    ));
    for ray in &scan.rays {
        out.push_str(&format!("{},{}\n", ray.bearing_deg, ray.range_m));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bearing_ladder() {
        let b = bearings(1.0).unwrap();
        assert_eq!(b.len(), 181);
        assert_eq!(b[0], -90.0);
        assert_eq!(b[180], 90.0);
        assert_eq!(b[90], 0.0);
        assert!(bearings(0.7).is_err());
        assert!(bearings(0.0).is_err());
        assert_eq!(bearings(45.0).unwrap().len(), 5);
    }

    #[test]
    fn empty_map_all_clear() {
        let g = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        let scan = acquire_scan(&g, &Pose::new(5.0, 5.0, 37.0), 5.0, 1.0).unwrap();
        assert_eq!(scan.rays.len(), 181);
        assert!(scan.rays.iter().all(|r| r.is_clear()));
        assert!(!scan.covered.is_empty());
    }

    #[test]
    fn wall_straight_ahead() {
        // wall column at world x in [7.0, 7.1], pose at x = 5.0 facing +x
        let mut g = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        for cy in 0..100 {
            g.set(Cell::new(70, cy), CellState::Occupied);
        }
        let scan = acquire_scan(&g, &Pose::new(5.0, 5.0, 0.0), 5.0, 1.0).unwrap();
        let front = scan.rays.iter().find(|r| r.bearing_deg == 0.0).unwrap();
        assert!((front.range_m - 2.0).abs() <= g.resolution());
    }

    #[test]
    fn pose_errors() {
        let mut g = OccupancyGrid::filled(10, 10, 1.0, CellState::Free);
        g.set(Cell::new(5, 5), CellState::Occupied);
        assert_eq!(
            acquire_scan(&g, &Pose::new(-1.0, 5.0, 0.0), 5.0, 1.0),
            Err(ScanError::PoseOutOfBounds { x: -1.0, y: 5.0 })
        );
        assert_eq!(
            acquire_scan(&g, &Pose::new(5.5, 5.5, 0.0), 5.0, 1.0),
            Err(ScanError::PoseInsideObstacle { x: 5.5, y: 5.5 })
        );
    }

    #[test]
    fn hit_cell_is_covered() {
        let mut g = OccupancyGrid::filled(20, 20, 0.5, CellState::Free);
        g.set(Cell::new(12, 5), CellState::Occupied);
        let scan = acquire_scan(&g, &Pose::new(2.75, 2.75, 0.0), 5.0, 1.0).unwrap();
        assert!(scan.covered.contains(&Cell::new(12, 5)));
    }

    #[test]
    fn noise_zero_is_identity() {
        let g = OccupancyGrid::filled(50, 50, 0.2, CellState::Free);
        let scan = acquire_scan(&g, &Pose::new(5.0, 5.0, 90.0), 5.0, 1.0).unwrap();
        let noisy = add_range_noise(&scan, 0.0, 42);
        assert_eq!(scan, noisy);
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let mut g = OccupancyGrid::filled(50, 50, 0.2, CellState::Free);
        for cy in 0..50 {
            g.set(Cell::new(40, cy), CellState::Occupied);
        }
        let scan = acquire_scan(&g, &Pose::new(5.0, 5.0, 0.0), 5.0, 1.0).unwrap();
        let a = add_range_noise(&scan, 0.05, 7);
        let b = add_range_noise(&scan, 0.05, 7);
        let c = add_range_noise(&scan, 0.05, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
        // clear rays untouched
        for (r0, r1) in scan.rays.iter().zip(a.rays.iter()) {
            assert_eq!(r0.is_clear(), r1.is_clear());
        }
    }

    #[test]
    fn noise_mean_is_near_zero() {
        // derived check: with sigma = 0.05 the sample mean over 10^4 rays
        // stays within +-0.005 of zero
        let mut g = OccupancyGrid::filled(60, 60, 0.1, CellState::Free);
        for cy in 0..60 {
            g.set(Cell::new(55, cy), CellState::Occupied);
        }
        let pose = Pose::new(3.0, 3.0, 0.0);
        let scan = acquire_scan(&g, &pose, 5.0, 1.0).unwrap();
        let mut sum = 0.0;
        let mut n = 0usize;
        for seed in 0..200u64 {
            let noisy = add_range_noise(&scan, 0.05, seed);
            for (r0, r1) in scan.rays.iter().zip(noisy.rays.iter()) {
                if r0.range_m.is_finite() {
                    sum += r1.range_m - r0.range_m;
                    n += 1;
                }
            }
            if n >= 10_000 {
                break;
            }
        }
        assert!(n >= 10_000);
        assert!((sum / n as f64).abs() < 0.005, "mean {}", sum / n as f64);
    }

    #[test]
    fn csv_shape() {
        let g = OccupancyGrid::filled(20, 20, 0.5, CellState::Free);
        let scan = acquire_scan(&g, &Pose::new(5.0, 5.0, 45.0), 5.0, 45.0).unwrap();
        let csv = scan_to_csv(&scan);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# pose=5,5,45 max_range=5");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1], "-90,inf");
        assert_eq!(lines[5], "90,inf");
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let mut g = OccupancyGrid::filled(80, 80, 0.1, CellState::Free);
        for i in 0..80 {
            g.set(Cell::new(i, 60), CellState::Occupied);
            g.set(Cell::new(20, i), CellState::Unknown);
        }
        let pose = Pose::new(4.0, 4.0, 123.0);
        let a = acquire_scan_par(&g, &pose, 5.0, 1.0).unwrap();
        let b = acquire_scan_seq(&g, &pose, 5.0, 1.0).unwrap();
        assert_eq!(a, b);
    }
}
