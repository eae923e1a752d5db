//! Waypoint-to-waypoint motion under the unicycle model and clearance
//! verification along the swept path.
//!
//! Moves are realized as an in-place rotation onto the travel heading
//! followed by a straight translation. A circular robot sweeps no extra area
//! while rotating in place, so only the translation is collision-checked, at
//! sample spacing no coarser than the grid resolution.

use thiserror::Error;

use crate::grid::OccupancyGrid;
use crate::pose::{signed_angle_diff_deg, Point, Pose};

/// Commanded linear speed during translation, m/s.
pub const LINEAR_SPEED: f64 = 0.5;
/// Commanded yaw rate during in-place rotation, deg/s.
pub const ANGULAR_SPEED_DEG: f64 = 90.0;

/// A verified motion between two poses: the rotation keyframe (if any)
/// followed by translation samples at fixed arc-length spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionSegment {
    pub start: Pose,
    pub end: Pose,
    pub samples: Vec<Pose>,
    /// Linear speed during the translation phase, m/s.
    pub v: f64,
    /// Yaw rate during the rotation phase, deg/s.
    pub omega: f64,
}

impl MotionSegment {
    /// Translated distance in meters (rotation adds no length).
    pub fn length(&self) -> f64 {
        self.start.position().distance(self.end.position())
    }

    /// Signed heading change of the rotation phase, degrees in (-180, 180].
    pub fn rotation_deg(&self) -> f64 {
        signed_angle_diff_deg(self.end.theta_deg, self.start.theta_deg)
    }
}

/// First pose along a move whose robot disc is blocked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionReport {
    pub blocked: Pose,
    pub sample_index: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    /// Stationary sample triplet: the yaw-rate quotient is undefined, so the
    /// linear speed is zero and the yaw rate comes from the heading
    /// difference instead.
    #[error("degenerate sample: stationary position, omega {omega_deg_s} deg/s from headings")]
    DegenerateSample { omega_deg_s: f64 },
}

/// Points from `a` to `b` inclusive, spaced at most `spacing` apart. The
/// endpoints are exact.
pub fn segment_points(a: Point, b: Point, spacing: f64) -> Vec<Point> {
    debug_assert!(spacing > 0.0);
    let dist = a.distance(b);
    if dist == 0.0 {
        return vec![a];
    }
    let n = (dist / spacing).ceil().max(1.0) as usize;
    let mut pts = Vec::with_capacity(n + 1);
    for i in 0..n {
        let t = i as f64 / n as f64;
        pts.push(Point::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t));
    }
    pts.push(b);
    pts
}

/// True iff the robot disc stays traversable at every sample of the straight
/// segment from `a` to `b` (spacing = grid resolution, endpoints included).
pub fn path_is_clear(grid: &OccupancyGrid, a: Point, b: Point, robot_radius: f64) -> bool {
    segment_points(a, b, grid.resolution())
        .into_iter()
        .all(|p| grid.is_traversable(p, robot_radius))
}

/// Rotate in place onto the target heading, then translate straight to the
/// target position, verifying the robot disc at every sample.
///
/// The planner guarantees that the target's heading equals the bearing of
/// travel, so the translation never needs to curve.
pub fn execute_move(
    pose: &Pose,
    target: &Pose,
    grid: &OccupancyGrid,
    robot_radius: f64,
) -> Result<MotionSegment, CollisionReport> {
    let mut samples = Vec::new();
    samples.push(*pose);
    if pose.theta_deg != target.theta_deg {
        samples.push(Pose::new(pose.x, pose.y, target.theta_deg));
    }
    let pts = segment_points(pose.position(), target.position(), grid.resolution());
    for p in pts.iter().skip(1) {
        samples.push(Pose::new(p.x, p.y, target.theta_deg));
    }
    if let Some(last) = samples.last_mut() {
        *last = *target; // exact endpoint
    }
    for (i, s) in samples.iter().enumerate() {
        if !grid.is_traversable(s.position(), robot_radius) {
            return Err(CollisionReport {
                blocked: *s,
                sample_index: i,
            });
        }
    }
    Ok(MotionSegment {
        start: *pose,
        end: *target,
        samples,
        v: LINEAR_SPEED,
        omega: ANGULAR_SPEED_DEG,
    })
}

/// Unicycle rates from a path sample triplet by central finite differences:
/// `v = |p'|`, `omega = (x'y'' - y'x'') / |p'|^2`.
///
/// Returns the yaw rate in deg/s. A stationary triplet (pure rotation) is a
/// [`KinematicsError::DegenerateSample`]: v is zero and the error carries the
/// yaw rate estimated from the heading difference.
pub fn unicycle_rates(
    prev: &Pose,
    now: &Pose,
    next: &Pose,
    dt: f64,
) -> Result<(f64, f64), KinematicsError> {
    assert!(dt > 0.0, "dt must be positive");
    let xd = (next.x - prev.x) / (2.0 * dt);
    let yd = (next.y - prev.y) / (2.0 * dt);
    let xdd = (next.x - 2.0 * now.x + prev.x) / (dt * dt);
    let ydd = (next.y - 2.0 * now.y + prev.y) / (dt * dt);
    let v = xd.hypot(yd);
    if v < 1e-12 {
        let omega_deg_s = signed_angle_diff_deg(next.theta_deg, prev.theta_deg) / (2.0 * dt);
        return Err(KinematicsError::DegenerateSample { omega_deg_s });
    }
    let omega_rad_s = (xd * ydd - yd * xdd) / (v * v);
    Ok((v, omega_rad_s.to_degrees()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Cell, CellState};

    #[test]
    fn straight_move_no_rotation() {
        let grid = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        let seg = execute_move(
            &Pose::new(3.0, 3.0, 0.0),
            &Pose::new(4.0, 3.0, 0.0),
            &grid,
            0.3,
        )
        .unwrap();
        assert_eq!(seg.samples[0], Pose::new(3.0, 3.0, 0.0));
        assert_eq!(*seg.samples.last().unwrap(), Pose::new(4.0, 3.0, 0.0));
        assert_eq!(seg.rotation_deg(), 0.0);
        assert!((seg.length() - 1.0).abs() < 1e-12);
        // spacing bound
        for w in seg.samples.windows(2) {
            assert!(w[0].position().distance(w[1].position()) <= grid.resolution() + 1e-12);
        }
    }

    #[test]
    fn rotate_then_translate() {
        let grid = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        let seg = execute_move(
            &Pose::new(3.0, 3.0, 0.0),
            &Pose::new(3.0, 4.0, 90.0),
            &grid,
            0.3,
        )
        .unwrap();
        assert_eq!(seg.samples[1], Pose::new(3.0, 3.0, 90.0));
        assert_eq!(seg.rotation_deg(), 90.0);
        assert!((seg.length() - 1.0).abs() < 1e-12);
        // translation samples all share the target heading
        assert!(seg.samples[1..].iter().all(|p| p.theta_deg == 90.0));
    }

    #[test]
    fn collision_reports_first_blocked_sample() {
        let mut grid = OccupancyGrid::filled(100, 100, 0.1, CellState::Free);
        for j in 0..100 {
            grid.set(Cell::new(50, j), CellState::Occupied); // wall x in [5.0,5.1]
        }
        let err = execute_move(
            &Pose::new(3.0, 3.0, 0.0),
            &Pose::new(6.0, 3.0, 0.0),
            &grid,
            0.3,
        )
        .unwrap_err();
        // first blocked sample is the first one within 0.3 m of the wall
        assert!(err.blocked.x > 4.6 && err.blocked.x < 5.0);
        let prior = err.sample_index - 1;
        let _ = prior;
    }

    #[test]
    fn collinear_samples_give_v_one_omega_zero() {
        let (v, omega) = unicycle_rates(
            &Pose::new(0.0, 0.0, 0.0),
            &Pose::new(1.0, 0.0, 0.0),
            &Pose::new(2.0, 0.0, 0.0),
            1.0,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(omega, 0.0);
    }

    #[test]
    fn quarter_circle_omega_near_one_rad_s() {
        // unit-radius circle traversed at unit speed: omega = 1 rad/s
        let dt = 0.05;
        let at = |t: f64| Pose::new(t.cos(), t.sin(), 0.0);
        let (v, omega) = unicycle_rates(&at(1.0 - dt), &at(1.0), &at(1.0 + dt), dt).unwrap();
        assert!((v - 1.0).abs() < 1e-3);
        assert!((omega - 1f64.to_degrees()).abs() < 0.02 * 1f64.to_degrees());
    }

    #[test]
    fn stationary_triplet_is_degenerate() {
        let err = unicycle_rates(
            &Pose::new(1.0, 1.0, 0.0),
            &Pose::new(1.0, 1.0, 45.0),
            &Pose::new(1.0, 1.0, 90.0),
            0.5,
        )
        .unwrap_err();
        match err {
            KinematicsError::DegenerateSample { omega_deg_s } => {
                assert!((omega_deg_s - 90.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn segment_points_cover_and_terminate_exactly() {
        let pts = segment_points(Point::new(0.0, 0.0), Point::new(1.0, 0.0), 0.3);
        assert_eq!(pts.len(), 5); // ceil(1/0.3) = 4 intervals
        assert_eq!(pts[0], Point::new(0.0, 0.0));
        assert_eq!(*pts.last().unwrap(), Point::new(1.0, 0.0));
        let pts = segment_points(Point::new(2.0, 2.0), Point::new(2.0, 2.0), 0.3);
        assert_eq!(pts.len(), 1);
    }
}
