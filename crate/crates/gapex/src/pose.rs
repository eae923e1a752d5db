//! Poses, points and angle arithmetic shared by every other module.
//!
//! Headings are kept in degrees throughout the crate (the sensor and the
//! planner both quantize in degrees); conversion to radians happens only at
//! the trig call sites.

use std::fmt;

/// Normalize an angle in degrees into `[0, 360)`.
///
/// Values already inside the range pass through unchanged, which keeps
/// heading arithmetic exact for dyadic angles.
pub fn normalize_deg(deg: f64) -> f64 {
    let a = deg.rem_euclid(360.0);
    if a >= 360.0 {
        0.0
    } else {
        a
    }
}

/// Smallest absolute separation between two headings, in degrees `[0, 180]`.
pub fn angular_separation_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Signed difference `a - b` wrapped into `(-180, 180]`.
pub fn signed_angle_diff_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Unit vector of a heading given in degrees.
pub fn unit_vec_deg(deg: f64) -> (f64, f64) {
    let r = deg.to_radians();
    (r.cos(), r.sin())
}

/// A 2D world point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Robot waypoint state: position in meters, heading in degrees `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta_deg: f64,
}

impl Pose {
    /// Build a pose, normalizing the heading into `[0, 360)`.
    pub fn new(x: f64, y: f64, theta_deg: f64) -> Self {
        Pose {
            x,
            y,
            theta_deg: normalize_deg(theta_deg),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    /// Unit vector along this pose's heading.
    pub fn heading_vec(&self) -> (f64, f64) {
        unit_vec_deg(self.theta_deg)
    }
}

impl fmt::Display for Pose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}deg)", self.x, self.y, self.theta_deg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_keeps_in_range_values_exact() {
        assert_eq!(normalize_deg(0.0), 0.0);
        assert_eq!(normalize_deg(359.5), 359.5);
        assert_eq!(normalize_deg(123.456), 123.456);
    }

    #[test]
    fn normalize_wraps() {
        assert_eq!(normalize_deg(360.0), 0.0);
        assert_eq!(normalize_deg(540.0), 180.0);
        assert_eq!(normalize_deg(-90.0), 270.0);
        assert_eq!(normalize_deg(-360.0), 0.0);
    }

    #[test]
    fn normalize_never_returns_360() {
        // rem_euclid can round up to the modulus for tiny negative inputs
        let v = normalize_deg(-1e-18);
        assert!((0.0..360.0).contains(&v));
    }

    #[test]
    fn separation_is_symmetric_and_wrapped() {
        assert_eq!(angular_separation_deg(10.0, 350.0), 20.0);
        assert_eq!(angular_separation_deg(350.0, 10.0), 20.0);
        assert_eq!(angular_separation_deg(0.0, 180.0), 180.0);
        assert_eq!(angular_separation_deg(90.0, 90.0), 0.0);
    }

    #[test]
    fn signed_diff_wraps_to_half_open_range() {
        assert_eq!(signed_angle_diff_deg(10.0, 350.0), 20.0);
        assert_eq!(signed_angle_diff_deg(350.0, 10.0), -20.0);
        assert_eq!(signed_angle_diff_deg(180.0, 0.0), 180.0);
    }
}
