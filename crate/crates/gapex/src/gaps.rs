//! Safe-heading computation: allowable angular regions (gaps) extracted from
//! a scan, forward half-plane bookkeeping, and heading selection.
//!
//! A gap is a contiguous run of scan bearings whose measured range exceeds
//! the obstacle threshold (or is clear). The selected heading is the gap's
//! bisector, which keeps the robot as far as possible from the obstacles
//! bounding the gap. Gap bounds are kept in bearing space relative to the
//! scan heading so that an all-clear scan selects the current heading
//! bit-exactly.

use std::collections::VecDeque;

use crate::lidar::Scan;
use crate::pose::{angular_separation_deg, normalize_deg, unit_vec_deg, Point, Pose};

/// Closed half-plane in point-normal form: `{ p : (p - anchor) . normal >= 0 }`.
///
/// The point-normal form is equivalent to a slope form wherever the latter is
/// defined, and has no singularity at vertical boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub anchor: Point,
    pub normal: (f64, f64),
}

impl HalfPlane {
    /// Half-plane ahead of a pose: anchored at its position, facing its
    /// heading.
    pub fn from_pose(pose: &Pose) -> Self {
        HalfPlane {
            anchor: pose.position(),
            normal: pose.heading_vec(),
        }
    }

    /// Half-plane behind a pose: used after a reverse maneuver, when the
    /// feasible area flips to the back side.
    pub fn from_pose_reversed(pose: &Pose) -> Self {
        let (nx, ny) = pose.heading_vec();
        HalfPlane {
            anchor: pose.position(),
            normal: (-nx, -ny),
        }
    }

    /// Boundary-inclusive membership test.
    pub fn contains(&self, p: Point) -> bool {
        (p.x - self.anchor.x) * self.normal.0 + (p.y - self.anchor.y) * self.normal.1 >= 0.0
    }
}

/// How many half-planes the feasible region retains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneWindow {
    /// Keep the planes of the last `n` departed waypoints (n >= 1).
    Fixed(usize),
    /// Keep every plane since the episode start (or since the last reset).
    AllHistory,
}

/// Intersection of the retained forward half-planes. The plane of the
/// *current* waypoint is implicit: any candidate in the forward semicircle
/// satisfies it, so only the planes of previously departed waypoints are
/// stored. Membership in the empty region is trivially true.
#[derive(Debug, Clone)]
pub struct FeasibleRegion {
    planes: VecDeque<HalfPlane>,
    window: PlaneWindow,
}

impl FeasibleRegion {
    pub fn new(window: PlaneWindow) -> Self {
        if let PlaneWindow::Fixed(n) = window {
            assert!(n >= 1, "plane window must retain at least one plane");
        }
        FeasibleRegion {
            planes: VecDeque::new(),
            window,
        }
    }

    pub fn window(&self) -> PlaneWindow {
        self.window
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn planes(&self) -> impl Iterator<Item = &HalfPlane> {
        self.planes.iter()
    }

    /// Retain the newest planes only, up to the window size.
    pub fn push(&mut self, plane: HalfPlane) {
        self.planes.push_back(plane);
        if let PlaneWindow::Fixed(n) = self.window {
            while self.planes.len() > n {
                self.planes.pop_front();
            }
        }
    }

    /// Drop every retained plane (the planner does this before reversing).
    pub fn clear(&mut self) {
        self.planes.clear();
    }

    /// Conjunction of the member half-plane tests.
    pub fn contains(&self, p: Point) -> bool {
        self.planes.iter().all(|h| h.contains(p))
    }
}

/// True iff the candidate next waypoint (the pose advanced `step_distance`
/// along `candidate_heading_deg`) lies in every retained half-plane.
pub fn intersect_forward(
    region: &FeasibleRegion,
    candidate_heading_deg: f64,
    pose: &Pose,
    step_distance: f64,
) -> bool {
    let (dx, dy) = unit_vec_deg(candidate_heading_deg);
    region.contains(Point::new(
        pose.x + step_distance * dx,
        pose.y + step_distance * dy,
    ))
}

/// One allowable angular region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    /// Scan heading the bearings are relative to, degrees `[0, 360)`.
    heading_deg: f64,
    lo_bearing_deg: f64,
    hi_bearing_deg: f64,
    lo_clear: bool,
    hi_clear: bool,
    clearance_ok: bool,
}

impl Gap {
    /// Lower boundary in the world frame, normalized to `[0, 360)`.
    pub fn lo_deg(&self) -> f64 {
        normalize_deg(self.heading_deg + self.lo_bearing_deg)
    }

    /// Upper boundary in the world frame. Always `lo_deg() + width_deg()`,
    /// so `lo < hi` even when the interval straddles 0/360.
    pub fn hi_deg(&self) -> f64 {
        self.lo_deg() + self.width_deg()
    }

    pub fn width_deg(&self) -> f64 {
        self.hi_bearing_deg - self.lo_bearing_deg
    }

    pub fn lo_bearing_deg(&self) -> f64 {
        self.lo_bearing_deg
    }

    pub fn hi_bearing_deg(&self) -> f64 {
        self.hi_bearing_deg
    }

    /// The dichotomous (bisector) heading of the gap in the world frame.
    /// Computed in bearing space: for the full semicircle this reproduces the
    /// scan heading exactly.
    pub fn bisector_deg(&self) -> f64 {
        normalize_deg(self.heading_deg + (self.lo_bearing_deg + self.hi_bearing_deg) / 2.0)
    }

    /// Whether the gap admits a disc of the robot's radius at the waypoint
    /// step distance.
    pub fn clearance_ok(&self) -> bool {
        self.clearance_ok
    }

    /// True when the world-frame heading lies strictly inside the gap.
    pub fn contains_heading(&self, heading_deg: f64) -> bool {
        let rel = normalize_deg(heading_deg - self.heading_deg);
        let rel = if rel > 180.0 { rel - 360.0 } else { rel };
        rel > self.lo_bearing_deg && rel < self.hi_bearing_deg
    }
}

/// Heading selection policy over a gap set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadingPolicy {
    /// Widest qualifying gap: farthest from the bounding obstacles.
    #[default]
    Widest,
    /// Narrowest qualifying gap (the published selection formula, kept for
    /// literal reproduction).
    MinWidth,
    /// First entry of the gap set's stored order.
    FirstSafe,
}

/// Gaps surviving the clearance test, stored in descending order of safety
/// (width first, then least turning from the scan heading, then lower
/// boundary).
#[derive(Debug, Clone)]
pub struct GapSet {
    heading_deg: f64,
    gaps: Vec<Gap>,
}

impl GapSet {
    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    /// Scan heading the set was extracted at.
    pub fn heading_deg(&self) -> f64 {
        self.heading_deg
    }

    /// Gap indices in the order the given policy would try them.
    pub fn ranked(&self, policy: HeadingPolicy) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.gaps.len()).collect();
        match policy {
            HeadingPolicy::Widest | HeadingPolicy::FirstSafe => {} // stored order
            HeadingPolicy::MinWidth => {
                order.sort_by(|&a, &b| {
                    let (ga, gb) = (&self.gaps[a], &self.gaps[b]);
                    ga.width_deg()
                        .total_cmp(&gb.width_deg())
                        .then_with(|| self.turn_cost(ga).total_cmp(&self.turn_cost(gb)))
                        .then_with(|| ga.lo_deg().total_cmp(&gb.lo_deg()))
                });
            }
        }
        order
    }

    fn turn_cost(&self, g: &Gap) -> f64 {
        angular_separation_deg(g.bisector_deg(), self.heading_deg)
    }
}

/// Group contiguous safe bearings into gaps and drop the ones too narrow for
/// the robot.
///
/// A bearing is safe when its range strictly exceeds `obstacle_threshold`
/// (clear rays always qualify). A surviving gap admits the robot when the
/// chord it subtends at `step_distance` is at least the robot's diameter, or
/// when one of its endpoint rays is clear (the bounding obstacle is beyond
/// sensing range). Single-bearing runs have zero width and are discarded.
///
/// An empty result is valid: it means no forward direction is safe.
pub fn extract_gaps(
    scan: &Scan,
    robot_radius: f64,
    step_distance: f64,
    obstacle_threshold: f64,
) -> GapSet {
    debug_assert!(robot_radius > 0.0 && step_distance > 0.0);
    let heading = scan.pose.theta_deg;
    let mut gaps = Vec::new();

    let safe: Vec<bool> = scan
        .rays
        .iter()
        .map(|r| r.range_m > obstacle_threshold)
        .collect();

    let mut i = 0usize;
    while i < safe.len() {
        if !safe[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < safe.len() && safe[i + 1] {
            i += 1;
        }
        let end = i;
        i += 1;
        if end == start {
            continue; // zero-width run
        }
        let lo = scan.rays[start].bearing_deg;
        let hi = scan.rays[end].bearing_deg;
        let lo_clear = scan.rays[start].is_clear();
        let hi_clear = scan.rays[end].is_clear();
        let width = hi - lo;
        let chord = 2.0 * step_distance * (width / 2.0).to_radians().sin();
        let clearance_ok = chord >= 2.0 * robot_radius || lo_clear || hi_clear;
        if !clearance_ok {
            continue;
        }
        gaps.push(Gap {
            heading_deg: heading,
            lo_bearing_deg: lo,
            hi_bearing_deg: hi,
            lo_clear,
            hi_clear,
            clearance_ok,
        });
    }

    // descending order of safety
    let turn = |g: &Gap| angular_separation_deg(g.bisector_deg(), heading);
    gaps.sort_by(|a, b| {
        b.width_deg()
            .total_cmp(&a.width_deg())
            .then_with(|| turn(a).total_cmp(&turn(b)))
            .then_with(|| a.lo_deg().total_cmp(&b.lo_deg()))
    });

    GapSet {
        heading_deg: heading,
        gaps,
    }
}

/// Pick a gap per the policy and return its index in the set together with
/// the bisector heading. `None` when no qualifying gap exists, which triggers
/// the reverse maneuver upstream.
pub fn select_heading(gaps: &GapSet, policy: HeadingPolicy) -> Option<(usize, f64)> {
    let order = gaps.ranked(policy);
    let idx = *order.first()?;
    Some((idx, gaps.gaps[idx].bisector_deg()))
}

/// Debug serialization: one `lo,hi,width,clearance_ok` row per gap.
pub fn gaps_to_csv(set: &GapSet) -> String {
    let mut out = String::new();
    for g in &set.gaps {
        out.push_str(&format!(
            "{},{},{},{}\n",
            g.lo_deg(),
            g.hi_deg(),
            g.width_deg(),
            g.clearance_ok()
        ));
    }
    out
}
