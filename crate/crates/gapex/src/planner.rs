//! Waypoint planner: gap-ordered heading search, waypoint memory with the
//! orientation-similarity revisit rule, and the reverse-navigation fallback.
//!
//! One planner step tries the scan's gaps in policy order; a gap is accepted
//! when its candidate waypoint lies in the retained forward half-planes, the
//! straight path to it is clear for the robot disc, and it is not a
//! same-orientation revisit. If nothing is accepted the half-plane history is
//! dropped and the search repeats; if that also fails the robot reverses.

use crate::gaps::{extract_gaps, intersect_forward, FeasibleRegion, HalfPlane, HeadingPolicy, PlaneWindow};
use crate::grid::OccupancyGrid;
use crate::kinematics::path_is_clear;
use crate::lidar::Scan;
use crate::pose::{normalize_deg, unit_vec_deg, Pose};

/// How a waypoint entered the log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaypointOutcome {
    Advanced,
    Skipped,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaypointRecord {
    pub index: usize,
    pub pose: Pose,
    pub outcome: WaypointOutcome,
}

/// Append-only record of visited waypoints plus the revisit-rule parameters.
#[derive(Debug, Clone)]
pub struct WaypointLog {
    records: Vec<WaypointRecord>,
    /// Proximity within which a candidate counts as visiting an old waypoint.
    pub revisit_radius: f64,
    /// Orientation-similarity threshold (cosine). 1.0 disables the rule.
    pub orientation_cos_threshold: f64,
}

impl WaypointLog {
    pub fn new(revisit_radius: f64, orientation_cos_threshold: f64) -> Self {
        WaypointLog {
            records: Vec::new(),
            revisit_radius,
            orientation_cos_threshold,
        }
    }

    pub fn push(&mut self, pose: Pose, outcome: WaypointOutcome) {
        self.records.push(WaypointRecord {
            index: self.records.len(),
            pose,
            outcome,
        });
    }

    pub fn records(&self) -> &[WaypointRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&WaypointRecord> {
        self.records.last()
    }
}

/// True iff some recorded waypoint lies within the log's revisit radius of
/// the candidate's position.
pub fn is_revisit(log: &WaypointLog, candidate: &Pose) -> bool {
    log.records
        .iter()
        .any(|r| r.pose.position().distance(candidate.position()) <= log.revisit_radius)
}

/// Orientation-similarity test: headings as unit vectors, similar (and
/// therefore rejected) when their dot product reaches the threshold.
/// A threshold of 1 disables the rule entirely, which is what the reverse
/// maneuver relies on to allow backward passes.
pub fn orientation_similar(theta_a_deg: f64, theta_b_deg: f64, cos_threshold: f64) -> bool {
    debug_assert!((-1.0..=1.0).contains(&cos_threshold));
    if cos_threshold >= 1.0 {
        return false;
    }
    let (ax, ay) = unit_vec_deg(theta_a_deg);
    let (bx, by) = unit_vec_deg(theta_b_deg);
    ax * bx + ay * by >= cos_threshold
}

/// Revisit rule: reject a candidate only when it is close to a recorded
/// waypoint *and* arrives with a similar orientation. Backward passes through
/// old waypoints stay allowed.
pub fn revisit_conflict(log: &WaypointLog, candidate: &Pose, cos_threshold: f64) -> bool {
    if cos_threshold >= 1.0 {
        return false;
    }
    log.records.iter().any(|r| {
        r.pose.position().distance(candidate.position()) <= log.revisit_radius
            && orientation_similar(candidate.theta_deg, r.pose.theta_deg, cos_threshold)
    })
}

/// Planner parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Constant waypoint step distance, meters.
    pub step_distance: f64,
    /// Sensor range, meters.
    pub lidar_range: f64,
    /// Robot disc radius, meters.
    pub robot_radius: f64,
    /// A bearing is unsafe when an obstacle returns within this distance,
    /// meters. At the default (the sensor range) a bearing is safe only when
    /// nothing is detected on it at all, so gaps are the openings of the
    /// space: doors, hallways, unobstructed directions. Lowering it toward
    /// `step_distance + robot_radius` admits bearings with distant returns,
    /// which stops the planner from turning in large rooms.
    pub obstacle_threshold: f64,
    /// Cosine threshold of the orientation-similarity rule.
    pub orientation_cos_threshold: f64,
    /// Half-plane retention window.
    pub window: PlaneWindow,
    pub policy: HeadingPolicy,
    pub max_waypoints: usize,
    pub revisit_radius: f64,
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.step_distance > 0.0) {
            return Err("step distance must be positive".into());
        }
        if !(self.lidar_range > 0.0) {
            return Err("lidar range must be positive".into());
        }
        if !(self.robot_radius > 0.0) {
            return Err("robot radius must be positive".into());
        }
        if !(self.obstacle_threshold > 0.0) {
            return Err("obstacle threshold must be positive".into());
        }
        if !(-1.0..=1.0).contains(&self.orientation_cos_threshold) {
            return Err("orientation threshold must be a cosine in [-1, 1]".into());
        }
        if self.max_waypoints == 0 {
            return Err("max waypoints must be positive".into());
        }
        if let PlaneWindow::Fixed(0) = self.window {
            return Err("half-plane window must retain at least one plane".into());
        }
        if !(self.revisit_radius >= 0.0) {
            return Err("revisit radius must be non-negative".into());
        }
        Ok(())
    }
}

impl Default for PlannerConfig {
    fn default() -> Self {
        let lidar_range = 5.0;
        let step_distance = 0.5 * lidar_range;
        PlannerConfig {
            step_distance,
            lidar_range,
            robot_radius: 0.3,
            obstacle_threshold: lidar_range,
            orientation_cos_threshold: 30f64.to_radians().cos(),
            window: PlaneWindow::Fixed(3),
            policy: HeadingPolicy::Widest,
            max_waypoints: 400,
            revisit_radius: step_distance / 2.0,
        }
    }
}

/// One planner decision. `Halt` is a value, not an error: it means even the
/// reverse candidate is blocked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    Advance(Pose),
    Reverse(Pose),
    Halt,
}

/// Mutable planner state threaded through an episode.
#[derive(Debug, Clone)]
pub struct PlannerState {
    pub pose: Pose,
    pub log: WaypointLog,
    pub region: FeasibleRegion,
    /// Set while backing out of a dead end: from a reverse decision until the
    /// next committed advance, the orientation-similarity rule stays off so
    /// the robot may re-traverse explored ground to reach fresh geometry.
    pub revisit_rule_suspended: bool,
}

impl PlannerState {
    /// Start an episode: the start pose is waypoint 0 and is logged at once.
    pub fn new(start: Pose, cfg: &PlannerConfig) -> Self {
        let mut log = WaypointLog::new(cfg.revisit_radius, cfg.orientation_cos_threshold);
        log.push(start, WaypointOutcome::Advanced);
        PlannerState {
            pose: start,
            log,
            region: FeasibleRegion::new(cfg.window),
            revisit_rule_suspended: false,
        }
    }

    /// Apply a committed move: push the departed waypoint's half-plane
    /// (flipped after a reverse, when the feasible area switches sides),
    /// update the pose and append the log record.
    pub fn commit(&mut self, target: Pose, outcome: WaypointOutcome) {
        match outcome {
            WaypointOutcome::Advanced => {
                self.region.push(HalfPlane::from_pose(&self.pose));
                self.pose = target;
                self.revisit_rule_suspended = false;
            }
            WaypointOutcome::Reversed => {
                self.region.push(HalfPlane::from_pose_reversed(&self.pose));
                self.pose = target;
                self.revisit_rule_suspended = true;
            }
            WaypointOutcome::Skipped => {}
        }
        self.log.push(self.pose, outcome);
    }
}

/// Candidate waypoint at the constant step distance along a heading. The
/// robot arrives oriented along the heading it traveled.
pub fn next_waypoint(pose: &Pose, heading_deg: f64, step_distance: f64) -> Pose {
    debug_assert!(step_distance > 0.0);
    let (dx, dy) = unit_vec_deg(heading_deg);
    Pose::new(
        pose.x + step_distance * dx,
        pose.y + step_distance * dy,
        heading_deg,
    )
}

/// One planning step at the current waypoint, given a scan acquired there.
///
/// Gap candidates must (a) lie in every retained half-plane, (b) be reachable
/// over a clear straight path, and (c) not be a same-orientation revisit.
/// When no gap passes, the half-plane history is cleared and the search runs
/// once more; if it still fails, the step reverses the heading by 180 degrees
/// with the orientation rule disabled. Halt only when even the reverse
/// candidate is blocked.
pub fn plan_step(
    state: &mut PlannerState,
    scan: &Scan,
    grid: &OccupancyGrid,
    cfg: &PlannerConfig,
) -> Decision {
    let set = extract_gaps(
        scan,
        cfg.robot_radius,
        cfg.step_distance,
        cfg.obstacle_threshold,
    );
    let order = set.ranked(cfg.policy);
    let orientation_threshold = if state.revisit_rule_suspended {
        1.0
    } else {
        cfg.orientation_cos_threshold
    };

    for pass in 0..2 {
        if pass == 1 {
            if state.region.is_empty() {
                break; // second pass would repeat the first verbatim
            }
            state.region.clear();
        }
        for &idx in &order {
            let heading = set.gaps()[idx].bisector_deg();
            let candidate = next_waypoint(&state.pose, heading, cfg.step_distance);
            if pass == 0 && !intersect_forward(&state.region, heading, &state.pose, cfg.step_distance)
            {
                continue;
            }
            if !path_is_clear(
                grid,
                state.pose.position(),
                candidate.position(),
                cfg.robot_radius,
            ) {
                continue;
            }
            if revisit_conflict(&state.log, &candidate, orientation_threshold) {
                continue;
            }
            return Decision::Advance(candidate);
        }
    }

    // Reverse: flip the heading, disable the orientation rule for this step.
    state.region.clear();
    let back = normalize_deg(state.pose.theta_deg + 180.0);
    let candidate = next_waypoint(&state.pose, back, cfg.step_distance);
    if path_is_clear(
        grid,
        state.pose.position(),
        candidate.position(),
        cfg.robot_radius,
    ) {
        Decision::Reverse(candidate)
    } else {
        Decision::Halt
    }
}
