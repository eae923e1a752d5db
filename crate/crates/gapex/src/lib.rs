//! Deterministic 2D indoor exploration engine.
//!
//! A simulated circular robot explores a static occupancy grid with a
//! forward-facing semicircular range sensor. At each waypoint it extracts the
//! allowable angular regions (gaps) from the scan, steers toward the bisector
//! of the safest gap that survives half-plane, clearance and revisit checks,
//! and advances a constant step. When nothing qualifies it backs out by
//! reversing its heading. A greedy nearest-frontier baseline is included for
//! comparison.
//!
//! The `parallel` feature (on by default) traces scan rays, runs batches and
//! evaluates the embedded selfchecks on a rayon pool; disabling it yields a
//! fully sequential build with identical results.

pub mod episode;
pub mod fixtures;
pub mod frontier;
pub mod gaps;
pub mod grid;
pub mod kinematics;
pub mod lidar;
pub mod oracle;
pub mod planner;
pub mod pose;
pub mod render;
pub mod selfcheck;

pub use episode::{
    run_batch, run_episode, run_episode_full, run_episode_on, EpisodeConfig, EpisodeError,
    EpisodeOutcome, EpisodeReport, HaltReason, Strategy,
};
pub use gaps::{
    extract_gaps, gaps_to_csv, intersect_forward, select_heading, FeasibleRegion, Gap, GapSet,
    HalfPlane, HeadingPolicy, PlaneWindow,
};
pub use grid::{
    coverage_fraction, load_map, reachable_free, Cell, CellState, CoverageLedger, MapError,
    MapFormat, OccupancyGrid, ReachableSet,
};
pub use kinematics::{
    execute_move, path_is_clear, unicycle_rates, CollisionReport, KinematicsError, MotionSegment,
};
pub use lidar::{acquire_scan, acquire_scan_seq, add_range_noise, scan_to_csv, Ray, Scan, ScanError};
pub use planner::{
    is_revisit, next_waypoint, orientation_similar, plan_step, Decision, PlannerConfig,
    PlannerState, WaypointLog, WaypointOutcome, WaypointRecord,
};
pub use pose::{normalize_deg, Point, Pose};
pub use render::render_episode;
