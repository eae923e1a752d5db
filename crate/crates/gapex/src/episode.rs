//! Full episode orchestration: scan, plan, move, account coverage, emit
//! artifacts. Also hosts the frontier baseline and the batch fan-out.
//!
//! Episodes are deterministic: a fixed (map, start, config, seed) tuple
//! yields byte-identical trace, report and render files. Wall-clock time is
//! therefore reported on the in-memory report only, never written to disk.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::frontier::nearest_frontier_path;
use crate::grid::{
    coverage_fraction, load_map, reachable_free, CoverageLedger, MapError, MapFormat,
    OccupancyGrid, ReachableSet,
};
use crate::kinematics::{execute_move, MotionSegment, ANGULAR_SPEED_DEG, LINEAR_SPEED};
use crate::lidar::{acquire_scan, add_range_noise, Scan, ScanError};
use crate::planner::{plan_step, Decision, PlannerConfig, PlannerState, WaypointLog, WaypointOutcome};
use crate::pose::Pose;
use crate::render::render_episode;

/// Exploration strategy an episode runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Gap-based safe-heading exploration.
    #[default]
    Gap,
    /// Greedy nearest-frontier baseline.
    Frontier,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Gap => "gap",
            Strategy::Frontier => "frontier",
        }
    }
}

/// Why an episode stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    MaxWaypoints,
    /// No safe heading, not even reversed.
    NoSafeHeading,
    /// Baseline only: no frontier cell remains reachable.
    NoFrontiers,
    /// External interruption.
    UserStop,
}

impl HaltReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            HaltReason::MaxWaypoints => "max-waypoints",
            HaltReason::NoSafeHeading => "no-safe-heading",
            HaltReason::NoFrontiers => "no-frontiers",
            HaltReason::UserStop => "user-stop",
        }
    }
}

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error("invalid planner config: {0}")]
    Config(String),
    #[error("start pose ({x}, {y}) is not traversable for radius {radius}")]
    StartBlocked { x: f64, y: f64, radius: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Everything needed to run one episode.
#[derive(Debug, Clone)]
pub struct EpisodeConfig {
    pub map_path: PathBuf,
    pub start: Pose,
    pub planner: PlannerConfig,
    pub angular_step_deg: f64,
    pub noise_sigma_m: f64,
    pub seed: u64,
    pub strategy: Strategy,
    /// Cell size assumed when the map file is a PGM image.
    pub pgm_resolution_m: f64,
    pub trace_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
    pub render_out: Option<PathBuf>,
}

impl EpisodeConfig {
    pub fn new(map_path: impl Into<PathBuf>, start: Pose) -> Self {
        EpisodeConfig {
            map_path: map_path.into(),
            start,
            planner: PlannerConfig::default(),
            angular_step_deg: crate::lidar::DEFAULT_ANGULAR_STEP_DEG,
            noise_sigma_m: 0.0,
            seed: 0,
            strategy: Strategy::Gap,
            pgm_resolution_m: 0.05,
            trace_out: None,
            report_out: None,
            render_out: None,
        }
    }
}

/// Episode metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeReport {
    pub waypoints: usize,
    pub path_length_m: f64,
    /// Coverage fraction after each waypoint; one entry per waypoint.
    pub coverage_series: Vec<f64>,
    pub reverse_count: usize,
    pub halt: HaltReason,
    pub wall_seconds: f64,
}

impl EpisodeReport {
    pub fn final_coverage(&self) -> f64 {
        self.coverage_series.last().copied().unwrap_or(0.0)
    }
}

/// Full in-memory episode record, for tests and post-hoc verification.
#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub report: EpisodeReport,
    pub log: WaypointLog,
    pub segments: Vec<MotionSegment>,
    pub ledger: CoverageLedger,
    pub grid: OccupancyGrid,
    pub reachable: ReachableSet,
}

/// Load a map file, choosing the format by file extension (`.pgm` is binary
/// PGM, anything else the ASCII grid format).
pub fn load_map_file(path: &Path, pgm_resolution_m: f64) -> Result<OccupancyGrid, EpisodeError> {
    let bytes = fs::read(path)?;
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let format = if is_pgm {
        MapFormat::Pgm {
            resolution: pgm_resolution_m,
        }
    } else {
        MapFormat::Ascii
    };
    Ok(load_map(&bytes, format)?)
}

/// Write a file atomically: temp file in the same directory, then rename.
/// Interrupted runs never leave partial artifacts behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn noise_seed(seed: u64, step: usize) -> u64 {
    seed.wrapping_add((step as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn decision_str(outcome: WaypointOutcome) -> &'static str {
    match outcome {
        WaypointOutcome::Advanced => "ADVANCE",
        WaypointOutcome::Reversed => "REVERSE",
        WaypointOutcome::Skipped => "SKIP",
    }
}

/// Trace CSV: waypoint rows `k,x,y,theta_deg,decision` interleaved with the
/// motion samples of each segment as `sample,x,y,theta_deg` rows, terminated
/// by a `HALT` row repeating the final pose.
fn trace_csv(log: &WaypointLog, segments: &[MotionSegment]) -> String {
    let mut out = String::from("# k,x,y,theta_deg,decision\n");
    for rec in log.records() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            rec.index,
            rec.pose.x,
            rec.pose.y,
            rec.pose.theta_deg,
            decision_str(rec.outcome)
        ));
        if rec.index < segments.len() {
            for s in &segments[rec.index].samples {
                out.push_str(&format!("sample,{},{},{}\n", s.x, s.y, s.theta_deg));
            }
        }
    }
    if let Some(last) = log.last() {
        out.push_str(&format!(
            "{},{},{},{},HALT\n",
            log.len(),
            last.pose.x,
            last.pose.y,
            last.pose.theta_deg
        ));
    }
    out
}

/// Report file: plain-text `key: value` lines. Wall-clock time is excluded
/// on purpose so identical runs produce identical files.
fn report_text(cfg: &EpisodeConfig, report: &EpisodeReport) -> String {
    let series = report
        .coverage_series
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "map: {}\nstrategy: {}\nseed: {}\nwaypoints: {}\npath_length_m: {}\n\
         coverage_final: {}\nreverse_count: {}\nhalt_reason: {}\ncoverage_series: {}\n",
        cfg.map_path.display(),
        cfg.strategy.as_str(),
        cfg.seed,
        report.waypoints,
        report.path_length_m,
        report.final_coverage(),
        report.reverse_count,
        report.halt.as_str(),
        series
    )
}

fn write_artifacts(
    cfg: &EpisodeConfig,
    report: &EpisodeReport,
    log: &WaypointLog,
    segments: &[MotionSegment],
    grid: &OccupancyGrid,
    ledger: &CoverageLedger,
) -> Result<(), EpisodeError> {
    if let Some(path) = &cfg.trace_out {
        write_atomic(path, trace_csv(log, segments).as_bytes())?;
    }
    if let Some(path) = &cfg.report_out {
        write_atomic(path, report_text(cfg, report).as_bytes())?;
    }
    if let Some(path) = &cfg.render_out {
        let poses: Vec<Pose> = log.records().iter().map(|r| r.pose).collect();
        write_atomic(path, &render_episode(grid, ledger, &poses))?;
    }
    Ok(())
}

fn scan_at(
    grid: &OccupancyGrid,
    pose: &Pose,
    cfg: &EpisodeConfig,
    step: usize,
) -> Result<Scan, ScanError> {
    let scan = acquire_scan(grid, pose, cfg.planner.lidar_range, cfg.angular_step_deg)?;
    if cfg.noise_sigma_m > 0.0 {
        Ok(add_range_noise(
            &scan,
            cfg.noise_sigma_m,
            noise_seed(cfg.seed, step),
        ))
    } else {
        Ok(scan)
    }
}

/// Run one full episode and write any requested artifacts.
pub fn run_episode(cfg: &EpisodeConfig) -> Result<EpisodeReport, EpisodeError> {
    run_episode_full(cfg).map(|o| o.report)
}

/// Like [`run_episode`] but returns the full in-memory record.
pub fn run_episode_full(cfg: &EpisodeConfig) -> Result<EpisodeOutcome, EpisodeError> {
    let grid = load_map_file(&cfg.map_path, cfg.pgm_resolution_m)?;
    run_episode_on(cfg, grid)
}

/// Run an episode on an already-loaded grid; `cfg.map_path` is used only for
/// report labeling.
pub fn run_episode_on(
    cfg: &EpisodeConfig,
    grid: OccupancyGrid,
) -> Result<EpisodeOutcome, EpisodeError> {
    cfg.planner.validate().map_err(EpisodeError::Config)?;
    let started = Instant::now();
    if !grid.is_traversable(cfg.start.position(), cfg.planner.robot_radius) {
        return Err(EpisodeError::StartBlocked {
            x: cfg.start.x,
            y: cfg.start.y,
            radius: cfg.planner.robot_radius,
        });
    }
    let start_cell = grid.cell_at(cfg.start.position()).expect("start in bounds");
    let reachable = reachable_free(&grid, start_cell);

    let outcome = match cfg.strategy {
        Strategy::Gap => explore_gap(cfg, grid, reachable)?,
        Strategy::Frontier => explore_frontier(cfg, grid, reachable)?,
    };
    let mut outcome = outcome;
    outcome.report.wall_seconds = started.elapsed().as_secs_f64();
    write_artifacts(
        cfg,
        &outcome.report,
        &outcome.log,
        &outcome.segments,
        &outcome.grid,
        &outcome.ledger,
    )?;
    Ok(outcome)
}

fn explore_gap(
    cfg: &EpisodeConfig,
    grid: OccupancyGrid,
    reachable: ReachableSet,
) -> Result<EpisodeOutcome, EpisodeError> {
    let planner = &cfg.planner;
    let mut state = PlannerState::new(cfg.start, planner);
    let mut ledger = CoverageLedger::new(grid.cell_count());
    let mut segments: Vec<MotionSegment> = Vec::new();
    let mut series: Vec<f64> = Vec::new();
    let mut path_length = 0.0f64;
    let mut consecutive_skips = 0usize;
    let halt;

    loop {
        let step = state.log.len() - 1;
        let scan = scan_at(&grid, &state.pose, cfg, step)?;
        ledger.mark_cells(&grid, &scan.covered);
        series.push(coverage_fraction(&ledger, &grid, &reachable)?);

        if state.log.len() >= planner.max_waypoints {
            halt = HaltReason::MaxWaypoints;
            break;
        }
        let (target, outcome) = match plan_step(&mut state, &scan, &grid, planner) {
            Decision::Halt => {
                halt = HaltReason::NoSafeHeading;
                break;
            }
            Decision::Advance(target) => (target, WaypointOutcome::Advanced),
            Decision::Reverse(target) => (target, WaypointOutcome::Reversed),
        };
        match execute_move(&state.pose, &target, &grid, planner.robot_radius) {
            Ok(seg) => {
                path_length += seg.length();
                segments.push(seg);
                consecutive_skips = 0;
                state.commit(target, outcome);
            }
            Err(_collision) => {
                // the planner pre-checks the swept path, so this only
                // triggers on degenerate direct-API usage
                if consecutive_skips >= 1 {
                    halt = HaltReason::NoSafeHeading;
                    break;
                }
                state.commit(state.pose, WaypointOutcome::Skipped);
                consecutive_skips += 1;
            }
        }
    }

    let reverse_count = state
        .log
        .records()
        .iter()
        .filter(|r| r.outcome == WaypointOutcome::Reversed)
        .count();
    let report = EpisodeReport {
        waypoints: state.log.len(),
        path_length_m: path_length,
        coverage_series: series,
        reverse_count,
        halt,
        wall_seconds: 0.0,
    };
    Ok(EpisodeOutcome {
        report,
        log: state.log,
        segments,
        ledger,
        grid,
        reachable,
    })
}

fn explore_frontier(
    cfg: &EpisodeConfig,
    grid: OccupancyGrid,
    reachable: ReachableSet,
) -> Result<EpisodeOutcome, EpisodeError> {
    let planner = &cfg.planner;
    let mut ledger = CoverageLedger::new(grid.cell_count());
    let mut log = WaypointLog::new(planner.revisit_radius, planner.orientation_cos_threshold);
    let mut segments: Vec<MotionSegment> = Vec::new();
    let mut series: Vec<f64> = Vec::new();
    let mut path_length = 0.0f64;
    let mut pose = cfg.start;
    log.push(pose, WaypointOutcome::Advanced);
    let halt;

    loop {
        let step = log.len() - 1;
        let scan = scan_at(&grid, &pose, cfg, step)?;
        ledger.mark_cells(&grid, &scan.covered);
        if let Some(cell) = grid.cell_at(pose.position()) {
            ledger.mark(grid.index(cell));
        }
        series.push(coverage_fraction(&ledger, &grid, &reachable)?);

        if log.len() >= planner.max_waypoints {
            halt = HaltReason::MaxWaypoints;
            break;
        }
        let from = grid.cell_at(pose.position()).expect("pose in bounds");
        let Some(path) = nearest_frontier_path(&grid, &ledger, from) else {
            halt = HaltReason::NoFrontiers;
            break;
        };
        // walk the cell path, facing the direction of the final step
        let mut facing = pose.theta_deg;
        let mut samples: Vec<Pose> = Vec::with_capacity(path.len());
        samples.push(pose);
        for pair in path.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            facing = match (b.x as i64 - a.x as i64, b.y as i64 - a.y as i64) {
                (1, 0) => 0.0,
                (0, 1) => 90.0,
                (-1, 0) => 180.0,
                (0, -1) => 270.0,
                _ => facing,
            };
            let center = grid.cell_center(b);
            ledger.mark(grid.index(b));
            samples.push(Pose::new(center.x, center.y, facing));
            path_length += grid.resolution();
        }
        let target = *samples.last().unwrap();
        segments.push(MotionSegment {
            start: pose,
            end: target,
            samples,
            v: LINEAR_SPEED,
            omega: ANGULAR_SPEED_DEG,
        });
        pose = target;
        log.push(pose, WaypointOutcome::Advanced);
    }

    let report = EpisodeReport {
        waypoints: log.len(),
        path_length_m: path_length,
        coverage_series: series,
        reverse_count: 0,
        halt,
        wall_seconds: 0.0,
    };
    Ok(EpisodeOutcome {
        report,
        log,
        segments,
        ledger,
        grid,
        reachable,
    })
}

/// Run a batch of episodes, fanning out across worker threads when the
/// `parallel` feature is enabled. Output paths must be per-episode; results
/// come back in input order either way.
pub fn run_batch(cfgs: &[EpisodeConfig]) -> Vec<Result<EpisodeReport, EpisodeError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cfgs.par_iter().map(run_episode).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cfgs.iter().map(run_episode).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn write_fixture(dir: &Path, name: &str, content: &str) -> PathBuf {
        let path = dir.join(name);
        fs::write(&path, content).unwrap();
        path
    }

    fn small_cfg(map: PathBuf, start: Pose) -> EpisodeConfig {
        let mut cfg = EpisodeConfig::new(map, start);
        cfg.planner.step_distance = 1.0;
        cfg.planner.revisit_radius = 0.5;
        cfg.planner.max_waypoints = 30;
        cfg
    }

    #[test]
    fn empty_map_runs_straight_until_the_boundary_region() {
        let dir = tempfile::tempdir().unwrap();
        let map = write_fixture(dir.path(), "empty.grid", fixtures::EMPTY);
        let mut cfg = small_cfg(map, Pose::new(2.0, 10.0, 0.0));
        cfg.planner.max_waypoints = 12;
        let out = run_episode_full(&cfg).unwrap();
        assert_eq!(out.report.waypoints, 12);
        assert_eq!(out.report.halt, HaltReason::MaxWaypoints);
        for rec in out.log.records() {
            assert_eq!(rec.pose.theta_deg, 0.0);
            assert!((rec.pose.y - 10.0).abs() < 1e-9);
        }
        assert_eq!(out.report.reverse_count, 0);
    }

    #[test]
    fn coverage_series_is_monotone_and_matches_waypoints() {
        let dir = tempfile::tempdir().unwrap();
        let map = write_fixture(dir.path(), "pillars.grid", fixtures::PILLARS);
        let cfg = small_cfg(map, Pose::new(2.0, 2.0, 45.0));
        let out = run_episode_full(&cfg).unwrap();
        assert_eq!(out.report.coverage_series.len(), out.report.waypoints);
        for w in out.report.coverage_series.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn start_blocked_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let map = write_fixture(dir.path(), "pillars.grid", fixtures::PILLARS);
        let cfg = small_cfg(map, Pose::new(3.5, 3.5, 0.0)); // inside a block
        assert!(matches!(
            run_episode(&cfg),
            Err(EpisodeError::StartBlocked { .. })
        ));
    }

    #[test]
    fn trace_and_report_written_atomically_with_halt_row() {
        let dir = tempfile::tempdir().unwrap();
        let map = write_fixture(dir.path(), "empty.grid", fixtures::EMPTY);
        let mut cfg = small_cfg(map, Pose::new(10.0, 10.0, 90.0));
        cfg.planner.max_waypoints = 3;
        cfg.trace_out = Some(dir.path().join("trace.csv"));
        cfg.report_out = Some(dir.path().join("report.txt"));
        cfg.render_out = Some(dir.path().join("render.ppm"));
        let report = run_episode(&cfg).unwrap();

        let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        let lines: Vec<&str> = trace.lines().collect();
        assert_eq!(lines[0], "# k,x,y,theta_deg,decision");
        assert!(lines[1].starts_with("0,10,10,90,ADVANCE"));
        assert!(lines.last().unwrap().ends_with(",HALT"));
        let waypoint_rows = lines
            .iter()
            .filter(|l| !l.starts_with('#') && !l.starts_with("sample"))
            .count();
        assert_eq!(waypoint_rows, report.waypoints + 1); // + HALT row

        let rep = fs::read_to_string(dir.path().join("report.txt")).unwrap();
        assert!(rep.contains("strategy: gap"));
        assert!(rep.contains("halt_reason: max-waypoints"));
        assert!(!rep.contains("wall"));
        assert!(fs::read(dir.path().join("render.ppm"))
            .unwrap()
            .starts_with(b"P6\n"));
        assert!(!dir.path().join("trace.csv.tmp").exists());
    }

    #[test]
    fn frontier_on_empty_map_reaches_full_coverage() {
        let dir = tempfile::tempdir().unwrap();
        // a small open map keeps this fast
        let mut text = String::from("40 40 0.25\n");
        for _ in 0..40 {
            text.push_str(&".".repeat(40));
            text.push('\n');
        }
        let map = write_fixture(dir.path(), "open.grid", &text);
        let mut cfg = EpisodeConfig::new(map, Pose::new(5.0, 5.0, 0.0));
        cfg.strategy = Strategy::Frontier;
        cfg.planner.max_waypoints = 4000;
        let report = run_episode(&cfg).unwrap();
        assert_eq!(report.halt, HaltReason::NoFrontiers);
        assert_eq!(report.final_coverage(), 1.0);
    }

    #[test]
    fn frontier_ignores_walled_off_room() {
        let dir = tempfile::tempdir().unwrap();
        let map = write_fixture(dir.path(), "walled.grid", fixtures::WALLED_OFF);
        let mut cfg = EpisodeConfig::new(map, Pose::new(3.0, 3.0, 0.0));
        cfg.strategy = Strategy::Frontier;
        cfg.planner.max_waypoints = 20000;
        let out = run_episode_full(&cfg).unwrap();
        assert_eq!(out.report.halt, HaltReason::NoFrontiers);
        assert_eq!(out.report.final_coverage(), 1.0);
        // sealed room excluded from the denominator but not all of the map
        assert!(out.reachable.count() < out.grid.free_count());
    }

    #[test]
    fn batch_runs_all_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let map = write_fixture(dir.path(), "empty.grid", fixtures::EMPTY);
        let cfgs: Vec<EpisodeConfig> = (0..4)
            .map(|seed| {
                let mut c = small_cfg(map.clone(), Pose::new(10.0, 10.0, 45.0));
                c.planner.max_waypoints = 5;
                c.seed = seed;
                c
            })
            .collect();
        let results = run_batch(&cfgs);
        assert_eq!(results.len(), 4);
        assert!(results.iter().all(|r| r.is_ok()));
    }
}
