//! Command-line front end: run episodes, batches, renders and selfchecks.
//!
//! Exit codes are a stable contract: 0 success, 1 usage or i/o error,
//! 2 exploration dead-end (no safe heading), 3 selfcheck failure.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gapex::episode::{
    run_episode_full, write_atomic, EpisodeConfig, EpisodeReport, HaltReason, Strategy,
};
use gapex::gaps::{HeadingPolicy, PlaneWindow};
use gapex::grid::CoverageLedger;
use gapex::lidar::acquire_scan;
use gapex::planner::PlannerConfig;
use gapex::pose::Pose;
use gapex::render::render_episode;
use gapex::selfcheck::{run_selfcheck, Fault};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_DEAD_END: u8 = 2;
const EXIT_SELFCHECK: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gapex",
    version,
    about = "Deterministic 2D indoor exploration simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one exploration episode and print its report summary
    Run(RunArgs),
    /// Run every (map, seed) pair and write per-episode artifacts
    Batch(BatchArgs),
    /// Re-render a recorded trace on its map to a PPM image
    Render(RenderArgs),
    /// Run the embedded oracle comparisons and report pass/fail
    Selfcheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    /// Widest qualifying gap
    Widest,
    /// Narrowest qualifying gap (literal published selection rule)
    #[value(name = "paper-min")]
    MinWidth,
    /// First gap in stored safety order
    FirstSafe,
}

impl From<PolicyArg> for HeadingPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Widest => HeadingPolicy::Widest,
            PolicyArg::MinWidth => HeadingPolicy::MinWidth,
            PolicyArg::FirstSafe => HeadingPolicy::FirstSafe,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Gap,
    Frontier,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Gap => Strategy::Gap,
            StrategyArg::Frontier => Strategy::Frontier,
        }
    }
}

fn parse_pose(s: &str) -> Result<Pose, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected X,Y,THETA_DEG, got `{s}`"));
    }
    let num = |t: &str, what: &str| -> Result<f64, String> {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad {what} `{t}` in `{s}`"))
    };
    Ok(Pose::new(
        num(parts[0], "x")?,
        num(parts[1], "y")?,
        num(parts[2], "theta")?,
    ))
}

/// Planner and sensor flags shared by `run`, `batch` and `render`. Explicit
/// units in names keep the degree/meter mix honest. Unset flags fall back to
/// the config file, then to built-in defaults.
#[derive(Args, Clone)]
struct SharedArgs {
    /// Lidar maximum range, meters
    #[arg(long = "lidar-range-m")]
    lidar_range_m: Option<f64>,
    /// Waypoint step distance, meters [default: half the lidar range]
    #[arg(long = "d-tilde-m")]
    d_tilde_m: Option<f64>,
    /// Robot disc radius, meters
    #[arg(long = "radius-m")]
    radius_m: Option<f64>,
    /// Range below which a bearing counts as blocked, meters
    /// [default: the lidar range, i.e. any detection blocks]
    #[arg(long = "obstacle-threshold-m")]
    obstacle_threshold_m: Option<f64>,
    /// Orientation-similarity cosine threshold; 1.0 disables the rule
    #[arg(long = "a-r-cos")]
    a_r_cos: Option<f64>,
    /// Half-plane window size; 0 keeps the entire history
    #[arg(long = "window-L")]
    window_l: Option<usize>,
    /// Gap selection policy
    #[arg(long)]
    policy: Option<PolicyArg>,
    /// Exploration strategy
    #[arg(long)]
    strategy: Option<StrategyArg>,
    /// Range noise standard deviation, meters
    #[arg(long = "noise-sigma-m")]
    noise_sigma_m: Option<f64>,
    /// Waypoint budget before a forced halt
    #[arg(long = "max-waypoints")]
    max_waypoints: Option<usize>,
    /// Scan angular resolution, degrees (must divide 180)
    #[arg(long = "angular-step-deg")]
    angular_step_deg: Option<f64>,
    /// Revisit proximity, meters [default: half the step distance]
    #[arg(long = "revisit-radius-m")]
    revisit_radius_m: Option<f64>,
    /// Cell size assumed for PGM map files, meters
    #[arg(long = "map-resolution-m")]
    map_resolution_m: Option<f64>,
    /// Plain-text key=value config file; flags override file entries
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Map file (.pgm is binary PGM, anything else the ASCII grid format)
    #[arg(long)]
    map: PathBuf,
    /// Start pose as X,Y,THETA_DEG
    #[arg(long, value_parser = parse_pose)]
    start: Pose,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Waypoint trace CSV output path
    #[arg(long = "trace-out")]
    trace_out: Option<PathBuf>,
    /// Report key:value output path
    #[arg(long = "report-out")]
    report_out: Option<PathBuf>,
    /// PPM render output path
    #[arg(long = "render-out")]
    render_out: Option<PathBuf>,
    #[command(flatten)]
    shared: SharedArgs,
}

#[derive(Args)]
struct BatchArgs {
    /// Map file; repeat the flag for several maps
    #[arg(long, required = true)]
    map: Vec<PathBuf>,
    /// Start pose as X,Y,THETA_DEG, used on every map
    #[arg(long, value_parser = parse_pose)]
    start: Pose,
    /// Seeds to run: a range like 0-9 or a comma list like 0,3,7
    #[arg(long, default_value = "0")]
    seeds: String,
    /// Directory receiving per-episode trace/report/render files
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    #[command(flatten)]
    shared: SharedArgs,
}

#[derive(Args)]
struct RenderArgs {
    /// Map file the trace was recorded on
    #[arg(long)]
    map: PathBuf,
    /// Trace CSV produced by `run --trace-out`
    #[arg(long)]
    trace: PathBuf,
    /// PPM output path
    #[arg(long = "render-out")]
    render_out: PathBuf,
    #[command(flatten)]
    shared: SharedArgs,
}

/// Settings resolved from flags, then config file, then defaults.
struct Resolved {
    planner: PlannerConfig,
    angular_step_deg: f64,
    noise_sigma_m: f64,
    strategy: Strategy,
    pgm_resolution_m: f64,
}

fn read_config_file(path: &Path) -> Result<HashMap<String, String>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                ln + 1
            ));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn resolve(shared: &SharedArgs) -> Result<Resolved, String> {
    let file = match &shared.config {
        Some(path) => read_config_file(path)?,
        None => HashMap::new(),
    };
    let parse_f64 = |key: &str| -> Result<Option<f64>, String> {
        file.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| format!("config {key}: bad number `{v}`"))
            })
            .transpose()
    };
    let parse_usize = |key: &str| -> Result<Option<usize>, String> {
        file.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| format!("config {key}: bad count `{v}`"))
            })
            .transpose()
    };

    let lidar_range = match shared.lidar_range_m {
        Some(v) => v,
        None => parse_f64("lidar-range-m")?.unwrap_or(5.0),
    };
    let step_distance = match shared.d_tilde_m {
        Some(v) => v,
        None => parse_f64("d-tilde-m")?.unwrap_or(0.5 * lidar_range),
    };
    let robot_radius = match shared.radius_m {
        Some(v) => v,
        None => parse_f64("radius-m")?.unwrap_or(0.3),
    };
    let obstacle_threshold = match shared.obstacle_threshold_m {
        Some(v) => v,
        None => parse_f64("obstacle-threshold-m")?.unwrap_or(lidar_range),
    };
    let orientation_cos = match shared.a_r_cos {
        Some(v) => v,
        None => parse_f64("a-r-cos")?.unwrap_or(30f64.to_radians().cos()),
    };
    let window_l = match shared.window_l {
        Some(v) => v,
        None => parse_usize("window-L")?.unwrap_or(3),
    };
    let max_waypoints = match shared.max_waypoints {
        Some(v) => v,
        None => parse_usize("max-waypoints")?.unwrap_or(400),
    };
    let revisit_radius = match shared.revisit_radius_m {
        Some(v) => v,
        None => parse_f64("revisit-radius-m")?.unwrap_or(step_distance / 2.0),
    };
    let policy = match shared.policy {
        Some(p) => p.into(),
        None => match file.get("policy").map(String::as_str) {
            None => HeadingPolicy::Widest,
            Some("widest") => HeadingPolicy::Widest,
            Some("paper-min") => HeadingPolicy::MinWidth,
            Some("first-safe") => HeadingPolicy::FirstSafe,
            Some(other) => return Err(format!("config policy: unknown value `{other}`")),
        },
    };
    let strategy = match shared.strategy {
        Some(s) => s.into(),
        None => match file.get("strategy").map(String::as_str) {
            None => Strategy::Gap,
            Some("gap") => Strategy::Gap,
            Some("frontier") => Strategy::Frontier,
            Some(other) => return Err(format!("config strategy: unknown value `{other}`")),
        },
    };
    let resolved = Resolved {
        planner: PlannerConfig {
            step_distance,
            lidar_range,
            robot_radius,
            obstacle_threshold,
            orientation_cos_threshold: orientation_cos,
            window: if window_l == 0 {
                PlaneWindow::AllHistory
            } else {
                PlaneWindow::Fixed(window_l)
            },
            policy,
            max_waypoints,
            revisit_radius,
        },
        angular_step_deg: match shared.angular_step_deg {
            Some(v) => v,
            None => parse_f64("angular-step-deg")?.unwrap_or(1.0),
        },
        noise_sigma_m: match shared.noise_sigma_m {
            Some(v) => v,
            None => parse_f64("noise-sigma-m")?.unwrap_or(0.0),
        },
        strategy,
        pgm_resolution_m: match shared.map_resolution_m {
            Some(v) => v,
            None => parse_f64("map-resolution-m")?.unwrap_or(0.05),
        },
    };
    resolved.planner.validate()?;
    Ok(resolved)
}

fn apply(cfg: &mut EpisodeConfig, resolved: &Resolved) {
    cfg.planner = resolved.planner;
    cfg.angular_step_deg = resolved.angular_step_deg;
    cfg.noise_sigma_m = resolved.noise_sigma_m;
    cfg.strategy = resolved.strategy;
    cfg.pgm_resolution_m = resolved.pgm_resolution_m;
}

fn summary_line(cfg: &EpisodeConfig, report: &EpisodeReport) -> String {
    format!(
        "map={} strategy={} seed={} waypoints={} path_m={:.3} coverage={:.4} reverses={} halt={} wall_s={:.3}",
        cfg.map_path.display(),
        cfg.strategy.as_str(),
        cfg.seed,
        report.waypoints,
        report.path_length_m,
        report.final_coverage(),
        report.reverse_count,
        report.halt.as_str(),
        report.wall_seconds
    )
}

fn cmd_run(args: &RunArgs) -> u8 {
    let resolved = match resolve(&args.shared) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut cfg = EpisodeConfig::new(&args.map, args.start);
    apply(&mut cfg, &resolved);
    cfg.seed = args.seed.unwrap_or(0);
    cfg.trace_out = args.trace_out.clone();
    cfg.report_out = args.report_out.clone();
    cfg.render_out = args.render_out.clone();

    match run_episode_full(&cfg) {
        Ok(outcome) => {
            println!("{}", summary_line(&cfg, &outcome.report));
            if outcome.report.halt == HaltReason::NoSafeHeading {
                EXIT_DEAD_END
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>, String> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once('-') {
        let lo: u64 = a.trim().parse().map_err(|_| format!("bad seed `{a}`"))?;
        let hi: u64 = b.trim().parse().map_err(|_| format!("bad seed `{b}`"))?;
        if hi < lo {
            return Err(format!("empty seed range `{spec}`"));
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse().map_err(|_| format!("bad seed `{s}`")))
        .collect()
}

fn cmd_batch(args: &BatchArgs) -> u8 {
    let resolved = match resolve(&args.shared) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let seeds = match parse_seeds(&args.seeds) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut cfgs = Vec::new();
    for map in &args.map {
        let stem = map
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "map".into());
        for &seed in &seeds {
            let mut cfg = EpisodeConfig::new(map, args.start);
            apply(&mut cfg, &resolved);
            cfg.seed = seed;
            let base = args.out_dir.join(format!("{stem}_s{seed}"));
            cfg.trace_out = Some(base.with_extension("trace.csv"));
            cfg.report_out = Some(base.with_extension("report.txt"));
            cfg.render_out = Some(base.with_extension("ppm"));
            cfgs.push(cfg);
        }
    }

    let results = gapex::episode::run_batch(&cfgs);
    let mut failures = 0usize;
    for (cfg, result) in cfgs.iter().zip(results.iter()) {
        match result {
            Ok(report) => println!("{}", summary_line(cfg, report)),
            Err(e) => {
                eprintln!("error: {}: {e}", cfg.map_path.display());
                failures += 1;
            }
        }
    }
    if failures > 0 {
        EXIT_USAGE
    } else {
        EXIT_OK
    }
}

/// Replay a trace's waypoints on the map, re-acquiring scans to rebuild the
/// coverage state, then render. Sensor flags should match the original run.
fn cmd_render(args: &RenderArgs) -> u8 {
    let resolved = match resolve(&args.shared) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let grid = match gapex::episode::load_map_file(&args.map, resolved.pgm_resolution_m) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = match fs::read_to_string(&args.trace) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.trace.display());
            return EXIT_USAGE;
        }
    };
    let mut waypoints: Vec<Pose> = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("sample,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            eprintln!("error: malformed trace row `{line}`");
            return EXIT_USAGE;
        }
        if fields[4] == "HALT" {
            continue; // terminator repeats the final pose
        }
        let coords: Result<Vec<f64>, _> = fields[1..4].iter().map(|f| f.parse::<f64>()).collect();
        match coords {
            Ok(c) => waypoints.push(Pose::new(c[0], c[1], c[2])),
            Err(_) => {
                eprintln!("error: malformed trace row `{line}`");
                return EXIT_USAGE;
            }
        }
    }

    let mut ledger = CoverageLedger::new(grid.cell_count());
    for pose in &waypoints {
        match acquire_scan(
            &grid,
            pose,
            resolved.planner.lidar_range,
            resolved.angular_step_deg,
        ) {
            Ok(scan) => ledger.mark_cells(&grid, &scan.covered),
            Err(e) => {
                eprintln!("error: trace pose {pose} does not fit the map: {e}");
                return EXIT_USAGE;
            }
        }
    }
    let bytes = render_episode(&grid, &ledger, &waypoints);
    if let Err(e) = write_atomic(&args.render_out, &bytes) {
        eprintln!("error: cannot write {}: {e}", args.render_out.display());
        return EXIT_USAGE;
    }
    println!(
        "rendered {} waypoints to {}",
        waypoints.len(),
        args.render_out.display()
    );
    EXIT_OK
}

fn cmd_selfcheck() -> u8 {
    // fault injection hook for validating the selfcheck harness itself
    let fault = match std::env::var("GAPEX_SELFCHECK_FAULT").ok().as_deref() {
        Some("gap-grouping") => Some(Fault::GapGrouping),
        _ => None,
    };
    let reports = run_selfcheck(fault);
    let mut all_ok = true;
    for r in &reports {
        println!(
            "check {}: {} ({})",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
        all_ok &= r.passed;
    }
    if all_ok {
        EXIT_OK
    } else {
        EXIT_SELFCHECK
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match &cli.cmd {
        Command::Run(args) => cmd_run(args),
        Command::Batch(args) => cmd_batch(args),
        Command::Render(args) => cmd_render(args),
        Command::Selfcheck => cmd_selfcheck(),
    };
    ExitCode::from(code)
}
