//! Command-line front end for the tether toolkit.
//!
//! Subcommands: `solve` (inverse catenary), `filter` (offline Kalman over
//! a recorded trace), `locate` (tension-based position estimates for a
//! trace) and `sim` (scenario simulation). Exit codes: 0 success, 1
//! domain error, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tethersim_core::sim::RunOutcome;
use tethersim_core::{
    catenary, localization, trace, AnchorPose, End, KalmanConfig, KalmanModel, Point2,
    ScenarioConfig, SolverSettings, TensionVec, TetherProperties,
};

/// Environment variable overriding the default output directory of `sim`.
const OUT_DIR_ENV: &str = "TETHERSIM_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "tethersim",
    about = "Catenary tether modeling, tension estimation and tethered-flight simulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the catenary through two endpoints for a given cable length.
    Solve(SolveArgs),
    /// Re-filter the observed tension columns of a recorded trace.
    Filter(FilterArgs),
    /// Append tension-based position estimates to a filtered trace.
    Locate(LocateArgs),
    /// Run a scenario config and write its trace.
    Sim(SimArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Origin-end abscissa (m).
    x1: f64,
    /// Origin-end height (m).
    y1: f64,
    /// UAV-end abscissa (m).
    x2: f64,
    /// UAV-end height (m).
    y2: f64,
    /// Cable length (m).
    s_total: f64,
    /// Residual tolerance (m).
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Cable weight per length unit (N/m), for the tension report.
    #[arg(long, default_value_t = 0.0478)]
    omega: f64,
}

#[derive(Args)]
struct FilterArgs {
    /// Input trace (CSV).
    input: PathBuf,
    /// Output trace; defaults to `<input>.filtered.csv`.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Process model.
    #[arg(long, default_value = "constant")]
    model: String,
    /// Process noise variance (N^2); defaults per model.
    #[arg(long)]
    q: Option<f64>,
    /// Observation noise variance (N^2).
    #[arg(long, default_value_t = 1e-2)]
    r: f64,
    /// First-derivative weight of the derivative model.
    #[arg(long, default_value_t = 0.978)]
    a: f64,
    /// Second-derivative weight of the derivative model.
    #[arg(long, default_value_t = -0.97, allow_hyphen_values = true)]
    b: f64,
}

#[derive(Args)]
struct LocateArgs {
    /// Input trace with filtered tension columns (CSV).
    input: PathBuf,
    /// Output trace; defaults to `<input>.located.csv`.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Cable weight per length unit (N/m).
    #[arg(long)]
    omega: f64,
    /// Cable length (m).
    #[arg(long)]
    s_total: f64,
    /// Anchor radial coordinate (m).
    #[arg(long, default_value_t = 0.0)]
    anchor_r: f64,
    /// Anchor height (m).
    #[arg(long, default_value_t = 0.0)]
    anchor_z: f64,
}

#[derive(Args)]
struct SimArgs {
    /// Scenario config (TOML).
    config: PathBuf,
    /// Output trace path; defaults to `<name>.csv` in the directory given
    /// by TETHERSIM_OUT_DIR (or the working directory).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Filter(args) => cmd_filter(&args),
        Command::Locate(args) => cmd_locate(&args),
        Command::Sim(args) => cmd_sim(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let settings = SolverSettings {
        tol: args.tol,
        ..SolverSettings::default()
    };
    let tether = TetherProperties::new(args.omega, args.s_total);
    let p1 = Point2::new(args.x1, args.y1);
    let p2 = Point2::new(args.x2, args.y2);
    let params = catenary::solve_from_endpoints(p1, p2, &tether, &settings)?;

    println!("a  = {}", params.a);
    println!("x0 = {}", params.x0);
    println!("C  = {}", params.c);
    println!("s1 = {}", params.s1);
    println!("s2 = {}", params.s2);
    let r1 = (catenary::eval_height(&params, p1.x) - p1.y).abs();
    let r2 = (catenary::eval_height(&params, p2.x) - p2.y).abs();
    let rs = (params.s1 + params.s2 - args.s_total).abs();
    println!("residuals: endpoint1 = {r1:e}, endpoint2 = {r2:e}, length = {rs:e}");
    for (label, side) in [("origin", End::Origin), ("uav", End::Uav)] {
        let t = catenary::end_tensions(&params, &tether, side);
        println!("{label} end: H = {}, Tv = {}, |T| = {}", t.h, t.tv, t.mag);
    }
    Ok(())
}

fn parse_model(name: &str) -> Result<KalmanModel> {
    match name {
        "constant" => Ok(KalmanModel::Constant),
        "derivative" => Ok(KalmanModel::Derivative),
        other => bail!("unknown filter model '{other}' (constant|derivative)"),
    }
}

fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

fn cmd_filter(args: &FilterArgs) -> Result<()> {
    let (meta, mut rows) = trace::read_file(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let model = parse_model(&args.model)?;
    let base = match model {
        KalmanModel::Constant => KalmanConfig::constant(),
        KalmanModel::Derivative => KalmanConfig::derivative(),
    };
    let cfg = KalmanConfig {
        model,
        q_var: args.q.unwrap_or(base.q_var),
        r_var: args.r,
        deriv_a: args.a,
        deriv_b: args.b,
        ..base
    };

    let mut state = tethersim_core::kalman_init(&cfg);
    for row in rows.iter_mut() {
        let obs = TensionVec::new(row.tx_obs, row.ty_obs, row.tz_obs);
        state = tethersim_core::kalman_step(&state, &cfg, &obs);
        let est = state.estimate();
        row.tx_est = est.tx;
        row.ty_est = est.ty;
        row.tz_est = est.tz;
    }

    let raw: Vec<f64> = rows.iter().map(|r| r.tx_obs).collect();
    let filtered: Vec<f64> = rows.iter().map(|r| r.tx_est).collect();
    println!("raw tx variance      = {:e}", variance(&raw));
    println!("filtered tx variance = {:e}", variance(&filtered));

    let output = args
        .output
        .clone()
        .unwrap_or_else(|| args.input.with_extension("filtered.csv"));
    trace::write_file(&output, &meta, &rows)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn cmd_locate(args: &LocateArgs) -> Result<()> {
    let (meta, mut rows) = trace::read_file(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let tether = TetherProperties::new(args.omega, args.s_total);
    let anchor = AnchorPose::new(args.anchor_r, args.anchor_z);

    let mut clamp_events = 0usize;
    for row in rows.iter_mut() {
        let est = TensionVec::new(row.tx_est, row.ty_est, row.tz_est);
        let (pos, clamped) = localization::locate_from_tension_flagged(&est, &tether, &anchor)?;
        if clamped {
            clamp_events += 1;
        }
        let (x, y, _) = localization::polar_to_cartesian(&pos);
        row.r_est = pos.r;
        row.z_est = pos.z;
        row.beta_est = pos.beta;
        row.x_est = x;
        row.y_est = y;
    }
    if clamp_events > 0 {
        eprintln!("warning: {clamp_events} rows clamped s2 to the cable length");
    }

    let output = args
        .output
        .clone()
        .unwrap_or_else(|| args.input.with_extension("located.csv"));
    trace::write_file(&output, &meta, &rows)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn default_sim_output(cfg: &ScenarioConfig) -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let stem = if cfg.name.is_empty() {
        "trace".to_string()
    } else {
        cfg.name.clone()
    };
    dir.join(format!("{stem}.csv"))
}

fn cmd_sim(args: &SimArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg = ScenarioConfig::from_toml(&text)?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| default_sim_output(&cfg));

    let run = tethersim_core::run_scenario(&cfg);
    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    trace::write_file(&output, &run.meta, &run.trace)?;
    print_summary(&run.summary, &output);

    if let RunOutcome::TetherTaut { t, chord } = run.outcome {
        bail!("tether taut at t = {t:.3} s (chord {chord:.3} m); partial trace written");
    }
    Ok(())
}

fn print_summary(s: &tethersim_core::Summary, output: &Path) {
    println!("ticks                = {}", s.ticks);
    println!("horizontal est mean  = {:.6} N", s.horizontal_est_mean);
    println!("tension rms error    = {:.6} N", s.tension_rms_err);
    println!(
        "pos est mean |err|   = [{:.4}, {:.4}, {:.4}] m (after {:.0} s)",
        s.pos_err_mean[0], s.pos_err_mean[1], s.pos_err_mean[2], s.transient_skip
    );
    println!("s2 clamp events      = {}", s.clamp_events);
    println!("following            = {}", s.following);
    println!("motors_on            = {}", s.motors_on);
    println!("final altitude       = {:.4} m", s.final_altitude);
    println!("wrote {}", output.display());
}
