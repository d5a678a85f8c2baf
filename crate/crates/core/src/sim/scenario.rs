//! Scenario configuration and the deterministic simulation loop.
//!
//! A scenario is a pure function of (config, seed): dynamics run at a fast
//! fixed rate, sensors/filter/estimator/controller at the control rate,
//! and one trace row is emitted per control tick.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::catenary::{self, End, Point2, SolverSettings, TetherProperties};
use crate::localization::{self, AnchorPose};
use crate::tension::{
    kalman_init, kalman_step, observe_tension, KalmanConfig, KalmanModel, QuadParams, TensionVec,
};
use crate::trace::{TraceMeta, TraceRow};

use super::controller::{
    accel_to_command, cascade_controller, landing_monitor, tension_following_update,
    tension_goal_controller, ControllerConfig, ControllerMode, Gains,
};
use super::dynamics::{step_dynamics, tether_force, QuadState};
use super::sensors::{SensorNoise, SensorSim};
use super::SimError;

/// Time constant of the first-order attitude lag (s).
const ATTITUDE_TAU: f64 = 0.05;

/// One timed pull applied through the tether (world-frame force on the
/// UAV). Replaces hand pulls with a replayable schedule.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
pub struct PullSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub force: [f64; 3],
}

/// Time-ordered, non-overlapping pull schedule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PullProfile {
    pub segments: Vec<PullSegment>,
}

impl PullProfile {
    pub fn force_at(&self, t: f64) -> Vector3<f64> {
        for seg in &self.segments {
            if t >= seg.t_start && t < seg.t_end {
                return Vector3::new(seg.force[0], seg.force[1], seg.force[2]);
            }
        }
        Vector3::zeros()
    }

    fn validate(&self, errors: &mut Vec<String>) {
        let mut prev_end = f64::NEG_INFINITY;
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.t_end <= seg.t_start {
                errors.push(format!("pull[{i}]: t_end must exceed t_start"));
            }
            if seg.t_start < prev_end {
                errors.push(format!("pull[{i}]: overlaps or precedes previous segment"));
            }
            prev_end = seg.t_end;
        }
    }
}

/// Raw scenario file contents. Angles are degrees in the file and are
/// converted to radians on load; everything else is SI.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    name: String,
    duration: f64,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default)]
    rates: RatesSection,
    vehicle: VehicleSection,
    tether: TetherSection,
    #[serde(default)]
    anchor: AnchorSection,
    #[serde(default)]
    noise: NoiseSection,
    #[serde(default)]
    filter: FilterSection,
    controller: ControllerSection,
    initial: InitialSection,
    #[serde(default)]
    pull: Vec<PullSegment>,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RatesSection {
    dynamics_hz: u32,
    control_hz: u32,
}

impl Default for RatesSection {
    fn default() -> Self {
        Self {
            dynamics_hz: 1000,
            control_hz: 100,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct VehicleSection {
    mass: f64,
    #[serde(default = "default_g")]
    g: f64,
    #[serde(default)]
    drag_coeff: f64,
    #[serde(default)]
    f_ext: [f64; 3],
}

fn default_g() -> f64 {
    9.81
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TetherSection {
    omega: f64,
    s_total: f64,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct AnchorSection {
    #[serde(default)]
    r_i: f64,
    #[serde(default)]
    z_i: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct NoiseSection {
    accel_sigma: f64,
    thrust_sigma: f64,
    /// Degrees in the file.
    attitude_sigma_deg: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            accel_sigma: 0.2,
            thrust_sigma: 0.002,
            attitude_sigma_deg: 0.3,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FilterSection {
    #[serde(default)]
    model: KalmanModel,
    q_var: f64,
    r_var: f64,
    #[serde(default = "default_deriv_a")]
    deriv_a: f64,
    #[serde(default = "default_deriv_b")]
    deriv_b: f64,
}

fn default_deriv_a() -> f64 {
    0.978
}

fn default_deriv_b() -> f64 {
    -0.97
}

impl Default for FilterSection {
    fn default() -> Self {
        Self {
            model: KalmanModel::Constant,
            q_var: 1e-6,
            r_var: 1e-2,
            deriv_a: default_deriv_a(),
            deriv_b: default_deriv_b(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ControllerSection {
    #[serde(default)]
    mode: ControllerMode,
    #[serde(default = "default_pull_threshold")]
    pull_threshold: f64,
    #[serde(default = "default_landing_height")]
    landing_height: f64,
    goal_pos: [f64; 3],
    /// Outward horizontal goal tension; computed from `goal_pos` via the
    /// catenary when omitted in tension-goal mode.
    #[serde(default)]
    goal_tension: Option<[f64; 2]>,
    #[serde(default = "default_kp_pos")]
    kp_pos: f64,
    #[serde(default = "default_kd_pos")]
    kd_pos: f64,
    #[serde(default = "default_kp_tension")]
    kp_tension: f64,
    #[serde(default = "default_tilt_max_deg")]
    tilt_max_deg: f64,
    #[serde(default = "default_fp_max")]
    fp_max: f64,
}

fn default_pull_threshold() -> f64 {
    0.05
}

fn default_landing_height() -> f64 {
    0.2
}

fn default_kp_pos() -> f64 {
    30.0
}

fn default_kd_pos() -> f64 {
    9.0
}

fn default_kp_tension() -> f64 {
    40.0
}

fn default_tilt_max_deg() -> f64 {
    20.0
}

fn default_fp_max() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    pos: [f64; 3],
    #[serde(default)]
    vel: [f64; 3],
}

/// Fully validated scenario, radians/SI throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub duration: f64,
    pub seed: u64,
    pub dynamics_hz: u32,
    pub control_hz: u32,
    pub quad: QuadParams,
    pub drag_coeff: f64,
    pub tether: TetherProperties,
    pub anchor: AnchorPose,
    pub noise: SensorNoise,
    pub filter: KalmanConfig,
    pub controller: ControllerConfig,
    pub initial_pos: Vector3<f64>,
    pub initial_vel: Vector3<f64>,
    pub pull: PullProfile,
    /// SHA-256 of the source text this config was parsed from.
    pub config_hash: String,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

impl ScenarioConfig {
    /// Parse and validate a scenario from TOML text.
    // Negated comparisons keep NaN values on the invalid side.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let file: ScenarioFile = toml::from_str(text)?;
        let mut errors = Vec::new();

        if !(file.duration > 0.0) {
            errors.push("duration: must be positive".into());
        }
        if file.rates.control_hz == 0 || file.rates.dynamics_hz == 0 {
            errors.push("rates: dynamics_hz and control_hz must be positive".into());
        } else if !file.rates.dynamics_hz.is_multiple_of(file.rates.control_hz) {
            errors.push("rates: dynamics_hz must be a multiple of control_hz".into());
        }
        if !(file.vehicle.mass > 0.0) {
            errors.push("vehicle.mass: must be positive".into());
        }
        if !(file.vehicle.g > 0.0) {
            errors.push("vehicle.g: must be positive".into());
        }
        if file.vehicle.drag_coeff < 0.0 {
            errors.push("vehicle.drag_coeff: must be non-negative".into());
        }
        if !(file.tether.omega > 0.0) {
            errors.push("tether.omega: must be positive".into());
        }
        if !(file.tether.s_total > 0.0) {
            errors.push("tether.s_total: must be positive".into());
        }
        if file.noise.accel_sigma < 0.0
            || file.noise.thrust_sigma < 0.0
            || file.noise.attitude_sigma_deg < 0.0
        {
            errors.push("noise: sigmas must be non-negative".into());
        }
        if !(file.filter.q_var > 0.0) {
            errors.push("filter.q_var: must be positive".into());
        }
        if !(file.filter.r_var > 0.0) {
            errors.push("filter.r_var: must be positive".into());
        }
        if !(file.controller.pull_threshold > 0.0) {
            errors.push("controller.pull_threshold: must be positive".into());
        }
        if !(file.controller.landing_height > 0.0) {
            errors.push("controller.landing_height: must be positive".into());
        }
        if !(file.controller.kp_pos > 0.0) || !(file.controller.kd_pos > 0.0) {
            errors.push("controller: kp_pos and kd_pos must be positive".into());
        }
        let pull = PullProfile {
            segments: file.pull.clone(),
        };
        pull.validate(&mut errors);

        // Initial position must be reachable by the cable.
        let r0 = file.initial.pos[0].hypot(file.initial.pos[1]);
        let chord0 = (r0 - file.anchor.r_i).hypot(file.initial.pos[2] - file.anchor.z_i);
        if chord0 >= file.tether.s_total {
            errors.push(format!(
                "initial.pos: distance to anchor {chord0:.3} m exceeds tether length"
            ));
        }

        if !errors.is_empty() {
            return Err(ConfigError::Invalid(errors));
        }

        let quad = QuadParams {
            mass: file.vehicle.mass,
            g: file.vehicle.g,
            f_ext: Vector3::from(file.vehicle.f_ext),
        };
        let tether = TetherProperties::new(file.tether.omega, file.tether.s_total);
        let anchor = AnchorPose::new(file.anchor.r_i, file.anchor.z_i);
        let goal_pos = Vector3::from(file.controller.goal_pos);

        // Goal tension for tension-goal mode: explicit, or derived from
        // the goal position through the cable model. The vertical cable
        // weight at the goal always comes from the model (feedforward for
        // the altitude loop).
        let (goal_tension, goal_tv) = match (file.controller.mode, file.controller.goal_tension) {
            (ControllerMode::TensionGoal, explicit) => {
                match goal_tension_for(&goal_pos, &anchor, &tether) {
                    Ok((hx, hy, tv)) => (explicit.map_or((hx, hy), |t| (t[0], t[1])), tv),
                    Err(e) => {
                        return Err(ConfigError::Invalid(vec![format!(
                            "controller.goal_pos: cannot derive goal tension: {e}"
                        )]))
                    }
                }
            }
            (_, Some(t)) => ((t[0], t[1]), 0.0),
            _ => ((0.0, 0.0), 0.0),
        };

        let controller = ControllerConfig {
            mode: file.controller.mode,
            pull_threshold: file.controller.pull_threshold,
            landing_height: file.controller.landing_height,
            gains: Gains {
                kp_pos: file.controller.kp_pos,
                kd_pos: file.controller.kd_pos,
                kp_tension: file.controller.kp_tension,
                tilt_max: file.controller.tilt_max_deg.to_radians(),
                fp_max: file.controller.fp_max,
            },
            goal_pos,
            goal_tension,
            goal_tv,
        };

        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let config_hash = hex_string(&hasher.finalize());

        Ok(Self {
            name: file.name,
            duration: file.duration,
            seed: file.seed,
            dynamics_hz: file.rates.dynamics_hz,
            control_hz: file.rates.control_hz,
            quad,
            drag_coeff: file.vehicle.drag_coeff,
            tether,
            anchor,
            noise: SensorNoise {
                accel_sigma: file.noise.accel_sigma,
                thrust_sigma: file.noise.thrust_sigma,
                attitude_sigma: file.noise.attitude_sigma_deg.to_radians(),
                seed: file.seed,
            },
            filter: KalmanConfig {
                model: file.filter.model,
                q_var: file.filter.q_var,
                r_var: file.filter.r_var,
                deriv_a: file.filter.deriv_a,
                deriv_b: file.filter.deriv_b,
                x0: TensionVec::zero(),
                p0: 1.0,
            },
            controller,
            initial_pos: Vector3::from(file.initial.pos),
            initial_vel: Vector3::from(file.initial.vel),
            pull,
            config_hash,
        })
    }

    /// Override the seed (both filter trace metadata and sensor streams).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.noise.seed = seed;
        self
    }
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = std::fmt::Write::write_fmt(&mut s, format_args!("{b:02x}"));
    }
    s
}

/// Outward horizontal tension components and vertical tension the cable
/// applies at a goal position, resolved through the catenary model.
pub fn goal_tension_for(
    goal_pos: &Vector3<f64>,
    anchor: &AnchorPose,
    tether: &TetherProperties,
) -> Result<(f64, f64, f64), SimError> {
    let r = goal_pos.x.hypot(goal_pos.y);
    let beta = if r > 0.0 {
        goal_pos.y.atan2(goal_pos.x)
    } else {
        0.0
    };
    if (r - anchor.r_i).abs() < 1e-9 {
        let s2 = ((tether.s_total + goal_pos.z - anchor.z_i) / 2.0).clamp(0.0, tether.s_total);
        return Ok((0.0, 0.0, tether.omega * s2));
    }
    let params = catenary::solve_from_endpoints(
        Point2::new(anchor.r_i, anchor.z_i),
        Point2::new(r, goal_pos.z),
        tether,
        &SolverSettings::default(),
    )?;
    let t = catenary::end_tensions(&params, tether, End::Uav);
    Ok((t.h * beta.cos(), t.h * beta.sin(), t.tv))
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Completed,
    /// The cable went taut at `t`; the trace holds the ticks before it.
    TetherTaut {
        t: f64,
        chord: f64,
    },
}

/// Post-run statistics printed by the front end.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub ticks: usize,
    /// Mean of the estimated horizontal tension magnitude (N).
    pub horizontal_est_mean: f64,
    /// RMS of (filtered estimate - true tension) vector norm (N).
    pub tension_rms_err: f64,
    /// Mean absolute position-estimate error per axis after the
    /// transient window (m).
    pub pos_err_mean: [f64; 3],
    /// Transient window excluded from position statistics (s).
    pub transient_skip: f64,
    pub clamp_events: usize,
    pub following: bool,
    pub motors_on: bool,
    pub final_altitude: f64,
}

/// Full result of a scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub meta: TraceMeta,
    pub trace: Vec<TraceRow>,
    pub summary: Summary,
    pub outcome: RunOutcome,
}

/// Seconds excluded from position-error statistics.
const TRANSIENT_SKIP: f64 = 5.0;

/// Run one scenario to completion (or taut abort), emitting one trace row
/// per control tick. Deterministic for a fixed (config, seed).
pub fn run_scenario(cfg: &ScenarioConfig) -> SimRun {
    let quad = cfg.quad;
    let ctrl_dt = 1.0 / cfg.control_hz as f64;
    let dyn_dt = 1.0 / cfg.dynamics_hz as f64;
    let substeps = (cfg.dynamics_hz / cfg.control_hz) as usize;
    let n_ticks = (cfg.duration * cfg.control_hz as f64).round() as usize;

    let mut sensors = SensorSim::new(cfg.noise);
    let mut filter_state = kalman_init(&cfg.filter);
    let mut state = QuadState::hovering_at(cfg.initial_pos, &quad);
    state.vel = cfg.initial_vel;

    let mut goal = cfg.controller.goal_pos;
    let mut following = false;
    let mut clamp_events = 0usize;
    let mut trace = Vec::with_capacity(n_ticks);
    let mut outcome = RunOutcome::Completed;

    'ticks: for k in 0..n_ticks {
        let t = k as f64 * ctrl_dt;
        let pull = cfg.pull.force_at(t);

        let tether_f = match tether_force(&state.pos, &cfg.anchor, &cfg.tether) {
            Ok(f) => f,
            Err(SimError::TetherTaut { chord, .. }) => {
                outcome = RunOutcome::TetherTaut { t, chord };
                break 'ticks;
            }
            Err(_) => {
                outcome = RunOutcome::TetherTaut { t, chord: f64::NAN };
                break 'ticks;
            }
        };
        // The estimator sees every force transmitted through the cable.
        let truth = TensionVec::from_vector(tether_f.as_vector() + pull);

        let sample = sensors.sample_sensors(t, &state, &tether_f, &pull, cfg.drag_coeff, &quad);
        let obs = observe_tension(&sample, &quad);
        filter_state = kalman_step(&filter_state, &cfg.filter, &obs);
        let est = filter_state.estimate();

        let (pos_est, clamped) =
            localization::locate_from_tension_flagged(&est, &cfg.tether, &cfg.anchor)
                .expect("clamped arc length is always within bounds");
        if clamped {
            clamp_events += 1;
        }
        let (x_est, y_est, _) = localization::polar_to_cartesian(&pos_est);

        // Behavior layer.
        let (att_cmd, fp_cmd) = match cfg.controller.mode {
            ControllerMode::PositionHold => {
                cascade_controller(&state, &goal, &cfg.controller.gains, &quad)
            }
            ControllerMode::TensionFollowing => {
                let (new_goal, new_following) =
                    tension_following_update(&goal, &est, &state.pos, following, &cfg.controller);
                goal = new_goal;
                following = new_following;
                if state.motors_on && landing_monitor(following, state.pos.z, &cfg.controller) {
                    state.motors_on = false;
                }
                cascade_controller(&state, &goal, &cfg.controller.gains, &quad)
            }
            ControllerMode::TensionGoal => {
                // Feed the expected cable reaction at the goal forward so
                // the proportional loops settle on the goal tension itself,
                // then damp with the velocity term.
                let feedforward = Vector3::new(
                    cfg.controller.goal_tension.0,
                    cfg.controller.goal_tension.1,
                    cfg.controller.goal_tv,
                ) / quad.mass;
                let accel = tension_goal_controller(
                    &est,
                    cfg.controller.goal_tension,
                    state.pos.z,
                    cfg.controller.goal_pos.z,
                    &cfg.controller.gains,
                ) + feedforward
                    - cfg.controller.gains.kd_pos * state.vel;
                accel_to_command(&accel, state.att.psi, &cfg.controller.gains, &quad)
            }
        };

        trace.push(TraceRow {
            t,
            x: state.pos.x,
            y: state.pos.y,
            z: state.pos.z,
            tx_true: truth.tx,
            ty_true: truth.ty,
            tz_true: truth.tz,
            tx_obs: obs.tx,
            ty_obs: obs.ty,
            tz_obs: obs.tz,
            tx_est: est.tx,
            ty_est: est.ty,
            tz_est: est.tz,
            r_est: pos_est.r,
            z_est: pos_est.z,
            beta_est: pos_est.beta,
            x_est,
            y_est,
            goal_x: goal.x,
            goal_y: goal.y,
            goal_z: goal.z,
            following,
            motors_on: state.motors_on,
        });

        // Advance truth dynamics to the next tick.
        for sub in 0..substeps {
            let t_sub = t + sub as f64 * dyn_dt;
            if state.motors_on {
                let alpha = dyn_dt / ATTITUDE_TAU;
                state.att.phi += (att_cmd.phi - state.att.phi) * alpha;
                state.att.theta += (att_cmd.theta - state.att.theta) * alpha;
                state.att.psi += (att_cmd.psi - state.att.psi) * alpha;
                state.fp = fp_cmd;
            } else {
                state.fp = 0.0;
            }
            let tether_sub = match tether_force(&state.pos, &cfg.anchor, &cfg.tether) {
                Ok(f) => f,
                Err(SimError::TetherTaut { chord, .. }) => {
                    outcome = RunOutcome::TetherTaut { t: t_sub, chord };
                    break 'ticks;
                }
                Err(_) => {
                    outcome = RunOutcome::TetherTaut {
                        t: t_sub,
                        chord: f64::NAN,
                    };
                    break 'ticks;
                }
            };
            let pull_sub = cfg.pull.force_at(t_sub);
            state = step_dynamics(
                &state,
                &tether_sub,
                &pull_sub,
                &quad,
                cfg.drag_coeff,
                dyn_dt,
            );
            // Ground plane: the landing pad grips on contact.
            if state.pos.z < 0.0 {
                state.pos.z = 0.0;
                state.vel = Vector3::zeros();
            }
        }
    }

    let summary = summarize(&trace, clamp_events, &state, following);
    SimRun {
        meta: TraceMeta {
            seed: cfg.seed,
            config_hash: cfg.config_hash.clone(),
        },
        trace,
        summary,
        outcome,
    }
}

fn summarize(
    trace: &[TraceRow],
    clamp_events: usize,
    final_state: &QuadState,
    following: bool,
) -> Summary {
    let n = trace.len().max(1) as f64;
    let horizontal_est_mean = trace.iter().map(|r| r.tx_est.hypot(r.ty_est)).sum::<f64>() / n;
    let tension_rms_err = (trace
        .iter()
        .map(|r| {
            let dx = r.tx_est - r.tx_true;
            let dy = r.ty_est - r.ty_true;
            let dz = r.tz_est - r.tz_true;
            dx * dx + dy * dy + dz * dz
        })
        .sum::<f64>()
        / n)
        .sqrt();

    let tail: Vec<&TraceRow> = trace.iter().filter(|r| r.t >= TRANSIENT_SKIP).collect();
    let m = tail.len().max(1) as f64;
    let pos_err_mean = [
        tail.iter().map(|r| (r.x_est - r.x).abs()).sum::<f64>() / m,
        tail.iter().map(|r| (r.y_est - r.y).abs()).sum::<f64>() / m,
        tail.iter().map(|r| (r.z_est - r.z).abs()).sum::<f64>() / m,
    ];

    Summary {
        ticks: trace.len(),
        horizontal_est_mean,
        tension_rms_err,
        pos_err_mean,
        transient_skip: TRANSIENT_SKIP,
        clamp_events,
        following,
        motors_on: final_state.motors_on,
        final_altitude: final_state.pos.z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOVER_VERTICAL: &str = r#"
name = "hover_vertical"
duration = 8.0
seed = 7

[vehicle]
mass = 0.033

[tether]
omega = 0.0478
s_total = 1.6

[controller]
goal_pos = [0.0, 0.0, 1.0]

[initial]
pos = [0.0, 0.0, 1.0]
"#;

    #[test]
    fn parses_minimal_scenario() {
        let cfg = ScenarioConfig::from_toml(HOVER_VERTICAL).unwrap();
        assert_eq!(cfg.control_hz, 100);
        assert_eq!(cfg.quad.mass, 0.033);
        assert_eq!(cfg.noise.seed, 7);
        assert!(!cfg.config_hash.is_empty());
    }

    #[test]
    fn validation_lists_every_invalid_field() {
        let bad = r#"
duration = -1.0

[vehicle]
mass = 0.0

[tether]
omega = 0.0
s_total = 1.6

[controller]
goal_pos = [0.0, 0.0, 1.0]
pull_threshold = -0.1

[initial]
pos = [0.0, 0.0, 1.0]
"#;
        match ScenarioConfig::from_toml(bad) {
            Err(ConfigError::Invalid(errors)) => {
                assert!(errors.iter().any(|e| e.starts_with("duration")));
                assert!(errors.iter().any(|e| e.starts_with("vehicle.mass")));
                assert!(errors.iter().any(|e| e.starts_with("tether.omega")));
                assert!(errors
                    .iter()
                    .any(|e| e.starts_with("controller.pull_threshold")));
            }
            other => panic!("expected invalid-config error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unreachable_initial_position() {
        let bad = HOVER_VERTICAL.replace("pos = [0.0, 0.0, 1.0]", "pos = [0.0, 0.0, 1.7]");
        assert!(matches!(
            ScenarioConfig::from_toml(&bad),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn hover_run_is_deterministic() {
        let cfg = ScenarioConfig::from_toml(HOVER_VERTICAL).unwrap();
        let a = run_scenario(&cfg);
        let b = run_scenario(&cfg);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.outcome, RunOutcome::Completed);
        let text_a = crate::trace::to_string(&a.meta, &a.trace);
        let text_b = crate::trace::to_string(&b.meta, &b.trace);
        assert_eq!(text_a, text_b);
    }

    #[test]
    fn different_seed_changes_trace() {
        let cfg = ScenarioConfig::from_toml(HOVER_VERTICAL).unwrap();
        let other = cfg.clone().with_seed(8);
        assert_ne!(run_scenario(&cfg).trace, run_scenario(&other).trace);
    }

    #[test]
    fn hover_holds_position_and_small_horizontal_tension() {
        let cfg = ScenarioConfig::from_toml(HOVER_VERTICAL).unwrap();
        let run = run_scenario(&cfg);
        assert_eq!(run.outcome, RunOutcome::Completed);
        let last = run.trace.last().unwrap();
        assert!((last.z - 1.0).abs() < 0.2, "z drifted to {}", last.z);
        assert!(last.x.abs() < 0.05 && last.y.abs() < 0.05);
        assert!(run.summary.horizontal_est_mean < 0.01);
    }

    const PULL_LAND: &str = r#"
name = "pull_land"
duration = 13.0
seed = 42

[vehicle]
mass = 0.033

[tether]
omega = 0.0478
s_total = 1.6

[filter]
model = "constant"
q_var = 1e-4
r_var = 1e-2

[controller]
mode = "tension_following"
pull_threshold = 0.07
landing_height = 0.2
goal_pos = [0.4, 0.0, 0.8]

[initial]
pos = [0.4, 0.0, 0.8]

[[pull]]
t_start = 4.0
t_end = 5.2
force = [-0.03, 0.0, -0.02]

[[pull]]
t_start = 8.0
t_end = 11.0
force = [0.0, 0.0, -0.12]
"#;

    #[test]
    fn pull_trail_release_freeze_and_latched_landing() {
        let cfg = ScenarioConfig::from_toml(PULL_LAND).unwrap();
        let run = run_scenario(&cfg);
        assert_eq!(run.outcome, RunOutcome::Completed);

        // While the first pull drags the vehicle toward the anchor, the
        // chased goal trails in the pull direction.
        let goal_at = |t: f64| {
            let row = run
                .trace
                .iter()
                .min_by(|a, b| (a.t - t).abs().partial_cmp(&(b.t - t).abs()).unwrap())
                .unwrap();
            (row.goal_x, row.goal_y, row.goal_z)
        };
        assert!(
            goal_at(5.2).0 < goal_at(4.2).0,
            "goal did not trail the pull"
        );

        // After the release (plus filter lag) the goal freezes until the
        // next tug.
        let frozen: Vec<_> = run
            .trace
            .iter()
            .filter(|r| r.t >= 6.0 && r.t <= 7.9)
            .map(|r| (r.goal_x, r.goal_y, r.goal_z))
            .collect();
        assert!(
            frozen.windows(2).all(|w| w[0] == w[1]),
            "goal moved while quiet"
        );

        // Motors stay off once the landing logic cut them.
        let cut_idx = run
            .trace
            .iter()
            .position(|r| !r.motors_on)
            .expect("landing must cut motors");
        assert!(run.trace[cut_idx..].iter().all(|r| !r.motors_on));
        assert!(run.trace[cut_idx].following);
        assert!(run.trace.last().unwrap().z < cfg.controller.landing_height);
    }

    #[test]
    fn tension_goal_mode_steers_to_goal_position() {
        let toml = r#"
name = "tension_goal"
duration = 30.0
seed = 42

[vehicle]
mass = 0.033

[tether]
omega = 0.0478
s_total = 1.6

[filter]
model = "constant"
q_var = 1e-4
r_var = 1e-2

[controller]
mode = "tension_goal"
goal_pos = [1.0, 0.0, 1.0]

[initial]
pos = [0.8, 0.0, 0.95]
"#;
        let cfg = ScenarioConfig::from_toml(toml).unwrap();
        // The derived goal tension matches the catenary at the goal point.
        let (hx, hy, tv) =
            goal_tension_for(&cfg.controller.goal_pos, &cfg.anchor, &cfg.tether).unwrap();
        assert_eq!(cfg.controller.goal_tension, (hx, hy));
        assert_eq!(cfg.controller.goal_tv, tv);
        assert!(hx > 0.0 && hy.abs() < 1e-12 && tv > 0.0);

        let run = run_scenario(&cfg);
        assert_eq!(run.outcome, RunOutcome::Completed);
        let last = run.trace.last().unwrap();
        assert!((last.x - 1.0).abs() < 0.1, "x = {}", last.x);
        assert!((last.y - 0.0).abs() < 0.1, "y = {}", last.y);
        assert!((last.z - 1.0).abs() < 0.1, "z = {}", last.z);
    }

    #[test]
    fn altitude_never_exceeds_cable_reach() {
        let cfg = ScenarioConfig::from_toml(HOVER_VERTICAL).unwrap();
        let run = run_scenario(&cfg);
        let reach = cfg.anchor.z_i + cfg.tether.s_total + 1e-3;
        assert!(run.trace.iter().all(|r| r.z <= reach));
    }

    #[test]
    fn taut_abort_keeps_partial_trace() {
        // Start near the reach limit and command a goal beyond it.
        let cfg_text = HOVER_VERTICAL
            .replace("goal_pos = [0.0, 0.0, 1.0]", "goal_pos = [2.5, 0.0, 0.4]")
            .replace("pos = [0.0, 0.0, 1.0]", "pos = [1.2, 0.0, 0.4]");
        let cfg = ScenarioConfig::from_toml(&cfg_text).unwrap();
        let run = run_scenario(&cfg);
        match run.outcome {
            RunOutcome::TetherTaut { t, .. } => {
                assert!(t > 0.0);
                assert!(!run.trace.is_empty());
            }
            RunOutcome::Completed => panic!("expected taut abort"),
        }
    }
}
