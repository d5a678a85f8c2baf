//! Cascade position control and the two tension-driven behaviors.

use nalgebra::Vector3;

use crate::tension::{Attitude, QuadParams, TensionVec};

use super::dynamics::QuadState;

/// Control behavior selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerMode {
    /// Hold a fixed goal position.
    #[default]
    PositionHold,
    /// Chase the current position whenever the estimated tension exceeds
    /// the pull threshold; cut motors below the landing height afterwards.
    TensionFollowing,
    /// Regulate the horizontal tension to a goal value; altitude keeps its
    /// own position feedback.
    TensionGoal,
}

/// Loop gains. Angles live in radians here; config files use degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    /// Outer-loop position gain (1/s^2).
    pub kp_pos: f64,
    /// Velocity damping gain (1/s).
    pub kd_pos: f64,
    /// Horizontal tension feedback gain (m/s^2 per N).
    pub kp_tension: f64,
    /// Tilt command saturation (rad).
    pub tilt_max: f64,
    /// Thrust command ceiling (N).
    pub fp_max: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Self {
            kp_pos: 30.0,
            kd_pos: 9.0,
            kp_tension: 40.0,
            tilt_max: 20f64.to_radians(),
            fp_max: 1.0,
        }
    }
}

/// Controller configuration for one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub mode: ControllerMode,
    /// Estimated-tension magnitude that triggers tension following (N).
    pub pull_threshold: f64,
    /// Altitude below which motors cut once following is active (m).
    pub landing_height: f64,
    pub gains: Gains,
    /// Goal position (m, world frame).
    pub goal_pos: Vector3<f64>,
    /// Goal horizontal tension for [`ControllerMode::TensionGoal`],
    /// expressed as the outward reaction `(H cos(beta), H sin(beta))` the
    /// vehicle applies to the cable (N).
    pub goal_tension: (f64, f64),
    /// Vertical cable tension expected at the goal (N); fed forward so the
    /// altitude loop carries the hanging-cable weight without offset.
    pub goal_tv: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            mode: ControllerMode::PositionHold,
            pull_threshold: 0.05,
            landing_height: 0.2,
            gains: Gains::default(),
            goal_pos: Vector3::new(0.0, 0.0, 1.0),
            goal_tension: (0.0, 0.0),
            goal_tv: 0.0,
        }
    }
}

/// Invert the thrust model: find `(phi, theta, Fp)` at fixed yaw so the
/// rotated thrust vector matches the desired world force.
fn invert_thrust(force_des: &Vector3<f64>, psi: f64, gains: &Gains) -> (Attitude, f64) {
    let norm = force_des.norm();
    if norm < 1e-12 {
        return (Attitude::new(0.0, 0.0, psi), 0.0);
    }
    // Undo yaw, leaving the roll/pitch tilt in the intermediate frame
    // where the thrust direction is [sin(phi)cos(theta), -sin(theta),
    // cos(phi)cos(theta)].
    let (sy, cy) = psi.sin_cos();
    let v = Vector3::new(
        cy * force_des.x + sy * force_des.y,
        -sy * force_des.x + cy * force_des.y,
        force_des.z,
    ) / norm;
    let theta = (-v.y).asin().clamp(-gains.tilt_max, gains.tilt_max);
    let phi = v.x.atan2(v.z).clamp(-gains.tilt_max, gains.tilt_max);
    // Preserve the vertical force balance through any saturation.
    let fp = (force_des.z / (phi.cos() * theta.cos())).clamp(0.0, gains.fp_max);
    (Attitude::new(phi, theta, psi), fp)
}

/// Outer PD loop: position error to desired acceleration, inverted into an
/// attitude and thrust command. No tether feedforward, so a loaded vehicle
/// holds a small steady offset.
pub fn cascade_controller(
    state: &QuadState,
    goal: &Vector3<f64>,
    gains: &Gains,
    params: &QuadParams,
) -> (Attitude, f64) {
    let accel_des = gains.kp_pos * (goal - state.pos) - gains.kd_pos * state.vel;
    let force_des = params.mass * (accel_des + Vector3::new(0.0, 0.0, params.g));
    invert_thrust(&force_des, state.att.psi, gains)
}

/// Goal update rule for tension following: while the estimated tension
/// magnitude exceeds the threshold the goal chases the current position;
/// otherwise both the goal and the following flag stay as they are.
pub fn tension_following_update(
    goal: &Vector3<f64>,
    est: &TensionVec,
    current_pos: &Vector3<f64>,
    following: bool,
    cfg: &ControllerConfig,
) -> (Vector3<f64>, bool) {
    if est.norm() > cfg.pull_threshold {
        (*current_pos, true)
    } else {
        (*goal, following)
    }
}

/// Tension-goal outer loop: horizontal acceleration command proportional
/// to the outward-tension error, vertical command from the altitude error.
///
/// `est` uses the force-on-UAV convention; it is negated into the outward
/// reaction before comparing with `goal_tension`. Velocity damping is
/// applied by the simulation loop, not here.
pub fn tension_goal_controller(
    est: &TensionVec,
    goal_tension: (f64, f64),
    altitude: f64,
    goal_altitude: f64,
    gains: &Gains,
) -> Vector3<f64> {
    let outward_x = -est.tx;
    let outward_y = -est.ty;
    Vector3::new(
        gains.kp_tension * (goal_tension.0 - outward_x),
        gains.kp_tension * (goal_tension.1 - outward_y),
        gains.kp_pos * (goal_altitude - altitude),
    )
}

/// Attitude/thrust command from a desired acceleration (used by the
/// tension-goal mode after damping is added).
pub fn accel_to_command(
    accel_cmd: &Vector3<f64>,
    psi: f64,
    gains: &Gains,
    params: &QuadParams,
) -> (Attitude, f64) {
    let force_des = params.mass * (accel_cmd + Vector3::new(0.0, 0.0, params.g));
    invert_thrust(&force_des, psi, gains)
}

/// Landing gate: motors cut when following is active and the vehicle is
/// below the landing height. Latching is the caller's responsibility.
pub fn landing_monitor(following: bool, altitude: f64, cfg: &ControllerConfig) -> bool {
    following && altitude < cfg.landing_height
}
