//! Tethered micro-quadcopter toolkit: catenary cable modeling, indirect
//! tension estimation, tension-based localization and a deterministic
//! flight simulator for exercising all of it at desk scale.
//!
//! The crate splits into four layers:
//!
//! - [`catenary`]: the hanging-cable model and the inverse solver that
//!   recovers curve parameters from two endpoints and the cable length.
//! - [`tension`]: reconstruction of the cable force from IMU/thrust
//!   readings, plus the two Kalman filter variants that smooth it.
//! - [`localization`]: position recovery from the estimated tension
//!   through the cable geometry, including the slack-cable limits.
//! - [`sim`]: the scenario simulator (dynamics, sensors, controllers,
//!   tension following and tether-assisted landing) emitting the trace
//!   format defined in [`trace`].
//!
//! All numeric types are `f64` and all units SI; angles are radians
//! everywhere except scenario config files, which use degrees.

pub mod catenary;
pub mod localization;
pub mod sim;
pub mod tension;
pub mod trace;

pub use catenary::{
    arc_length_from_lowest, compose_horizontal, decompose_horizontal, end_tensions, eval_height,
    initial_guess_a, solve_from_endpoints, CatenaryError, CatenaryParams, End, Point2,
    SolverSettings, TensionPolar, TetherProperties,
};
pub use localization::{
    locate, locate_from_tension, locate_from_tension_flagged, params_from_tension,
    polar_to_cartesian, AnchorPose, LocalizationError, PolarPosition,
};
pub use sim::{
    cascade_controller, landing_monitor, run_scenario, step_dynamics, tension_following_update,
    tension_goal_controller, tether_force, ConfigError, ControllerConfig, ControllerMode, Gains,
    PullProfile, PullSegment, QuadState, RunOutcome, ScenarioConfig, SensorNoise, SimError, SimRun,
    Summary,
};
pub use tension::{
    accel_world_z, bench_horizontal_gt, bench_vertical_gt, horizontal_tension_components,
    kalman_init, kalman_step, observe_tension, rotation_world_from_body, vertical_tension,
    Attitude, ImuSample, KalmanConfig, KalmanModel, KalmanState, QuadParams, TensionVec,
};
pub use trace::{TraceError, TraceMeta, TraceRow, COLUMNS, TRACE_VERSION};
