//! Deterministic quadcopter-plus-tether simulation: point-mass dynamics
//! with the catenary reaction force, noisy sensor synthesis, cascade
//! position control and the tension-driven behaviors.

pub mod controller;
pub mod dynamics;
pub mod scenario;
pub mod sensors;

pub use controller::{
    accel_to_command, cascade_controller, landing_monitor, tension_following_update,
    tension_goal_controller, ControllerConfig, ControllerMode, Gains,
};
pub use dynamics::{step_dynamics, tether_force, QuadState};
pub use scenario::{
    goal_tension_for, run_scenario, ConfigError, PullProfile, PullSegment, RunOutcome,
    ScenarioConfig, SimRun, Summary,
};
pub use sensors::{SensorNoise, SensorSim};

use thiserror::Error;

/// Simulation-side failures.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    /// The endpoint separation reached the cable length; the catenary
    /// model is invalid there and the simulation halts.
    #[error("tether taut: chord {chord} m >= length {s_total} m")]
    TetherTaut { chord: f64, s_total: f64 },
    /// The cable solver rejected the configuration.
    #[error(transparent)]
    Catenary(#[from] crate::catenary::CatenaryError),
}
