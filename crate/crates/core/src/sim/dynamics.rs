//! Point-mass vehicle dynamics and the tether reaction force.

use nalgebra::Vector3;

use crate::catenary::{self, End, Point2, SolverSettings, TetherProperties};
use crate::localization::AnchorPose;
use crate::tension::{Attitude, QuadParams, TensionVec};

use super::SimError;

/// Simulated vehicle truth state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadState {
    /// World position (m).
    pub pos: Vector3<f64>,
    /// World velocity (m/s).
    pub vel: Vector3<f64>,
    /// Attitude.
    pub att: Attitude,
    /// Current total thrust (N); zero whenever motors are off.
    pub fp: f64,
    /// Motor switch; once the landing logic clears it the run keeps it off.
    pub motors_on: bool,
}

impl QuadState {
    /// At-rest state at a position, motors on with hover thrust.
    pub fn hovering_at(pos: Vector3<f64>, params: &QuadParams) -> Self {
        Self {
            pos,
            vel: Vector3::zeros(),
            att: Attitude::level(),
            fp: params.weight(),
            motors_on: true,
        }
    }
}

/// Radial span below which the cable is treated as hanging vertically.
/// The solved horizontal tension at this span is far below any sensor
/// noise floor, so switching to the closed-form branch is seamless.
const VERTICAL_SPAN_EPS: f64 = 1e-6;

/// Force the tether exerts on the UAV at `uav_pos` (world frame).
///
/// The cable plane is solved in radial coordinates from the anchor; the
/// horizontal pull points from the UAV back toward the anchor azimuth and
/// the vertical component pulls down with the hanging-arc weight.
pub fn tether_force(
    uav_pos: &Vector3<f64>,
    anchor: &AnchorPose,
    tether: &TetherProperties,
) -> Result<TensionVec, SimError> {
    let r_uav = uav_pos.x.hypot(uav_pos.y);
    let dz = uav_pos.z - anchor.z_i;
    let chord = (r_uav - anchor.r_i).hypot(dz);
    if chord >= tether.s_total {
        return Err(SimError::TetherTaut {
            chord,
            s_total: tether.s_total,
        });
    }
    let beta = if r_uav > 0.0 {
        uav_pos.y.atan2(uav_pos.x)
    } else {
        0.0
    };
    if (r_uav - anchor.r_i).abs() < VERTICAL_SPAN_EPS {
        // Vertical cable: the UAV carries the arc from the fold point up.
        let s2 = ((tether.s_total + dz) / 2.0).clamp(0.0, tether.s_total);
        return Ok(TensionVec::new(0.0, 0.0, -tether.omega * s2));
    }
    let params = catenary::solve_from_endpoints(
        Point2::new(anchor.r_i, anchor.z_i),
        Point2::new(r_uav, uav_pos.z),
        tether,
        &SolverSettings::default(),
    )?;
    let t = catenary::end_tensions(&params, tether, End::Uav);
    Ok(TensionVec::new(-t.h * beta.cos(), -t.h * beta.sin(), -t.tv))
}

/// One semi-implicit Euler step under thrust, gravity, tether, pull and
/// optional linear drag. With motors off the thrust is forced to zero.
pub fn step_dynamics(
    state: &QuadState,
    tether_f: &TensionVec,
    pull: &Vector3<f64>,
    params: &QuadParams,
    drag_coeff: f64,
    dt: f64,
) -> QuadState {
    let fp = if state.motors_on { state.fp } else { 0.0 };
    let rot = crate::tension::rotation_world_from_body(&state.att);
    let thrust_world = rot * Vector3::new(0.0, 0.0, fp);
    let gravity = Vector3::new(0.0, 0.0, -params.mass * params.g);
    let force = thrust_world + gravity + tether_f.as_vector() + pull - drag_coeff * state.vel;
    let vel = state.vel + force / params.mass * dt;
    let pos = state.pos + vel * dt;
    QuadState {
        pos,
        vel,
        fp,
        ..*state
    }
}
