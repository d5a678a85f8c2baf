//! Position recovery from the estimated tether tension.
//!
//! The horizontal and vertical tensions fix the curve parameter and the
//! UAV-side arc length (`a = H/omega`, `s2 = |Tv|/omega`); together with
//! the known cable length those pin the radial distance and altitude of
//! the vehicle relative to the anchor. The `a -> 0` limits keep the
//! estimator defined while the filter still reports near-zero tension in
//! the initial instants.

use thiserror::Error;

use crate::catenary::{compose_horizontal, TetherProperties};
use crate::tension::TensionVec;

/// Ground-side attachment point in radial coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorPose {
    /// Anchor radial coordinate (m), normally 0.
    pub r_i: f64,
    /// Anchor height (m).
    pub z_i: f64,
}

impl AnchorPose {
    pub fn new(r_i: f64, z_i: f64) -> Self {
        Self { r_i, z_i }
    }
}

/// Estimated vehicle position in radial coordinates plus azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPosition {
    /// Radial distance from the world origin (m).
    pub r: f64,
    /// Altitude (m).
    pub z: f64,
    /// Azimuth relating the radial coordinate to x/y (rad).
    pub beta: f64,
}

/// Curve parameters recovered from one tension estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensionParams {
    /// Curve parameter `H/omega` (m).
    pub a: f64,
    /// UAV-side arc length `|Tv|/omega` (m), clamped to the cable length.
    pub s2: f64,
    /// Set when the raw `|Tv|/omega` exceeded the cable length; the
    /// estimate was clamped and the tension is outside the cable model.
    pub clamped: bool,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LocalizationError {
    #[error("arc length s2 = {s2} outside [0, {s_total}]")]
    InvalidArc { s2: f64, s_total: f64 },
}

/// Below this curve parameter the closed-form limits replace the
/// hyperbolic expressions (which amplify rounding as `a -> 0`).
pub const A_MIN: f64 = 1e-6;

/// Curve parameter and UAV-side arc length from tension magnitudes.
pub fn params_from_tension(h: f64, tv: f64, tether: &TetherProperties) -> TensionParams {
    let a = h / tether.omega;
    let s2_raw = tv.abs() / tether.omega;
    let clamped = s2_raw > tether.s_total;
    TensionParams {
        a,
        s2: if clamped { tether.s_total } else { s2_raw },
        clamped,
    }
}

/// Radial distance and altitude from curve parameters.
///
/// For `a > A_MIN` the catenary relations apply directly; otherwise the
/// vertical-cable limits do: the radial offset vanishes and the altitude
/// becomes `z_i + s2 - s1`.
pub fn locate(
    a: f64,
    s2: f64,
    tether: &TetherProperties,
    anchor: &AnchorPose,
) -> Result<PolarPosition, LocalizationError> {
    if !(0.0..=tether.s_total).contains(&s2) {
        return Err(LocalizationError::InvalidArc {
            s2,
            s_total: tether.s_total,
        });
    }
    let s1 = tether.s_total - s2;
    if a > A_MIN {
        let r0 = anchor.r_i + a * (s1 / a).asinh();
        let r = r0 + a * (s2 / a).asinh();
        let c = anchor.z_i - a * ((anchor.r_i - r0) / a).cosh();
        let z = a * ((r - r0) / a).cosh() + c;
        Ok(PolarPosition { r, z, beta: 0.0 })
    } else {
        Ok(PolarPosition {
            r: anchor.r_i,
            z: anchor.z_i + s2 - s1,
            beta: 0.0,
        })
    }
}

/// Full position estimate from a world-frame tension vector.
///
/// The horizontal components give the azimuth: the cable pulls the UAV
/// back toward the anchor, so the vehicle sits along `(-tx, -ty)`. The
/// vertical component magnitude gives the arc length.
pub fn locate_from_tension(
    t: &TensionVec,
    tether: &TetherProperties,
    anchor: &AnchorPose,
) -> Result<PolarPosition, LocalizationError> {
    locate_from_tension_flagged(t, tether, anchor).map(|(pos, _)| pos)
}

/// As [`locate_from_tension`], also reporting whether the vertical tension
/// had to be clamped to the cable length (a model-violation diagnostic).
pub fn locate_from_tension_flagged(
    t: &TensionVec,
    tether: &TetherProperties,
    anchor: &AnchorPose,
) -> Result<(PolarPosition, bool), LocalizationError> {
    let (h, beta) = compose_horizontal(-t.tx, -t.ty);
    let params = params_from_tension(h, t.tz, tether);
    let pos = locate(params.a, params.s2, tether, anchor)?;
    Ok((PolarPosition { beta, ..pos }, params.clamped))
}

/// Cartesian coordinates from a radial estimate.
pub fn polar_to_cartesian(p: &PolarPosition) -> (f64, f64, f64) {
    (p.r * p.beta.cos(), p.r * p.beta.sin(), p.z)
}
