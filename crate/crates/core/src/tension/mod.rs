//! Indirect tether-tension observation from inertial and thrust readings.
//!
//! The tension acting on the vehicle is never measured directly: it is
//! reconstructed from the accelerometer specific force, the commanded
//! thrust and the attitude, then smoothed by one of two Kalman variants
//! (see [`kalman`]). Ground-truth bench formulas used during validation
//! live here as well.

pub mod kalman;

use nalgebra::{Matrix3, Vector3};

pub use kalman::{kalman_init, kalman_step, KalmanConfig, KalmanModel, KalmanState};

/// Euler attitude, radians. The rotation convention is fixed by the
/// component formulas in [`horizontal_tension_components`] /
/// [`vertical_tension`]: yaw about world z, then roll about the
/// intermediate y axis, then pitch about the body x axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Attitude {
    /// Roll (rad).
    pub phi: f64,
    /// Pitch (rad).
    pub theta: f64,
    /// Yaw (rad).
    pub psi: f64,
}

impl Attitude {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Self {
        Self { phi, theta, psi }
    }

    pub fn level() -> Self {
        Self::default()
    }
}

/// One inertial/thrust sensor sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    /// Timestamp (s).
    pub t: f64,
    /// Proper acceleration (specific force) in the body frame (m/s^2).
    /// A level stationary vehicle reads `(0, 0, +g)`.
    pub accel_body: Vector3<f64>,
    /// Vehicle attitude at the sample instant.
    pub attitude: Attitude,
    /// Total propeller thrust Fp (N).
    pub thrust: f64,
}

/// World-frame tension force estimate or observation (N).
///
/// Sign convention: the force the tether applies to the UAV, so a cable
/// anchored below and ahead pulls with negative z and negative radial
/// components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TensionVec {
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
}

impl TensionVec {
    pub fn new(tx: f64, ty: f64, tz: f64) -> Self {
        Self { tx, ty, tz }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn norm(&self) -> f64 {
        (self.tx * self.tx + self.ty * self.ty + self.tz * self.tz).sqrt()
    }

    pub fn horizontal_norm(&self) -> f64 {
        self.tx.hypot(self.ty)
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.tx, self.ty, self.tz)
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

/// Vehicle constants entering the tension observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadParams {
    /// Vehicle mass (kg).
    pub mass: f64,
    /// Gravitational acceleration magnitude (m/s^2).
    pub g: f64,
    /// Constant external disturbance force (N), world frame.
    pub f_ext: Vector3<f64>,
}

impl QuadParams {
    pub fn new(mass: f64) -> Self {
        Self {
            mass,
            g: 9.81,
            f_ext: Vector3::zeros(),
        }
    }

    /// Hover thrust for the bare vehicle (N).
    pub fn weight(&self) -> f64 {
        self.mass * self.g
    }
}

impl Default for QuadParams {
    fn default() -> Self {
        // The bench vehicle: a 33 g micro quad.
        Self::new(0.033)
    }
}

/// Rotation taking body-frame vectors into the world frame.
///
/// Composed as `Rz(psi) * Ry(phi) * Rx(theta)` so that the thrust column
/// and the acceleration rows reproduce the per-axis tension component
/// formulas exactly:
/// third row `[-sin(phi), cos(phi)sin(theta), cos(phi)cos(theta)]`, thrust
/// world-z component `cos(theta)cos(phi)*Fp`.
pub fn rotation_world_from_body(att: &Attitude) -> Matrix3<f64> {
    let (sp, cp) = att.phi.sin_cos();
    let (st, ct) = att.theta.sin_cos();
    let (sy, cy) = att.psi.sin_cos();
    Matrix3::new(
        cy * cp,
        cy * sp * st - sy * ct,
        cy * sp * ct + sy * st,
        sy * cp,
        sy * sp * st + cy * ct,
        sy * sp * ct - cy * st,
        -sp,
        cp * st,
        cp * ct,
    )
}

/// World-frame vertical acceleration from a body-frame accelerometer
/// reading: `-sin(phi)*aI_x + cos(phi)*sin(theta)*aI_y + cos(phi)*cos(theta)*aI_z`.
pub fn accel_world_z(att: &Attitude, accel_body: &Vector3<f64>) -> f64 {
    let (sp, cp) = att.phi.sin_cos();
    let (st, ct) = att.theta.sin_cos();
    -sp * accel_body.x + cp * st * accel_body.y + cp * ct * accel_body.z
}

/// Tension observation from one sensor sample.
///
/// With the accelerometer reporting proper acceleration, the rotated
/// reading is already the gravity-inclusive world acceleration, so the
/// observation reduces to `m*a_world - R*(0,0,Fp) + F_ext`. A level hover
/// at `Fp = m*g` with no cable yields exactly zero.
pub fn observe_tension(s: &ImuSample, p: &QuadParams) -> TensionVec {
    let rot = rotation_world_from_body(&s.attitude);
    let a_world = rot * s.accel_body;
    let thrust_world = rot * Vector3::new(0.0, 0.0, s.thrust);
    TensionVec::from_vector(p.mass * a_world - thrust_world + p.f_ext)
}

/// Vertical tension from the gravity-inclusive vertical acceleration:
/// `Tv = m*a_z - cos(theta)*cos(phi)*Fp`.
pub fn vertical_tension(att: &Attitude, a_z: f64, fp: f64, p: &QuadParams) -> f64 {
    p.mass * a_z - att.theta.cos() * att.phi.cos() * fp
}

/// Horizontal tension components from attitude and thrust alone, valid in
/// static equilibrium:
/// `Tx = -[sin(psi)sin(theta) + cos(psi)sin(phi)cos(theta)]*Fp`,
/// `Ty = [cos(psi)sin(theta) - sin(psi)sin(phi)cos(theta)]*Fp`.
pub fn horizontal_tension_components(att: &Attitude, fp: f64) -> (f64, f64) {
    let sp = att.phi.sin();
    let (st, ct) = att.theta.sin_cos();
    let (sy, cy) = att.psi.sin_cos();
    let tx = -(sy * st + cy * sp * ct) * fp;
    let ty = (cy * st - sy * sp * ct) * fp;
    (tx, ty)
}

/// Bench ground truth for the horizontal tension: a weight hung over a
/// vertical arm, projected by the wire elevation angle
/// `gamma = atan((zq - za)/rq)`.
pub fn bench_horizontal_gt(weight: f64, zq: f64, za: f64, rq: f64) -> f64 {
    let gamma = ((zq - za) / rq).atan();
    gamma.cos() * weight
}

/// Bench ground truth for the vertical tension during a vertical tethered
/// takeoff: the weight of the lifted cable, `omega * z`.
pub fn bench_vertical_gt(tether: &crate::catenary::TetherProperties, z: f64) -> f64 {
    tether.omega * z
}
