//! Noisy sensor synthesis for the simulated vehicle.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::tension::{Attitude, ImuSample, QuadParams, TensionVec};

use super::dynamics::QuadState;

/// White-Gaussian sensor noise levels. All radians/SI internally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorNoise {
    /// Accelerometer noise per axis (m/s^2).
    pub accel_sigma: f64,
    /// Thrust measurement noise (N).
    pub thrust_sigma: f64,
    /// Attitude measurement noise per angle (rad).
    pub attitude_sigma: f64,
    /// RNG seed; identical seeds yield bit-identical sample streams.
    pub seed: u64,
}

impl Default for SensorNoise {
    fn default() -> Self {
        Self {
            accel_sigma: 0.2,
            thrust_sigma: 0.002,
            attitude_sigma: 0.005,
            seed: 42,
        }
    }
}

/// Sensor simulator: owns the seeded noise stream.
#[derive(Debug, Clone)]
pub struct SensorSim {
    noise: SensorNoise,
    rng: ChaCha8Rng,
    accel: Normal<f64>,
    thrust: Normal<f64>,
    attitude: Normal<f64>,
}

impl SensorSim {
    pub fn new(noise: SensorNoise) -> Self {
        Self {
            noise,
            rng: ChaCha8Rng::seed_from_u64(noise.seed),
            accel: Normal::new(0.0, noise.accel_sigma).expect("finite sigma"),
            thrust: Normal::new(0.0, noise.thrust_sigma).expect("finite sigma"),
            attitude: Normal::new(0.0, noise.attitude_sigma).expect("finite sigma"),
        }
    }

    pub fn noise(&self) -> &SensorNoise {
        &self.noise
    }

    /// Synthesize one IMU/thrust sample from the true state and forces.
    ///
    /// The accelerometer reports proper acceleration: the sum of all
    /// non-gravitational forces rotated into the body frame, so a level
    /// hover reads `(0, 0, +g)`. Seven noise draws happen on every call in
    /// a fixed order, keeping streams aligned across configurations.
    pub fn sample_sensors(
        &mut self,
        t: f64,
        state: &QuadState,
        tether_f: &TensionVec,
        pull: &Vector3<f64>,
        drag_coeff: f64,
        params: &QuadParams,
    ) -> ImuSample {
        let rot = crate::tension::rotation_world_from_body(&state.att);
        let fp = if state.motors_on { state.fp } else { 0.0 };
        let thrust_world = rot * Vector3::new(0.0, 0.0, fp);
        let specific_force_world =
            (thrust_world + tether_f.as_vector() + pull - drag_coeff * state.vel) / params.mass;
        let accel_body = rot.transpose() * specific_force_world;

        let noise_accel = Vector3::new(
            self.accel.sample(&mut self.rng),
            self.accel.sample(&mut self.rng),
            self.accel.sample(&mut self.rng),
        );
        let noise_thrust = self.thrust.sample(&mut self.rng);
        let noise_att = (
            self.attitude.sample(&mut self.rng),
            self.attitude.sample(&mut self.rng),
            self.attitude.sample(&mut self.rng),
        );

        ImuSample {
            t,
            accel_body: accel_body + noise_accel,
            attitude: Attitude::new(
                state.att.phi + noise_att.0,
                state.att.theta + noise_att.1,
                state.att.psi + noise_att.2,
            ),
            // Thrust readings come from motor telemetry and cannot go
            // negative.
            thrust: (fp + noise_thrust).max(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tension::observe_tension;

    fn noiseless(seed: u64) -> SensorNoise {
        SensorNoise {
            accel_sigma: 0.0,
            thrust_sigma: 0.0,
            attitude_sigma: 0.0,
            seed,
        }
    }

    #[test]
    fn zero_sigma_gives_exact_truth() {
        let params = QuadParams::default();
        let state = QuadState::hovering_at(Vector3::new(0.0, 0.0, 1.0), &params);
        let mut sim = SensorSim::new(noiseless(1));
        let s = sim.sample_sensors(
            0.0,
            &state,
            &TensionVec::zero(),
            &Vector3::zeros(),
            0.0,
            &params,
        );
        assert!((s.accel_body - Vector3::new(0.0, 0.0, params.g)).norm() < 1e-12);
        assert_eq!(s.thrust, params.weight());
        assert_eq!(s.attitude, state.att);
    }

    #[test]
    fn hover_sample_observes_zero_tension() {
        let params = QuadParams::default();
        let state = QuadState::hovering_at(Vector3::new(0.0, 0.0, 1.0), &params);
        let mut sim = SensorSim::new(noiseless(1));
        let s = sim.sample_sensors(
            0.0,
            &state,
            &TensionVec::zero(),
            &Vector3::zeros(),
            0.0,
            &params,
        );
        assert!(observe_tension(&s, &params).norm() < 1e-12);
    }

    #[test]
    fn identical_seeds_identical_streams() {
        let params = QuadParams::default();
        let state = QuadState::hovering_at(Vector3::new(0.3, 0.1, 0.8), &params);
        let noise = SensorNoise::default();
        let mut a = SensorSim::new(noise);
        let mut b = SensorSim::new(noise);
        for k in 0..200 {
            let t = k as f64 * 0.01;
            let sa = a.sample_sensors(
                t,
                &state,
                &TensionVec::new(-0.01, 0.0, -0.05),
                &Vector3::zeros(),
                0.0,
                &params,
            );
            let sb = b.sample_sensors(
                t,
                &state,
                &TensionVec::new(-0.01, 0.0, -0.05),
                &Vector3::zeros(),
                0.0,
                &params,
            );
            assert_eq!(sa, sb);
        }
    }

    #[test]
    fn different_seeds_differ() {
        let params = QuadParams::default();
        let state = QuadState::hovering_at(Vector3::new(0.0, 0.0, 1.0), &params);
        let mut a = SensorSim::new(SensorNoise {
            seed: 1,
            ..SensorNoise::default()
        });
        let mut b = SensorSim::new(SensorNoise {
            seed: 2,
            ..SensorNoise::default()
        });
        let sa = a.sample_sensors(
            0.0,
            &state,
            &TensionVec::zero(),
            &Vector3::zeros(),
            0.0,
            &params,
        );
        let sb = b.sample_sensors(
            0.0,
            &state,
            &TensionVec::zero(),
            &Vector3::zeros(),
            0.0,
            &params,
        );
        assert_ne!(sa, sb);
    }
}
