//! Sensor simulation: ground-truth trajectory generation, inverse
//! kinematics to ideal IMU readings, and corruption of IMU/DVL/GNSS streams
//! with configurable error models.
//!
//! Everything here is deterministic given `(inputs, seed)`; random number
//! generators are explicit values, never global state.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::frames::RotationMatrix;
use crate::{Error, Result};

mod dvl;
mod gnss;
mod imu;
pub mod profiles;

pub use dvl::{apply_beam_outage, default_beam_geometry, simulate_dvl, OutageWindow};
pub use gnss::simulate_gnss_velocity;
pub use imu::{corrupt_imu, ideal_imu_from_trajectory};
pub use profiles::{generate_trajectory, TrajectoryGenerator, TrajectoryProfile};

/// Body-frame inertial reading: specific force and angular rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImuSample {
    pub t: f64,
    /// Specific force in the body frame, m/s².
    pub specific_force_b: Vector3<f64>,
    /// Angular rate ω_ib^b, rad/s.
    pub angular_rate_b: Vector3<f64>,
}

impl ImuSample {
    /// Sanity bounds: ‖f‖ < 200 m/s², ‖ω‖ < 50 rad/s, finite values.
    pub fn validate(&self) -> Result<()> {
        let finite = self.t.is_finite()
            && self.specific_force_b.iter().all(|x| x.is_finite())
            && self.angular_rate_b.iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("non-finite IMU sample".into()));
        }
        if self.specific_force_b.norm() >= 200.0 {
            return Err(Error::InvalidArgument("specific force exceeds 200 m/s²".into()));
        }
        if self.angular_rate_b.norm() >= 50.0 {
            return Err(Error::InvalidArgument("angular rate exceeds 50 rad/s".into()));
        }
        Ok(())
    }
}

/// IMU corruption parameters: constant per-axis biases plus per-sample
/// white Gaussian noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImuErrorModel {
    pub accel_bias: [f64; 3],
    pub gyro_bias: [f64; 3],
    /// Per-sample accelerometer noise std, m/s².
    pub accel_noise_std: f64,
    /// Per-sample gyroscope noise std, rad/s.
    pub gyro_noise_std: f64,
    pub grade_label: String,
}

impl Default for ImuErrorModel {
    fn default() -> Self {
        ImuErrorModel {
            accel_bias: [0.0; 3],
            gyro_bias: [0.0; 3],
            accel_noise_std: 0.0,
            gyro_noise_std: 0.0,
            grade_label: "custom".into(),
        }
    }
}

impl ImuErrorModel {
    /// Navigation-grade defaults: 10 μg accelerometer bias, 0.01 °/h gyro
    /// bias, noise stds sized for 100 Hz sampling.
    pub fn navigation_grade() -> Self {
        ImuErrorModel {
            accel_bias: [9.81e-5; 3],
            gyro_bias: [0.01_f64.to_radians() / 3600.0; 3],
            accel_noise_std: 1e-3,
            gyro_noise_std: 1e-5,
            grade_label: "navigation".into(),
        }
    }

    /// Tactical-grade defaults: 1 mg accelerometer bias, 1 °/h gyro bias,
    /// noise stds sized for 100 Hz sampling.
    pub fn tactical_grade() -> Self {
        ImuErrorModel {
            accel_bias: [9.81e-3; 3],
            gyro_bias: [1.0_f64.to_radians() / 3600.0; 3],
            accel_noise_std: 1e-2,
            gyro_noise_std: 3e-4,
            grade_label: "tactical".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.accel_noise_std < 0.0 || self.gyro_noise_std < 0.0 {
            return Err(Error::InvalidArgument("negative IMU noise std".into()));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.accel_bias == [0.0; 3]
            && self.gyro_bias == [0.0; 3]
            && self.accel_noise_std == 0.0
            && self.gyro_noise_std == 0.0
    }
}

/// Four-beam DVL geometry: unit beam directions expressed in the DVL frame.
#[derive(Clone, Debug)]
pub struct DvlBeamGeometry {
    beam_directions: [Vector3<f64>; 4],
    /// Beam tilt from the vertical, rad.
    pub pitch_angle: f64,
}

impl DvlBeamGeometry {
    pub fn new(beam_directions: [Vector3<f64>; 4], pitch_angle: f64) -> Result<Self> {
        for (i, b) in beam_directions.iter().enumerate() {
            if (b.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "beam {i} direction is not unit length"
                )));
            }
        }
        let geom = DvlBeamGeometry {
            beam_directions,
            pitch_angle,
        };
        let sv = geom.direction_matrix().svd(false, false).singular_values;
        if sv[2] < 1e-9 {
            return Err(Error::RankDeficient(
                "beam direction matrix has rank < 3".into(),
            ));
        }
        Ok(geom)
    }

    pub fn beam_directions(&self) -> &[Vector3<f64>; 4] {
        &self.beam_directions
    }

    /// Stacked 4×3 matrix of beam direction rows.
    pub fn direction_matrix(&self) -> nalgebra::Matrix4x3<f64> {
        let mut m = nalgebra::Matrix4x3::zeros();
        for (i, b) in self.beam_directions.iter().enumerate() {
            m.set_row(i, &b.transpose());
        }
        m
    }
}

/// DVL corruption parameters following the comprehensive error model:
/// per-axis scale and bias in the DVL frame, per-beam white noise, the
/// fixed body→DVL mounting rotation and an optional lever arm.
#[derive(Clone, Debug)]
pub struct DvlErrorModel {
    /// Per-axis scale factor k (applied as (1+k) componentwise).
    pub scale_k: Vector3<f64>,
    /// Per-axis bias, m/s.
    pub bias_b: Vector3<f64>,
    /// Per-beam white noise std, m/s.
    pub beam_noise_std: f64,
    /// Body→DVL mounting rotation T_b^d.
    pub mounting_rotation: RotationMatrix,
    /// DVL lever arm from the vehicle center, m, in the body frame.
    pub lever_arm: Vector3<f64>,
}

impl Default for DvlErrorModel {
    fn default() -> Self {
        DvlErrorModel {
            scale_k: Vector3::zeros(),
            bias_b: Vector3::zeros(),
            beam_noise_std: 0.0,
            mounting_rotation: RotationMatrix::identity(),
            lever_arm: Vector3::zeros(),
        }
    }
}

impl DvlErrorModel {
    pub fn validate(&self) -> Result<()> {
        if self.scale_k.iter().any(|k| *k <= -1.0) {
            return Err(Error::InvalidArgument("scale component ≤ -1".into()));
        }
        if self.beam_noise_std < 0.0 {
            return Err(Error::InvalidArgument("negative beam noise std".into()));
        }
        Ok(())
    }
}

/// One DVL epoch: per-beam along-beam velocities plus validity flags.
/// Values behind a false flag must not be read.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DvlBeamSample {
    pub t: f64,
    pub beam_velocity: [f64; 4],
    pub valid: [bool; 4],
}

impl DvlBeamSample {
    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }
}

/// GNSS-derived reference velocity in the navigation frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GnssVelocitySample {
    pub t: f64,
    pub v_n: Vector3<f64>,
    pub noise_std: f64,
}

/// Componentwise (Hadamard) application of (1+k) to a vector.
pub(crate) fn apply_scale(k: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new((1.0 + k.x) * v.x, (1.0 + k.y) * v.y, (1.0 + k.z) * v.z)
}

pub(crate) fn vec3_from_array(a: [f64; 3]) -> Vector3<f64> {
    Vector3::new(a[0], a[1], a[2])
}

pub(crate) fn sample_noise_vec(
    rng: &mut impl rand::Rng,
    dist: &rand_distr::Normal<f64>,
) -> Vector3<f64> {
    use rand_distr::Distribution;
    Vector3::new(dist.sample(rng), dist.sample(rng), dist.sample(rng))
}

#[allow(dead_code)]
pub(crate) fn matrix3_is_finite(m: &Matrix3<f64>) -> bool {
    m.iter().all(|x| x.is_finite())
}
