//! Ideal IMU synthesis from a ground-truth trajectory and corruption with
//! an error model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::earth::EarthModel;
use crate::frames::{exp_so3, log_so3, GeodeticPosition, NavState};
use crate::{Error, Result};

use super::{sample_noise_vec, vec3_from_array, ImuErrorModel, ImuSample};

/// Inverse kinematics: the zero-order-hold IMU record whose dead reckoning
/// reproduces the input trajectory.
///
/// Sample `i` carries the reading for the interval ending at `traj[i].t`;
/// values are the interval-midpoint specific force and angular rate so the
/// round trip through the RK4 mechanization stays at second-order accuracy.
pub fn ideal_imu_from_trajectory(
    earth: &EarthModel,
    traj: &[NavState],
) -> Result<Vec<ImuSample>> {
    if traj.len() < 3 {
        return Err(Error::InvalidArgument(
            "trajectory must contain at least 3 samples".into(),
        ));
    }
    let mut out = Vec::with_capacity(traj.len() - 1);
    for i in 1..traj.len() {
        let prev = &traj[i - 1];
        let next = &traj[i];
        let dt = next.t - prev.t;
        if dt <= 0.0 {
            return Err(Error::NonMonotoneTimestamps {
                index: i,
                t: next.t,
            });
        }

        let pos_mid = GeodeticPosition::new(
            0.5 * (prev.position.latitude + next.position.latitude),
            0.5 * (prev.position.longitude + next.position.longitude),
            0.5 * (prev.position.height + next.position.height),
        )?;
        let v_mid = 0.5 * (prev.velocity_n + next.velocity_n);
        let omega_ie = earth.earth_rate_n(pos_mid.latitude);
        let omega_en = earth.transport_rate(&pos_mid, &v_mid)?;
        let omega_in = omega_ie + omega_en;

        // Attitude: C(t) = exp(−Ω_in τ)·C_prev·exp(Ω_ib τ) under constant
        // rates, so Ω_ib comes from the relative rotation with the
        // navigation-frame motion removed.
        let rel = prev
            .attitude
            .transpose()
            .compose(&exp_so3(&(omega_in * dt)))
            .compose(&next.attitude);
        let omega_ib = log_so3(&rel) / dt;

        // Midpoint attitude along that same path.
        let c_mid = exp_so3(&(-omega_in * (dt / 2.0)))
            .compose(&prev.attitude)
            .compose(&exp_so3(&(omega_ib * (dt / 2.0))));

        let accel_mid = (next.velocity_n - prev.velocity_n) / dt;
        let coriolis = (2.0 * omega_ie + omega_en).cross(&v_mid);
        let gravity = earth.gravity_n(&pos_mid);
        let f_n = accel_mid + coriolis - gravity;
        out.push(ImuSample {
            t: next.t,
            specific_force_b: c_mid.transpose().apply(&f_n),
            angular_rate_b: omega_ib,
        });
    }
    Ok(out)
}

/// Adds bias and per-sample white Gaussian noise to an IMU record.
/// Deterministic for a given seed; a zero model returns the input bitwise.
pub fn corrupt_imu(
    ideal: &[ImuSample],
    model: &ImuErrorModel,
    seed: u64,
) -> Result<Vec<ImuSample>> {
    model.validate()?;
    if model.is_zero() {
        return Ok(ideal.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let accel_dist = Normal::new(0.0, model.accel_noise_std)
        .map_err(|e| Error::InvalidArgument(format!("accel noise: {e}")))?;
    let gyro_dist = Normal::new(0.0, model.gyro_noise_std)
        .map_err(|e| Error::InvalidArgument(format!("gyro noise: {e}")))?;
    let accel_bias = vec3_from_array(model.accel_bias);
    let gyro_bias = vec3_from_array(model.gyro_bias);

    Ok(ideal
        .iter()
        .map(|s| ImuSample {
            t: s.t,
            specific_force_b: s.specific_force_b + accel_bias + sample_noise_vec(&mut rng, &accel_dist),
            angular_rate_b: s.angular_rate_b + gyro_bias + sample_noise_vec(&mut rng, &gyro_dist),
        })
        .collect())
}
