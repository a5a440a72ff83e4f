//! GNSS reference-velocity simulation for surface calibration runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::frames::NavState;
use crate::{Error, Result};

use super::{sample_noise_vec, GnssVelocitySample};

/// Samples the ground-truth navigation-frame velocity at `rate` and adds
/// white Gaussian noise. Deterministic per seed.
pub fn simulate_gnss_velocity(
    traj: &[NavState],
    rate: f64,
    noise_std: f64,
    seed: u64,
) -> Result<Vec<GnssVelocitySample>> {
    if noise_std < 0.0 {
        return Err(Error::InvalidArgument("negative GNSS noise std".into()));
    }
    if traj.len() < 2 {
        return Err(Error::InvalidArgument("trajectory too short".into()));
    }
    let traj_dt = traj[1].t - traj[0].t;
    if rate > 1.0 / traj_dt + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "GNSS rate {rate} Hz exceeds trajectory rate {} Hz",
            1.0 / traj_dt
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Normal::new(0.0, noise_std)
        .map_err(|e| Error::InvalidArgument(format!("gnss noise: {e}")))?;

    let t_start = traj[0].t;
    let t_end = traj[traj.len() - 1].t;
    let period = 1.0 / rate;
    let epochs = ((t_end - t_start) / period).floor() as usize;

    let mut out = Vec::with_capacity(epochs + 1);
    for k in 0..=epochs {
        let t = t_start + k as f64 * period;
        let idx = (((t - t_start) / traj_dt).round() as usize).min(traj.len() - 1);
        let state = &traj[idx];
        let noise = if noise_std > 0.0 {
            sample_noise_vec(&mut rng, &dist)
        } else {
            nalgebra::Vector3::zeros()
        };
        out.push(GnssVelocitySample {
            t: state.t,
            v_n: state.velocity_n + noise,
            noise_std,
        });
    }
    Ok(out)
}
