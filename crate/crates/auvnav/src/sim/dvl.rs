//! DVL beam-level simulation: Janus geometry, the comprehensive error
//! model, and beam outage scheduling.
//!
//! Sign convention: beam velocities are positive toward the transducer.
//! Real-data ingestion must expose a sign flag if the instrument reports
//! the opposite.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::frames::{log_so3, NavState};
use crate::{Error, Result};

use super::{apply_scale, DvlBeamGeometry, DvlBeamSample, DvlErrorModel};

/// Standard 4-beam Janus "×" configuration: beam `i` at azimuth
/// 45° + 90°·i with a 20° tilt from the vertical.
pub fn default_beam_geometry() -> DvlBeamGeometry {
    beam_geometry_with_pitch(20.0_f64.to_radians())
}

/// Janus "×" geometry with a custom tilt angle from the vertical.
pub fn beam_geometry_with_pitch(pitch_angle: f64) -> DvlBeamGeometry {
    let (sp, cp) = (pitch_angle.sin(), pitch_angle.cos());
    let mut dirs = [Vector3::zeros(); 4];
    for (i, d) in dirs.iter_mut().enumerate() {
        let az = (45.0 + 90.0 * i as f64).to_radians();
        *d = Vector3::new(az.cos() * sp, az.sin() * sp, cp);
    }
    DvlBeamGeometry::new(dirs, pitch_angle).expect("Janus geometry is full rank")
}

/// Simulates beam-level DVL measurements along a ground-truth trajectory.
///
/// The true DVL-frame velocity is `v_d = T_b^d (T_n^b v_n + ω_nb^b × l)`;
/// the corrupted axis velocity applies the componentwise scale and bias,
/// and each beam projects it with added white noise:
/// `y_i = b_iᵀ((1+k)∘v_d + b) + w`.
pub fn simulate_dvl(
    traj: &[NavState],
    geom: &DvlBeamGeometry,
    model: &DvlErrorModel,
    rate: f64,
    seed: u64,
) -> Result<Vec<DvlBeamSample>> {
    model.validate()?;
    if traj.len() < 2 {
        return Err(Error::InvalidArgument("trajectory too short".into()));
    }
    let traj_dt = traj[1].t - traj[0].t;
    if rate > 1.0 / traj_dt + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "DVL rate {rate} Hz exceeds trajectory rate {} Hz",
            1.0 / traj_dt
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, model.beam_noise_std)
        .map_err(|e| Error::InvalidArgument(format!("beam noise: {e}")))?;

    let t_start = traj[0].t;
    let t_end = traj[traj.len() - 1].t;
    let period = 1.0 / rate;
    let epochs = ((t_end - t_start) / period).floor() as usize;

    let mut out = Vec::with_capacity(epochs + 1);
    for k in 0..=epochs {
        let t = t_start + k as f64 * period;
        let idx = (((t - t_start) / traj_dt).round() as usize).min(traj.len() - 1);
        let state = &traj[idx];

        let v_b = state.attitude.transpose().apply(&state.velocity_n);
        let lever = if model.lever_arm == Vector3::zeros() {
            Vector3::zeros()
        } else {
            omega_nb_body(traj, idx).cross(&model.lever_arm)
        };
        let v_d = model.mounting_rotation.apply(&(v_b + lever));
        let corrupted = apply_scale(&model.scale_k, &v_d) + model.bias_b;

        let mut beam_velocity = [0.0; 4];
        for (i, b) in geom.beam_directions().iter().enumerate() {
            let w = if model.beam_noise_std > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            beam_velocity[i] = b.dot(&corrupted) + w;
        }
        out.push(DvlBeamSample {
            t: state.t,
            beam_velocity,
            valid: [true; 4],
        });
    }
    Ok(out)
}

/// Body rotation rate relative to the navigation frame, ω_nb^b, by central
/// difference of the attitude track.
fn omega_nb_body(traj: &[NavState], idx: usize) -> Vector3<f64> {
    let lo = idx.saturating_sub(1);
    let hi = (idx + 1).min(traj.len() - 1);
    if lo == hi {
        return Vector3::zeros();
    }
    let dt = traj[hi].t - traj[lo].t;
    let rel = traj[lo].attitude.transpose().compose(&traj[hi].attitude);
    log_so3(&rel) / dt
}

/// A beam outage window: flags of the listed beams (0-based) are cleared
/// for `t ∈ [t_start, t_end)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutageWindow {
    pub t_start: f64,
    pub t_end: f64,
    /// Beam indices, 0-based.
    pub beams: Vec<usize>,
}

/// Applies an outage schedule: validity flags are cleared inside windows,
/// values untouched elsewhere. Windows must not overlap per beam.
pub fn apply_beam_outage(
    beams: &[DvlBeamSample],
    schedule: &[OutageWindow],
) -> Result<Vec<DvlBeamSample>> {
    for w in schedule {
        if !(w.t_start < w.t_end) {
            return Err(Error::InvalidArgument(format!(
                "outage window [{}, {}) is empty or inverted",
                w.t_start, w.t_end
            )));
        }
        if w.beams.is_empty() || w.beams.iter().any(|b| *b >= 4) {
            return Err(Error::InvalidArgument(
                "outage beams must be 0..=3 and non-empty".into(),
            ));
        }
    }
    for beam in 0..4 {
        let mut windows: Vec<(f64, f64)> = schedule
            .iter()
            .filter(|w| w.beams.contains(&beam))
            .map(|w| (w.t_start, w.t_end))
            .collect();
        windows.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in windows.windows(2) {
            if pair[1].0 < pair[0].1 {
                return Err(Error::InvalidArgument(format!(
                    "overlapping outage windows for beam {beam}"
                )));
            }
        }
    }
    Ok(beams
        .iter()
        .map(|s| {
            let mut out = *s;
            for w in schedule {
                if s.t >= w.t_start && s.t < w.t_end {
                    for b in &w.beams {
                        out.valid[*b] = false;
                    }
                }
            }
            out
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{rotation_from_euler, EulerAngles, GeodeticPosition, RotationMatrix};
    use approx::assert_abs_diff_eq;

    fn origin() -> GeodeticPosition {
        GeodeticPosition::new(0.5, 0.6, -10.0).unwrap()
    }

    fn straight_traj(v_n: Vector3<f64>, yaw: f64, n: usize) -> Vec<NavState> {
        let att = rotation_from_euler(&EulerAngles::new(0.0, 0.0, yaw)).unwrap();
        (0..n)
            .map(|i| NavState::new(i as f64 * 0.01, origin(), v_n, att))
            .collect()
    }

    #[test]
    fn janus_geometry_properties() {
        let geom = default_beam_geometry();
        let mut sum = Vector3::zeros();
        for b in geom.beam_directions() {
            assert_abs_diff_eq!(b.norm(), 1.0, epsilon = 1e-15);
            sum += b;
        }
        // Horizontal components cancel by symmetry.
        assert_abs_diff_eq!(
            sum,
            Vector3::new(0.0, 0.0, 4.0 * 20.0_f64.to_radians().cos()),
            epsilon = 1e-12
        );
        // Rank via singular values of the stacked matrix.
        let sv = geom.direction_matrix().svd(false, false).singular_values;
        assert!(sv[2] > 0.1);
    }

    #[test]
    fn ideal_projection() {
        let traj = straight_traj(Vector3::new(1.0, 0.0, 0.0), 0.0, 101);
        let geom = default_beam_geometry();
        let out = simulate_dvl(&traj, &geom, &DvlErrorModel::default(), 1.0, 0).unwrap();
        assert_eq!(out.len(), 2);
        for (i, b) in geom.beam_directions().iter().enumerate() {
            assert_abs_diff_eq!(
                out[0].beam_velocity[i],
                b.dot(&Vector3::new(1.0, 0.0, 0.0)),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn bias_passthrough_at_zero_velocity() {
        let traj = straight_traj(Vector3::zeros(), 0.0, 101);
        let geom = default_beam_geometry();
        let model = DvlErrorModel {
            bias_b: Vector3::new(0.1, 0.0, 0.0),
            ..Default::default()
        };
        let out = simulate_dvl(&traj, &geom, &model, 1.0, 0).unwrap();
        for (i, b) in geom.beam_directions().iter().enumerate() {
            assert_abs_diff_eq!(
                out[0].beam_velocity[i],
                b.dot(&Vector3::new(0.1, 0.0, 0.0)),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn scale_recovered_by_ls_inversion() {
        let v_n = Vector3::new(1.0, -0.4, 0.1);
        let traj = straight_traj(v_n, 0.7, 101);
        let geom = default_beam_geometry();
        let model = DvlErrorModel {
            scale_k: Vector3::new(0.05, 0.05, 0.05),
            ..Default::default()
        };
        let out = simulate_dvl(&traj, &geom, &model, 1.0, 0).unwrap();
        let v = crate::fusion::ls_beam_velocity(&out[0], &geom).unwrap();
        let v_d = traj[0].attitude.transpose().apply(&v_n);
        assert_abs_diff_eq!(v, 1.05 * v_d, epsilon = 1e-12);
    }

    #[test]
    fn mounting_rotation_applied() {
        let v_n = Vector3::new(1.0, 0.0, 0.0);
        let traj = straight_traj(v_n, 0.0, 101);
        let geom = default_beam_geometry();
        let mounting =
            rotation_from_euler(&EulerAngles::new(0.0, 0.0, std::f64::consts::FRAC_PI_2)).unwrap();
        let model = DvlErrorModel {
            mounting_rotation: mounting,
            ..Default::default()
        };
        let out = simulate_dvl(&traj, &geom, &model, 1.0, 0).unwrap();
        let v = crate::fusion::ls_beam_velocity(&out[0], &geom).unwrap();
        assert_abs_diff_eq!(v, mounting.apply(&v_n), epsilon = 1e-12);
    }

    #[test]
    fn excessive_rate_rejected() {
        let traj = straight_traj(Vector3::zeros(), 0.0, 101);
        let geom = default_beam_geometry();
        assert!(simulate_dvl(&traj, &geom, &DvlErrorModel::default(), 500.0, 0).is_err());
    }

    #[test]
    fn seeded_determinism() {
        let traj = straight_traj(Vector3::new(1.0, 0.0, 0.0), 0.0, 1001);
        let geom = default_beam_geometry();
        let model = DvlErrorModel {
            beam_noise_std: 0.02,
            ..Default::default()
        };
        let a = simulate_dvl(&traj, &geom, &model, 5.0, 9).unwrap();
        let b = simulate_dvl(&traj, &geom, &model, 5.0, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn outage_empty_schedule_is_identity() {
        let traj = straight_traj(Vector3::new(1.0, 0.0, 0.0), 0.0, 501);
        let geom = default_beam_geometry();
        let beams = simulate_dvl(&traj, &geom, &DvlErrorModel::default(), 1.0, 0).unwrap();
        let out = apply_beam_outage(&beams, &[]).unwrap();
        assert_eq!(beams, out);
    }

    #[test]
    fn outage_windows_clear_flags() {
        let traj = straight_traj(Vector3::new(1.0, 0.0, 0.0), 0.0, 1001);
        let geom = default_beam_geometry();
        let beams = simulate_dvl(&traj, &geom, &DvlErrorModel::default(), 1.0, 0).unwrap();
        // Full outage.
        let all = apply_beam_outage(
            &beams,
            &[OutageWindow {
                t_start: 2.0,
                t_end: 5.0,
                beams: vec![0, 1, 2, 3],
            }],
        )
        .unwrap();
        for s in &all {
            let expect = if s.t >= 2.0 && s.t < 5.0 { 0 } else { 4 };
            assert_eq!(s.valid_count(), expect, "t={}", s.t);
        }
        // Dropping two beams leaves exactly two valid inside the window.
        let partial = apply_beam_outage(
            &beams,
            &[OutageWindow {
                t_start: 3.0,
                t_end: 7.0,
                beams: vec![1, 2],
            }],
        )
        .unwrap();
        for s in &partial {
            let expect = if s.t >= 3.0 && s.t < 7.0 { 2 } else { 4 };
            assert_eq!(s.valid_count(), expect, "t={}", s.t);
        }
    }

    #[test]
    fn malformed_schedule_rejected() {
        let traj = straight_traj(Vector3::zeros(), 0.0, 101);
        let geom = default_beam_geometry();
        let beams = simulate_dvl(&traj, &geom, &DvlErrorModel::default(), 1.0, 0).unwrap();
        let bad_order = OutageWindow {
            t_start: 5.0,
            t_end: 2.0,
            beams: vec![0],
        };
        assert!(apply_beam_outage(&beams, &[bad_order]).is_err());
        let overlap = [
            OutageWindow {
                t_start: 0.0,
                t_end: 3.0,
                beams: vec![1],
            },
            OutageWindow {
                t_start: 2.0,
                t_end: 4.0,
                beams: vec![1],
            },
        ];
        assert!(apply_beam_outage(&beams, &overlap).is_err());
        let bad_index = OutageWindow {
            t_start: 0.0,
            t_end: 1.0,
            beams: vec![4],
        };
        assert!(apply_beam_outage(&beams, &[bad_index]).is_err());
    }

    #[test]
    fn lever_arm_contributes_during_rotation() {
        // Spinning body with a lever arm sees an extra ω×l velocity.
        let n = 201;
        let spin = 0.5; // rad/s yaw rate
        let traj: Vec<NavState> = (0..n)
            .map(|i| {
                let t = i as f64 * 0.01;
                let att = rotation_from_euler(&EulerAngles::new(0.0, 0.0, spin * t)).unwrap();
                NavState::new(t, origin(), Vector3::zeros(), att)
            })
            .collect();
        let geom = default_beam_geometry();
        let model = DvlErrorModel {
            lever_arm: Vector3::new(1.0, 0.0, 0.0),
            mounting_rotation: RotationMatrix::identity(),
            ..Default::default()
        };
        let out = simulate_dvl(&traj, &geom, &model, 1.0, 0).unwrap();
        // ω_nb×l = (0,0,spin)×(1,0,0) = (0, spin, 0).
        let expected = Vector3::new(0.0, spin, 0.0);
        let v = crate::fusion::ls_beam_velocity(&out[1], &geom).unwrap();
        assert_abs_diff_eq!(v, expected, epsilon = 1e-3);
    }
}
