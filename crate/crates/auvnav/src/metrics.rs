//! Trajectory-level and attitude-level evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::alignment::cyclic_error;
use crate::earth::EarthModel;
use crate::frames::{euler_from_rotation, NavState, RotationMatrix};
use crate::{Error, Result};

/// Horizontal trajectory error metrics.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrajectoryMetrics {
    /// Position RMSE, m.
    pub prmse: f64,
    /// Mean absolute trajectory error, m.
    pub mate: f64,
    /// Total distance error: mean of error over cumulative path length,
    /// percent. Can exceed 100 for divergent estimators.
    pub tde: f64,
    /// Final distance error, m.
    pub fde: f64,
}

/// Per-run metric collection. Stages that did not run stay `None` rather
/// than reporting zero.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub vrmse: Option<f64>,
    pub heading_ae_deg: Option<f64>,
    pub heading_cmse_rad2: Option<f64>,
    pub mounting_rmse_deg: Option<f64>,
    pub trajectory: Option<TrajectoryMetrics>,
}

impl MetricsReport {
    /// Flat (metric, value, unit) rows for the report CSV, containing only
    /// the metrics that were computed.
    pub fn rows(&self) -> Vec<(String, f64, String)> {
        let mut rows = Vec::new();
        if let Some(v) = self.vrmse {
            rows.push(("vrmse".into(), v, "m/s".into()));
        }
        if let Some(v) = self.heading_ae_deg {
            rows.push(("heading_ae".into(), v, "deg".into()));
        }
        if let Some(v) = self.heading_cmse_rad2 {
            rows.push(("heading_cmse".into(), v, "rad2".into()));
        }
        if let Some(v) = self.mounting_rmse_deg {
            rows.push(("mounting_rmse".into(), v, "deg".into()));
        }
        if let Some(t) = self.trajectory {
            rows.push(("prmse".into(), t.prmse, "m".into()));
            rows.push(("mate".into(), t.mate, "m".into()));
            rows.push(("tde".into(), t.tde, "percent".into()));
            rows.push(("fde".into(), t.fde, "m".into()));
        }
        rows
    }
}

/// Horizontal position error between two states, in meters, using local
/// curvature radii at the truth position.
pub fn horizontal_error_m(earth: &EarthModel, estimated: &NavState, truth: &NavState) -> f64 {
    let rm = earth.meridian_radius(truth.position.latitude) + truth.position.height;
    let rn = earth.normal_radius(truth.position.latitude) + truth.position.height;
    let dn = (estimated.position.latitude - truth.position.latitude) * rm;
    let de = (estimated.position.longitude - truth.position.longitude)
        * rn
        * truth.position.latitude.cos();
    dn.hypot(de)
}

/// Computes PRMSE, MATE, TDE and FDE over time-aligned estimated and truth
/// trajectories. TDE epochs with less than 1 m of accumulated ground-truth
/// path are skipped.
pub fn evaluate_trajectory(
    earth: &EarthModel,
    estimated: &[NavState],
    truth: &[NavState],
) -> Result<TrajectoryMetrics> {
    if estimated.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: estimated.len(),
            right: truth.len(),
        });
    }
    if estimated.len() < 2 {
        return Err(Error::InvalidArgument(
            "trajectory evaluation needs at least 2 samples".into(),
        ));
    }

    let mut sum_sq = 0.0;
    let mut sum_abs = 0.0;
    let mut tde_sum = 0.0;
    let mut tde_count = 0usize;
    let mut path = 0.0;
    let mut last_err = 0.0;

    for i in 0..truth.len() {
        let err = horizontal_error_m(earth, &estimated[i], &truth[i]);
        sum_sq += err * err;
        sum_abs += err;
        last_err = err;
        if i > 0 {
            path += horizontal_error_m(earth, &truth[i], &truth[i - 1]);
        }
        if path >= 1.0 {
            tde_sum += err / path;
            tde_count += 1;
        }
    }
    if path <= 0.0 {
        return Err(Error::InvalidArgument("zero-length ground-truth path".into()));
    }
    let n = truth.len() as f64;
    Ok(TrajectoryMetrics {
        prmse: (sum_sq / n).sqrt(),
        mate: sum_abs / n,
        tde: if tde_count > 0 {
            100.0 * tde_sum / tde_count as f64
        } else {
            0.0
        },
        fde: last_err,
    })
}

/// Attitude error metric: root of the mean squared per-angle cyclic error
/// over (roll, pitch, yaw), in degrees. Symmetric in its arguments.
pub fn evaluate_mounting(estimated: &RotationMatrix, truth: &RotationMatrix) -> f64 {
    let ee = euler_from_rotation(estimated);
    let et = euler_from_rotation(truth);
    let d_roll = cyclic_error(ee.roll, et.roll);
    let d_pitch = cyclic_error(ee.pitch, et.pitch);
    let d_yaw = cyclic_error(ee.yaw, et.yaw);
    let mse = (d_roll * d_roll + d_pitch * d_pitch + d_yaw * d_yaw) / 3.0;
    mse.sqrt().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::earth::WGS84;
    use crate::frames::{rotation_from_euler, EulerAngles, GeodeticPosition};
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;

    fn state_at(north_m: f64, east_m: f64, t: f64) -> NavState {
        let lat0 = 0.5;
        let rm = WGS84.meridian_radius(lat0);
        let rn = WGS84.normal_radius(lat0);
        NavState::new(
            t,
            GeodeticPosition::new(lat0 + north_m / rm, east_m / (rn * lat0.cos()), 0.0).unwrap(),
            Vector3::new(1.0, 0.0, 0.0),
            RotationMatrix::identity(),
        )
    }

    #[test]
    fn identical_trajectories_give_zeros() {
        let traj: Vec<NavState> = (0..100).map(|i| state_at(i as f64, 0.0, i as f64)).collect();
        let m = evaluate_trajectory(&WGS84, &traj, &traj).unwrap();
        assert_eq!(m.prmse, 0.0);
        assert_eq!(m.mate, 0.0);
        assert_eq!(m.tde, 0.0);
        assert_eq!(m.fde, 0.0);
    }

    #[test]
    fn constant_offset_metrics() {
        // 3 m constant east offset over a 100 m northward path.
        let truth: Vec<NavState> = (0..101).map(|i| state_at(i as f64, 0.0, i as f64)).collect();
        let est: Vec<NavState> = (0..101).map(|i| state_at(i as f64, 3.0, i as f64)).collect();
        let m = evaluate_trajectory(&WGS84, &est, &truth).unwrap();
        // The constant geodetic offset converts to slightly different
        // meters as the latitude changes along the path.
        assert_abs_diff_eq!(m.prmse, 3.0, epsilon = 1e-4);
        assert_abs_diff_eq!(m.mate, 3.0, epsilon = 1e-4);
        assert_abs_diff_eq!(m.fde, 3.0, epsilon = 1e-4);
        assert!(m.prmse >= m.mate);
    }

    #[test]
    fn linear_drift_matches_closed_form() {
        // e(t) = 0.1·t on a 1 m/s northward line sampled at 1 Hz for T s:
        // FDE = 0.1·T and PRMSE → 0.1·T/√3 as the sampling grows dense.
        let t_end = 200.0;
        let n = 2001;
        let dt = t_end / (n - 1) as f64;
        let truth: Vec<NavState> = (0..n).map(|i| state_at(i as f64 * dt, 0.0, i as f64 * dt)).collect();
        let est: Vec<NavState> = (0..n)
            .map(|i| state_at(i as f64 * dt, 0.1 * i as f64 * dt, i as f64 * dt))
            .collect();
        let m = evaluate_trajectory(&WGS84, &est, &truth).unwrap();
        assert_abs_diff_eq!(m.fde, 0.1 * t_end, epsilon = 0.01);
        assert_abs_diff_eq!(m.prmse, 0.1 * t_end / 3.0_f64.sqrt(), epsilon = 0.05);
        assert!(m.prmse >= m.mate);
    }

    #[test]
    fn tde_decreases_with_mission_length_under_constant_error() {
        let make = |n: usize| -> (Vec<NavState>, Vec<NavState>) {
            let truth: Vec<NavState> = (0..n).map(|i| state_at(i as f64, 0.0, i as f64)).collect();
            let est: Vec<NavState> = (0..n).map(|i| state_at(i as f64, 2.0, i as f64)).collect();
            (est, truth)
        };
        let mut prev = f64::INFINITY;
        for n in [50, 100, 200, 400] {
            let (est, truth) = make(n);
            let m = evaluate_trajectory(&WGS84, &est, &truth).unwrap();
            assert!(m.tde < prev, "TDE not decreasing at n={n}");
            prev = m.tde;
        }
    }

    #[test]
    fn length_mismatch_and_zero_path_rejected() {
        let traj: Vec<NavState> = (0..10).map(|i| state_at(i as f64, 0.0, i as f64)).collect();
        assert!(evaluate_trajectory(&WGS84, &traj[..9], &traj).is_err());
        let still: Vec<NavState> = (0..10).map(|i| state_at(0.0, 0.0, i as f64)).collect();
        assert!(evaluate_trajectory(&WGS84, &still, &still).is_err());
    }

    #[test]
    fn mounting_metric_identity_and_single_axis() {
        let r = rotation_from_euler(&EulerAngles::new(0.1, 0.2, 0.3)).unwrap();
        assert_eq!(evaluate_mounting(&r, &r), 0.0);
        let truth = RotationMatrix::identity();
        let est = rotation_from_euler(&EulerAngles::new(0.0, 0.0, 1.0_f64.to_radians())).unwrap();
        assert_abs_diff_eq!(
            evaluate_mounting(&est, &truth),
            1.0 / 3.0_f64.sqrt(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn mounting_metric_symmetric() {
        let a = rotation_from_euler(&EulerAngles::new(0.2, -0.1, 0.7)).unwrap();
        let b = rotation_from_euler(&EulerAngles::new(-0.3, 0.05, -1.2)).unwrap();
        assert_abs_diff_eq!(
            evaluate_mounting(&a, &b),
            evaluate_mounting(&b, &a),
            epsilon = 1e-9
        );
    }

    #[test]
    fn report_rows_skip_missing_metrics() {
        let mut report = MetricsReport::default();
        assert!(report.rows().is_empty());
        report.vrmse = Some(0.3);
        let rows = report.rows();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].0, "vrmse");
    }
}
