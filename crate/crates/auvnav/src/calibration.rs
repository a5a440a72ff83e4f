//! GNSS-aided DVL calibration.
//!
//! Two estimators sit behind one result type: the norm-ratio scalar scale
//! baseline (rotation-invariant, averages the per-sample ratio of DVL to
//! reference speed), and a joint per-axis least-squares fit of the
//! comprehensive scale+bias error model against the reference velocity
//! rotated into the DVL frame.

use nalgebra::{Matrix2, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::frames::RotationMatrix;
use crate::sim::GnssVelocitySample;
use crate::{Error, Result};

/// Minimum reference speed for a norm-ratio sample; the ratio is
/// ill-conditioned near zero speed.
pub const SPEED_FLOOR: f64 = 0.1;

/// Default per-axis reference-velocity variance below which that axis's
/// scale is declared unobservable, (m/s)².
pub const EXCITATION_VARIANCE_FLOOR: f64 = 1e-6;

/// Estimated DVL error parameters plus fit diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalibrationResult {
    /// Scalar scale factor from the norm-ratio baseline.
    pub scalar_scale: f64,
    /// Per-axis scale factor vector.
    pub full_scale: [f64; 3],
    /// Per-axis bias, m/s.
    pub full_bias: [f64; 3],
    /// Which axes had enough excitation for scale estimation.
    pub scale_observable: [bool; 3],
    /// Post-fit residual VRMSE, m/s.
    pub residual_vrmse: f64,
    pub samples_used: usize,
}

impl CalibrationResult {
    pub fn validate(&self) -> Result<()> {
        if self.samples_used < 1 {
            return Err(Error::InvalidArgument("samples_used must be ≥ 1".into()));
        }
        if self.residual_vrmse < 0.0 {
            return Err(Error::InvalidArgument("negative residual".into()));
        }
        if self.scalar_scale <= -1.0 || self.full_scale.iter().any(|k| *k <= -1.0) {
            return Err(Error::InvalidArgument("scale component ≤ -1".into()));
        }
        Ok(())
    }
}

/// Calibration application mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMode {
    /// Divide by (1 + k̄) on all axes.
    Scalar,
    /// Remove the per-axis bias, then divide componentwise by (1 + k).
    Full,
}

/// Norm-ratio scalar scale estimate: `k̄ = mean(‖v̂_d‖/‖v_n‖ − 1)`.
///
/// Rotation-invariant because frame transformations preserve vector norms,
/// so neither the mounting nor the attitude needs to be known.
pub fn estimate_scale_norm_ratio(
    dvl: &[Vector3<f64>],
    gnss: &[GnssVelocitySample],
) -> Result<f64> {
    if dvl.len() != gnss.len() {
        return Err(Error::LengthMismatch {
            left: dvl.len(),
            right: gnss.len(),
        });
    }
    if dvl.is_empty() {
        return Err(Error::InvalidArgument("empty calibration window".into()));
    }
    let mut sum = 0.0;
    for (i, (d, g)) in dvl.iter().zip(gnss).enumerate() {
        let speed = g.v_n.norm();
        if speed <= SPEED_FLOOR {
            return Err(Error::DegenerateSample(format!(
                "reference speed {speed} m/s at sample {i} below the {SPEED_FLOOR} m/s floor"
            )));
        }
        sum += d.norm() / speed - 1.0;
    }
    Ok(sum / dvl.len() as f64)
}

/// Joint least-squares fit of the comprehensive error model
/// `v̂_d = (1+k) ∘ (T_b^d T_n^b v_n) + b` over time-aligned samples.
///
/// The model is linear per axis in (kᵢ, bᵢ). Axes whose rotated reference
/// velocity shows no variance are reported unobservable: their scale is
/// pinned to zero and only the bias is fitted.
pub fn calibrate_dvl_full(
    dvl: &[Vector3<f64>],
    gnss: &[GnssVelocitySample],
    attitude: &[RotationMatrix],
    mounting: &RotationMatrix,
) -> Result<CalibrationResult> {
    if dvl.len() != gnss.len() {
        return Err(Error::LengthMismatch {
            left: dvl.len(),
            right: gnss.len(),
        });
    }
    if attitude.len() != gnss.len() {
        return Err(Error::LengthMismatch {
            left: attitude.len(),
            right: gnss.len(),
        });
    }
    let n = dvl.len();
    if n < 7 {
        return Err(Error::InvalidArgument(format!(
            "full calibration needs at least 7 samples, got {n}"
        )));
    }

    // Reference velocity rotated into the DVL frame.
    let reference: Vec<Vector3<f64>> = gnss
        .iter()
        .zip(attitude)
        .map(|(g, att)| mounting.apply(&att.transpose().apply(&g.v_n)))
        .collect();

    let nf = n as f64;
    let mut full_scale = [0.0; 3];
    let mut full_bias = [0.0; 3];
    let mut scale_observable = [false; 3];

    for axis in 0..3 {
        let mean_r: f64 = reference.iter().map(|r| r[axis]).sum::<f64>() / nf;
        let var_r: f64 = reference
            .iter()
            .map(|r| (r[axis] - mean_r).powi(2))
            .sum::<f64>()
            / nf;
        let mean_d: f64 = dvl.iter().map(|d| d[axis]).sum::<f64>() / nf;

        if var_r <= EXCITATION_VARIANCE_FLOOR {
            // No scale information on this axis; bias-only fit with the
            // scale pinned at zero.
            full_bias[axis] = mean_d - mean_r;
            continue;
        }
        scale_observable[axis] = true;

        // Two-parameter normal equations for v̂ = α·r + b with α = 1 + k.
        let srr: f64 = reference.iter().map(|r| r[axis] * r[axis]).sum();
        let srd: f64 = reference
            .iter()
            .zip(dvl)
            .map(|(r, d)| r[axis] * d[axis])
            .sum();
        let a = Matrix2::new(srr, mean_r * nf, mean_r * nf, nf);
        let rhs = Vector2::new(srd, mean_d * nf);
        let sol = a.lu().solve(&rhs).ok_or_else(|| {
            Error::RankDeficient(format!("normal equations singular on axis {axis}"))
        })?;
        full_scale[axis] = sol.x - 1.0;
        full_bias[axis] = sol.y;
    }

    // Post-fit residual against the fitted model.
    let fitted: Vec<Vector3<f64>> = reference
        .iter()
        .map(|r| {
            Vector3::new(
                (1.0 + full_scale[0]) * r.x + full_bias[0],
                (1.0 + full_scale[1]) * r.y + full_bias[1],
                (1.0 + full_scale[2]) * r.z + full_bias[2],
            )
        })
        .collect();
    let residual_vrmse = vrmse(dvl, &fitted)?;

    let scalar_scale = match estimate_scale_norm_ratio(dvl, gnss) {
        Ok(k) => k,
        // Low-speed samples invalidate the norm ratio but not the LS fit.
        Err(Error::DegenerateSample(_)) => 0.0,
        Err(e) => return Err(e),
    };

    let result = CalibrationResult {
        scalar_scale,
        full_scale,
        full_bias,
        scale_observable,
        residual_vrmse,
        samples_used: n,
    };
    result.validate()?;
    Ok(result)
}

/// Corrects a raw DVL-frame velocity with estimated parameters.
pub fn apply_calibration(
    raw: &Vector3<f64>,
    result: &CalibrationResult,
    mode: CalibrationMode,
) -> Result<Vector3<f64>> {
    match mode {
        CalibrationMode::Scalar => {
            let denom = 1.0 + result.scalar_scale;
            if denom <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "1 + scalar scale = {denom} is not positive"
                )));
            }
            Ok(raw / denom)
        }
        CalibrationMode::Full => {
            let mut out = Vector3::zeros();
            for axis in 0..3 {
                let denom = 1.0 + result.full_scale[axis];
                if denom <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "1 + scale[{axis}] = {denom} is not positive"
                    )));
                }
                out[axis] = (raw[axis] - result.full_bias[axis]) / denom;
            }
            Ok(out)
        }
    }
}

/// Velocity RMSE: root of the mean over samples of the summed squared
/// per-axis error.
pub fn vrmse(estimated: &[Vector3<f64>], truth: &[Vector3<f64>]) -> Result<f64> {
    if estimated.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: estimated.len(),
            right: truth.len(),
        });
    }
    if estimated.is_empty() {
        return Err(Error::InvalidArgument("empty sequences".into()));
    }
    let sum: f64 = estimated
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t).norm_squared())
        .sum();
    Ok((sum / estimated.len() as f64).sqrt())
}
