//! INS/DVL mounting alignment: the Wahba problem over synchronized
//! velocity pairs, solved by SVD of the cross-covariance.

use nalgebra::{Matrix3, Vector3};

use crate::frames::RotationMatrix;
use crate::{Error, Result};

use super::{AlignmentResult, EXCITATION_RATIO_FLOOR};

/// Estimates the DVL→body rotation `T_d^b` from body-frame and DVL-frame
/// velocity sequences related by `v_b = T_d^b v_d`.
///
/// Solves `min Σ‖v_b − T v_d‖²` by SVD of `B = Σ v_b v_dᵀ` with the
/// proper-rotation correction `T = U diag(1, 1, det(UVᵀ)) Vᵀ`. Requires
/// velocity excitation: σ₂/σ₁ of B must exceed the floor.
pub fn wahba_svd(v_body: &[Vector3<f64>], v_dvl: &[Vector3<f64>]) -> Result<AlignmentResult> {
    if v_body.len() != v_dvl.len() {
        return Err(Error::LengthMismatch {
            left: v_body.len(),
            right: v_dvl.len(),
        });
    }
    if v_body.len() < 2 {
        return Err(Error::InvalidArgument(
            "mounting alignment needs at least two velocity pairs".into(),
        ));
    }
    let mut cross = Matrix3::zeros();
    for (b, d) in v_body.iter().zip(v_dvl) {
        cross += b * d.transpose();
    }
    let svd = cross.svd(true, true);
    let sv = svd.singular_values;
    if sv[0] <= 0.0 {
        return Err(Error::InsufficientExcitation("zero velocity record".into()));
    }
    let ratio = sv[1] / sv[0];
    if ratio < EXCITATION_RATIO_FLOOR {
        return Err(Error::InsufficientExcitation(format!(
            "singular-value ratio {ratio:.3e} below {EXCITATION_RATIO_FLOOR:.0e}; \
             velocity set too close to a single line"
        )));
    }
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let d = (u * v_t).determinant().signum();
    let rotation = RotationMatrix::from_matrix_reorthonormalized(
        u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * v_t,
    )?;

    let n = v_body.len() as f64;
    let residual: f64 = v_body
        .iter()
        .zip(v_dvl)
        .map(|(b, d)| (b - rotation.apply(d)).norm_squared())
        .sum();
    Ok(AlignmentResult {
        rotation,
        euler: crate::frames::euler_from_rotation(&rotation),
        method: "svd",
        window: n,
        condition_indicator: ratio,
        residual_rms: (residual / n).sqrt(),
    })
}

/// Eq.-style Wahba objective for a candidate rotation: mean squared
/// residual of the velocity pairs. Used by tests to certify optimality.
pub fn wahba_objective(
    v_body: &[Vector3<f64>],
    v_dvl: &[Vector3<f64>],
    rotation: &RotationMatrix,
) -> f64 {
    let sum: f64 = v_body
        .iter()
        .zip(v_dvl)
        .map(|(b, d)| (b - rotation.apply(d)).norm_squared())
        .sum();
    sum / v_body.len() as f64
}
