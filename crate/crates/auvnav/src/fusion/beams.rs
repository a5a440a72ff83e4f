//! Least-squares beam-to-velocity solver.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::sim::{DvlBeamGeometry, DvlBeamSample};
use crate::{Error, Result};

/// Least-squares DVL velocity from the valid beams:
/// `v̂ = (TᵀT)⁻¹ Tᵀ y` over the valid rows only, the exact minimizer of
/// `‖y − T v‖²`.
pub fn ls_beam_velocity(sample: &DvlBeamSample, geom: &DvlBeamGeometry) -> Result<Vector3<f64>> {
    let valid = sample.valid_count();
    if valid < 3 {
        return Err(Error::InsufficientBeams {
            valid,
            required: 3,
        });
    }
    let (t_mat, y) = valid_rows(sample, geom);
    // Rank check on the reduced direction matrix.
    let sv = t_mat.clone().svd(false, false).singular_values;
    if sv[2] < 1e-9 {
        return Err(Error::RankDeficient(
            "valid beam directions do not span 3D".into(),
        ));
    }
    let tt = t_mat.transpose() * &t_mat;
    let tt_inv = Matrix3::from_iterator(tt.iter().copied())
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient("normal equations singular".into()))?;
    let rhs = t_mat.transpose() * y;
    Ok(tt_inv * Vector3::new(rhs[0], rhs[1], rhs[2]))
}

/// Measurement covariance of the least-squares velocity implied by
/// independent per-beam noise: `σ² (TᵀT)⁻¹` over the valid rows, in the
/// DVL frame.
pub fn loose_noise_from_beams(
    sample: &DvlBeamSample,
    geom: &DvlBeamGeometry,
    beam_noise_std: f64,
) -> Result<Matrix3<f64>> {
    if sample.valid_count() < 3 {
        return Err(Error::InsufficientBeams {
            valid: sample.valid_count(),
            required: 3,
        });
    }
    let (t_mat, _) = valid_rows(sample, geom);
    let tt = t_mat.transpose() * &t_mat;
    let tt_inv = Matrix3::from_iterator(tt.iter().copied())
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient("normal equations singular".into()))?;
    Ok(beam_noise_std.powi(2) * tt_inv)
}

fn valid_rows(sample: &DvlBeamSample, geom: &DvlBeamGeometry) -> (DMatrix<f64>, DVector<f64>) {
    let n = sample.valid_count();
    let mut t_mat = DMatrix::zeros(n, 3);
    let mut y = DVector::zeros(n);
    let mut row = 0;
    for (i, b) in geom.beam_directions().iter().enumerate() {
        if sample.valid[i] {
            t_mat.row_mut(row).copy_from(&b.transpose());
            y[row] = sample.beam_velocity[i];
            row += 1;
        }
    }
    (t_mat, y)
}
