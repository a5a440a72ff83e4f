//! Reference frames, rotation representations, and the nominal navigation
//! state.
//!
//! Conventions used throughout the crate:
//!
//! - Navigation frame `n` is local-level North-East-Down (NED); heading is
//!   measured clockwise from north.
//! - Body frame `b` is vehicle-fixed forward-right-down.
//! - Euler angles are intrinsic ZYX (yaw-pitch-roll): a body→navigation
//!   rotation is `Rz(yaw) · Ry(pitch) · Rx(roll)`.
//! - Rotations are stored as direction-cosine matrices; quaternions appear
//!   only inside the optimization-based alignment solver.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Frobenius-norm tolerance on `RᵀR − I` beyond which a matrix is rejected
/// as a rotation, and above which composition re-orthonormalizes.
pub const ORTHONORMALITY_TOL: f64 = 1e-9;

/// Proper 3×3 rotation matrix (orthonormal, determinant +1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    /// Identity rotation.
    pub fn identity() -> Self {
        RotationMatrix(Matrix3::identity())
    }

    /// Validates orthonormality and properness before wrapping.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let drift = orthonormality_drift(&m);
        if !drift.is_finite() || drift >= ORTHONORMALITY_TOL {
            return Err(Error::InvalidRotation(format!(
                "orthonormality drift {drift:.3e} exceeds {ORTHONORMALITY_TOL:.0e}"
            )));
        }
        let det = m.determinant();
        if (det - 1.0).abs() >= ORTHONORMALITY_TOL {
            return Err(Error::InvalidRotation(format!(
                "determinant {det} is not +1"
            )));
        }
        Ok(RotationMatrix(m))
    }

    /// Wraps a matrix that is close to a rotation, projecting onto the
    /// nearest proper rotation when drift exceeds the tolerance.
    pub fn from_matrix_reorthonormalized(m: Matrix3<f64>) -> Result<Self> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidRotation("non-finite entries".into()));
        }
        if orthonormality_drift(&m) < ORTHONORMALITY_TOL && (m.determinant() - 1.0).abs() < ORTHONORMALITY_TOL {
            return Ok(RotationMatrix(m));
        }
        Ok(RotationMatrix(nearest_rotation(&m)?))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Inverse rotation (= transpose).
    pub fn transpose(&self) -> Self {
        RotationMatrix(self.0.transpose())
    }

    /// Applies the rotation to a vector.
    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// Composes two rotations, re-orthonormalizing only when numerical
    /// drift exceeds [`ORTHONORMALITY_TOL`].
    pub fn compose(&self, rhs: &RotationMatrix) -> Self {
        let p = self.0 * rhs.0;
        if orthonormality_drift(&p) < ORTHONORMALITY_TOL {
            RotationMatrix(p)
        } else {
            RotationMatrix(nearest_rotation(&p).expect("product of rotations is near-orthogonal"))
        }
    }

    /// Geodesic distance to another rotation, in radians. Computed through
    /// the SO(3) logarithm, which stays accurate for tiny angles where
    /// `acos(trace)` saturates near machine precision.
    pub fn angle_to(&self, other: &RotationMatrix) -> f64 {
        log_so3(&RotationMatrix(self.0.transpose() * other.0)).norm()
    }
}

impl std::ops::Mul for RotationMatrix {
    type Output = RotationMatrix;
    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        self.compose(&rhs)
    }
}

/// ‖RᵀR − I‖_F.
pub fn orthonormality_drift(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).norm()
}

/// Nearest proper rotation in the Frobenius sense, via SVD with the
/// determinant correction `U diag(1, 1, det(UVᵀ)) Vᵀ`.
pub fn nearest_rotation(m: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let svd = m.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::InvalidRotation("SVD failed".into())),
    };
    let d = (u * v_t).determinant().signum();
    let fix = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d));
    Ok(u * fix * v_t)
}

/// Intrinsic ZYX Euler angles in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl EulerAngles {
    pub fn new(roll: f64, pitch: f64, yaw: f64) -> Self {
        EulerAngles { roll, pitch, yaw }
    }
}

/// Body→navigation rotation from intrinsic ZYX Euler angles:
/// `R = Rz(yaw) · Ry(pitch) · Rx(roll)`.
pub fn rotation_from_euler(angles: &EulerAngles) -> Result<RotationMatrix> {
    if ![angles.roll, angles.pitch, angles.yaw]
        .iter()
        .all(|a| a.is_finite())
    {
        return Err(Error::InvalidArgument("non-finite Euler angle".into()));
    }
    let (sr, cr) = angles.roll.sin_cos();
    let (sp, cp) = angles.pitch.sin_cos();
    let (sy, cy) = angles.yaw.sin_cos();
    let m = Matrix3::new(
        cy * cp,
        cy * sp * sr - sy * cr,
        cy * sp * cr + sy * sr,
        sy * cp,
        sy * sp * sr + cy * cr,
        sy * sp * cr - cy * sr,
        -sp,
        cp * sr,
        cp * cr,
    );
    Ok(RotationMatrix(m))
}

/// Inverse of [`rotation_from_euler`] away from gimbal lock.
///
/// At `|pitch| = π/2` the roll/yaw split is not unique; the tie-break sets
/// roll = 0 and folds the free angle into yaw so that re-composition still
/// reproduces the input rotation.
pub fn euler_from_rotation(r: &RotationMatrix) -> EulerAngles {
    let m = r.matrix();
    let sp = (-m[(2, 0)]).clamp(-1.0, 1.0);
    let pitch = sp.asin();
    if sp.abs() > 1.0 - 1e-12 {
        // Gimbal lock: with cos(pitch)=0 only roll∓yaw is observable.
        let yaw = if sp > 0.0 {
            f64::atan2(m[(1, 2)], m[(1, 1)])
        } else {
            f64::atan2(-m[(1, 2)], m[(1, 1)])
        };
        EulerAngles::new(0.0, pitch, wrap_angle(yaw))
    } else {
        EulerAngles::new(
            f64::atan2(m[(2, 1)], m[(2, 2)]),
            pitch,
            wrap_angle(f64::atan2(m[(1, 0)], m[(0, 0)])),
        )
    }
}

/// Wraps an angle to (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = a % two_pi;
    if w <= -std::f64::consts::PI {
        w += two_pi;
    } else if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// Skew-symmetric matrix of `v`, satisfying `skew(v) · w = v × w`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// SO(3) exponential map (Rodrigues formula) of a rotation vector.
pub fn exp_so3(w: &Vector3<f64>) -> RotationMatrix {
    let theta = w.norm();
    let k = skew(w);
    let m = if theta < 1e-9 {
        // Second-order series keeps accuracy through theta→0.
        Matrix3::identity() + k + 0.5 * k * k
    } else {
        let a = theta.sin() / theta;
        let b = (1.0 - theta.cos()) / (theta * theta);
        Matrix3::identity() + a * k + b * k * k
    };
    RotationMatrix::from_matrix_reorthonormalized(m).expect("Rodrigues output is a rotation")
}

/// SO(3) logarithm: rotation vector of a rotation matrix.
pub fn log_so3(r: &RotationMatrix) -> Vector3<f64> {
    let m = r.matrix();
    let c = ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let theta = c.acos();
    let axis_raw = Vector3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    );
    if theta < 1e-9 {
        return 0.5 * axis_raw;
    }
    if theta > std::f64::consts::PI - 1e-6 {
        // Near π the off-diagonal differences vanish; recover the axis from
        // the symmetric part instead.
        let a = (m + m.transpose()) / 2.0;
        let mut axis = Vector3::new(
            ((a[(0, 0)] + 1.0) / 2.0).max(0.0).sqrt(),
            ((a[(1, 1)] + 1.0) / 2.0).max(0.0).sqrt(),
            ((a[(2, 2)] + 1.0) / 2.0).max(0.0).sqrt(),
        );
        // Fix component signs against the skew part where it is nonzero.
        if axis_raw.norm() > 1e-12 {
            for i in 0..3 {
                if axis_raw[i] < 0.0 {
                    axis[i] = -axis[i];
                }
            }
        } else {
            // Exactly π: signs from the largest off-diagonal products.
            if a[(0, 1)] < 0.0 {
                axis.y = -axis.y;
            }
            if a[(0, 2)] < 0.0 {
                axis.z = -axis.z;
            }
        }
        return theta * axis.normalize();
    }
    (theta / (2.0 * theta.sin())) * axis_raw
}

/// Geodetic position on the WGS-84 ellipsoid. Height is positive up, so a
/// submerged vehicle has negative height.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPosition {
    /// Latitude in radians, in [−π/2, π/2].
    pub latitude: f64,
    /// Longitude in radians, in (−π, π].
    pub longitude: f64,
    /// Height above the ellipsoid in meters.
    pub height: f64,
}

impl GeodeticPosition {
    pub fn new(latitude: f64, longitude: f64, height: f64) -> Result<Self> {
        if !latitude.is_finite() || latitude.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::InvalidArgument(format!(
                "latitude {latitude} rad out of [-pi/2, pi/2]"
            )));
        }
        if !longitude.is_finite() || !height.is_finite() {
            return Err(Error::InvalidArgument("non-finite position".into()));
        }
        Ok(GeodeticPosition {
            latitude,
            longitude: wrap_angle(longitude),
            height,
        })
    }
}

/// Nominal navigation state: time, geodetic position, NED velocity and
/// body→navigation attitude.
#[derive(Clone, Copy, Debug)]
pub struct NavState {
    pub t: f64,
    pub position: GeodeticPosition,
    /// Velocity in the navigation (NED) frame, m/s.
    pub velocity_n: Vector3<f64>,
    /// Body→navigation rotation.
    pub attitude: RotationMatrix,
}

impl NavState {
    pub fn new(
        t: f64,
        position: GeodeticPosition,
        velocity_n: Vector3<f64>,
        attitude: RotationMatrix,
    ) -> Self {
        NavState {
            t,
            position,
            velocity_n,
            attitude,
        }
    }

    /// Euler angles of the attitude.
    pub fn euler(&self) -> EulerAngles {
        euler_from_rotation(&self.attitude)
    }

    /// Heading (yaw), radians clockwise from north, in (−π, π].
    pub fn heading(&self) -> f64 {
        self.euler().yaw
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn euler_identity() {
        let r = rotation_from_euler(&EulerAngles::new(0.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(r.matrix(), &Matrix3::identity(), epsilon = 1e-15);
    }

    #[test]
    fn yaw_quarter_turn_maps_body_x_to_nav_y() {
        let r = rotation_from_euler(&EulerAngles::new(0.0, 0.0, FRAC_PI_2)).unwrap();
        let mapped = r.apply(&Vector3::x());
        assert_abs_diff_eq!(mapped, Vector3::y(), epsilon = 1e-15);
    }

    #[test]
    fn euler_matches_elementwise_product_oracle() {
        // Frozen from an independent numpy evaluation of Rz(0.3)·Ry(-0.2)·Rx(0.1).
        let r = rotation_from_euler(&EulerAngles::new(0.1, -0.2, 0.3)).unwrap();
        let expected = Matrix3::new(
            0.9362933635841992,
            -0.31299182578546797,
            -0.1593450793079779,
            0.28962947762551555,
            0.9447024859948943,
            -0.1537919979889642,
            0.19866933079506122,
            0.09784339500725571,
            0.975170327201816,
        );
        assert_abs_diff_eq!(r.matrix(), &expected, epsilon = 1e-15);
    }

    #[test]
    fn euler_round_trip() {
        let e = EulerAngles::new(0.1, -0.2, 0.3);
        let r = rotation_from_euler(&e).unwrap();
        let back = euler_from_rotation(&r);
        assert_abs_diff_eq!(back.roll, 0.1, epsilon = 1e-9);
        assert_abs_diff_eq!(back.pitch, -0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(back.yaw, 0.3, epsilon = 1e-9);
    }

    #[test]
    fn euler_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut max_err: f64 = 0.0;
        for _ in 0..10_000 {
            let e = EulerAngles::new(
                rng.gen_range(-PI..PI),
                rng.gen_range(-1.4..1.4),
                rng.gen_range(-PI..PI),
            );
            let r = rotation_from_euler(&e).unwrap();
            let b = euler_from_rotation(&r);
            let r2 = rotation_from_euler(&b).unwrap();
            max_err = max_err.max(r.angle_to(&r2));
        }
        assert!(max_err < 1e-8, "max round-trip error {max_err}");
    }

    #[test]
    fn gimbal_lock_reconstructs_rotation() {
        // Ry(-pi/2) exactly: roll is defined as 0 and the free angle folds
        // into yaw; the recomposed matrix must reproduce the input.
        let r = rotation_from_euler(&EulerAngles::new(0.4, -FRAC_PI_2, -0.7)).unwrap();
        let e = euler_from_rotation(&r);
        assert_eq!(e.roll, 0.0);
        assert_abs_diff_eq!(e.pitch, -FRAC_PI_2, epsilon = 1e-9);
        let r2 = rotation_from_euler(&e).unwrap();
        assert!(r.angle_to(&r2) < 1e-9);
    }

    #[test]
    fn skew_basics() {
        assert_eq!(skew(&Vector3::zeros()), Matrix3::zeros());
        let z = skew(&Vector3::x()) * Vector3::y();
        assert_abs_diff_eq!(z, Vector3::z(), epsilon = 1e-15);
    }

    #[test]
    fn skew_equals_componentwise_cross_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let v = Vector3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let w = Vector3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            // Independent componentwise oracle.
            let cross = Vector3::new(
                v.y * w.z - v.z * w.y,
                v.z * w.x - v.x * w.z,
                v.x * w.y - v.y * w.x,
            );
            assert_abs_diff_eq!(skew(&v) * w, cross, epsilon = 1e-14);
            assert_abs_diff_eq!(skew(&v).transpose(), -skew(&v), epsilon = 0.0);
        }
    }

    #[test]
    fn composition_stays_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut r = RotationMatrix::identity();
        for _ in 0..10_000 {
            let e = EulerAngles::new(
                rng.gen_range(-0.01..0.01),
                rng.gen_range(-0.01..0.01),
                rng.gen_range(-0.01..0.01),
            );
            r = r.compose(&rotation_from_euler(&e).unwrap());
        }
        assert!(orthonormality_drift(r.matrix()) < ORTHONORMALITY_TOL);
    }

    #[test]
    fn exp_log_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let w = Vector3::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            );
            let w = if w.norm() > 3.1 { w.normalize() * 3.1 } else { w };
            let r = exp_so3(&w);
            let back = log_so3(&r);
            assert_abs_diff_eq!(back, w, epsilon = 1e-8);
        }
        // Small-angle branch.
        let w = Vector3::new(1e-12, -2e-12, 3e-13);
        assert_abs_diff_eq!(log_so3(&exp_so3(&w)), w, epsilon = 1e-15);
    }

    #[test]
    fn non_finite_euler_rejected() {
        assert!(rotation_from_euler(&EulerAngles::new(f64::NAN, 0.0, 0.0)).is_err());
    }

    #[test]
    fn invalid_rotation_rejected() {
        let m = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 1e-3, 0.0, 0.0, 1.0);
        assert!(RotationMatrix::from_matrix(m).is_err());
    }

    #[test]
    fn wrap_angle_range() {
        assert_abs_diff_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(0.3), 0.3, epsilon = 1e-15);
    }
}
