//! Attitude-decomposition initial alignment: observation-track
//! construction, the dual-vector analytic solver and the
//! optimization-based Wahba/quaternion solver.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::earth::EarthModel;
use crate::frames::{exp_so3, skew, GeodeticPosition, RotationMatrix};
use crate::sim::ImuSample;
use crate::{Error, Result};

use super::{attitude_euler, AlignmentResult, ObservationPair, COLINEARITY_GATE_RAD};

/// Rotation tracks of the decomposition, sampled at `t0` and then at every
/// IMU timestamp: `times[0] = t0` with both tracks at identity.
#[derive(Clone, Debug)]
pub struct AttitudeTracks {
    pub times: Vec<f64>,
    /// `T_{n0}^{n}(t)`: navigation-frame rotation since t0 (Earth rate).
    pub nav_from_frozen: Vec<RotationMatrix>,
    /// `T_{b}^{b0}(t)`: body rotation since t0 (gyroscope integration).
    pub frozen_from_body: Vec<RotationMatrix>,
}

/// Integrates the two rotation tracks of the attitude decomposition.
///
/// `T_{n0}^{n}` follows the Earth rate at the given latitude in closed
/// form; `T_{b}^{b0}` integrates the gyroscope readings with each sample
/// held over the interval ending at its timestamp.
pub fn decompose_attitude_tracks(
    earth: &EarthModel,
    imu: &[ImuSample],
    lat: f64,
    t0: f64,
) -> Result<AttitudeTracks> {
    if lat.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::SingularLatitude { lat_rad: lat });
    }
    let omega_ie = earth.earth_rate_n(lat);

    let mut times = Vec::with_capacity(imu.len() + 1);
    let mut nav_from_frozen = Vec::with_capacity(imu.len() + 1);
    let mut frozen_from_body = Vec::with_capacity(imu.len() + 1);
    times.push(t0);
    nav_from_frozen.push(RotationMatrix::identity());
    frozen_from_body.push(RotationMatrix::identity());

    let mut t_prev = t0;
    let mut body = RotationMatrix::identity();
    for (i, s) in imu.iter().enumerate() {
        let dt = s.t - t_prev;
        if dt <= 0.0 {
            return Err(Error::NonMonotoneTimestamps { index: i, t: s.t });
        }
        body = body.compose(&exp_so3(&(s.angular_rate_b * dt)));
        times.push(s.t);
        frozen_from_body.push(body);
        nav_from_frozen.push(exp_so3(&(-omega_ie * (s.t - t0))));
        t_prev = s.t;
    }
    Ok(AttitudeTracks {
        times,
        nav_from_frozen,
        frozen_from_body,
    })
}

/// Builds time-integrated gravity observation pairs
/// `u_b0(t) = ∫ T_b^{b0} f^b dτ` and `u_n0(t) = ∫ T_n^{n0} (−g^n) dτ`
/// at the requested sample times (nearest IMU timestamps are used).
pub fn integrated_observation_pairs(
    earth: &EarthModel,
    imu: &[ImuSample],
    lat: f64,
    t0: f64,
    sample_times: &[f64],
) -> Result<Vec<ObservationPair>> {
    if imu.len() < 2 {
        return Err(Error::InvalidArgument(
            "alignment window shorter than two IMU periods".into(),
        ));
    }
    let tracks = decompose_attitude_tracks(earth, imu, lat, t0)?;
    let gravity = earth.gravity_n(&GeodeticPosition::new(lat, 0.0, 0.0)?);
    let minus_g = -gravity;
    let omega_ie = earth.earth_rate_n(lat);

    // Running integrals, with midpoint quadrature over each IMU interval.
    let mut u_b0 = Vector3::zeros();
    let mut u_n0 = Vector3::zeros();
    let mut integrals_b = Vec::with_capacity(tracks.times.len());
    let mut integrals_n = Vec::with_capacity(tracks.times.len());
    integrals_b.push(u_b0);
    integrals_n.push(u_n0);
    for (i, s) in imu.iter().enumerate() {
        let t_prev = tracks.times[i];
        let dt = s.t - t_prev;
        // Body side: rotate the held force by the track at mid-interval.
        let body_mid = tracks.frozen_from_body[i]
            .compose(&exp_so3(&(s.angular_rate_b * (dt / 2.0))));
        u_b0 += body_mid.apply(&s.specific_force_b) * dt;
        // Navigation side: T_n^{n0}(τ) = exp(+ω_ie (τ − t0)).
        let t_mid = t_prev + dt / 2.0 - t0;
        let nav_mid = exp_so3(&(omega_ie * t_mid));
        u_n0 += nav_mid.apply(&minus_g) * dt;
        integrals_b.push(u_b0);
        integrals_n.push(u_n0);
    }

    let t_first = tracks.times[0];
    let t_last = *tracks.times.last().unwrap();
    let mut out = Vec::with_capacity(sample_times.len());
    for &ts in sample_times {
        if ts < t_first || ts > t_last + 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "sample time {ts} outside the alignment window [{t_first}, {t_last}]"
            )));
        }
        // Nearest track index.
        let idx = tracks
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - ts).abs().total_cmp(&(b.1 - ts).abs()))
            .map(|(i, _)| i)
            .unwrap();
        out.push(ObservationPair {
            t: tracks.times[idx],
            u_n0: integrals_n[idx],
            u_b0: integrals_b[idx],
        });
    }
    Ok(out)
}

/// Dual-vector analytic alignment from two non-colinear observation pairs.
///
/// Stacks `[u₁ᵀ; u₂ᵀ; (u₁×u₂)ᵀ]` in each frame and solves for the rotation
/// mapping the navigation stack onto the body stack, projected to the
/// nearest proper rotation.
pub fn dva_align(pair1: &ObservationPair, pair2: &ObservationPair) -> Result<AlignmentResult> {
    let angle = angle_between(&pair1.u_n0, &pair2.u_n0)?;
    if angle <= COLINEARITY_GATE_RAD {
        return Err(Error::DegenerateGeometry(format!(
            "observation separation {angle:.3e} rad at or below the colinearity gate"
        )));
    }

    let cross_n = pair1.u_n0.cross(&pair2.u_n0);
    let cross_b = pair1.u_b0.cross(&pair2.u_b0);
    // Row scaling (same factors on both stacks) improves conditioning
    // without changing the exact solution.
    let s1 = pair1.u_n0.norm();
    let s2 = pair2.u_n0.norm();
    let s3 = cross_n.norm();
    if s3 == 0.0 {
        return Err(Error::DegenerateGeometry("exactly colinear observations".into()));
    }
    let m_n = Matrix3::from_rows(&[
        (pair1.u_n0 / s1).transpose(),
        (pair2.u_n0 / s2).transpose(),
        (cross_n / s3).transpose(),
    ]);
    let m_b = Matrix3::from_rows(&[
        (pair1.u_b0 / s1).transpose(),
        (pair2.u_b0 / s2).transpose(),
        (cross_b / s3).transpose(),
    ]);

    let sv = m_n.svd(false, false).singular_values;
    let condition_indicator = sv[2];
    let inv = m_n
        .try_inverse()
        .ok_or_else(|| Error::DegenerateGeometry("singular navigation-frame stack".into()))?;
    // u_b = T u_n row-wise means M_b = M_n Tᵀ, so T = (M_n⁻¹ M_b)ᵀ.
    let rotation =
        RotationMatrix::from_matrix_reorthonormalized((inv * m_b).transpose())?;

    let residual_rms = pair_residual_rms(&[*pair1, *pair2], &rotation);
    Ok(AlignmentResult {
        rotation,
        euler: attitude_euler(&rotation),
        method: "dva",
        window: pair2.t - pair1.t,
        condition_indicator,
        residual_rms,
    })
}

/// Optimization-based alignment: solves Wahba's problem over all pairs
/// (unit weights on normalized observations) through the largest
/// eigenvector of the 4×4 quaternion profile matrix.
pub fn oba_align(pairs: &[ObservationPair]) -> Result<AlignmentResult> {
    if pairs.len() < 2 {
        return Err(Error::InvalidArgument(
            "OBA needs at least two observation pairs".into(),
        ));
    }
    // Aggregate non-colinearity: widest separation from the first
    // observation (Earth-rate geometry separates monotonically in time).
    let mut max_angle: f64 = 0.0;
    for p in &pairs[1..] {
        max_angle = max_angle.max(angle_between(&pairs[0].u_n0, &p.u_n0)?);
    }
    if max_angle <= COLINEARITY_GATE_RAD {
        return Err(Error::DegenerateGeometry(format!(
            "observation spread {max_angle:.3e} rad at or below the colinearity gate"
        )));
    }

    // Profile matrix over normalized pairs: M = Σ û_b0 û_n0ᵀ.
    let mut profile = Matrix3::zeros();
    for p in pairs {
        let nb = p.u_b0.norm();
        let nn = p.u_n0.norm();
        if nb == 0.0 || nn == 0.0 {
            return Err(Error::InvalidArgument("zero-length observation".into()));
        }
        profile += (p.u_b0 / nb) * (p.u_n0 / nn).transpose();
    }

    // Davenport matrix for q = [v; w] maximizing tr(R(q)·Mᵀ).
    let sigma = profile.trace();
    let sym = profile + profile.transpose();
    let z = Vector3::new(
        profile[(2, 1)] - profile[(1, 2)],
        profile[(0, 2)] - profile[(2, 0)],
        profile[(1, 0)] - profile[(0, 1)],
    );
    let mut k = Matrix4::zeros();
    k.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&(sym - sigma * Matrix3::identity()));
    k.fixed_view_mut::<3, 1>(0, 3).copy_from(&z);
    k.fixed_view_mut::<1, 3>(3, 0).copy_from(&z.transpose());
    k[(3, 3)] = sigma;

    let eigen = nalgebra::SymmetricEigen::new(k);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|a, b| eigen.eigenvalues[*b].total_cmp(&eigen.eigenvalues[*a]));
    let gap = eigen.eigenvalues[order[0]] - eigen.eigenvalues[order[1]];
    if gap.abs() < 1e-12 {
        return Err(Error::AmbiguousAttitude);
    }
    let q: Vector4<f64> = eigen.eigenvectors.column(order[0]).into_owned();
    let v = Vector3::new(q.x, q.y, q.z);
    let w = q.w;
    let m = (w * w - v.norm_squared()) * Matrix3::identity()
        + 2.0 * v * v.transpose()
        + 2.0 * w * skew(&v);
    let rotation = RotationMatrix::from_matrix_reorthonormalized(m)?;

    let sv = profile.svd(false, false).singular_values;
    Ok(AlignmentResult {
        rotation,
        euler: attitude_euler(&rotation),
        method: "oba",
        window: pairs.last().unwrap().t - pairs[0].t,
        condition_indicator: sv[2],
        residual_rms: pair_residual_rms(pairs, &rotation),
    })
}

/// Recomposes the attitude at `t_end` from an initial-alignment result and
/// the IMU record, and returns its yaw:
/// `T_b^n(t_end) = T_{n0}^{n}(t_end) · T_{b0}^{n0} · T_b^{b0}(t_end)`.
pub fn heading_at_end(
    earth: &EarthModel,
    initial: &AlignmentResult,
    imu: &[ImuSample],
    lat: f64,
    t0: f64,
    t_end: f64,
) -> Result<f64> {
    if t_end < t0 {
        return Err(Error::InvalidArgument(format!(
            "t_end {t_end} precedes t0 {t0}"
        )));
    }
    let tracks = decompose_attitude_tracks(earth, imu, lat, t0)?;
    let t_last = *tracks.times.last().unwrap();
    if t_end > t_last + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "t_end {t_end} beyond the IMU record ending at {t_last}"
        )));
    }
    let idx = tracks
        .times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t_end).abs().total_cmp(&(b.1 - t_end).abs()))
        .map(|(i, _)| i)
        .unwrap();
    let body_to_nav = tracks.nav_from_frozen[idx]
        .compose(&initial.rotation.transpose())
        .compose(&tracks.frozen_from_body[idx]);
    Ok(crate::frames::euler_from_rotation(&body_to_nav).yaw)
}

fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> Result<f64> {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InvalidArgument("zero-length observation".into()));
    }
    Ok((a.dot(b) / (na * nb)).clamp(-1.0, 1.0).acos())
}

fn pair_residual_rms(pairs: &[ObservationPair], rotation: &RotationMatrix) -> f64 {
    let sum: f64 = pairs
        .iter()
        .map(|p| {
            let nb = p.u_b0.norm();
            let nn = p.u_n0.norm();
            (p.u_b0 / nb - rotation.apply(&(p.u_n0 / nn))).norm_squared()
        })
        .sum();
    (sum / pairs.len() as f64).sqrt()
}

/// Observation pairs evenly spread over an alignment window, built from an
/// IMU record: the sampling used by the harness and CLI.
pub fn pairs_over_window(
    earth: &EarthModel,
    imu: &[ImuSample],
    lat: f64,
    t0: f64,
    window: f64,
    count: usize,
) -> Result<Vec<ObservationPair>> {
    let times: Vec<f64> = (1..=count)
        .map(|i| t0 + window * i as f64 / count as f64)
        .collect();
    integrated_observation_pairs(earth, imu, lat, t0, &times)
}
