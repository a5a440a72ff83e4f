//! Error-state EKF prediction, measurement updates and the
//! innovation-window adaptive noise estimator.
//!
//! Error-state conventions (all consistent with the measurement matrices
//! in this module; the zero-innovation no-op test pins the signs):
//!
//! - `δv = v̂ − v_true`
//! - estimated attitude `Ĉ_b^n = (I − [ε×]) C_b^n_true` (ε in the
//!   navigation frame), so the fold applies `Ĉ ← exp(ε̂) Ĉ`
//! - bias states are residual errors `b_true − b̂`, accumulated into the
//!   filter's bias estimates on every accepted update
//!
//! which gives the error dynamics `δv̇ = [C f̂ ×] ε + C β_a`,
//! `ε̇ = −C β_g`, biases constant.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::earth::EarthModel;
use crate::frames::{exp_so3, skew};
use crate::sim::{DvlBeamGeometry, DvlBeamSample, ImuSample};
use crate::{Error, Result};

use super::{
    Covariance, EpochRecord, ErrorState, FilterState, FusionConfig, UpdateType, CHI2_GATE_999,
    EPSILON_DIVERGENCE_RAD, STATE_DIM,
};

/// Floor added to the adaptive measurement-noise estimate to keep it
/// positive definite.
pub const ADAPTIVE_NOISE_FLOOR: f64 = 1e-8;

/// Propagates the filter over one IMU interval: strapdown mechanization of
/// the nominal with bias-corrected readings, and first-order covariance
/// propagation `P ← Φ P Φᵀ + Q_d` with `Φ = I + F·dt`.
pub fn ekf_predict(
    earth: &EarthModel,
    fs: &FilterState,
    imu: &ImuSample,
    dt: f64,
    cfg: &FusionConfig,
) -> Result<FilterState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let corrected = ImuSample {
        t: imu.t,
        specific_force_b: imu.specific_force_b - fs.accel_bias,
        angular_rate_b: imu.angular_rate_b - fs.gyro_bias,
    };
    let nominal = crate::strapdown::mechanize_step(earth, &fs.nominal, &corrected, dt)?;

    let c = *fs.nominal.attitude.matrix();
    let f_n = c * corrected.specific_force_b;
    let mut f = Covariance::zeros();
    f.fixed_view_mut::<3, 3>(0, 3).copy_from(&skew(&f_n));
    f.fixed_view_mut::<3, 3>(0, 6).copy_from(&c);
    f.fixed_view_mut::<3, 3>(3, 9).copy_from(&(-c));

    let phi = Covariance::identity() + f * dt;
    let mut p = phi * fs.error_cov * phi.transpose();
    for (i, q) in cfg.process_noise_psd.iter().enumerate() {
        p[(i, i)] += q * dt;
    }
    p = (p + p.transpose()) * 0.5;
    if !p.iter().all(|x| x.is_finite()) {
        return Err(Error::FilterDiverged("covariance became non-finite".into()));
    }

    Ok(FilterState {
        nominal,
        accel_bias: fs.accel_bias,
        gyro_bias: fs.gyro_bias,
        error_cov: p,
    })
}

/// Loosely coupled velocity update. `v_dvl` and `r_dvl` are the
/// least-squares velocity and its covariance in the DVL frame; both are
/// routed through the mounting rotation into the body frame before the
/// residual `δz = Ĉ_n^b v̂ − v^b_DVL` is formed.
pub fn ekf_update_loose(
    fs: &mut FilterState,
    v_dvl: &Vector3<f64>,
    r_dvl: &Matrix3<f64>,
    cfg: &FusionConfig,
    adaptive: &mut AdaptiveNoise,
    t: f64,
) -> Result<EpochRecord> {
    if !v_dvl.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite DVL velocity".into()));
    }
    let t_d_b = cfg.mounting;
    let v_body_meas = t_d_b.apply(v_dvl);
    let r_body = t_d_b.matrix() * r_dvl * t_d_b.matrix().transpose();

    let c_n_b = fs.nominal.attitude.transpose();
    let predicted = c_n_b.apply(&fs.nominal.velocity_n);
    let dz = predicted - v_body_meas;

    let mut h = DMatrix::zeros(3, STATE_DIM);
    h.view_mut((0, 0), (3, 3)).copy_from(c_n_b.matrix());
    h.view_mut((0, 3), (3, 3))
        .copy_from(&(-c_n_b.matrix() * skew(&fs.nominal.velocity_n)));

    apply_update(
        fs,
        &h,
        &DVector::from_column_slice(dz.as_slice()),
        &DMatrix::from_iterator(3, 3, r_body.iter().copied()),
        t,
        UpdateType::LooseAccepted,
        UpdateType::LooseRejected,
        3,
        cfg,
        adaptive,
    )
}

/// Tightly coupled per-beam update: one stacked residual row
/// `δz_i = b_iᵀ Ĉ_n^b v̂ − y_i` per valid beam, with the beam directions
/// expressed in the body frame through the mounting rotation.
pub fn ekf_update_tight(
    fs: &mut FilterState,
    sample: &DvlBeamSample,
    geom: &DvlBeamGeometry,
    cfg: &FusionConfig,
    adaptive: &mut AdaptiveNoise,
) -> Result<EpochRecord> {
    let m = sample.valid_count();
    if m == 0 {
        return Err(Error::InsufficientBeams {
            valid: 0,
            required: 1,
        });
    }
    let t_d_b = cfg.mounting;
    let c_n_b = fs.nominal.attitude.transpose();
    let predicted_body = c_n_b.apply(&fs.nominal.velocity_n);
    let h_v = c_n_b.matrix().clone_owned();
    let h_eps = -c_n_b.matrix() * skew(&fs.nominal.velocity_n);

    let mut h = DMatrix::zeros(m, STATE_DIM);
    let mut dz = DVector::zeros(m);
    let mut row = 0;
    for (i, b_dvl) in geom.beam_directions().iter().enumerate() {
        if !sample.valid[i] {
            continue;
        }
        let b_body = t_d_b.apply(b_dvl);
        dz[row] = b_body.dot(&predicted_body) - sample.beam_velocity[i];
        let hv_row = b_body.transpose() * h_v;
        let he_row = b_body.transpose() * h_eps;
        for c in 0..3 {
            h[(row, c)] = hv_row[c];
            h[(row, 3 + c)] = he_row[c];
        }
        row += 1;
    }
    let r = DMatrix::identity(m, m) * cfg.beam_noise_std.powi(2);

    apply_update(
        fs,
        &h,
        &dz,
        &r,
        sample.t,
        UpdateType::TightAccepted,
        UpdateType::TightRejected,
        m,
        cfg,
        adaptive,
    )
}

/// Shared Kalman update: χ² innovation gating, Joseph-form covariance
/// update, and the fold-and-reset of the estimated error state into the
/// nominal.
#[allow(clippy::too_many_arguments)]
fn apply_update(
    fs: &mut FilterState,
    h: &DMatrix<f64>,
    dz: &DVector<f64>,
    r_nominal: &DMatrix<f64>,
    t: f64,
    accepted: UpdateType,
    rejected: UpdateType,
    beams_used: usize,
    cfg: &FusionConfig,
    adaptive: &mut AdaptiveNoise,
) -> Result<EpochRecord> {
    let m = dz.len();
    let p = DMatrix::from_iterator(STATE_DIM, STATE_DIM, fs.error_cov.iter().copied());

    let r = if cfg.adaptive {
        adaptive.estimate(h, &p).unwrap_or_else(|| r_nominal.clone())
    } else {
        r_nominal.clone()
    };

    let s = h * &p * h.transpose() + &r;
    let s_inv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::FilterDiverged("innovation covariance not invertible".into()))?;
    let nis = (dz.transpose() * &s_inv * dz)[(0, 0)];

    if nis > CHI2_GATE_999[m - 1] {
        return Ok(EpochRecord {
            t,
            update_type: rejected,
            beams_used,
            nis,
            innovation: Some(dz.clone()),
            innovation_cov: Some(s),
            state: fs.nominal,
        });
    }

    let k = &p * h.transpose() * &s_inv;
    let dx = &k * dz;
    let i_kh = DMatrix::identity(STATE_DIM, STATE_DIM) - &k * h;
    let p_new = &i_kh * &p * i_kh.transpose() + &k * &r * k.transpose();

    let mut cov = Covariance::zeros();
    for i in 0..STATE_DIM {
        for j in 0..STATE_DIM {
            cov[(i, j)] = 0.5 * (p_new[(i, j)] + p_new[(j, i)]);
        }
    }

    let mut dx_fixed = nalgebra::SMatrix::<f64, STATE_DIM, 1>::zeros();
    for i in 0..STATE_DIM {
        dx_fixed[i] = dx[i];
    }
    let es = ErrorState::from_vector(&dx_fixed);
    if es.epsilon.norm() >= EPSILON_DIVERGENCE_RAD {
        return Err(Error::FilterDiverged(format!(
            "misalignment correction {:.3} rad exceeds the small-angle gate",
            es.epsilon.norm()
        )));
    }

    // Fold the error estimate into the nominal and reset it to zero.
    fs.nominal.velocity_n -= es.dv_n;
    fs.nominal.attitude = exp_so3(&es.epsilon).compose(&fs.nominal.attitude);
    fs.accel_bias += es.accel_bias;
    fs.gyro_bias += es.gyro_bias;
    fs.error_cov = cov;

    adaptive.push(dz.clone());

    Ok(EpochRecord {
        t,
        update_type: accepted,
        beams_used,
        nis,
        innovation: Some(dz.clone()),
        innovation_cov: Some(s),
        state: fs.nominal,
    })
}

/// Rolling innovation window for covariance-matching adaptive estimation
/// of the measurement noise.
#[derive(Clone, Debug)]
pub struct AdaptiveNoise {
    window: VecDeque<DVector<f64>>,
    capacity: usize,
}

impl AdaptiveNoise {
    pub fn new(capacity: usize) -> Self {
        AdaptiveNoise {
            window: VecDeque::with_capacity(capacity.max(1)),
            capacity: capacity.max(1),
        }
    }

    /// Appends an innovation; a dimension change discards the old window.
    pub fn push(&mut self, innovation: DVector<f64>) {
        if let Some(front) = self.window.front() {
            if front.len() != innovation.len() {
                self.window.clear();
            }
        }
        if self.window.len() == self.capacity {
            self.window.pop_front();
        }
        self.window.push_back(innovation);
    }

    pub fn is_full(&self) -> bool {
        self.window.len() >= self.capacity
    }

    /// Covariance-matching estimate `R̂ = max(Ĉ_inn − H P Hᵀ, floor·I)`
    /// once the window is full; the max is an eigenvalue clamp that keeps
    /// R̂ positive definite.
    pub fn estimate(&self, h: &DMatrix<f64>, p: &DMatrix<f64>) -> Option<DMatrix<f64>> {
        if !self.is_full() {
            return None;
        }
        let dim = self.window.front()?.len();
        if h.nrows() != dim {
            return None;
        }
        let refs: Vec<&DVector<f64>> = self.window.iter().collect();
        Some(adapt_measurement_noise(&refs, h, p, ADAPTIVE_NOISE_FLOOR))
    }
}

/// Innovation-based covariance matching:
/// `R̂ = clamp_psd(Ĉ_inn − H P Hᵀ, floor)` with `Ĉ_inn` the window sample
/// covariance of the innovations.
pub fn adapt_measurement_noise(
    window: &[&DVector<f64>],
    h: &DMatrix<f64>,
    p: &DMatrix<f64>,
    floor: f64,
) -> DMatrix<f64> {
    let dim = window[0].len();
    let mut c_inn = DMatrix::zeros(dim, dim);
    for nu in window {
        c_inn += *nu * nu.transpose();
    }
    c_inn /= window.len() as f64;
    let m = &c_inn - h * p * h.transpose();
    let sym = (&m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let lambda = eig.eigenvalues[i].max(floor);
        let v = eig.eigenvectors.column(i);
        out += lambda * v * v.transpose();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::earth::WGS84;
    use crate::frames::{GeodeticPosition, NavState, RotationMatrix};
    use crate::sim::default_beam_geometry;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::Distribution;

    fn level_state(v: Vector3<f64>) -> NavState {
        NavState::new(
            0.0,
            GeodeticPosition::new(0.5, 0.6, -10.0).unwrap(),
            v,
            RotationMatrix::identity(),
        )
    }

    fn equilibrium_sample(state: &NavState, t: f64) -> ImuSample {
        crate::strapdown::equilibrium_imu(&WGS84, state, t)
    }

    #[test]
    fn predict_zero_noise_zero_cov_stays_zero() {
        let state = level_state(Vector3::zeros());
        let fs = FilterState::new(state, Covariance::zeros());
        let mut cfg = FusionConfig::default();
        cfg.process_noise_psd = [0.0; STATE_DIM];
        let imu = equilibrium_sample(&state, 0.01);
        let out = ekf_predict(&WGS84, &fs, &imu, 0.01, &cfg).unwrap();
        assert!(out.error_cov.abs().max() < 1e-12);
    }

    #[test]
    fn predict_trace_non_decreasing_from_diagonal_cov() {
        let state = level_state(Vector3::new(1.0, 0.0, 0.0));
        let fs = FilterState::new(state, Covariance::identity() * 0.01);
        let cfg = FusionConfig::default();
        let imu = equilibrium_sample(&state, 0.01);
        let out = ekf_predict(&WGS84, &fs, &imu, 0.01, &cfg).unwrap();
        assert!(out.error_cov.trace() >= fs.error_cov.trace());
    }

    #[test]
    fn predict_rejects_bad_dt() {
        let state = level_state(Vector3::zeros());
        let fs = FilterState::new(state, Covariance::identity());
        let imu = equilibrium_sample(&state, 0.0);
        assert!(ekf_predict(&WGS84, &fs, &imu, 0.0, &FusionConfig::default()).is_err());
    }

    /// Independent dense matrix exponential by scaled Taylor series.
    fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
        let n = a.nrows();
        let norm = a.abs().max();
        let scale = norm.log2().ceil().max(0.0) as u32 + 4;
        let a_scaled = a / 2f64.powi(scale as i32);
        let mut term = DMatrix::<f64>::identity(n, n);
        let mut sum = DMatrix::<f64>::identity(n, n);
        for k in 1..24 {
            term = &term * &a_scaled / k as f64;
            sum += &term;
        }
        for _ in 0..scale {
            sum = &sum * sum.clone();
        }
        sum
    }

    #[test]
    fn predict_matches_matrix_exponential_oracle() {
        // Contrived small-dynamics case so the first-order transition is
        // within 1e-8 of the exact exponential.
        let mut state = level_state(Vector3::new(1e-3, 2e-3, 0.0));
        state.velocity_n = Vector3::new(1e-3, 2e-3, 0.0);
        let mut fs = FilterState::new(state, Covariance::identity() * 1e-4);
        // A specific force of ~1e-3 keeps ‖F·dt‖ ≈ 1e-5.
        fs.accel_bias = Vector3::zeros();
        let mut cfg = FusionConfig::default();
        cfg.process_noise_psd = [1e-9; STATE_DIM];
        let dt = 0.01;
        let imu = ImuSample {
            t: dt,
            specific_force_b: Vector3::new(1e-3, -2e-3, 1e-3),
            angular_rate_b: Vector3::zeros(),
        };
        let out = ekf_predict(&WGS84, &fs, &imu, dt, &cfg).unwrap();

        // Oracle: exact Φ = expm(F dt) with the same F blocks.
        let c = *fs.nominal.attitude.matrix();
        let f_n = c * imu.specific_force_b;
        let mut f = DMatrix::<f64>::zeros(STATE_DIM, STATE_DIM);
        for i in 0..3 {
            for j in 0..3 {
                f[(i, 3 + j)] = skew(&f_n)[(i, j)];
                f[(i, 6 + j)] = c[(i, j)];
                f[(3 + i, 9 + j)] = -c[(i, j)];
            }
        }
        let phi = expm(&(f * dt));
        let p0 = DMatrix::from_iterator(STATE_DIM, STATE_DIM, fs.error_cov.iter().copied());
        let mut p_oracle = &phi * p0 * phi.transpose();
        for i in 0..STATE_DIM {
            p_oracle[(i, i)] += cfg.process_noise_psd[i] * dt;
        }
        let mut max_rel: f64 = 0.0;
        for i in 0..STATE_DIM {
            for j in 0..STATE_DIM {
                let diff = (out.error_cov[(i, j)] - p_oracle[(i, j)]).abs();
                max_rel = max_rel.max(diff / p_oracle.abs().max());
            }
        }
        assert!(max_rel < 1e-8, "relative deviation {max_rel}");
    }

    #[test]
    fn zero_innovation_is_a_no_op_and_contracts_covariance() {
        let v = Vector3::new(1.0, -0.5, 0.2);
        let state = level_state(v);
        let mut fs = FilterState::new(state, Covariance::identity() * 0.01);
        let cfg = FusionConfig::default();
        let mut adaptive = AdaptiveNoise::new(cfg.innovation_window);
        // Measurement exactly matches the prediction: v_dvl = C_n^b v (identity mounting).
        let v_dvl = v;
        let r = Matrix3::identity() * 1e-4;
        let before = fs.clone();
        let rec = ekf_update_loose(&mut fs, &v_dvl, &r, &cfg, &mut adaptive, 1.0).unwrap();
        assert_eq!(rec.update_type, UpdateType::LooseAccepted);
        assert_abs_diff_eq!(rec.nis, 0.0, epsilon = 1e-20);
        assert_abs_diff_eq!(fs.nominal.velocity_n, before.nominal.velocity_n, epsilon = 1e-15);
        assert!(fs.nominal.attitude.angle_to(&before.nominal.attitude) < 1e-15);
        assert!(fs.error_cov.trace() < before.error_cov.trace());
        fs.check_covariance().unwrap();
    }

    #[test]
    fn scalar_kalman_hand_algebra() {
        // With C = I, v̂ = 0: H = [I 0 0 0]. P = I, R = I gives gain 0.5
        // and posterior velocity variance 0.5 (hand result).
        let state = level_state(Vector3::zeros());
        let mut fs = FilterState::new(state, Covariance::identity());
        let cfg = FusionConfig::default();
        let mut adaptive = AdaptiveNoise::new(cfg.innovation_window);
        let v_dvl = Vector3::new(-0.2, 0.0, 0.0); // δz = 0 − (−0.2) = +0.2
        let r = Matrix3::identity();
        ekf_update_loose(&mut fs, &v_dvl, &r, &cfg, &mut adaptive, 0.0).unwrap();
        // δv̂ = K δz = 0.5·0.2 = 0.1; fold subtracts it.
        assert_abs_diff_eq!(fs.nominal.velocity_n.x, -0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(fs.error_cov[(0, 0)], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn four_beam_tight_noise_free_innovation_is_zero() {
        let v = Vector3::new(1.2, 0.3, -0.1);
        let state = level_state(v);
        let mut fs = FilterState::new(state, Covariance::identity() * 0.01);
        let cfg = FusionConfig::default();
        let mut adaptive = AdaptiveNoise::new(cfg.innovation_window);
        let geom = default_beam_geometry();
        let mut beam_velocity = [0.0; 4];
        for (i, b) in geom.beam_directions().iter().enumerate() {
            beam_velocity[i] = b.dot(&v); // identity attitude and mounting
        }
        let sample = DvlBeamSample {
            t: 2.0,
            beam_velocity,
            valid: [true; 4],
        };
        let before = fs.nominal;
        let rec = ekf_update_tight(&mut fs, &sample, &geom, &cfg, &mut adaptive).unwrap();
        assert_eq!(rec.update_type, UpdateType::TightAccepted);
        assert!(rec.nis < 1e-18);
        assert_abs_diff_eq!(fs.nominal.velocity_n, before.velocity_n, epsilon = 1e-15);
    }

    #[test]
    fn nis_gate_rejects_outliers() {
        let state = level_state(Vector3::zeros());
        let mut fs = FilterState::new(state, Covariance::identity() * 1e-6);
        let cfg = FusionConfig::default();
        let mut adaptive = AdaptiveNoise::new(cfg.innovation_window);
        let v_dvl = Vector3::new(50.0, 0.0, 0.0); // wildly inconsistent
        let r = Matrix3::identity() * 1e-4;
        let before = fs.clone();
        let rec = ekf_update_loose(&mut fs, &v_dvl, &r, &cfg, &mut adaptive, 0.0).unwrap();
        assert_eq!(rec.update_type, UpdateType::LooseRejected);
        assert!(rec.nis > CHI2_GATE_999[2]);
        assert_eq!(fs.nominal.velocity_n, before.nominal.velocity_n);
        assert_eq!(fs.error_cov, before.error_cov);
    }

    #[test]
    fn oversized_misalignment_flags_divergence() {
        let state = level_state(Vector3::new(10.0, 0.0, 0.0));
        let mut p = Covariance::zeros();
        for i in 0..3 {
            p[(i, i)] = 1e-6;
            p[(3 + i, 3 + i)] = 1.0; // huge attitude uncertainty
            p[(6 + i, 6 + i)] = 1e-12;
            p[(9 + i, 9 + i)] = 1e-12;
        }
        let mut fs = FilterState::new(state, p);
        let cfg = FusionConfig::default();
        let mut adaptive = AdaptiveNoise::new(cfg.innovation_window);
        let v_dvl = Vector3::new(10.0, 6.0, 0.0);
        let r = Matrix3::identity() * 1e-4;
        let err = ekf_update_loose(&mut fs, &v_dvl, &r, &cfg, &mut adaptive, 0.0).unwrap_err();
        assert!(matches!(err, Error::FilterDiverged(_)));
    }

    #[test]
    fn adaptive_floor_on_zero_innovations() {
        let mut adaptive = AdaptiveNoise::new(5);
        for _ in 0..5 {
            adaptive.push(DVector::zeros(3));
        }
        let h = DMatrix::zeros(3, STATE_DIM);
        let p = DMatrix::zeros(STATE_DIM, STATE_DIM);
        let r = adaptive.estimate(&h, &p).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(r[(i, i)], ADAPTIVE_NOISE_FLOOR, epsilon = 1e-20);
        }
    }

    #[test]
    fn adaptive_recovers_true_noise_monte_carlo() {
        // Innovations drawn with known covariance R + HPHᵀ; the estimator
        // mean over many windows must land within 5 % of R.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sigma: f64 = 0.05;
        let hp: f64 = 0.3; // HPHᵀ contribution per axis
        let dist = rand_distr::Normal::new(0.0, (sigma * sigma + hp).sqrt()).unwrap();
        let h = {
            let mut h = DMatrix::zeros(3, STATE_DIM);
            for i in 0..3 {
                h[(i, i)] = 1.0;
            }
            h
        };
        let mut p = DMatrix::zeros(STATE_DIM, STATE_DIM);
        for i in 0..3 {
            p[(i, i)] = hp;
        }
        let trials = 400;
        let window = 25;
        let mut mean_diag = 0.0;
        for _ in 0..trials {
            let mut adaptive = AdaptiveNoise::new(window);
            for _ in 0..window {
                adaptive.push(DVector::from_fn(3, |_, _| dist.sample(&mut rng)));
            }
            let r = adaptive.estimate(&h, &p).unwrap();
            mean_diag += (r[(0, 0)] + r[(1, 1)] + r[(2, 2)]) / 3.0;
        }
        mean_diag /= trials as f64;
        let truth = sigma * sigma;
        assert!(
            (mean_diag - truth).abs() / truth < 0.05,
            "mean R̂ diag {mean_diag} vs {truth}"
        );
    }

    #[test]
    fn adaptive_window_resets_on_dimension_change() {
        let mut adaptive = AdaptiveNoise::new(4);
        for _ in 0..4 {
            adaptive.push(DVector::zeros(3));
        }
        assert!(adaptive.is_full());
        adaptive.push(DVector::zeros(2));
        assert!(!adaptive.is_full());
    }
}
