//! INS/DVL error-state extended Kalman filter.
//!
//! The filter tracks a 12-dimensional error state
//! `[δv, ε, b_a, b_g]` around a strapdown nominal solution. DVL data
//! enters either loosely coupled (a least-squares velocity vector, needs
//! ≥ 3 beams) or tightly coupled (raw per-beam rows, works with any beam
//! count ≥ 1); both residual models share the measurement matrices
//!
//! ```text
//! H_lc   = [C_n^b   −C_n^b·[v×]   0   0]
//! H_tc,i = b_iᵀ · H_lc
//! ```
//!
//! Coupling modes are [`CouplingStrategy`] implementations registered by
//! name and selected at runtime from configuration or the CLI.

use nalgebra::{DMatrix, DVector, SMatrix, Vector3};

use crate::frames::{NavState, RotationMatrix};
use crate::sim::{DvlBeamGeometry, DvlBeamSample};
use crate::{Error, Result};

mod beams;
mod ekf;
mod run;

pub use beams::{loose_noise_from_beams, ls_beam_velocity};
pub use ekf::{
    adapt_measurement_noise, ekf_predict, ekf_update_loose, ekf_update_tight, AdaptiveNoise,
};
pub use run::{run_fusion, FusionOutput};

/// Number of error states.
pub const STATE_DIM: usize = 12;

/// 12×12 covariance type.
pub type Covariance = SMatrix<f64, STATE_DIM, STATE_DIM>;

/// χ²(0.999) gate thresholds by innovation dimension 1..=4.
pub const CHI2_GATE_999: [f64; 4] = [10.827566, 13.815511, 16.266236, 18.466827];

/// Misalignment magnitude beyond which the small-angle error model is no
/// longer valid and the filter is declared diverged.
pub const EPSILON_DIVERGENCE_RAD: f64 = 0.5;

/// Error-state vector layout: velocity error δv (0..3), misalignment ε
/// (3..6), accelerometer bias (6..9), gyroscope bias (9..12).
#[derive(Clone, Copy, Debug, Default)]
pub struct ErrorState {
    pub dv_n: Vector3<f64>,
    pub epsilon: Vector3<f64>,
    pub accel_bias: Vector3<f64>,
    pub gyro_bias: Vector3<f64>,
}

impl ErrorState {
    pub fn from_vector(x: &SMatrix<f64, STATE_DIM, 1>) -> Self {
        ErrorState {
            dv_n: Vector3::new(x[0], x[1], x[2]),
            epsilon: Vector3::new(x[3], x[4], x[5]),
            accel_bias: Vector3::new(x[6], x[7], x[8]),
            gyro_bias: Vector3::new(x[9], x[10], x[11]),
        }
    }
}

/// Filter state: the strapdown nominal, accumulated sensor-bias estimates
/// and the error-state covariance.
#[derive(Clone, Debug)]
pub struct FilterState {
    pub nominal: NavState,
    /// Accumulated accelerometer bias estimate, m/s².
    pub accel_bias: Vector3<f64>,
    /// Accumulated gyroscope bias estimate, rad/s.
    pub gyro_bias: Vector3<f64>,
    /// Error covariance P, 12×12.
    pub error_cov: Covariance,
}

impl FilterState {
    pub fn new(nominal: NavState, initial_cov: Covariance) -> Self {
        FilterState {
            nominal,
            accel_bias: Vector3::zeros(),
            gyro_bias: Vector3::zeros(),
            error_cov: initial_cov,
        }
    }

    pub fn t(&self) -> f64 {
        self.nominal.t
    }

    /// Covariance health: symmetric within 1e-10, eigenvalues ≥ −1e-10,
    /// finite diagonal.
    pub fn check_covariance(&self) -> Result<()> {
        let p = &self.error_cov;
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::FilterDiverged("non-finite covariance".into()));
        }
        let asym = (p - p.transpose()).abs().max();
        if asym > 1e-10 {
            return Err(Error::FilterDiverged(format!(
                "covariance asymmetry {asym:.3e}"
            )));
        }
        let eig = nalgebra::SymmetricEigen::new(*p);
        let min = eig.eigenvalues.min();
        if min < -1e-10 {
            return Err(Error::FilterDiverged(format!(
                "covariance lost positive semidefiniteness (λ_min = {min:.3e})"
            )));
        }
        Ok(())
    }
}

/// Filter configuration. `mode` selects a [`CouplingStrategy`] by name.
#[derive(Clone, Debug)]
pub struct FusionConfig {
    pub mode: String,
    /// Continuous process-noise PSD per state, units²/s; discretized as
    /// `Q_d = diag(psd)·dt`.
    pub process_noise_psd: [f64; STATE_DIM],
    /// Loosely coupled velocity measurement noise std, m/s.
    pub dvl_velocity_noise_std: f64,
    /// Per-beam measurement noise std, m/s.
    pub beam_noise_std: f64,
    /// Derive the loose measurement covariance from the beam noise through
    /// the least-squares pseudo-inverse instead of `dvl_velocity_noise_std`.
    pub loose_noise_from_beams: bool,
    /// Innovation-window adaptive estimation of the measurement noise.
    pub adaptive: bool,
    /// Window length (number of innovations) for the adaptive estimator.
    pub innovation_window: usize,
    /// DVL→body mounting rotation T_d^b.
    pub mounting: RotationMatrix,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            mode: "loosely_coupled".into(),
            process_noise_psd: [1e-6; STATE_DIM],
            dvl_velocity_noise_std: 0.02,
            beam_noise_std: 0.02,
            loose_noise_from_beams: false,
            adaptive: false,
            innovation_window: 20,
            mounting: RotationMatrix::identity(),
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.process_noise_psd.iter().any(|q| *q < 0.0) {
            return Err(Error::InvalidArgument("negative process noise PSD".into()));
        }
        if !(self.dvl_velocity_noise_std > 0.0) || !(self.beam_noise_std > 0.0) {
            return Err(Error::InvalidArgument(
                "measurement noise stds must be > 0".into(),
            ));
        }
        if self.adaptive && self.innovation_window < 5 {
            return Err(Error::InvalidArgument(
                "adaptive mode needs innovation_window ≥ 5".into(),
            ));
        }
        strategy_by_name(&self.mode)?;
        Ok(())
    }
}

/// What happened at a DVL epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateType {
    LooseAccepted,
    TightAccepted,
    LooseRejected,
    TightRejected,
    /// Not enough beams for the active mode; the filter coasts.
    Gap,
    /// DVL ignored (free-inertial mode).
    Ignored,
}

impl UpdateType {
    pub fn as_str(&self) -> &'static str {
        match self {
            UpdateType::LooseAccepted => "loose_accepted",
            UpdateType::TightAccepted => "tight_accepted",
            UpdateType::LooseRejected => "loose_rejected",
            UpdateType::TightRejected => "tight_rejected",
            UpdateType::Gap => "gap",
            UpdateType::Ignored => "ignored",
        }
    }
}

/// One DVL-epoch record.
#[derive(Clone, Debug)]
pub struct EpochRecord {
    pub t: f64,
    pub update_type: UpdateType,
    pub beams_used: usize,
    /// Normalized innovation squared; NaN for gaps.
    pub nis: f64,
    /// Innovation vector, when an update was formed.
    pub innovation: Option<DVector<f64>>,
    /// Innovation covariance S, when an update was formed.
    pub innovation_cov: Option<DMatrix<f64>>,
    /// Estimated state snapshot after processing the epoch.
    pub state: NavState,
}

/// Per-run log of DVL-epoch records.
#[derive(Clone, Debug, Default)]
pub struct FusionLog {
    pub records: Vec<EpochRecord>,
}

impl FusionLog {
    pub fn accepted_count(&self) -> usize {
        self.records
            .iter()
            .filter(|r| {
                matches!(
                    r.update_type,
                    UpdateType::LooseAccepted | UpdateType::TightAccepted
                )
            })
            .count()
    }
}

/// A DVL coupling mode: decides how one DVL epoch enters the filter.
pub trait CouplingStrategy: Sync {
    fn name(&self) -> &'static str;
    /// Short aliases accepted by the CLI.
    fn aliases(&self) -> &'static [&'static str];
    /// Processes one DVL epoch, mutating the filter state and appending a
    /// log record.
    fn process_epoch(
        &self,
        fs: &mut FilterState,
        sample: &DvlBeamSample,
        geom: &DvlBeamGeometry,
        cfg: &FusionConfig,
        adaptive: &mut AdaptiveNoise,
        log: &mut FusionLog,
    ) -> Result<()>;
}

struct FreeInertial;
struct LooseCoupling;
struct TightCoupling;

impl CouplingStrategy for FreeInertial {
    fn name(&self) -> &'static str {
        "free_inertial"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["free"]
    }

    fn process_epoch(
        &self,
        fs: &mut FilterState,
        sample: &DvlBeamSample,
        _geom: &DvlBeamGeometry,
        _cfg: &FusionConfig,
        _adaptive: &mut AdaptiveNoise,
        log: &mut FusionLog,
    ) -> Result<()> {
        log.records.push(EpochRecord {
            t: sample.t,
            update_type: UpdateType::Ignored,
            beams_used: 0,
            nis: f64::NAN,
            innovation: None,
            innovation_cov: None,
            state: fs.nominal,
        });
        Ok(())
    }
}

impl CouplingStrategy for LooseCoupling {
    fn name(&self) -> &'static str {
        "loosely_coupled"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["lc", "loose"]
    }

    fn process_epoch(
        &self,
        fs: &mut FilterState,
        sample: &DvlBeamSample,
        geom: &DvlBeamGeometry,
        cfg: &FusionConfig,
        adaptive: &mut AdaptiveNoise,
        log: &mut FusionLog,
    ) -> Result<()> {
        if sample.valid_count() < 3 {
            log.records.push(EpochRecord {
                t: sample.t,
                update_type: UpdateType::Gap,
                beams_used: sample.valid_count(),
                nis: f64::NAN,
                innovation: None,
                innovation_cov: None,
                state: fs.nominal,
            });
            return Ok(());
        }
        let v_dvl = ls_beam_velocity(sample, geom)?;
        let r_dvl = if cfg.loose_noise_from_beams {
            loose_noise_from_beams(sample, geom, cfg.beam_noise_std)?
        } else {
            nalgebra::Matrix3::identity() * cfg.dvl_velocity_noise_std.powi(2)
        };
        let record = ekf_update_loose(fs, &v_dvl, &r_dvl, cfg, adaptive, sample.t)?;
        log.records.push(record);
        Ok(())
    }
}

impl CouplingStrategy for TightCoupling {
    fn name(&self) -> &'static str {
        "tightly_coupled"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["tc", "tight"]
    }

    fn process_epoch(
        &self,
        fs: &mut FilterState,
        sample: &DvlBeamSample,
        geom: &DvlBeamGeometry,
        cfg: &FusionConfig,
        adaptive: &mut AdaptiveNoise,
        log: &mut FusionLog,
    ) -> Result<()> {
        if sample.valid_count() == 0 {
            log.records.push(EpochRecord {
                t: sample.t,
                update_type: UpdateType::Gap,
                beams_used: 0,
                nis: f64::NAN,
                innovation: None,
                innovation_cov: None,
                state: fs.nominal,
            });
            return Ok(());
        }
        let record = ekf_update_tight(fs, sample, geom, cfg, adaptive)?;
        log.records.push(record);
        Ok(())
    }
}

static STRATEGIES: [&dyn CouplingStrategy; 3] = [&FreeInertial, &LooseCoupling, &TightCoupling];

/// Looks a coupling strategy up by name or alias.
pub fn strategy_by_name(name: &str) -> Result<&'static dyn CouplingStrategy> {
    STRATEGIES
        .iter()
        .find(|s| s.name() == name || s.aliases().contains(&name))
        .copied()
        .ok_or_else(|| Error::UnknownStrategy {
            family: "coupling mode",
            name: name.to_string(),
            known: known_modes().join(", "),
        })
}

/// Canonical names of the registered coupling strategies.
pub fn known_modes() -> Vec<&'static str> {
    STRATEGIES.iter().map(|s| s.name()).collect()
}
