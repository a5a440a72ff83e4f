//! Full-mission fusion: strapdown prediction at the IMU rate with DVL
//! updates dispatched through the configured coupling strategy.

use crate::earth::EarthModel;
use crate::frames::NavState;
use crate::sim::{DvlBeamGeometry, DvlBeamSample, ImuSample};
use crate::{Error, Result};

use super::{
    ekf_predict, strategy_by_name, AdaptiveNoise, Covariance, FilterState, FusionConfig, FusionLog,
};

/// Result of a fusion run: the estimated trajectory at the IMU rate, the
/// per-DVL-epoch log, and the terminal filter state.
#[derive(Clone, Debug)]
pub struct FusionOutput {
    pub states: Vec<NavState>,
    pub log: FusionLog,
    pub final_state: FilterState,
}

/// Runs the filter over time-aligned IMU and DVL streams.
///
/// Prediction happens at every IMU sample; DVL epochs due at or before the
/// current time are processed by the coupling strategy named in
/// `cfg.mode`. Free-inertial runs reproduce [`crate::strapdown::dead_reckon`]
/// bit for bit. Covariance health is verified at every DVL epoch.
pub fn run_fusion(
    earth: &EarthModel,
    imu: &[ImuSample],
    dvl: &[DvlBeamSample],
    initial: &NavState,
    initial_cov: Covariance,
    geom: &DvlBeamGeometry,
    cfg: &FusionConfig,
) -> Result<FusionOutput> {
    cfg.validate()?;
    if imu.is_empty() {
        return Err(Error::InvalidArgument("empty IMU stream".into()));
    }
    for (i, w) in dvl.windows(2).enumerate() {
        if w[1].t <= w[0].t {
            return Err(Error::NonMonotoneTimestamps {
                index: i + 1,
                t: w[1].t,
            });
        }
    }
    let strategy = strategy_by_name(&cfg.mode)?;
    let mut fs = FilterState::new(*initial, initial_cov);
    let mut adaptive = AdaptiveNoise::new(cfg.innovation_window);
    let mut log = FusionLog::default();
    let mut states = Vec::with_capacity(imu.len());
    let mut dvl_idx = 0;

    // DVL epochs at or before the initial time.
    process_due(
        strategy, &mut fs, dvl, &mut dvl_idx, geom, cfg, &mut adaptive, &mut log,
    )?;

    for (i, sample) in imu.iter().enumerate() {
        let dt = sample.t - fs.t();
        if dt <= 0.0 {
            return Err(Error::NonMonotoneTimestamps {
                index: i,
                t: sample.t,
            });
        }
        fs = ekf_predict(earth, &fs, sample, dt, cfg)?;
        process_due(
            strategy, &mut fs, dvl, &mut dvl_idx, geom, cfg, &mut adaptive, &mut log,
        )?;
        states.push(fs.nominal);
    }
    Ok(FusionOutput {
        states,
        log,
        final_state: fs,
    })
}

#[allow(clippy::too_many_arguments)]
fn process_due(
    strategy: &dyn super::CouplingStrategy,
    fs: &mut FilterState,
    dvl: &[DvlBeamSample],
    dvl_idx: &mut usize,
    geom: &DvlBeamGeometry,
    cfg: &FusionConfig,
    adaptive: &mut AdaptiveNoise,
    log: &mut FusionLog,
) -> Result<()> {
    while *dvl_idx < dvl.len() && dvl[*dvl_idx].t <= fs.t() + 1e-9 {
        strategy.process_epoch(fs, &dvl[*dvl_idx], geom, cfg, adaptive, log)?;
        fs.check_covariance()?;
        *dvl_idx += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::earth::WGS84;
    use crate::frames::GeodeticPosition;
    use crate::fusion::UpdateType;
    use crate::sim::{
        apply_beam_outage, corrupt_imu, default_beam_geometry, generate_trajectory,
        ideal_imu_from_trajectory, simulate_dvl, DvlErrorModel, ImuErrorModel, OutageWindow,
        TrajectoryProfile,
    };
    use crate::strapdown::dead_reckon;
    use nalgebra::Vector3;

    fn origin() -> GeodeticPosition {
        GeodeticPosition::new(32.8_f64.to_radians(), 34.9_f64.to_radians(), -5.0).unwrap()
    }

    fn line_profile(duration: f64, imu_rate: f64) -> TrajectoryProfile {
        TrajectoryProfile {
            kind: "constant_velocity_line".into(),
            duration,
            speed: 1.5,
            turn_radius: None,
            sway_amplitude: None,
            sway_period: None,
            leg_length: None,
            leg_spacing: None,
            speed_modulation: None,
            imu_rate,
            dvl_rate: 1.0,
            gnss_rate: 1.0,
        }
    }

    fn matched_config(mode: &str, imu_noise: &ImuErrorModel, dt: f64, beam_std: f64) -> FusionConfig {
        let mut psd = [1e-18; 12];
        for i in 0..3 {
            psd[i] = imu_noise.accel_noise_std.powi(2) * dt + 1e-18;
            psd[3 + i] = imu_noise.gyro_noise_std.powi(2) * dt + 1e-18;
        }
        FusionConfig {
            mode: mode.into(),
            process_noise_psd: psd,
            dvl_velocity_noise_std: beam_std,
            beam_noise_std: beam_std,
            loose_noise_from_beams: true,
            adaptive: false,
            innovation_window: 20,
            mounting: crate::frames::RotationMatrix::identity(),
        }
    }

    #[test]
    fn free_inertial_equals_dead_reckoning_bitwise() {
        let profile = line_profile(20.0, 50.0);
        let traj = generate_trajectory(&WGS84, &profile, &origin(), 0.4).unwrap();
        let imu = ideal_imu_from_trajectory(&WGS84, &traj).unwrap();
        let imu = corrupt_imu(&imu, &ImuErrorModel::tactical_grade(), 3).unwrap();
        let geom = default_beam_geometry();
        let dvl = simulate_dvl(&traj, &geom, &DvlErrorModel::default(), 1.0, 1).unwrap();
        let cfg = matched_config("free_inertial", &ImuErrorModel::tactical_grade(), 0.02, 0.02);

        let out = run_fusion(&WGS84, &imu, &dvl, &traj[0], Covariance::zeros(), &geom, &cfg).unwrap();
        let reck = dead_reckon(&WGS84, &traj[0], &imu).unwrap();
        assert_eq!(out.states.len(), reck.len());
        for (a, b) in out.states.iter().zip(&reck) {
            assert_eq!(a.position.latitude.to_bits(), b.position.latitude.to_bits());
            assert_eq!(a.position.longitude.to_bits(), b.position.longitude.to_bits());
            assert_eq!(a.velocity_n.x.to_bits(), b.velocity_n.x.to_bits());
            assert_eq!(a.velocity_n.z.to_bits(), b.velocity_n.z.to_bits());
        }
        // Every epoch logged as ignored.
        assert!(out.log.records.iter().all(|r| r.update_type == UpdateType::Ignored));
    }

    #[test]
    fn loose_mode_coasts_through_beam_gaps() {
        let profile = line_profile(20.0, 50.0);
        let traj = generate_trajectory(&WGS84, &profile, &origin(), 0.0).unwrap();
        let imu = ideal_imu_from_trajectory(&WGS84, &traj).unwrap();
        let geom = default_beam_geometry();
        let dvl = simulate_dvl(&traj, &geom, &DvlErrorModel::default(), 1.0, 1).unwrap();
        let dvl = apply_beam_outage(
            &dvl,
            &[OutageWindow {
                t_start: 5.0,
                t_end: 10.0,
                beams: vec![0, 1],
            }],
        )
        .unwrap();
        let cfg = matched_config("lc", &ImuErrorModel::default(), 0.02, 0.02);
        let out = run_fusion(&WGS84, &imu, &dvl, &traj[0], Covariance::identity() * 1e-6, &geom, &cfg)
            .unwrap();
        let gaps: Vec<f64> = out
            .log
            .records
            .iter()
            .filter(|r| r.update_type == UpdateType::Gap)
            .map(|r| r.t)
            .collect();
        assert!(!gaps.is_empty());
        assert!(gaps.iter().all(|t| *t >= 5.0 && *t < 10.0));
    }

    #[test]
    fn dvl_aiding_bounds_velocity_error_while_free_inertial_drifts() {
        let profile = line_profile(120.0, 50.0);
        let traj = generate_trajectory(&WGS84, &profile, &origin(), 0.3).unwrap();
        let ideal = ideal_imu_from_trajectory(&WGS84, &traj).unwrap();
        let imu_model = ImuErrorModel::tactical_grade();
        let imu = corrupt_imu(&ideal, &imu_model, 11).unwrap();
        let geom = default_beam_geometry();
        let dvl_model = DvlErrorModel {
            beam_noise_std: 0.02,
            ..Default::default()
        };
        let dvl = simulate_dvl(&traj, &geom, &dvl_model, 1.0, 12).unwrap();
        let cfg = matched_config("tightly_coupled", &imu_model, 0.02, 0.02);

        let aided = run_fusion(&WGS84, &imu, &dvl, &traj[0], Covariance::identity() * 1e-4, &geom, &cfg)
            .unwrap();
        let mut free_cfg = cfg.clone();
        free_cfg.mode = "free_inertial".into();
        let free = run_fusion(&WGS84, &imu, &dvl, &traj[0], Covariance::identity() * 1e-4, &geom, &free_cfg)
            .unwrap();

        let v_err = |s: &NavState| {
            let idx = ((s.t - traj[0].t) * 50.0).round() as usize;
            (s.velocity_n - traj[idx].velocity_n).norm()
        };
        let aided_final = v_err(aided.states.last().unwrap());
        let free_final = v_err(free.states.last().unwrap());
        assert!(aided_final < 5.0 * 0.02, "aided velocity error {aided_final}");
        assert!(free_final > 3.0 * aided_final, "free {free_final} vs aided {aided_final}");
    }

    #[test]
    fn empty_imu_rejected() {
        let geom = default_beam_geometry();
        let cfg = matched_config("free", &ImuErrorModel::default(), 0.02, 0.02);
        let initial = NavState::new(
            0.0,
            origin(),
            Vector3::zeros(),
            crate::frames::RotationMatrix::identity(),
        );
        assert!(run_fusion(&WGS84, &[], &[], &initial, Covariance::zeros(), &geom, &cfg).is_err());
    }
}
