//! Scenario orchestration: configuration files, staged pipeline runs and
//! parameter sweeps.
//!
//! A scenario is described by a TOML document mirroring [`ScenarioConfig`];
//! unknown keys are rejected. Stages run in the listed order, every
//! intermediate stream is persisted as CSV under the output directory
//! together with a config snapshot, and rerunning the same config and seed
//! reproduces the output tree bit for bit (per-stage wall-clock timing goes
//! to stderr only, so artifacts stay deterministic).

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{initial_method_by_name, wahba_svd};
use crate::calibration::{calibrate_dvl_full, CalibrationResult};
use crate::earth::{EarthModel, WGS84};
use crate::frames::{rotation_from_euler, EulerAngles, GeodeticPosition, NavState, RotationMatrix};
use crate::fusion::{run_fusion, Covariance, FusionConfig};
use crate::io;
use crate::metrics::{evaluate_mounting, evaluate_trajectory, MetricsReport};
use crate::sim::{
    apply_beam_outage, corrupt_imu, default_beam_geometry, generate_trajectory,
    ideal_imu_from_trajectory, simulate_dvl, simulate_gnss_velocity, DvlBeamSample,
    DvlErrorModel, GnssVelocitySample, ImuErrorModel, ImuSample, OutageWindow, TrajectoryProfile,
};
use crate::{Error, Result};

/// Pipeline stages, executed in the order listed in the config.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Simulate,
    Calibrate,
    AlignInitial,
    AlignMounting,
    Fuse,
}

/// Mission origin and initial heading.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OriginConfig {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default)]
    pub height_m: f64,
    #[serde(default)]
    pub heading_deg: f64,
}

impl OriginConfig {
    pub fn position(&self) -> Result<GeodeticPosition> {
        GeodeticPosition::new(
            self.latitude_deg.to_radians(),
            self.longitude_deg.to_radians(),
            self.height_m,
        )
    }
}

/// IMU error configuration: a named grade or explicit custom values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImuErrorConfig {
    /// "none", "navigation", "tactical" or "custom".
    pub grade: String,
    #[serde(default)]
    pub accel_bias: Option<[f64; 3]>,
    #[serde(default)]
    pub gyro_bias: Option<[f64; 3]>,
    #[serde(default)]
    pub accel_noise_std: Option<f64>,
    #[serde(default)]
    pub gyro_noise_std: Option<f64>,
}

impl Default for ImuErrorConfig {
    fn default() -> Self {
        ImuErrorConfig {
            grade: "none".into(),
            accel_bias: None,
            gyro_bias: None,
            accel_noise_std: None,
            gyro_noise_std: None,
        }
    }
}

impl ImuErrorConfig {
    pub fn model(&self) -> Result<ImuErrorModel> {
        let mut model = match self.grade.as_str() {
            "none" => ImuErrorModel::default(),
            "navigation" => ImuErrorModel::navigation_grade(),
            "tactical" => ImuErrorModel::tactical_grade(),
            "custom" => ImuErrorModel {
                grade_label: "custom".into(),
                ..Default::default()
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown IMU grade '{other}' (none|navigation|tactical|custom)"
                )))
            }
        };
        if let Some(b) = self.accel_bias {
            model.accel_bias = b;
        }
        if let Some(b) = self.gyro_bias {
            model.gyro_bias = b;
        }
        if let Some(s) = self.accel_noise_std {
            model.accel_noise_std = s;
        }
        if let Some(s) = self.gyro_noise_std {
            model.gyro_noise_std = s;
        }
        model.validate()?;
        Ok(model)
    }
}

/// DVL error configuration (comprehensive model parameters).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DvlErrorConfig {
    pub scale: [f64; 3],
    pub bias: [f64; 3],
    pub beam_noise_std: f64,
    /// Body→DVL mounting rotation as ZYX Euler angles, degrees.
    pub mounting_euler_deg: [f64; 3],
    pub lever_arm: [f64; 3],
}

impl Default for DvlErrorConfig {
    fn default() -> Self {
        DvlErrorConfig {
            scale: [0.0; 3],
            bias: [0.0; 3],
            beam_noise_std: 0.0,
            mounting_euler_deg: [0.0; 3],
            lever_arm: [0.0; 3],
        }
    }
}

impl DvlErrorConfig {
    pub fn model(&self) -> Result<DvlErrorModel> {
        let model = DvlErrorModel {
            scale_k: Vector3::from_column_slice(&self.scale),
            bias_b: Vector3::from_column_slice(&self.bias),
            beam_noise_std: self.beam_noise_std,
            mounting_rotation: euler_deg_to_rotation(&self.mounting_euler_deg)?,
            lever_arm: Vector3::from_column_slice(&self.lever_arm),
        };
        model.validate()?;
        Ok(model)
    }
}

pub fn euler_deg_to_rotation(deg: &[f64; 3]) -> Result<RotationMatrix> {
    rotation_from_euler(&EulerAngles::new(
        deg[0].to_radians(),
        deg[1].to_radians(),
        deg[2].to_radians(),
    ))
}

/// Alignment stage parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlignmentConfig {
    /// "dva" or "oba".
    pub initial_method: String,
    /// Initial-alignment window, s.
    pub initial_window: f64,
    /// Mounting-alignment data window, s.
    pub mounting_window: f64,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            initial_method: "oba".into(),
            initial_window: 120.0,
            mounting_window: 100.0,
        }
    }
}

/// Fusion stage parameters (serde mirror of [`FusionConfig`]).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionSection {
    pub mode: String,
    /// Optional explicit PSD; when absent it is derived from the IMU
    /// error model and rate (matched-filter default).
    pub process_noise_psd: Option<Vec<f64>>,
    pub dvl_velocity_noise_std: f64,
    pub beam_noise_std: f64,
    pub loose_noise_from_beams: bool,
    pub adaptive: bool,
    pub innovation_window: usize,
    /// Use the mounting estimated by the align_mounting stage instead of
    /// the configured true mounting.
    pub use_estimated_mounting: bool,
    /// Initial error-covariance diagonal.
    pub initial_cov_diag: Option<Vec<f64>>,
}

impl Default for FusionSection {
    fn default() -> Self {
        FusionSection {
            mode: "loosely_coupled".into(),
            process_noise_psd: None,
            dvl_velocity_noise_std: 0.02,
            beam_noise_std: 0.02,
            loose_noise_from_beams: true,
            adaptive: false,
            innovation_window: 20,
            use_estimated_mounting: false,
            initial_cov_diag: None,
        }
    }
}

/// Full scenario description; the TOML config mirrors this structure.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub stages: Vec<Stage>,
    pub profile: TrajectoryProfile,
    pub origin: OriginConfig,
    #[serde(default)]
    pub imu_error: ImuErrorConfig,
    #[serde(default)]
    pub dvl_error: DvlErrorConfig,
    #[serde(default)]
    pub gnss_noise_std: f64,
    #[serde(default)]
    pub outage: Vec<OutageWindow>,
    #[serde(default)]
    pub alignment: AlignmentConfig,
    #[serde(default)]
    pub fusion: FusionSection,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::Config("no stages listed".into()));
        }
        let mut seen = Vec::new();
        for s in &self.stages {
            if seen.contains(s) {
                return Err(Error::StageDependency(format!("stage {s:?} listed twice")));
            }
            seen.push(*s);
        }
        if self.stages[0] != Stage::Simulate {
            return Err(Error::StageDependency(
                "simulate must run first; all other stages consume its streams".into(),
            ));
        }
        if self.fusion.use_estimated_mounting {
            let am = self.stages.iter().position(|s| *s == Stage::AlignMounting);
            let fu = self.stages.iter().position(|s| *s == Stage::Fuse);
            match (am, fu) {
                (Some(a), Some(f)) if a < f => {}
                _ => {
                    return Err(Error::StageDependency(
                        "use_estimated_mounting requires align_mounting before fuse".into(),
                    ))
                }
            }
        }
        if let Some(psd) = &self.fusion.process_noise_psd {
            if psd.len() != 12 {
                return Err(Error::Config("process_noise_psd must have 12 entries".into()));
            }
        }
        if let Some(d) = &self.fusion.initial_cov_diag {
            if d.len() != 12 {
                return Err(Error::Config("initial_cov_diag must have 12 entries".into()));
            }
        }
        self.profile.validate()?;
        self.origin.position()?;
        initial_method_by_name(&self.alignment.initial_method)?;
        crate::fusion::strategy_by_name(&self.fusion.mode)?;
        if self.gnss_noise_std < 0.0 {
            return Err(Error::Config("gnss_noise_std must be ≥ 0".into()));
        }
        Ok(())
    }

    /// Matched-filter process noise derived from the IMU error model.
    pub fn derived_psd(&self, imu_model: &ImuErrorModel) -> [f64; 12] {
        let dt = self.profile.dt();
        let mut psd = [1e-14; 12];
        for i in 0..3 {
            psd[i] = (imu_model.accel_noise_std.powi(2) * dt).max(1e-14);
            psd[3 + i] = (imu_model.gyro_noise_std.powi(2) * dt).max(1e-14);
        }
        psd
    }

    pub fn fusion_config(&self, imu_model: &ImuErrorModel, mounting: RotationMatrix) -> FusionConfig {
        let psd = match &self.fusion.process_noise_psd {
            Some(v) => {
                let mut a = [0.0; 12];
                a.copy_from_slice(v);
                a
            }
            None => self.derived_psd(imu_model),
        };
        FusionConfig {
            mode: self.fusion.mode.clone(),
            process_noise_psd: psd,
            dvl_velocity_noise_std: self.fusion.dvl_velocity_noise_std,
            beam_noise_std: self.fusion.beam_noise_std,
            loose_noise_from_beams: self.fusion.loose_noise_from_beams,
            adaptive: self.fusion.adaptive,
            innovation_window: self.fusion.innovation_window,
            mounting,
        }
    }
}

/// Stable per-stream sub-seed: FNV-1a of the stream name mixed into the
/// base seed by splitmix64.
pub fn derive_seed(base: u64, stream: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stream.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = base ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// In-memory products that stages hand to their successors.
#[derive(Default)]
struct StageData {
    truth: Vec<NavState>,
    imu: Vec<ImuSample>,
    dvl: Vec<DvlBeamSample>,
    gnss: Vec<GnssVelocitySample>,
    calibration: Option<CalibrationResult>,
    mounting_estimate: Option<RotationMatrix>,
}

/// Runs a scenario end to end, persisting every stream and the metrics
/// report under `cfg.output_dir`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MetricsReport> {
    run_scenario_with_earth(cfg, &WGS84)
}

pub fn run_scenario_with_earth(cfg: &ScenarioConfig, earth: &EarthModel) -> Result<MetricsReport> {
    cfg.validate()?;
    let out = &cfg.output_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out.display().to_string(), e))?;

    // Config snapshot first: the run directory must be self-describing.
    let snapshot = toml::to_string_pretty(cfg).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(out.join("config.toml"), snapshot)
        .map_err(|e| Error::io("config.toml", e))?;

    let mut data = StageData::default();
    let mut report = MetricsReport::default();

    for stage in &cfg.stages {
        let started = std::time::Instant::now();
        match stage {
            Stage::Simulate => stage_simulate(cfg, earth, &mut data)?,
            Stage::Calibrate => stage_calibrate(cfg, earth, &mut data, &mut report)?,
            Stage::AlignInitial => stage_align_initial(cfg, earth, &data, &mut report)?,
            Stage::AlignMounting => stage_align_mounting(cfg, earth, &mut data, &mut report)?,
            Stage::Fuse => stage_fuse(cfg, earth, &data, &mut report)?,
        }
        eprintln!(
            "stage {:?} finished in {:.3} s",
            stage,
            started.elapsed().as_secs_f64()
        );
    }

    io::export_report(&out.join("report.csv"), &report)?;
    Ok(report)
}

fn stage_simulate(cfg: &ScenarioConfig, earth: &EarthModel, data: &mut StageData) -> Result<()> {
    let origin = cfg.origin.position()?;
    let heading = cfg.origin.heading_deg.to_radians();
    let truth = generate_trajectory(earth, &cfg.profile, &origin, heading)?;
    let ideal = ideal_imu_from_trajectory(earth, &truth)?;
    let imu_model = cfg.imu_error.model()?;
    let imu = corrupt_imu(&ideal, &imu_model, derive_seed(cfg.seed, "imu"))?;
    let dvl_model = cfg.dvl_error.model()?;
    let geom = default_beam_geometry();
    let dvl = simulate_dvl(
        &truth,
        &geom,
        &dvl_model,
        cfg.profile.dvl_rate,
        derive_seed(cfg.seed, "dvl"),
    )?;
    let dvl = apply_beam_outage(&dvl, &cfg.outage)?;
    let gnss = simulate_gnss_velocity(
        &truth,
        cfg.profile.gnss_rate,
        cfg.gnss_noise_std,
        derive_seed(cfg.seed, "gnss"),
    )?;

    let out = &cfg.output_dir;
    io::export_states(&out.join("truth.csv"), &truth)?;
    io::export_imu(&out.join("imu.csv"), &imu)?;
    io::export_dvl_beams(&out.join("dvl_beams.csv"), &dvl)?;
    io::export_gnss(&out.join("gnss_vel.csv"), &gnss)?;

    data.truth = truth;
    data.imu = imu;
    data.dvl = dvl;
    data.gnss = gnss;
    Ok(())
}

/// Nearest truth-state index for a timestamp (truth is uniform at the IMU
/// rate starting at t=0).
fn truth_index(truth: &[NavState], t: f64, imu_rate: f64) -> usize {
    (((t - truth[0].t) * imu_rate).round().max(0.0) as usize).min(truth.len() - 1)
}

fn stage_calibrate(
    cfg: &ScenarioConfig,
    earth: &EarthModel,
    data: &mut StageData,
    report: &mut MetricsReport,
) -> Result<()> {
    let _ = earth;
    let geom = default_beam_geometry();
    let mounting = cfg.dvl_error.model()?.mounting_rotation;
    let half_period = 0.5 / cfg.profile.dvl_rate;

    let mut dvl_vel = Vec::new();
    let mut gnss_matched = Vec::new();
    let mut attitudes = Vec::new();
    for sample in &data.dvl {
        if sample.valid_count() < 3 {
            continue;
        }
        // Nearest GNSS sample within half a DVL period.
        let nearest = data
            .gnss
            .iter()
            .min_by(|a, b| (a.t - sample.t).abs().total_cmp(&(b.t - sample.t).abs()));
        let Some(g) = nearest else { continue };
        if (g.t - sample.t).abs() > half_period {
            continue;
        }
        dvl_vel.push(crate::fusion::ls_beam_velocity(sample, &geom)?);
        gnss_matched.push(*g);
        let idx = truth_index(&data.truth, sample.t, cfg.profile.imu_rate);
        attitudes.push(data.truth[idx].attitude);
    }

    let result = calibrate_dvl_full(&dvl_vel, &gnss_matched, &attitudes, &mounting)?;
    let doc = toml::to_string_pretty(&result).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(cfg.output_dir.join("calibration.toml"), doc)
        .map_err(|e| Error::io("calibration.toml", e))?;

    report.vrmse = Some(result.residual_vrmse);
    data.calibration = Some(result);
    Ok(())
}

fn stage_align_initial(
    cfg: &ScenarioConfig,
    earth: &EarthModel,
    data: &StageData,
    report: &mut MetricsReport,
) -> Result<()> {
    let lat = cfg.origin.position()?.latitude;
    let window = cfg.alignment.initial_window;
    let t0 = data.truth[0].t;
    let imu_window: Vec<ImuSample> = data
        .imu
        .iter()
        .filter(|s| s.t <= t0 + window + 1e-9)
        .copied()
        .collect();
    let pairs = crate::alignment::pairs_over_window(earth, &imu_window, lat, t0, window, 64)?;
    let method = initial_method_by_name(&cfg.alignment.initial_method)?;
    let result = method.align(&pairs)?;
    let end_heading =
        crate::alignment::heading_at_end(earth, &result, &imu_window, lat, t0, t0 + window)?;

    let idx = truth_index(&data.truth, t0 + window, cfg.profile.imu_rate);
    let truth_heading = data.truth[idx].heading();
    let err = crate::alignment::cyclic_error(end_heading, truth_heading);
    report.heading_ae_deg = Some(err.abs().to_degrees());
    report.heading_cmse_rad2 = Some(err * err);

    io::export_alignment_rows(
        &cfg.output_dir.join("alignment_initial.csv"),
        &[io::AlignmentRow {
            method: result.method.to_string(),
            window,
            yaw_rad: end_heading,
            ae_deg: err.abs().to_degrees(),
            condition_indicator: result.condition_indicator,
        }],
    )
}

fn stage_align_mounting(
    cfg: &ScenarioConfig,
    earth: &EarthModel,
    data: &mut StageData,
    report: &mut MetricsReport,
) -> Result<()> {
    let geom = default_beam_geometry();
    let window = cfg.alignment.mounting_window;
    let t0 = data.truth[0].t;

    // INS-indicated body velocity: dead-reckon the corrupted IMU from the
    // true initial state, then rotate the INS velocity into the body frame
    // with the INS attitude.
    let imu_window: Vec<ImuSample> = data
        .imu
        .iter()
        .filter(|s| s.t <= t0 + window + 1e-9)
        .copied()
        .collect();
    let ins = crate::strapdown::dead_reckon(earth, &data.truth[0], &imu_window)?;

    let mut v_body = Vec::new();
    let mut v_dvl = Vec::new();
    for sample in &data.dvl {
        if sample.t > t0 + window || sample.valid_count() < 3 {
            continue;
        }
        let mut v_d = crate::fusion::ls_beam_velocity(sample, &geom)?;
        if let Some(cal) = &data.calibration {
            v_d = crate::calibration::apply_calibration(
                &v_d,
                cal,
                crate::calibration::CalibrationMode::Full,
            )?;
        }
        let idx = (((sample.t - t0) * cfg.profile.imu_rate).round() as usize)
            .saturating_sub(1)
            .min(ins.len() - 1);
        let state = &ins[idx];
        v_body.push(state.attitude.transpose().apply(&state.velocity_n));
        v_dvl.push(v_d);
    }

    let result = wahba_svd(&v_body, &v_dvl)?;
    let truth_mounting = cfg.dvl_error.model()?.mounting_rotation.transpose(); // T_d^b
    let rmse = evaluate_mounting(&result.rotation, &truth_mounting);
    report.mounting_rmse_deg = Some(rmse);

    io::export_alignment_rows(
        &cfg.output_dir.join("alignment_mounting.csv"),
        &[io::AlignmentRow {
            method: result.method.to_string(),
            window,
            yaw_rad: result.euler.yaw,
            ae_deg: rmse,
            condition_indicator: result.condition_indicator,
        }],
    )?;
    data.mounting_estimate = Some(result.rotation);
    Ok(())
}

fn stage_fuse(
    cfg: &ScenarioConfig,
    earth: &EarthModel,
    data: &StageData,
    report: &mut MetricsReport,
) -> Result<()> {
    let imu_model = cfg.imu_error.model()?;
    let mounting = if cfg.fusion.use_estimated_mounting {
        data.mounting_estimate.ok_or_else(|| {
            Error::StageDependency("align_mounting produced no estimate".into())
        })?
    } else {
        cfg.dvl_error.model()?.mounting_rotation.transpose()
    };
    let fusion_cfg = cfg.fusion_config(&imu_model, mounting);
    let geom = default_beam_geometry();

    let mut initial_cov = Covariance::zeros();
    match &cfg.fusion.initial_cov_diag {
        Some(d) => {
            for (i, v) in d.iter().enumerate() {
                initial_cov[(i, i)] = *v;
            }
        }
        None => {
            for i in 0..12 {
                initial_cov[(i, i)] = 1e-6;
            }
        }
    }

    let output = run_fusion(
        earth,
        &data.imu,
        &data.dvl,
        &data.truth[0],
        initial_cov,
        &geom,
        &fusion_cfg,
    )?;

    io::export_states(&cfg.output_dir.join("est.csv"), &output.states)?;
    io::export_fusion_log(&cfg.output_dir.join("fusion_log.csv"), &output.log)?;

    report.trajectory = Some(evaluate_trajectory(
        earth,
        &output.states,
        &data.truth[1..],
    )?);
    Ok(())
}

/// One sweep cell: parameter overrides applied to the template config.
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub overrides: Vec<(String, toml::Value)>,
    pub seed: u64,
}

/// Aggregated sweep output: one row per grid cell with per-metric mean and
/// standard deviation over seeds.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub cell: String,
    pub seeds: usize,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
}

/// Applies a dotted-path override to a TOML document. Creating a path that
/// the config schema does not know is caught later by deserialization.
fn apply_override(doc: &mut toml::Value, path: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = path.split('.').collect();
    let mut node = doc;
    for p in &parts[..parts.len() - 1] {
        node = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("path '{path}' crosses a non-table")))?
            .entry(p.to_string())
            .or_insert(toml::Value::Table(Default::default()));
    }
    node.as_table_mut()
        .ok_or_else(|| Error::Config(format!("path '{path}' crosses a non-table")))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Cartesian product of grid values × seeds, each cell an independent
/// scenario run in its own subdirectory. Cells run in parallel; the
/// aggregation is deterministic regardless of worker count.
pub fn sweep(
    template: &str,
    grid: &[(String, Vec<toml::Value>)],
    seeds: u64,
    seed_base: u64,
    out_dir: &Path,
) -> Result<Vec<SweepRow>> {
    if seeds == 0 {
        return Err(Error::InvalidArgument("seeds must be ≥ 1".into()));
    }
    let base_doc: toml::Value =
        toml::from_str(template).map_err(|e| Error::Config(e.to_string()))?;

    // Enumerate grid cells (cartesian product, stable order).
    let mut cells: Vec<Vec<(String, toml::Value)>> = vec![Vec::new()];
    for (key, values) in grid {
        let mut next = Vec::with_capacity(cells.len() * values.len());
        for cell in &cells {
            for v in values {
                let mut c = cell.clone();
                c.push((key.clone(), v.clone()));
                next.push(c);
            }
        }
        cells = next;
    }

    let mut jobs = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        for s in 0..seeds {
            jobs.push((ci, cell.clone(), seed_base + s));
        }
    }

    let results: Vec<Result<(usize, MetricsReport)>> = jobs
        .par_iter()
        .map(|(ci, overrides, seed)| {
            let mut doc = base_doc.clone();
            for (k, v) in overrides {
                apply_override(&mut doc, k, v.clone())?;
            }
            apply_override(&mut doc, "seed", toml::Value::Integer(*seed as i64))?;
            let dir = out_dir.join(format!("cell{ci:03}_seed{seed}"));
            apply_override(
                &mut doc,
                "output_dir",
                toml::Value::String(dir.display().to_string()),
            )?;
            let cfg: ScenarioConfig = doc
                .try_into()
                .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
            cfg.validate()?;
            let report = run_scenario(&cfg)?;
            Ok((*ci, report))
        })
        .collect();

    // Aggregate per cell, in cell order.
    let mut rows = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        let cell_name = if cell.is_empty() {
            "base".to_string()
        } else {
            cell.iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";")
        };
        let mut metric_values: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
        for r in &results {
            match r {
                Ok((rci, report)) if *rci == ci => {
                    for (metric, value, _unit) in report.rows() {
                        metric_values.entry(metric).or_default().push(value);
                    }
                }
                Ok(_) => {}
                Err(e) => {
                    return Err(Error::Config(format!("sweep cell failed: {e}")));
                }
            }
        }
        for (metric, values) in metric_values {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n.max(1.0);
            rows.push(SweepRow {
                cell: cell_name.clone(),
                seeds: values.len(),
                metric,
                mean,
                std: var.sqrt(),
            });
        }
    }

    // Persist the aggregate table.
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let mut text = String::from("cell,seeds,metric,mean,std\n");
    for r in &rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.cell, r.seeds, r.metric, r.mean, r.std
        ));
    }
    std::fs::write(out_dir.join("sweep.csv"), text)
        .map_err(|e| Error::io("sweep.csv", e))?;
    Ok(rows)
}
