//! `auvnav`: scenario simulation, DVL calibration, alignment, INS/DVL
//! fusion and trajectory evaluation from the command line.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical divergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;

use auvnav::alignment::{self, initial_method_by_name};
use auvnav::calibration::{self, CalibrationMode};
use auvnav::earth::WGS84;
use auvnav::frames::{rotation_from_euler, EulerAngles, RotationMatrix};
use auvnav::fusion::{self, Covariance, FusionConfig};
use auvnav::io::{self, AlignmentRow};
use auvnav::metrics::{evaluate_trajectory, MetricsReport};
use auvnav::scenario::{self, ScenarioConfig, Stage};
use auvnav::sim::default_beam_geometry;
use auvnav::{Error, Result};

#[derive(Parser)]
#[command(
    name = "auvnav",
    about = "Model-based AUV navigation toolkit: simulate, calibrate, align, fuse, evaluate",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate ground truth and sensor streams from a scenario config.
    Simulate(ConfigArgs),
    /// Run the configured pipeline stages end to end.
    Pipeline(ConfigArgs),
    /// GNSS-aided DVL calibration from recorded streams.
    Calibrate(CalibrateArgs),
    /// Initial attitude alignment or INS/DVL mounting alignment.
    Align(AlignArgs),
    /// INS/DVL fusion over recorded streams.
    Fuse(FuseArgs),
    /// Trajectory metrics between an estimate and ground truth.
    Evaluate(EvaluateArgs),
    /// Grid sweep of scenario runs with per-cell aggregation.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Scenario config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self, force_stages: Option<Vec<Stage>>) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(stages) = force_stages {
            cfg.stages = stages;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct CalibrateArgs {
    /// DVL beam CSV (t,y1..y4,v1..v4).
    #[arg(long)]
    beams: PathBuf,
    /// GNSS velocity CSV (t,vn,ve,vd).
    #[arg(long)]
    gnss: PathBuf,
    /// Attitude source CSV (truth/est schema).
    #[arg(long)]
    attitude: PathBuf,
    /// Body→DVL mounting as roll,pitch,yaw degrees.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 0.0])]
    mounting_euler_deg: Vec<f64>,
    /// Calibration mode to report on application.
    #[arg(long, default_value = "full")]
    mode: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AlignArgs {
    /// "initial" (DVA/OBA gyrocompassing) or "mounting" (Wahba/SVD).
    #[arg(long)]
    mode: String,
    /// Initial-alignment method name (see registry): dva | oba.
    #[arg(long, default_value = "oba")]
    method: String,
    /// IMU CSV for initial alignment.
    #[arg(long)]
    imu: Option<PathBuf>,
    /// INS state CSV (truth/est schema) for mounting alignment.
    #[arg(long)]
    ins: Option<PathBuf>,
    /// DVL beam CSV for mounting alignment.
    #[arg(long)]
    beams: Option<PathBuf>,
    /// Latitude in degrees (initial alignment).
    #[arg(long, default_value_t = 32.8)]
    lat_deg: f64,
    /// Window lengths in seconds.
    #[arg(long, value_delimiter = ',', default_values_t = [120.0])]
    windows: Vec<f64>,
    /// Optional truth state CSV to score heading/mounting errors against.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// True body→DVL mounting Euler angles (deg) to score against.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    mounting_truth_euler_deg: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FuseArgs {
    /// Coupling mode: lc | tc | free (or full names).
    #[arg(long)]
    mode: String,
    /// Adaptive measurement-noise estimation: on | off.
    #[arg(long, default_value = "off")]
    adaptive: String,
    #[arg(long)]
    imu: PathBuf,
    #[arg(long)]
    beams: PathBuf,
    /// Initial state source: first row of this truth/est CSV.
    #[arg(long)]
    initial: PathBuf,
    /// Per-beam noise std, m/s.
    #[arg(long, default_value_t = 0.02)]
    beam_noise_std: f64,
    /// Loose-coupling velocity noise std, m/s.
    #[arg(long, default_value_t = 0.02)]
    dvl_noise_std: f64,
    /// Accelerometer white-noise std for the process model, m/s² per sample.
    #[arg(long, default_value_t = 1e-3)]
    accel_noise_std: f64,
    /// Gyro white-noise std for the process model, rad/s per sample.
    #[arg(long, default_value_t = 1e-5)]
    gyro_noise_std: f64,
    /// DVL→body mounting as roll,pitch,yaw degrees.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 0.0])]
    mounting_euler_deg: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    est: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Grid override, repeatable: "dotted.key=v1|v2|v3".
    #[arg(long = "grid")]
    grid: Vec<String>,
    /// Seeds per cell.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// First seed value.
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.load(Some(vec![Stage::Simulate]))?;
            scenario::run_scenario(&cfg)?;
            println!("simulated streams written to {}", cfg.output_dir.display());
            Ok(())
        }
        Command::Pipeline(args) => {
            let cfg = args.load(None)?;
            let report = scenario::run_scenario(&cfg)?;
            print_report(&report);
            println!("artifacts written to {}", cfg.output_dir.display());
            Ok(())
        }
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Align(args) => cmd_align(args),
        Command::Fuse(args) => cmd_fuse(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn euler_deg(v: &[f64]) -> Result<RotationMatrix> {
    rotation_from_euler(&EulerAngles::new(
        v[0].to_radians(),
        v[1].to_radians(),
        v[2].to_radians(),
    ))
}

fn print_report(report: &MetricsReport) {
    for (metric, value, unit) in report.rows() {
        println!("{metric} = {value} {unit}");
    }
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    let beams = io::import_dvl_beams(&args.beams)?;
    let gnss = io::import_gnss(&args.gnss)?;
    let states = io::import_states(&args.attitude)?;
    let mounting = euler_deg(&args.mounting_euler_deg)?;
    let geom = default_beam_geometry();
    let mode = match args.mode.as_str() {
        "full" => CalibrationMode::Full,
        "scalar" => CalibrationMode::Scalar,
        other => {
            return Err(Error::InvalidArgument(format!(
                "calibration mode '{other}' (full|scalar)"
            )))
        }
    };

    // Time-align DVL velocities with GNSS by nearest neighbor within half
    // a DVL period, taking attitude from the nearest state row.
    let half_period = if beams.len() > 1 {
        0.5 * (beams[1].t - beams[0].t)
    } else {
        0.5
    };
    let mut dvl_vel = Vec::new();
    let mut gnss_matched = Vec::new();
    let mut attitudes = Vec::new();
    for sample in &beams {
        if sample.valid_count() < 3 {
            continue;
        }
        let Some(g) = gnss
            .iter()
            .min_by(|a, b| (a.t - sample.t).abs().total_cmp(&(b.t - sample.t).abs()))
        else {
            continue;
        };
        if (g.t - sample.t).abs() > half_period {
            continue;
        }
        let Some(st) = states
            .iter()
            .min_by(|a, b| (a.t - sample.t).abs().total_cmp(&(b.t - sample.t).abs()))
        else {
            continue;
        };
        dvl_vel.push(fusion::ls_beam_velocity(sample, &geom)?);
        gnss_matched.push(*g);
        attitudes.push(st.attitude);
    }

    let result = calibration::calibrate_dvl_full(&dvl_vel, &gnss_matched, &attitudes, &mounting)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::io(args.out.display().to_string(), e))?;
    let doc = toml::to_string_pretty(&result).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(args.out.join("calibration.toml"), doc)
        .map_err(|e| Error::io("calibration.toml", e))?;

    // Residual report: VRMSE before and after applying the calibration.
    let reference: Vec<Vector3<f64>> = gnss_matched
        .iter()
        .zip(&attitudes)
        .map(|(g, att)| mounting.apply(&att.transpose().apply(&g.v_n)))
        .collect();
    let pre = calibration::vrmse(&dvl_vel, &reference)?;
    let corrected: Vec<Vector3<f64>> = dvl_vel
        .iter()
        .map(|v| calibration::apply_calibration(v, &result, mode))
        .collect::<Result<_>>()?;
    let post = calibration::vrmse(&corrected, &reference)?;
    let mut report = MetricsReport::default();
    report.vrmse = Some(post);
    io::export_report(&args.out.join("report.csv"), &report)?;
    println!(
        "calibration: samples={} scalar_k={:.6} k={:?} b={:?}",
        result.samples_used, result.scalar_scale, result.full_scale, result.full_bias
    );
    println!("vrmse: pre = {pre} m/s, post({:?}) = {post} m/s", args.mode);
    Ok(())
}

fn cmd_align(args: AlignArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::io(args.out.display().to_string(), e))?;
    match args.mode.as_str() {
        "initial" => cmd_align_initial(args),
        "mounting" => cmd_align_mounting(args),
        other => Err(Error::InvalidArgument(format!(
            "alignment mode '{other}' (initial|mounting)"
        ))),
    }
}

fn cmd_align_initial(args: AlignArgs) -> Result<()> {
    let imu_path = args
        .imu
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--imu required for initial alignment".into()))?;
    let imu = io::import_imu(imu_path)?;
    if imu.len() < 2 {
        return Err(Error::InvalidArgument("IMU record too short".into()));
    }
    let lat = args.lat_deg.to_radians();
    // Samples carry the reading over the interval ending at their
    // timestamp, so the window origin sits one period before the first.
    let t0 = imu[0].t - (imu[1].t - imu[0].t);
    let method = initial_method_by_name(&args.method)?;
    let truth_states = match &args.truth {
        Some(p) => Some(io::import_states(p)?),
        None => None,
    };

    let mut rows = Vec::new();
    for window in &args.windows {
        let subset: Vec<_> = imu
            .iter()
            .filter(|s| s.t <= t0 + window + 1e-9)
            .copied()
            .collect();
        let pairs = alignment::pairs_over_window(&WGS84, &subset, lat, t0, *window, 64)?;
        let result = method.align(&pairs)?;
        let yaw = alignment::heading_at_end(&WGS84, &result, &subset, lat, t0, t0 + window)?;
        let ae_deg = match &truth_states {
            Some(states) => {
                let nearest = states
                    .iter()
                    .min_by(|a, b| {
                        (a.t - (t0 + window)).abs().total_cmp(&(b.t - (t0 + window)).abs())
                    })
                    .ok_or_else(|| Error::InvalidArgument("empty truth file".into()))?;
                alignment::cyclic_error(yaw, nearest.heading()).abs().to_degrees()
            }
            None => f64::NAN,
        };
        rows.push(AlignmentRow {
            method: result.method.to_string(),
            window: *window,
            yaw_rad: yaw,
            ae_deg,
            condition_indicator: result.condition_indicator,
        });
        println!(
            "initial[{}] window={}s yaw={:.4} rad ae={:.4} deg cond={:.3e}",
            result.method, window, yaw, ae_deg, result.condition_indicator
        );
    }
    io::export_alignment_rows(&args.out.join("alignment_initial.csv"), &rows)
}

fn cmd_align_mounting(args: AlignArgs) -> Result<()> {
    let ins_path = args
        .ins
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--ins required for mounting alignment".into()))?;
    let beams_path = args
        .beams
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--beams required for mounting alignment".into()))?;
    let ins = io::import_states(ins_path)?;
    let beams = io::import_dvl_beams(beams_path)?;
    let geom = default_beam_geometry();
    let truth_mounting = match &args.mounting_truth_euler_deg {
        Some(v) => Some(euler_deg(v)?.transpose()), // config gives T_b^d; score on T_d^b
        None => None,
    };

    let t_start = ins.first().map(|s| s.t).unwrap_or(0.0);
    let mut rows = Vec::new();
    for window in &args.windows {
        let mut v_body = Vec::new();
        let mut v_dvl = Vec::new();
        for sample in &beams {
            if sample.t > t_start + window || sample.valid_count() < 3 {
                continue;
            }
            let Some(st) = ins
                .iter()
                .min_by(|a, b| (a.t - sample.t).abs().total_cmp(&(b.t - sample.t).abs()))
            else {
                continue;
            };
            v_body.push(st.attitude.transpose().apply(&st.velocity_n));
            v_dvl.push(fusion::ls_beam_velocity(sample, &geom)?);
        }
        let result = alignment::wahba_svd(&v_body, &v_dvl)?;
        let ae_deg = match &truth_mounting {
            Some(t) => auvnav::metrics::evaluate_mounting(&result.rotation, t),
            None => f64::NAN,
        };
        rows.push(AlignmentRow {
            method: result.method.to_string(),
            window: *window,
            yaw_rad: result.euler.yaw,
            ae_deg,
            condition_indicator: result.condition_indicator,
        });
        println!(
            "mounting[svd] window={}s yaw={:.4} rad rmse={:.4} deg cond={:.3e}",
            window, result.euler.yaw, ae_deg, result.condition_indicator
        );
    }
    io::export_alignment_rows(&args.out.join("alignment_mounting.csv"), &rows)
}

fn cmd_fuse(args: FuseArgs) -> Result<()> {
    let imu = io::import_imu(&args.imu)?;
    let beams = io::import_dvl_beams(&args.beams)?;
    let initial_states = io::import_states(&args.initial)?;
    let initial = initial_states
        .first()
        .ok_or_else(|| Error::InvalidArgument("initial state file is empty".into()))?;
    let adaptive = match args.adaptive.as_str() {
        "on" => true,
        "off" => false,
        other => {
            return Err(Error::InvalidArgument(format!(
                "--adaptive '{other}' (on|off)"
            )))
        }
    };
    let dt = if imu.len() > 1 {
        imu[1].t - imu[0].t
    } else {
        0.01
    };
    let mut psd = [1e-14_f64; 12];
    for i in 0..3 {
        psd[i] = (args.accel_noise_std.powi(2) * dt).max(1e-14);
        psd[3 + i] = (args.gyro_noise_std.powi(2) * dt).max(1e-14);
    }
    let cfg = FusionConfig {
        mode: args.mode.clone(),
        process_noise_psd: psd,
        dvl_velocity_noise_std: args.dvl_noise_std,
        beam_noise_std: args.beam_noise_std,
        loose_noise_from_beams: true,
        adaptive,
        innovation_window: 20,
        mounting: euler_deg(&args.mounting_euler_deg)?,
    };
    let geom = default_beam_geometry();
    let mut initial_cov = Covariance::zeros();
    for i in 0..12 {
        initial_cov[(i, i)] = 1e-6;
    }
    let output = fusion::run_fusion(&WGS84, &imu, &beams, initial, initial_cov, &geom, &cfg)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::io(args.out.display().to_string(), e))?;
    io::export_states(&args.out.join("est.csv"), &output.states)?;
    io::export_fusion_log(&args.out.join("fusion_log.csv"), &output.log)?;
    println!(
        "fusion[{}] epochs={} accepted={} final t={:.2}s",
        cfg.mode,
        output.log.records.len(),
        output.log.accepted_count(),
        output.final_state.t()
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let est = io::import_states(&args.est)?;
    let truth = io::import_states(&args.truth)?;
    // Tolerate the usual one-sample offset: estimates start one IMU period
    // after the truth origin.
    let (est_aligned, truth_aligned) = if est.len() + 1 == truth.len() {
        (&est[..], &truth[1..])
    } else {
        (&est[..], &truth[..])
    };
    let m = evaluate_trajectory(&WGS84, est_aligned, truth_aligned)?;
    let mut report = MetricsReport::default();
    report.trajectory = Some(m);
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::io(args.out.display().to_string(), e))?;
    io::export_report(&args.out.join("report.csv"), &report)?;
    print_report(&report);
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let template = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::io(args.config.display().to_string(), e))?;
    let mut grid = Vec::new();
    for spec in &args.grid {
        let (key, values) = spec
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("grid '{spec}' is not key=v1|v2")))?;
        let values: Vec<toml::Value> = values
            .split('|')
            .map(|v| {
                if let Ok(i) = v.parse::<i64>() {
                    toml::Value::Integer(i)
                } else if let Ok(f) = v.parse::<f64>() {
                    toml::Value::Float(f)
                } else if let Ok(b) = v.parse::<bool>() {
                    toml::Value::Boolean(b)
                } else {
                    toml::Value::String(v.to_string())
                }
            })
            .collect();
        grid.push((key.to_string(), values));
    }
    let rows = scenario::sweep(&template, &grid, args.seeds, args.seed_base, &args.out)?;
    for r in &rows {
        println!(
            "{} [{} seeds] {}: mean={} std={}",
            r.cell, r.seeds, r.metric, r.mean, r.std
        );
    }
    println!("sweep table written to {}", args.out.join("sweep.csv").display());
    Ok(())
}
