//! Ground-truth trajectory generators.
//!
//! Each profile kind is a [`TrajectoryGenerator`] registered by name;
//! configuration files and the CLI select a generator at runtime through
//! [`by_name`]. All generators share the same construction: an analytic
//! planar velocity/yaw law, with geodetic position integrated from
//! `ṗ = D(φ,h) v` by Runge-Kutta at the IMU rate so the ground truth is
//! consistent with the strapdown kinematics.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::earth::EarthModel;
use crate::frames::{rotation_from_euler, EulerAngles, GeodeticPosition, NavState};
use crate::{Error, Result};

/// Trajectory profile: generator name, duration, kinematic parameters and
/// the sensor sampling rates derived streams will use.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryProfile {
    /// Generator name; see [`known_kinds`].
    pub kind: String,
    /// Mission duration, s.
    pub duration: f64,
    /// Nominal horizontal speed, m/s (unused by `mooring_sway`).
    #[serde(default)]
    pub speed: f64,
    /// Turn radius for `long_turn`, m.
    #[serde(default)]
    pub turn_radius: Option<f64>,
    /// Sway amplitude for `mooring_sway`, m.
    #[serde(default)]
    pub sway_amplitude: Option<f64>,
    /// Sway period for `mooring_sway`, s.
    #[serde(default)]
    pub sway_period: Option<f64>,
    /// Straight-leg length for `lawnmower`, m.
    #[serde(default)]
    pub leg_length: Option<f64>,
    /// Spacing between adjacent legs for `lawnmower`, m.
    #[serde(default)]
    pub leg_spacing: Option<f64>,
    /// Optional sinusoidal speed modulation (fraction of nominal speed);
    /// calibration scenarios need it for per-axis scale observability.
    #[serde(default)]
    pub speed_modulation: Option<SpeedModulation>,
    /// IMU sampling rate, Hz. Ground truth is emitted at this rate.
    pub imu_rate: f64,
    /// DVL sampling rate, Hz.
    pub dvl_rate: f64,
    /// GNSS sampling rate, Hz.
    pub gnss_rate: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedModulation {
    /// Peak fractional speed deviation, e.g. 0.3 for ±30 %.
    pub fraction: f64,
    /// Modulation period, s.
    pub period: f64,
}

impl TrajectoryProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) {
            return Err(Error::InvalidArgument("profile duration must be > 0".into()));
        }
        if !(self.imu_rate > 0.0 && self.dvl_rate > 0.0 && self.gnss_rate > 0.0) {
            return Err(Error::InvalidArgument("sampling rates must be > 0".into()));
        }
        if self.dvl_rate > self.imu_rate {
            return Err(Error::InvalidArgument(
                "dvl_rate must not exceed imu_rate".into(),
            ));
        }
        if let Some(m) = &self.speed_modulation {
            if !(m.period > 0.0) || m.fraction.abs() >= 1.0 {
                return Err(Error::InvalidArgument(
                    "speed modulation needs period > 0 and |fraction| < 1".into(),
                ));
            }
        }
        by_name(&self.kind)?.check_parameters(self)
    }

    /// IMU sample interval, s.
    pub fn dt(&self) -> f64 {
        1.0 / self.imu_rate
    }

    fn speed_at(&self, t: f64) -> f64 {
        match &self.speed_modulation {
            None => self.speed,
            Some(m) => {
                self.speed * (1.0 + m.fraction * (2.0 * std::f64::consts::PI * t / m.period).sin())
            }
        }
    }

    /// Closed-form integral of the modulated speed from 0 to t.
    fn distance_at(&self, t: f64) -> f64 {
        match &self.speed_modulation {
            None => self.speed * t,
            Some(m) => {
                let w = 2.0 * std::f64::consts::PI / m.period;
                self.speed * (t + m.fraction * (1.0 - (w * t).cos()) / w)
            }
        }
    }
}

/// A trajectory profile kind: produces the analytic NED velocity and yaw at
/// any mission time.
pub trait TrajectoryGenerator: Sync {
    fn name(&self) -> &'static str;
    /// Validates the kind-specific parameters.
    fn check_parameters(&self, profile: &TrajectoryProfile) -> Result<()>;
    /// NED velocity (m/s) and yaw (rad) at mission time `t`.
    fn velocity_and_yaw(
        &self,
        profile: &TrajectoryProfile,
        initial_heading: f64,
        t: f64,
    ) -> (Vector3<f64>, f64);
}

struct ConstantVelocityLine;
struct LongTurn;
struct Lawnmower;
struct MooringSway;

impl TrajectoryGenerator for ConstantVelocityLine {
    fn name(&self) -> &'static str {
        "constant_velocity_line"
    }

    fn check_parameters(&self, profile: &TrajectoryProfile) -> Result<()> {
        if !(profile.speed > 0.0) {
            return Err(Error::InvalidArgument("line profile needs speed > 0".into()));
        }
        Ok(())
    }

    fn velocity_and_yaw(
        &self,
        profile: &TrajectoryProfile,
        initial_heading: f64,
        t: f64,
    ) -> (Vector3<f64>, f64) {
        let s = profile.speed_at(t);
        let (sin_h, cos_h) = initial_heading.sin_cos();
        (Vector3::new(s * cos_h, s * sin_h, 0.0), initial_heading)
    }
}

impl TrajectoryGenerator for LongTurn {
    fn name(&self) -> &'static str {
        "long_turn"
    }

    fn check_parameters(&self, profile: &TrajectoryProfile) -> Result<()> {
        if !(profile.speed > 0.0) {
            return Err(Error::InvalidArgument("turn profile needs speed > 0".into()));
        }
        match profile.turn_radius {
            Some(r) if r > 0.0 => Ok(()),
            _ => Err(Error::InvalidArgument(
                "long_turn needs turn_radius > 0".into(),
            )),
        }
    }

    fn velocity_and_yaw(
        &self,
        profile: &TrajectoryProfile,
        initial_heading: f64,
        t: f64,
    ) -> (Vector3<f64>, f64) {
        let radius = profile.turn_radius.expect("validated");
        // Course rate tracks the instantaneous speed so the path stays on
        // the requested radius even under speed modulation.
        let yaw = initial_heading + profile.distance_at(t) / radius;
        let s = profile.speed_at(t);
        let (sin_y, cos_y) = yaw.sin_cos();
        (Vector3::new(s * cos_y, s * sin_y, 0.0), yaw)
    }
}

impl Lawnmower {
    /// Yaw offset from the initial heading after `t` seconds, built from
    /// straight legs and alternating 180° turns whose rate follows a
    /// raised-cosine profile (continuous rate and rate-slope at the joins).
    fn yaw_offset(profile: &TrajectoryProfile, t: f64) -> f64 {
        let leg_time = profile.leg_length.expect("validated") / profile.speed;
        let turn_radius = profile.leg_spacing.expect("validated") / 2.0;
        let rate = profile.speed / turn_radius;
        let turn_time = std::f64::consts::PI / rate;
        let cycle = leg_time + turn_time;

        let full_cycles = (t / cycle).floor();
        let tau = t - full_cycles * cycle;
        let completed_turns = full_cycles as i64;
        // Turns alternate sign (+π, −π, +π, ...) so consecutive legs are
        // displaced to the same side: net π after an odd number of turns.
        let net_completed = if completed_turns % 2 == 0 { 0.0 } else { std::f64::consts::PI };
        if tau <= leg_time {
            return net_completed;
        }
        let turn_tau = tau - leg_time;
        let sign = if completed_turns % 2 == 0 { 1.0 } else { -1.0 };
        // Raised-cosine rate: r(τ) = rate·(1 − cos(2πτ/T)), integral π at τ=T.
        let w = 2.0 * std::f64::consts::PI / turn_time;
        let progress = rate * (turn_tau - (w * turn_tau).sin() / w);
        net_completed + sign * progress
    }
}

impl TrajectoryGenerator for Lawnmower {
    fn name(&self) -> &'static str {
        "lawnmower"
    }

    fn check_parameters(&self, profile: &TrajectoryProfile) -> Result<()> {
        if !(profile.speed > 0.0) {
            return Err(Error::InvalidArgument("lawnmower needs speed > 0".into()));
        }
        match (profile.leg_length, profile.leg_spacing) {
            (Some(l), Some(s)) if l > 0.0 && s > 0.0 => Ok(()),
            _ => Err(Error::InvalidArgument(
                "lawnmower needs leg_length > 0 and leg_spacing > 0".into(),
            )),
        }
    }

    fn velocity_and_yaw(
        &self,
        profile: &TrajectoryProfile,
        initial_heading: f64,
        t: f64,
    ) -> (Vector3<f64>, f64) {
        let yaw = crate::frames::wrap_angle(initial_heading + Self::yaw_offset(profile, t));
        let s = profile.speed_at(t);
        let (sin_y, cos_y) = yaw.sin_cos();
        (Vector3::new(s * cos_y, s * sin_y, 0.0), yaw)
    }
}

impl TrajectoryGenerator for MooringSway {
    fn name(&self) -> &'static str {
        "mooring_sway"
    }

    fn check_parameters(&self, profile: &TrajectoryProfile) -> Result<()> {
        match (profile.sway_amplitude, profile.sway_period) {
            (Some(a), Some(p)) if a >= 0.0 && p > 0.0 => Ok(()),
            _ => Err(Error::InvalidArgument(
                "mooring_sway needs sway_amplitude ≥ 0 and sway_period > 0".into(),
            )),
        }
    }

    fn velocity_and_yaw(
        &self,
        profile: &TrajectoryProfile,
        initial_heading: f64,
        t: f64,
    ) -> (Vector3<f64>, f64) {
        let amplitude = profile.sway_amplitude.expect("validated");
        let period = profile.sway_period.expect("validated");
        let w = 2.0 * std::f64::consts::PI / period;
        // Sway along the beam (starboard) direction, heading fixed.
        let (sin_h, cos_h) = initial_heading.sin_cos();
        let beam = Vector3::new(-sin_h, cos_h, 0.0);
        (amplitude * w * (w * t).cos() * beam, initial_heading)
    }
}

static GENERATORS: [&dyn TrajectoryGenerator; 4] =
    [&ConstantVelocityLine, &LongTurn, &Lawnmower, &MooringSway];

/// Looks a generator up by its registered name.
pub fn by_name(name: &str) -> Result<&'static dyn TrajectoryGenerator> {
    GENERATORS
        .iter()
        .find(|g| g.name() == name)
        .copied()
        .ok_or_else(|| Error::UnknownStrategy {
            family: "trajectory profile",
            name: name.to_string(),
            known: known_kinds().join(", "),
        })
}

/// Names of all registered trajectory generators.
pub fn known_kinds() -> Vec<&'static str> {
    GENERATORS.iter().map(|g| g.name()).collect()
}

/// Generates the ground-truth state sequence for a profile at the IMU rate.
///
/// Velocity and yaw come from the profile's analytic law; position is
/// integrated from `ṗ = D v` with RK4 so the output satisfies the strapdown
/// kinematics to integration accuracy. Roll and pitch are zero.
pub fn generate_trajectory(
    earth: &EarthModel,
    profile: &TrajectoryProfile,
    origin: &GeodeticPosition,
    initial_heading: f64,
) -> Result<Vec<NavState>> {
    profile.validate()?;
    let generator = by_name(&profile.kind)?;
    let dt = profile.dt();
    let steps = (profile.duration * profile.imu_rate).round() as usize;

    let mut states = Vec::with_capacity(steps + 1);
    let mut pos = *origin;

    let make_state = |t: f64, pos: GeodeticPosition| -> Result<NavState> {
        let (v, yaw) = generator.velocity_and_yaw(profile, initial_heading, t);
        let attitude = rotation_from_euler(&EulerAngles::new(0.0, 0.0, yaw))?;
        Ok(NavState::new(t, pos, v, attitude))
    };
    states.push(make_state(0.0, pos)?);

    for i in 0..steps {
        let t = i as f64 * dt;
        // RK4 on ṗ = D(p)·v(t) with the analytic velocity law.
        let v1 = generator.velocity_and_yaw(profile, initial_heading, t).0;
        let vm = generator
            .velocity_and_yaw(profile, initial_heading, t + dt / 2.0)
            .0;
        let v2 = generator.velocity_and_yaw(profile, initial_heading, t + dt).0;

        let f = |p: &GeodeticPosition, v: &Vector3<f64>| -> Result<Vector3<f64>> {
            Ok(earth.curvature_matrix(p)? * v)
        };
        let k1 = f(&pos, &v1)?;
        let p2 = offset_pos(&pos, &(k1 * (dt / 2.0)))?;
        let k2 = f(&p2, &vm)?;
        let p3 = offset_pos(&pos, &(k2 * (dt / 2.0)))?;
        let k3 = f(&p3, &vm)?;
        let p4 = offset_pos(&pos, &(k3 * dt))?;
        let k4 = f(&p4, &v2)?;
        let dp = (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (dt / 6.0);
        pos = offset_pos(&pos, &dp)?;
        states.push(make_state(t + dt, pos)?);
    }
    Ok(states)
}

fn offset_pos(p: &GeodeticPosition, d: &Vector3<f64>) -> Result<GeodeticPosition> {
    GeodeticPosition::new(p.latitude + d.x, p.longitude + d.y, p.height + d.z)
}
