//! Strapdown INS mechanization: deterministic propagation of position,
//! velocity and attitude from body-frame specific force and angular rate.
//!
//! The continuous-time model integrated here is
//!
//! ```text
//! ṗ = D(φ, h) v          (geodetic position rates)
//! v̇ = C f_b − (2ω_ie + ω_en) × v + g
//! Ċ = C Ω_ib − (Ω_ie + Ω_en) C
//! ```
//!
//! with `C` the body→navigation rotation. Integration is fourth-order
//! Runge-Kutta with the IMU sample held constant over the step (zero-order
//! hold); the attitude is re-orthonormalized whenever drift exceeds the
//! rotation tolerance.

use nalgebra::{Matrix3, Vector3};

use crate::earth::EarthModel;
use crate::frames::{skew, GeodeticPosition, NavState, RotationMatrix};
use crate::sim::ImuSample;
use crate::{Error, Result};

/// Raw derivative of the mechanization state at a point.
struct Derivative {
    pos_dot: Vector3<f64>,
    vel_dot: Vector3<f64>,
    att_dot: Matrix3<f64>,
}

/// Unconstrained mechanization state used inside the RK4 stages, where the
/// attitude may be slightly off the rotation manifold.
#[derive(Clone, Copy)]
struct RawState {
    lat: f64,
    lon: f64,
    h: f64,
    v: Vector3<f64>,
    c: Matrix3<f64>,
}

impl RawState {
    fn from_nav(s: &NavState) -> Self {
        RawState {
            lat: s.position.latitude,
            lon: s.position.longitude,
            h: s.position.height,
            v: s.velocity_n,
            c: *s.attitude.matrix(),
        }
    }

    fn advanced(&self, d: &Derivative, dt: f64) -> Self {
        RawState {
            lat: self.lat + d.pos_dot.x * dt,
            lon: self.lon + d.pos_dot.y * dt,
            h: self.h + d.pos_dot.z * dt,
            v: self.v + d.vel_dot * dt,
            c: self.c + d.att_dot * dt,
        }
    }
}

fn derivative(earth: &EarthModel, s: &RawState, imu: &ImuSample) -> Result<Derivative> {
    let pos = GeodeticPosition::new(s.lat, s.lon, s.h)?;
    let d = earth.curvature_matrix(&pos)?;
    let omega_ie = earth.earth_rate_n(s.lat);
    let omega_en = earth.transport_rate(&pos, &s.v)?;
    let gravity = earth.gravity_n(&pos);

    let pos_dot = d * s.v;
    let vel_dot = s.c * imu.specific_force_b - (2.0 * omega_ie + omega_en).cross(&s.v) + gravity;
    let att_dot = s.c * skew(&imu.angular_rate_b) - skew(&(omega_ie + omega_en)) * s.c;
    Ok(Derivative {
        pos_dot,
        vel_dot,
        att_dot,
    })
}

/// Propagates the navigation state over one IMU interval of length `dt`.
pub fn mechanize_step(
    earth: &EarthModel,
    state: &NavState,
    imu: &ImuSample,
    dt: f64,
) -> Result<NavState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if dt > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} s exceeds the 1 s mechanization limit"
        )));
    }

    let y0 = RawState::from_nav(state);
    let k1 = derivative(earth, &y0, imu)?;
    let k2 = derivative(earth, &y0.advanced(&k1, dt / 2.0), imu)?;
    let k3 = derivative(earth, &y0.advanced(&k2, dt / 2.0), imu)?;
    let k4 = derivative(earth, &y0.advanced(&k3, dt), imu)?;

    let combine = |a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, d: &Vector3<f64>| {
        (a + 2.0 * b + 2.0 * c + d) * (dt / 6.0)
    };
    let dpos = combine(&k1.pos_dot, &k2.pos_dot, &k3.pos_dot, &k4.pos_dot);
    let dvel = combine(&k1.vel_dot, &k2.vel_dot, &k3.vel_dot, &k4.vel_dot);
    let datt = (k1.att_dot + 2.0 * k2.att_dot + 2.0 * k3.att_dot + k4.att_dot) * (dt / 6.0);

    let position = GeodeticPosition::new(y0.lat + dpos.x, y0.lon + dpos.y, y0.h + dpos.z)?;
    let attitude = RotationMatrix::from_matrix_reorthonormalized(y0.c + datt)?;
    Ok(NavState::new(state.t + dt, position, y0.v + dvel, attitude))
}

/// Dead reckoning: folds [`mechanize_step`] over an IMU record.
///
/// Each sample is interpreted as the zero-order-hold reading over the
/// interval ending at its timestamp, so the output carries one state per
/// sample. An empty record returns just the initial state.
pub fn dead_reckon(
    earth: &EarthModel,
    initial: &NavState,
    imu: &[ImuSample],
) -> Result<Vec<NavState>> {
    if imu.is_empty() {
        return Ok(vec![*initial]);
    }
    let mut out = Vec::with_capacity(imu.len());
    let mut current = *initial;
    for (i, sample) in imu.iter().enumerate() {
        let dt = sample.t - current.t;
        if dt <= 0.0 {
            return Err(Error::NonMonotoneTimestamps {
                index: i,
                t: sample.t,
            });
        }
        current = mechanize_step(earth, &current, sample, dt)?;
        out.push(current);
    }
    Ok(out)
}

/// IMU reading that keeps a state exactly stationary: specific force
/// cancelling gravity and angular rate tracking the Earth rate in the body
/// frame. Useful for equilibrium tests and static scenarios.
pub fn equilibrium_imu(earth: &EarthModel, state: &NavState, t: f64) -> ImuSample {
    let c_t = state.attitude.transpose();
    let gravity = earth.gravity_n(&state.position);
    let omega_ie = earth.earth_rate_n(state.position.latitude);
    ImuSample {
        t,
        specific_force_b: c_t.apply(&(-gravity)),
        angular_rate_b: c_t.apply(&omega_ie),
    }
}
