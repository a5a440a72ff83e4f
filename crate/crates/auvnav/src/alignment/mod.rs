//! Attitude alignment.
//!
//! Two distinct problems share this module:
//!
//! 1. Initial in-motion self-alignment: the attitude decomposition
//!    `T_b^n(t) = T_{n0}^n(t) · T_{b0}^{n0} · T_b^{b0}(t)` reduces the
//!    problem to estimating the constant `T_{n0}^{b0}` from time-integrated
//!    gravity observations in the two frozen frames. The dual-vector
//!    analytic solution (DVA) and the optimization-based Wahba/quaternion
//!    solution (OBA) are both provided, registered by name.
//! 2. INS↔DVL mounting estimation: the fixed rotation between sensor
//!    frames solved from synchronized velocity pairs as a Wahba problem by
//!    SVD.

use nalgebra::Vector3;

use crate::frames::{euler_from_rotation, EulerAngles, RotationMatrix};
use crate::{Error, Result};

mod adia;
mod mounting;

pub use adia::{
    decompose_attitude_tracks, dva_align, heading_at_end, integrated_observation_pairs, oba_align,
    pairs_over_window, AttitudeTracks,
};
pub use mounting::{wahba_objective, wahba_svd};

/// Default angular separation below which observation pairs are declared
/// colinear. Earth-rotation observations separate by only ≈ Ω·Δt/2, about
/// 0.1° over two minutes, so the guard sits well below that.
pub const COLINEARITY_GATE_RAD: f64 = 1e-5;

/// Default minimum singular-value ratio σ₂/σ₁ of the velocity
/// cross-covariance for the mounting solver.
pub const EXCITATION_RATIO_FLOOR: f64 = 1e-3;

/// A pair of observation vectors of the same physical quantity expressed
/// in the frozen navigation frame (`u_n0`) and the frozen body frame
/// (`u_b0`), both at time `t`.
#[derive(Clone, Copy, Debug)]
pub struct ObservationPair {
    pub t: f64,
    pub u_n0: Vector3<f64>,
    pub u_b0: Vector3<f64>,
}

/// Output of any alignment solver.
#[derive(Clone, Debug)]
pub struct AlignmentResult {
    /// The estimated rotation: `T_{n0}^{b0}` for initial alignment,
    /// `T_d^b` for mounting alignment.
    pub rotation: RotationMatrix,
    /// Euler angles of the attitude this result describes: the body→nav
    /// attitude `T_{b0}^{n0}` for initial alignment (so `euler.yaw` is the
    /// vehicle heading at t0), or the mounting rotation itself for SVD.
    pub euler: EulerAngles,
    /// Solver name: "dva", "oba" or "svd".
    pub method: &'static str,
    /// Alignment window length, s.
    pub window: f64,
    /// Geometry-strength indicator: smallest singular value of the
    /// observation stack (DVA/OBA) or σ₂/σ₁ of the cross-covariance (SVD).
    pub condition_indicator: f64,
    /// RMS residual of the solved objective, method units.
    pub residual_rms: f64,
}

/// An initial-alignment method operating on integrated observation pairs,
/// selectable by name at runtime.
pub trait InitialAlignMethod: Sync {
    fn name(&self) -> &'static str;
    /// Estimates `T_{n0}^{b0}` from the observation-pair history.
    fn align(&self, pairs: &[ObservationPair]) -> Result<AlignmentResult>;
}

struct DvaMethod;
struct ObaMethod;

impl InitialAlignMethod for DvaMethod {
    fn name(&self) -> &'static str {
        "dva"
    }

    /// Uses the pairs nearest the window midpoint and endpoint, the
    /// default sampling instants that maximize angular separation under
    /// Earth rotation.
    fn align(&self, pairs: &[ObservationPair]) -> Result<AlignmentResult> {
        if pairs.len() < 2 {
            return Err(Error::InvalidArgument(
                "DVA needs at least two observation pairs".into(),
            ));
        }
        let mid = (pairs.len() - 1) / 2;
        dva_align(&pairs[mid], &pairs[pairs.len() - 1])
    }
}

impl InitialAlignMethod for ObaMethod {
    fn name(&self) -> &'static str {
        "oba"
    }

    fn align(&self, pairs: &[ObservationPair]) -> Result<AlignmentResult> {
        oba_align(pairs)
    }
}

static INITIAL_METHODS: [&dyn InitialAlignMethod; 2] = [&DvaMethod, &ObaMethod];

/// Looks an initial-alignment method up by its registered name.
pub fn initial_method_by_name(name: &str) -> Result<&'static dyn InitialAlignMethod> {
    INITIAL_METHODS
        .iter()
        .find(|m| m.name() == name)
        .copied()
        .ok_or_else(|| Error::UnknownStrategy {
            family: "initial alignment method",
            name: name.to_string(),
            known: known_initial_methods().join(", "),
        })
}

/// Names of the registered initial-alignment methods.
pub fn known_initial_methods() -> Vec<&'static str> {
    INITIAL_METHODS.iter().map(|m| m.name()).collect()
}

/// Cyclic heading error `atan2(sin(ψ̂−ψ), cos(ψ̂−ψ))` in (−π, π].
pub fn cyclic_error(psi_hat: f64, psi: f64) -> f64 {
    let d = psi_hat - psi;
    d.sin().atan2(d.cos())
}

/// Cyclic mean squared error: `λ · mean(cyclic_error²)`.
pub fn cmse(psi_hat: &[f64], psi: &[f64], lambda: f64) -> Result<f64> {
    if psi_hat.len() != psi.len() {
        return Err(Error::LengthMismatch {
            left: psi_hat.len(),
            right: psi.len(),
        });
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument("lambda must be > 0".into()));
    }
    if psi_hat.is_empty() {
        return Err(Error::InvalidArgument("empty heading sequences".into()));
    }
    let sum: f64 = psi_hat
        .iter()
        .zip(psi)
        .map(|(a, b)| cyclic_error(*a, *b).powi(2))
        .sum();
    Ok(lambda * sum / psi_hat.len() as f64)
}

/// Shared helper: euler angles of the body attitude from a `T_{n0}^{b0}`
/// estimate.
pub(crate) fn attitude_euler(t_n0_b0: &RotationMatrix) -> EulerAngles {
    euler_from_rotation(&t_n0_b0.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn cyclic_error_basics() {
        assert_eq!(cyclic_error(0.1, 0.1), 0.0);
        // Headings 179° and −179° are 2° apart, never 358°; the wrap goes
        // the short way around.
        let two_deg = 2.0_f64.to_radians();
        let e = cyclic_error(179.0_f64.to_radians(), -179.0_f64.to_radians());
        assert_abs_diff_eq!(e.abs(), two_deg, epsilon = 1e-12);
        assert_abs_diff_eq!(
            cyclic_error(-179.0_f64.to_radians(), 179.0_f64.to_radians()),
            two_deg,
            epsilon = 1e-12
        );
    }

    #[test]
    fn cyclic_error_grid() {
        // Exhaustive grid over [−2π, 2π]²: result always in (−π, π] and
        // equal to the naive difference when |Δψ| < π.
        let n = 101;
        for i in 0..n {
            for j in 0..n {
                let a = -2.0 * PI + 4.0 * PI * i as f64 / (n - 1) as f64;
                let b = -2.0 * PI + 4.0 * PI * j as f64 / (n - 1) as f64;
                let e = cyclic_error(a, b);
                assert!(e.abs() <= PI + 1e-12);
                let naive = a - b;
                if naive.abs() < PI - 1e-9 {
                    assert_abs_diff_eq!(e, naive, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn cmse_definition() {
        let zero = cmse(&[0.3, -0.1], &[0.3, -0.1], 1.0).unwrap();
        assert_eq!(zero, 0.0);
        let two_deg = 2.0_f64.to_radians();
        let single = cmse(&[two_deg], &[0.0], 1.0).unwrap();
        assert_abs_diff_eq!(single, two_deg * two_deg, epsilon = 1e-15);
        let doubled = cmse(&[two_deg], &[0.0], 2.0).unwrap();
        assert_eq!(doubled, 2.0 * single);
    }

    #[test]
    fn cmse_validation() {
        assert!(cmse(&[0.0], &[0.0, 1.0], 1.0).is_err());
        assert!(cmse(&[0.0], &[0.0], 0.0).is_err());
    }

    #[test]
    fn registry_knows_both_methods() {
        assert_eq!(known_initial_methods(), vec!["dva", "oba"]);
        assert!(initial_method_by_name("dva").is_ok());
        assert!(initial_method_by_name("oba").is_ok());
        assert!(matches!(
            initial_method_by_name("triad"),
            Err(Error::UnknownStrategy { .. })
        ));
    }
}
