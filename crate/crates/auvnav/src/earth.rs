//! Earth reference model: rotation rate, ellipsoid curvature radii and
//! Somigliana normal gravity, all in the NED navigation frame.

use nalgebra::{Matrix3, Vector3};

use crate::frames::GeodeticPosition;
use crate::{Error, Result};

/// Ellipsoid and gravity constants. Defaults to WGS-84.
#[derive(Clone, Copy, Debug)]
pub struct EarthModel {
    /// Semi-major axis, m.
    pub equatorial_radius: f64,
    /// Flattening, unitless.
    pub flattening: f64,
    /// Earth rotation rate magnitude ω_ie, rad/s.
    pub earth_rate_magnitude: f64,
    /// Normal gravity at the equator, m/s².
    pub gravity_equator: f64,
    /// Normal gravity at the poles, m/s².
    pub gravity_pole: f64,
}

/// WGS-84 defined values.
pub const WGS84: EarthModel = EarthModel {
    equatorial_radius: 6_378_137.0,
    flattening: 1.0 / 298.257_223_563,
    earth_rate_magnitude: 7.292_115_146_7e-5,
    gravity_equator: 9.780_325_335_9,
    gravity_pole: 9.832_184_937_8,
};

impl Default for EarthModel {
    fn default() -> Self {
        WGS84
    }
}

impl EarthModel {
    /// First eccentricity squared, e² = f(2 − f).
    pub fn eccentricity_squared(&self) -> f64 {
        self.flattening * (2.0 - self.flattening)
    }

    /// Meridional radius of curvature R_M at a latitude.
    pub fn meridian_radius(&self, lat: f64) -> f64 {
        let e2 = self.eccentricity_squared();
        let s2 = lat.sin().powi(2);
        self.equatorial_radius * (1.0 - e2) / (1.0 - e2 * s2).powf(1.5)
    }

    /// Normal (prime-vertical) radius of curvature R_N at a latitude.
    pub fn normal_radius(&self, lat: f64) -> f64 {
        let e2 = self.eccentricity_squared();
        let s2 = lat.sin().powi(2);
        self.equatorial_radius / (1.0 - e2 * s2).sqrt()
    }

    /// Earth rotation rate expressed in NED: (Ω cos φ, 0, −Ω sin φ).
    pub fn earth_rate_n(&self, lat: f64) -> Vector3<f64> {
        let w = self.earth_rate_magnitude;
        Vector3::new(w * lat.cos(), 0.0, -w * lat.sin())
    }

    /// Transport rate ω_en^n of the local-level frame due to motion over
    /// the curved ellipsoid.
    pub fn transport_rate(&self, pos: &GeodeticPosition, v_n: &Vector3<f64>) -> Result<Vector3<f64>> {
        let lat = pos.latitude;
        if lat.abs() >= std::f64::consts::FRAC_PI_2 - 1e-9 && v_n.y.abs() > 0.0 {
            return Err(Error::SingularLatitude { lat_rad: lat });
        }
        let rm = self.meridian_radius(lat) + pos.height;
        let rn = self.normal_radius(lat) + pos.height;
        Ok(Vector3::new(
            v_n.y / rn,
            -v_n.x / rm,
            -v_n.y * lat.tan() / rn,
        ))
    }

    /// Somigliana normal gravity with a spherical free-air height
    /// correction, as a NED vector (down-positive).
    pub fn gravity_n(&self, pos: &GeodeticPosition) -> Vector3<f64> {
        let s2 = pos.latitude.sin().powi(2);
        let e2 = self.eccentricity_squared();
        let b = self.equatorial_radius * (1.0 - self.flattening);
        let k = (b * self.gravity_pole - self.equatorial_radius * self.gravity_equator)
            / (self.equatorial_radius * self.gravity_equator);
        let g0 = self.gravity_equator * (1.0 + k * s2) / (1.0 - e2 * s2).sqrt();
        let ratio = pos.height / self.equatorial_radius;
        let g = g0 * (1.0 - 2.0 * ratio + 3.0 * ratio * ratio);
        Vector3::new(0.0, 0.0, g)
    }

    /// Diagonal curvature matrix D(φ, h) mapping NED velocity to geodetic
    /// rates: ṗ = D v_n with p = (lat, lon, h).
    pub fn curvature_matrix(&self, pos: &GeodeticPosition) -> Result<Matrix3<f64>> {
        let lat = pos.latitude;
        if lat.abs() >= std::f64::consts::FRAC_PI_2 - 1e-9 {
            return Err(Error::SingularLatitude { lat_rad: lat });
        }
        let rm = self.meridian_radius(lat) + pos.height;
        let rn = self.normal_radius(lat) + pos.height;
        Ok(Matrix3::from_diagonal(&Vector3::new(
            1.0 / rm,
            1.0 / (rn * lat.cos()),
            -1.0,
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn pos(lat: f64, h: f64) -> GeodeticPosition {
        GeodeticPosition::new(lat, 0.0, h).unwrap()
    }

    #[test]
    fn earth_rate_at_pole_and_equator() {
        let w = WGS84.earth_rate_magnitude;
        let at_pole = WGS84.earth_rate_n(FRAC_PI_2);
        assert_abs_diff_eq!(at_pole, Vector3::new(0.0, 0.0, -w), epsilon = 1e-20);
        let at_equator = WGS84.earth_rate_n(0.0);
        assert_abs_diff_eq!(at_equator, Vector3::new(w, 0.0, 0.0), epsilon = 1e-20);
    }

    #[test]
    fn earth_rate_matches_trig_oracle() {
        // Frozen from scalar trigonometry at 32.8°.
        let lat = 32.8_f64.to_radians();
        let r = WGS84.earth_rate_n(lat);
        assert_abs_diff_eq!(r.x, 6.129508461161053e-5, epsilon = 1e-19);
        assert_abs_diff_eq!(r.z, -3.950198645294515e-5, epsilon = 1e-19);
    }

    #[test]
    fn transport_rate_zero_velocity() {
        let t = WGS84.transport_rate(&pos(0.5, -30.0), &Vector3::zeros()).unwrap();
        assert_eq!(t, Vector3::zeros());
    }

    #[test]
    fn transport_rate_equator_oracle() {
        // v_E = R_N·1e-3 at the equator gives a pure 1e-3 rad/s north
        // component (and zero z because tan(0)=0).
        let rn = WGS84.normal_radius(0.0);
        let t = WGS84
            .transport_rate(&pos(0.0, 0.0), &Vector3::new(0.0, rn * 1e-3, 0.0))
            .unwrap();
        assert_abs_diff_eq!(t, Vector3::new(1e-3, 0.0, 0.0), epsilon = 1e-18);
    }

    #[test]
    fn transport_rate_vertical_velocity_is_zero() {
        let t = WGS84.transport_rate(&pos(0.7, 0.0), &Vector3::new(0.0, 0.0, 2.0)).unwrap();
        assert_eq!(t, Vector3::zeros());
    }

    #[test]
    fn gravity_anchor_points() {
        let ge = WGS84.gravity_n(&pos(0.0, 0.0));
        assert_abs_diff_eq!(ge, Vector3::new(0.0, 0.0, WGS84.gravity_equator), epsilon = 1e-12);
        // GeodeticPosition accepts exactly ±π/2; gravity there is g_pole.
        let gp = WGS84.gravity_n(&GeodeticPosition::new(FRAC_PI_2, 0.0, 0.0).unwrap());
        assert_abs_diff_eq!(gp.z, WGS84.gravity_pole, epsilon = 1e-9);
    }

    #[test]
    fn gravity_somigliana_oracle_at_45deg() {
        // Frozen from an independent closed-form evaluation.
        let g = WGS84.gravity_n(&pos(45.0_f64.to_radians(), 0.0));
        assert_abs_diff_eq!(g.z, 9.80619776934378, epsilon = 1e-11);
        assert!(g.z > WGS84.gravity_equator && g.z < WGS84.gravity_pole);
    }

    #[test]
    fn curvature_matrix_oracle() {
        let d = WGS84.curvature_matrix(&pos(0.0, 0.0)).unwrap();
        // Frozen ellipsoid radii at the equator.
        assert_abs_diff_eq!(1.0 / d[(0, 0)], 6335439.3272928195, epsilon = 1e-6);
        assert_abs_diff_eq!(d[(1, 1)], 1.0 / 6378137.0, epsilon = 1e-20);
        assert_eq!(d[(2, 2)], -1.0);
        // v_n = (R_M, 0, 0) => latitude rate of exactly 1 rad/s.
        let rate = d * Vector3::new(WGS84.meridian_radius(0.0), 0.0, 0.0);
        assert_abs_diff_eq!(rate.x, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn singular_latitude_rejected() {
        let near_pole = pos(FRAC_PI_2 - 1e-12, 0.0);
        assert!(WGS84.curvature_matrix(&near_pole).is_err());
        assert!(WGS84
            .transport_rate(&near_pole, &Vector3::new(0.0, 1.0, 0.0))
            .is_err());
    }
}
