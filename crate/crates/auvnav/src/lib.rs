//! Model-based navigation toolkit for autonomous underwater vehicles.
//!
//! The crate covers the classical INS/DVL dead-reckoning pipeline end to end:
//!
//! - [`frames`]: reference frames, rotation matrices, Euler angles and the
//!   nominal navigation state shared by every other module.
//! - [`earth`]: WGS-84 Earth model (rotation rate, gravity, curvature radii).
//! - [`strapdown`]: strapdown INS mechanization and dead reckoning.
//! - [`sim`]: ground-truth trajectory generation, inverse kinematics to ideal
//!   IMU readings, and corruption of IMU/DVL/GNSS streams with configurable
//!   error models.
//! - [`calibration`]: GNSS-aided DVL calibration (norm-ratio scalar baseline
//!   and joint scale+bias least squares).
//! - [`alignment`]: initial in-motion attitude alignment (dual-vector and
//!   optimization-based gyrocompassing) and INS/DVL mounting estimation via
//!   the Wahba/SVD solver.
//! - [`fusion`]: 12-state error-state extended Kalman filter with loosely
//!   coupled, tightly coupled and free-inertial operation, partial-beam
//!   handling and an innovation-window adaptive measurement-noise estimator.
//! - [`metrics`], [`io`], [`scenario`]: trajectory-level metrics, CSV
//!   interchange, and the scenario/sweep orchestration used by the `auvnav`
//!   command-line tool.
//!
//! Algorithm families that come in interchangeable variants (trajectory
//! profiles, initial-alignment methods, filter coupling modes) are each
//! modeled as a trait with the variants registered by name, so the active
//! strategy is selected at runtime from configuration or the CLI.

pub mod alignment;
pub mod calibration;
pub mod earth;
pub mod frames;
pub mod fusion;
pub mod io;
pub mod metrics;
pub mod scenario;
pub mod sim;
pub mod strapdown;

mod error;

pub use error::{Error, Result};
