//! Geodesics, contact magnetic geodesics and oscillator-group orbits on the
//! Heisenberg group `Nil3` with its Webster metric.
//!
//! * [`lie`]: group laws and exponential maps of `Nil3` and `Osc = Nil3 ⋊ U(1)`.
//! * [`geometry`]: frame, metric, contact form, connection, U-tensor and the
//!   homogeneous geodesic criterion.
//! * [`trajectories`]: closed-form magnetic geodesics and the orbits
//!   `exp(sW)·o` generating them.
//! * [`integrator`]: RK4 integration of the Lorentz equation.
//! * [`report`]: CSV/JSON trajectory files and verification reports.
//! * [`verify`]: the seeded verification sweep.

pub mod error;
pub mod geometry;
pub mod integrator;
pub mod lie;
pub mod report;
pub mod trajectories;
pub mod verify;

pub use error::{Error, Result};
