//! Fixed-step RK4 integration of the Lorentz equation `∇_γ' γ' = q J γ'` in
//! coordinates. It shares nothing with the closed forms beyond the metric and
//! `J`, and is used as their oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, ComplexStructure, CoordVector, FrameVector};
use crate::lie::NilPoint;
use crate::trajectories::{InitialData, TrajectorySample};

/// Position and coordinate velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

impl State {
    pub fn from_initial(init: &InitialData) -> Self {
        let v = geometry::frame_to_coord(&init.start, &init.velocity);
        Self {
            x: init.start.x,
            y: init.start.y,
            z: init.start.z,
            vx: v.dx,
            vy: v.dy,
            vz: v.dz,
        }
    }

    pub fn point(&self) -> NilPoint {
        NilPoint::new(self.x, self.y, self.z)
    }

    pub fn coord_velocity(&self) -> CoordVector {
        CoordVector::new(self.vx, self.vy, self.vz)
    }

    pub fn frame_velocity(&self) -> FrameVector {
        geometry::coord_to_frame(&self.point(), &self.coord_velocity())
    }

    /// `self + h * d`.
    fn offset(&self, d: &State, h: f64) -> State {
        State {
            x: self.x + h * d.x,
            y: self.y + h * d.y,
            z: self.z + h * d.z,
            vx: self.vx + h * d.vx,
            vy: self.vy + h * d.vy,
            vz: self.vz + h * d.vz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub h: f64,
    pub n: usize,
}

impl StepConfig {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain(format!(
                "step size must be positive, got {h}"
            )));
        }
        Ok(Self { h, n })
    }

    pub fn span(&self) -> f64 {
        self.h * self.n as f64
    }
}

/// Right-hand side of the Lorentz equation as a first-order system.
pub fn lorentz_rhs(state: &State, q: f64) -> State {
    lorentz_rhs_with(state, q, &ComplexStructure::STANDARD)
}

/// The frame acceleration `q J γ'` is converted back to second coordinate
/// derivatives by inverting the acceleration formula
/// `(ẍ + cθ ẏ, ÿ - cθ ẋ, d(cθ)/ds)`.
pub fn lorentz_rhs_with(state: &State, q: f64, j: &ComplexStructure) -> State {
    let frame = state.frame_velocity();
    let cos_theta = frame.c;
    let force = q * j.apply(&frame);
    let ax = force.a - cos_theta * state.vy;
    let ay = force.b + cos_theta * state.vx;
    let az = force.c - 0.5 * (ax * state.y - state.x * ay);
    State {
        x: state.vx,
        y: state.vy,
        z: state.vz,
        vx: ax,
        vy: ay,
        vz: az,
    }
}

fn rk4_step(state: &State, h: f64, q: f64, j: &ComplexStructure) -> State {
    let k1 = lorentz_rhs_with(state, q, j);
    let k2 = lorentz_rhs_with(&state.offset(&k1, 0.5 * h), q, j);
    let k3 = lorentz_rhs_with(&state.offset(&k2, 0.5 * h), q, j);
    let k4 = lorentz_rhs_with(&state.offset(&k3, h), q, j);
    let mut next = *state;
    for (k, w) in [(k1, 1.0), (k2, 2.0), (k3, 2.0), (k4, 1.0)] {
        next = next.offset(&k, h * w / 6.0);
    }
    next
}

fn sample(s: f64, state: &State) -> TrajectorySample {
    TrajectorySample::new(s, state.point(), state.frame_velocity())
}

/// Integrate from `init`, returning `n + 1` samples at `s = 0, h, …, n h`.
pub fn integrate(init: &InitialData, cfg: &StepConfig) -> Result<Vec<TrajectorySample>> {
    integrate_with(init, cfg, &ComplexStructure::STANDARD)
}

pub fn integrate_with(
    init: &InitialData,
    cfg: &StepConfig,
    j: &ComplexStructure,
) -> Result<Vec<TrajectorySample>> {
    // Re-validate: the fields are public.
    let init = InitialData::new(init.start, init.velocity, init.charge)?;
    let StepConfig { h, n } = StepConfig::new(cfg.h, cfg.n)?;
    let mut state = State::from_initial(&init);
    let mut out = Vec::with_capacity(n + 1);
    out.push(sample(0.0, &state));
    for k in 1..=n {
        state = rk4_step(&state, h, init.charge, j);
        out.push(sample(k as f64 * h, &state));
    }
    Ok(out)
}

/// Discrepancies between a reference sample list and a numerical one.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Sup of the coordinate-Euclidean distance between matching samples.
    pub max_position_error: f64,
    /// Sup of `|speed - 1|` along the numerical list.
    pub max_speed_drift: f64,
    /// Sup of `|cos θ(s) - cos θ(0)|` along the numerical list.
    pub max_cos_theta_drift: f64,
}

pub fn compare(closed: &[TrajectorySample], numeric: &[TrajectorySample]) -> Result<ErrorReport> {
    if closed.len() != numeric.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples vs {}",
            closed.len(),
            numeric.len()
        )));
    }
    let mut report = ErrorReport::default();
    let cos0 = numeric.first().map_or(0.0, |s| s.cos_theta);
    for (i, (c, n)) in closed.iter().zip(numeric).enumerate() {
        if (c.s - n.s).abs() > 1e-12 * (1.0 + c.s.abs()) {
            return Err(Error::GridMismatch(format!(
                "sample {i}: s = {} vs {}",
                c.s, n.s
            )));
        }
        report.max_position_error = report.max_position_error.max(c.point.distance(&n.point));
        report.max_speed_drift = report.max_speed_drift.max((n.speed - 1.0).abs());
        report.max_cos_theta_drift = report.max_cos_theta_drift.max((n.cos_theta - cos0).abs());
    }
    Ok(report)
}
