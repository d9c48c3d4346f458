//! Closed-form geodesics and contact magnetic geodesics of `Nil3`, and the
//! oscillator-group orbits `exp(sV)·o` that reproduce them.
//!
//! A unit-speed contact magnetic geodesic with charge `q` and initial frame
//! velocity `(a, b, c)` keeps its contact angle, `cos θ = c`, and its
//! horizontal velocity turns at the constant rate `c_q = c + q`. Geodesics are
//! the case `q = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, ComplexStructure, CoordVector, FrameVector};
use crate::lie::{bracket, exp_osc, osc_action, NilPoint, OscVector};

/// Below this turning rate `|c_q|` the straight-line formulas are used.
pub const BRANCH_EPSILON: f64 = 1e-8;

/// Allowed deviation of `a² + b² + c²` from 1.
pub const UNIT_TOLERANCE: f64 = 1e-12;

fn ensure_unit(v: &FrameVector) -> Result<()> {
    let n2 = v.dot(v);
    if !n2.is_finite() || (n2 - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::Domain(format!(
            "initial velocity {v:?} is not unit (|v|² = {n2})"
        )));
    }
    Ok(())
}

/// Start point, unit initial velocity and charge of a magnetic trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub start: NilPoint,
    pub velocity: FrameVector,
    pub charge: f64,
}

impl InitialData {
    pub fn new(start: NilPoint, velocity: FrameVector, charge: f64) -> Result<Self> {
        ensure_unit(&velocity)?;
        if !start.is_finite() || !charge.is_finite() {
            return Err(Error::Domain("non-finite start point or charge".into()));
        }
        Ok(Self {
            start,
            velocity,
            charge,
        })
    }

    /// The turning rate `c_q = cos θ + q`.
    pub fn turning_rate(&self) -> f64 {
        self.velocity.c + self.charge
    }
}

/// One point of a sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub s: f64,
    pub point: NilPoint,
    pub velocity: FrameVector,
    pub speed: f64,
    pub cos_theta: f64,
}

impl TrajectorySample {
    pub fn new(s: f64, point: NilPoint, velocity: FrameVector) -> Self {
        Self {
            s,
            point,
            velocity,
            speed: velocity.norm(),
            cos_theta: velocity.c,
        }
    }

    pub fn coord_velocity(&self) -> CoordVector {
        geometry::frame_to_coord(&self.point, &self.velocity)
    }
}

/// `sin u / u`.
fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u.sin() / u
    }
}

/// `(1 - cos u) / u`, written without cancellation.
fn versin_ratio(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        let h = (0.5 * u).sin();
        2.0 * h * h / u
    }
}

/// `(u - sin u) / u²`, with a series near zero where the difference cancels.
fn sine_defect_ratio(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let u2 = u * u;
        u * (1.0 / 6.0
            - u2 * (1.0 / 120.0 - u2 * (1.0 / 5040.0 - u2 * (1.0 / 362_880.0 - u2 / 39_916_800.0))))
    } else {
        (u - u.sin()) / (u * u)
    }
}

/// Point at arc length `s` of the curve through the origin with initial
/// velocity `(a, b, c)` whose horizontal velocity turns at rate `rate`.
fn turning_curve(a: f64, b: f64, c: f64, rate: f64, s: f64) -> NilPoint {
    if rate.abs() < BRANCH_EPSILON {
        return NilPoint::new(a * s, b * s, c * s);
    }
    let u = rate * s;
    let (sn, vs) = (sinc(u), versin_ratio(u));
    NilPoint::new(
        s * (a * sn - b * vs),
        s * (a * vs + b * sn),
        c * s + 0.5 * (a * a + b * b) * s * s * sine_defect_ratio(u),
    )
}

/// Unit-speed geodesic from the origin with initial velocity `a E1 + b E2 + c E3`.
pub fn geodesic_point(a: f64, b: f64, c: f64, s: f64) -> Result<NilPoint> {
    ensure_unit(&FrameVector::new(a, b, c))?;
    Ok(turning_curve(a, b, c, c, s))
}

/// Unit-speed contact magnetic geodesic of charge `q` from the origin.
pub fn magnetic_point(a: f64, b: f64, c: f64, q: f64, s: f64) -> Result<NilPoint> {
    ensure_unit(&FrameVector::new(a, b, c))?;
    Ok(turning_curve(a, b, c, c + q, s))
}

/// Contact magnetic geodesic from `p0`: the left translate by `p0` of the
/// one from the origin.
pub fn magnetic_point_from(
    p0: &NilPoint,
    a: f64,
    b: f64,
    c: f64,
    q: f64,
    s: f64,
) -> Result<NilPoint> {
    Ok(*p0 * magnetic_point(a, b, c, q, s)?)
}

/// Frame components of the velocity of a contact magnetic geodesic.
pub fn magnetic_velocity(a: f64, b: f64, c: f64, q: f64, s: f64) -> FrameVector {
    let (sin, cos) = ((c + q) * s).sin_cos();
    FrameVector::new(a * cos - b * sin, a * sin + b * cos, c)
}

/// Generator `W + λ E4` with `W = a E1 + b E2 + c (E3 + E4) ∈ m` whose orbit
/// is the contact magnetic geodesic of charge `q`.
pub fn homogeneous_generator(a: f64, b: f64, c: f64, q: f64) -> OscVector {
    homogeneous_generator_with(a, b, c, q, &ComplexStructure::STANDARD)
}

/// As [`homogeneous_generator`], with the isotropy part `W_h = λ E4` solved
/// from the magnetic orbit condition `[W_h, W_m] = q J W_m` for the given `J`.
pub fn homogeneous_generator_with(
    a: f64,
    b: f64,
    c: f64,
    q: f64,
    j: &ComplexStructure,
) -> OscVector {
    let frame = FrameVector::new(a, b, c);
    let w_m = frame.to_m();
    let rotation = bracket(&OscVector::E4, &w_m);
    let force = q * j.apply(&frame).to_m();
    let r2 = rotation.to_array().iter().map(|x| x * x).sum::<f64>();
    // With a = b = 0 every λ works; the orbit is the Reeb flow.
    let lambda = if r2 > 0.0 {
        rotation
            .to_array()
            .iter()
            .zip(force.to_array())
            .map(|(r, f)| r * f)
            .sum::<f64>()
            / r2
    } else {
        q
    };
    w_m + lambda * OscVector::E4
}

/// `exp(sV)·o`, computed with the matrix exponential.
pub fn orbit_point(v: &OscVector, s: f64) -> Result<NilPoint> {
    let g = exp_osc(&(s * *v))?;
    Ok(osc_action(&g, &NilPoint::ORIGIN))
}

/// Frame velocity of `s ↦ exp(sV)·o`: the left-invariant fields of `Osc`
/// evaluated at `exp(sV)` and pushed down to `Nil3`.
pub fn orbit_velocity(v: &OscVector, s: f64) -> Result<FrameVector> {
    let g = exp_osc(&(s * *v))?;
    let (sin, cos) = g.t.sin_cos();
    let (x, y) = (g.x, g.y);
    let e1 = CoordVector::new(cos, sin, 0.5 * (x * sin - y * cos));
    let e2 = CoordVector::new(-sin, cos, 0.5 * (x * cos + y * sin));
    let dot = CoordVector::new(
        v.e1 * e1.dx + v.e2 * e2.dx,
        v.e1 * e1.dy + v.e2 * e2.dy,
        v.e1 * e1.dz + v.e2 * e2.dz + v.e3,
    );
    Ok(geometry::coord_to_frame(&g.nil_part(), &dot))
}

/// Coordinates of `exp(sV)·o` from the explicit orbit formulas, evaluated as
/// printed: with `W3 = V3` and `W3 + q = V4`,
///
/// ```text
/// x = (-W2 + W1 sin(V4 s) + W2 cos(V4 s)) / V4
/// y = ( W1 - W1 cos(V4 s) + W2 sin(V4 s)) / V4
/// z = (-(W1² + W2²) sin(V4 s) + V4 (W1² + W2² + 2 W3 V4) s) / (2 V4²)
/// ```
///
/// and the straight line `(W1 s, W2 s, W3 s)` when `V4 = 0`.
pub fn orbit_closed_form(v: &OscVector, s: f64) -> NilPoint {
    let (w1, w2, w3, rate) = (v.e1, v.e2, v.e3, v.e4);
    if rate == 0.0 {
        return NilPoint::new(w1 * s, w2 * s, w3 * s);
    }
    let (sin, cos) = (rate * s).sin_cos();
    let h2 = w1 * w1 + w2 * w2;
    NilPoint::new(
        (-w2 + w1 * sin + w2 * cos) / rate,
        (w1 - w1 * cos + w2 * sin) / rate,
        (-h2 * sin + rate * (h2 + 2.0 * w3 * rate) * s) / (2.0 * rate * rate),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// Tangent to the Reeb field, `|cos θ| = 1`.
    Reeb,
    /// Tangent to the contact plane, `cos θ = 0`.
    Legendre,
    Slant,
}

pub fn classify(a: f64, b: f64, c: f64) -> CurveKind {
    let _ = (a, b);
    if (c.abs() - 1.0).abs() <= UNIT_TOLERANCE {
        CurveKind::Reeb
    } else if c.abs() <= UNIT_TOLERANCE {
        CurveKind::Legendre
    } else {
        CurveKind::Slant
    }
}

/// `steps + 1` uniformly spaced arc lengths from 0 to `s_max` inclusive.
pub fn arc_length_grid(s_max: f64, steps: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=steps)
        .map(|k| s_max * k as f64 / steps.max(1) as f64)
        .collect();
    if steps > 0 {
        grid[steps] = s_max;
    }
    grid
}

/// Closed-form samples of the magnetic geodesic described by `init`.
pub fn closed_form_samples(init: &InitialData, grid: &[f64]) -> Vec<TrajectorySample> {
    let FrameVector { a, b, c } = init.velocity;
    let q = init.charge;
    grid.iter()
        .map(|&s| {
            let origin_point = turning_curve(a, b, c, c + q, s);
            TrajectorySample::new(
                s,
                init.start * origin_point,
                magnetic_velocity(a, b, c, q, s),
            )
        })
        .collect()
}

/// Samples of the orbit `exp(sV)·o`.
pub fn orbit_samples(v: &OscVector, grid: &[f64]) -> Result<Vec<TrajectorySample>> {
    grid.iter()
        .map(|&s| {
            Ok(TrajectorySample::new(
                s,
                orbit_point(v, s)?,
                orbit_velocity(v, s)?,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{split, Decomposition};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit(theta: f64, phi: f64) -> (f64, f64, f64) {
        (
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        )
    }

    #[test]
    fn geodesic_examples() {
        for s in [0.0, 1.0, 7.5] {
            assert_eq!(
                geodesic_point(0.0, 0.0, 1.0, s).unwrap(),
                NilPoint::new(0.0, 0.0, s)
            );
            assert_eq!(
                geodesic_point(0.6, 0.8, 0.0, s).unwrap(),
                NilPoint::new(0.6 * s, 0.8 * s, 0.0)
            );
        }
        // c s = π: x = 0, y = 2a/c, z = (1 + c²) s / (2c).
        let p = geodesic_point(0.8, 0.0, 0.6, PI / 0.6).unwrap();
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.y, 8.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.z, 1.36 / 1.2 * PI / 0.6, epsilon = 1e-13);
        assert_abs_diff_eq!(p.z, 5.934_119_456_780_721, epsilon = 1e-13);
        assert!(matches!(
            geodesic_point(1.0, 1.0, 0.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn magnetic_examples() {
        let (a, b, c) = unit(1.1, 0.3);
        for s in [0.0, 0.4, 3.0] {
            assert_eq!(
                magnetic_point(a, b, c, 0.0, s).unwrap(),
                geodesic_point(a, b, c, s).unwrap()
            );
        }
        let a = 0.75_f64.sqrt();
        for s in [0.5, 2.0] {
            let p = magnetic_point(a, 0.0, -0.5, 0.5, s).unwrap();
            assert_eq!(p, NilPoint::new(a * s, 0.0, -0.5 * s));
        }
        for s in [0.3, 2.0, 10.0_f64] {
            let p = magnetic_point(1.0, 0.0, 0.0, 1.0, s).unwrap();
            let expect = NilPoint::new(s.sin(), 1.0 - s.cos(), 0.5 * (s - s.sin()));
            assert!(p.max_abs_diff(&expect) < 1e-14, "s = {s}");
        }
        assert!(magnetic_point(0.5, 0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn magnetic_from_examples() {
        let (a, b, c) = unit(0.7, 2.0);
        let (q, s) = (-1.3, 4.2);
        assert_eq!(
            magnetic_point_from(&NilPoint::ORIGIN, a, b, c, q, s).unwrap(),
            magnetic_point(a, b, c, q, s).unwrap()
        );
        let p0 = NilPoint::new(1.0, 2.0, 0.0);
        for s in [0.0, 1.0, 5.0_f64] {
            let p = magnetic_point_from(&p0, 1.0, 0.0, 0.0, 1.0, s).unwrap();
            assert_abs_diff_eq!(p.x, s.sin() + 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(p.y, 1.0 - s.cos() + 2.0, epsilon = 1e-14);
        }
        let p0 = NilPoint::new(0.0, 0.0, 1.0);
        let a = 0.75_f64.sqrt();
        let q = 0.5;
        let p = magnetic_point_from(&p0, a, 0.0, -0.5, q, 3.0).unwrap();
        assert_abs_diff_eq!(p.z, 1.0 - q * 3.0, epsilon = 1e-15);
    }

    #[test]
    fn straight_branch_from_general_start() {
        // c_q = 0 from (x0, y0, z0): z = z0 - q s - (a y0 - b x0) s / 2.
        let (x0, y0, z0) = (0.4, -1.5, 2.0);
        let (a, b, c, q) = (0.6, 0.0, 0.8, -0.8);
        let s = 2.5;
        let p = magnetic_point_from(&NilPoint::new(x0, y0, z0), a, b, c, q, s).unwrap();
        let expect = NilPoint::new(
            a * s + x0,
            b * s + y0,
            -q * s + z0 - 0.5 * (a * y0 - b * x0) * s,
        );
        assert!(p.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn velocity_examples() {
        let (a, b, c) = unit(2.0, -0.4);
        assert_eq!(
            magnetic_velocity(a, b, c, 0.7, 0.0),
            FrameVector::new(a, b, c)
        );
        assert_eq!(magnetic_velocity(0.0, 0.0, 1.0, 1.7, 3.0), FrameVector::E3);
    }

    #[test]
    fn generator_examples() {
        assert_eq!(
            homogeneous_generator(0.0, 0.0, 1.0, 0.0),
            OscVector::E3 + OscVector::E4
        );
        assert_eq!(
            homogeneous_generator(1.0, 0.0, 0.0, 1.0),
            OscVector::E1 + OscVector::E4
        );
        let (a, b, c) = unit(0.9, 1.4);
        for q in [-2.0, 0.0, 0.35, 1.5] {
            let (h, m) = split(&homogeneous_generator(a, b, c, q), Decomposition::M);
            assert_abs_diff_eq!(h.e4, q, epsilon = 1e-15);
            assert_eq!(m, FrameVector::new(a, b, c).to_m());
        }
    }

    #[test]
    fn perturbed_j_changes_the_generator() {
        let j = ComplexStructure::perturbed(1e-3);
        let v = homogeneous_generator_with(0.6, 0.0, 0.8, 2.0, &j);
        assert_abs_diff_eq!(v.e4, 0.8 + 2.0 * 1.001, epsilon = 1e-14);
    }

    #[test]
    fn orbit_examples() {
        for s in [0.0, 1.3, 9.0] {
            assert!(
                orbit_point(&OscVector::E3, s)
                    .unwrap()
                    .max_abs_diff(&NilPoint::new(0.0, 0.0, s))
                    < 1e-13
            );
            assert!(
                orbit_point(&OscVector::E4, s)
                    .unwrap()
                    .max_abs_diff(&NilPoint::ORIGIN)
                    < 1e-13
            );
            let v = OscVector::new(1.0, 0.0, 1.0, 1.0);
            let d = orbit_point(&v, s)
                .unwrap()
                .max_abs_diff(&orbit_closed_form(&v, s));
            assert!(d < 1e-10, "s = {s}: {d}");
        }
    }

    #[test]
    fn orbit_velocity_matches_magnetic_velocity() {
        let (a, b, c) = unit(1.9, 0.6);
        let q = -0.7;
        let v = homogeneous_generator(a, b, c, q);
        for s in [0.0, 0.5, 4.0, 10.0] {
            let got = orbit_velocity(&v, s).unwrap();
            assert!(got.max_abs_diff(&magnetic_velocity(a, b, c, q, s)) < 1e-12);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.0, 0.0, 1.0), CurveKind::Reeb);
        assert_eq!(classify(0.0, 0.0, -1.0), CurveKind::Reeb);
        assert_eq!(classify(1.0, 0.0, 0.0), CurveKind::Legendre);
        assert_eq!(classify(0.6, 0.0, 0.8), CurveKind::Slant);
    }

    #[test]
    fn grid_convention() {
        assert_eq!(arc_length_grid(1.0, 1), vec![0.0, 1.0]);
        assert_eq!(arc_length_grid(1.0, 4), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(arc_length_grid(0.3, 7).last(), Some(&0.3));
    }

    #[test]
    fn reeb_reduction() {
        for s in [0.5, 3.0] {
            assert_eq!(
                magnetic_point(0.0, 0.0, 1.0, 0.0, s).unwrap(),
                NilPoint::new(0.0, 0.0, s)
            );
            assert_eq!(
                magnetic_point(0.0, 0.0, -1.0, 0.0, s).unwrap(),
                NilPoint::new(0.0, 0.0, -s)
            );
        }
    }

    #[test]
    fn branch_continuity() {
        let (a, b, c) = unit(1.2, 0.8);
        for sign in [-1.0, 1.0] {
            for k in [0.5, 1.0, 2.0] {
                let q = sign * k * BRANCH_EPSILON - c;
                for i in 0..=20 {
                    let s = i as f64 * 0.05;
                    let p = magnetic_point(a, b, c, q, s).unwrap();
                    let limit = NilPoint::new(a * s, b * s, c * s);
                    assert!(
                        p.max_abs_diff(&limit) <= 1e-8,
                        "c_q = {}, s = {s}",
                        sign * k
                    );
                }
            }
        }
    }

    #[test]
    fn helper_series_match_direct_formulas() {
        for u in [0.099_f64, 0.05, 1e-3, -0.07] {
            let direct = (u - u.sin()) / (u * u);
            assert!(
                (sine_defect_ratio(u) - direct).abs()
                    < 1e-12 * (1.0 + direct.abs()) / u.abs().powi(2)
            );
        }
        let u = 0.1_f64;
        assert!((sine_defect_ratio(u) - (u - u.sin()) / (u * u)).abs() < 1e-14);
        assert!((sine_defect_ratio(0.0999999) - sine_defect_ratio(0.1)).abs() < 1e-7);
    }

    /// Unit speed and first integral checked by differentiating the closed
    /// form with central differences.
    #[test]
    fn closed_form_velocity_by_finite_differences() {
        let (a, b, c) = unit(0.8, -2.1);
        let q = 1.4;
        let h = 1e-5;
        for s in [0.3, 2.0, 6.0] {
            let fwd = magnetic_point(a, b, c, q, s + h).unwrap();
            let bwd = magnetic_point(a, b, c, q, s - h).unwrap();
            let here = magnetic_point(a, b, c, q, s).unwrap();
            let d = CoordVector::new(
                (fwd.x - bwd.x) / (2.0 * h),
                (fwd.y - bwd.y) / (2.0 * h),
                (fwd.z - bwd.z) / (2.0 * h),
            );
            let frame = geometry::coord_to_frame(&here, &d);
            assert!(frame.max_abs_diff(&magnetic_velocity(a, b, c, q, s)) < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn unit_speed_everywhere(
            theta in 0.0..PI, phi in 0.0..(2.0 * PI), q in -2.0..2.0_f64, s in -20.0..20.0_f64,
        ) {
            let (a, b, c) = unit(theta, phi);
            let v = magnetic_velocity(a, b, c, q, s);
            prop_assert!((v.norm() - 1.0).abs() <= 1e-13);
            prop_assert_eq!(v.c, c);
        }

        #[test]
        fn magnetic_equals_orbit(
            theta in 0.0..PI, phi in 0.0..(2.0 * PI), q in -2.0..2.0_f64, s in 0.0..10.0_f64,
        ) {
            let (a, b, c) = unit(theta, phi);
            let v = homogeneous_generator(a, b, c, q);
            let d = magnetic_point(a, b, c, q, s).unwrap().max_abs_diff(&orbit_point(&v, s).unwrap());
            prop_assert!(d <= 1e-9, "{}", d);
        }

        #[test]
        fn magnetic_from_matches_displayed_xy(
            p0 in prop::array::uniform3(-3.0..3.0_f64),
            theta in 0.0..PI, phi in 0.0..(2.0 * PI), q in -2.0..2.0_f64, s in 0.0..10.0_f64,
        ) {
            let (a, b, c) = unit(theta, phi);
            let cq = c + q;
            prop_assume!(cq.abs() > 1e-3);
            let p = magnetic_point_from(&NilPoint::new(p0[0], p0[1], p0[2]), a, b, c, q, s).unwrap();
            let x = (a * (cq * s).sin() + b * ((cq * s).cos() - 1.0)) / cq + p0[0];
            let y = (a * (1.0 - (cq * s).cos()) + b * (cq * s).sin()) / cq + p0[1];
            prop_assert!((p.x - x).abs() <= 1e-10 && (p.y - y).abs() <= 1e-10);
        }
    }
}
