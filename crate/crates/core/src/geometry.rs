//! Webster metric, contact structure and Levi-Civita connection of `Nil3`,
//! together with the reductive-space machinery (U-tensor, homogeneous
//! geodesic criterion) on the oscillator algebra.
//!
//! Tangent vectors are carried either in the left-invariant orthonormal
//! frame
//!
//! ```text
//! E1 = ∂x - (y/2) ∂z,   E2 = ∂y + (x/2) ∂z,   E3 = ∂z
//! ```
//!
//! ([`FrameVector`]) or in coordinates ([`CoordVector`]) at an explicit base
//! point.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{bracket, Decomposition, NilPoint, OscVector};

/// Tangent vector `a E1 + b E2 + c E3` in the left-invariant frame.
///
/// For a unit vector `c = cos θ`, where `θ` is the contact angle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameVector {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FrameVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const E1: Self = Self::new(1.0, 0.0, 0.0);
    pub const E2: Self = Self::new(0.0, 1.0, 0.0);
    pub const E3: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn basis() -> [Self; 3] {
        [Self::E1, Self::E2, Self::E3]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.a * other.a + self.b * other.b + self.c * other.c
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
    }

    /// Identify with `a E1 + b E2 + c E3 ∈ nil3`.
    pub fn to_nil3(&self) -> OscVector {
        OscVector::new(self.a, self.b, self.c, 0.0)
    }

    /// Identify with `a E1 + b E2 + c (E3 + E4) ∈ m`.
    pub fn to_m(&self) -> OscVector {
        OscVector::new(self.a, self.b, self.c, self.c)
    }
}

impl Add for FrameVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl Sub for FrameVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Neg for FrameVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c)
    }
}

impl Mul<FrameVector> for f64 {
    type Output = FrameVector;
    fn mul(self, v: FrameVector) -> FrameVector {
        FrameVector::new(self * v.a, self * v.b, self * v.c)
    }
}

/// Tangent vector `dx ∂x + dy ∂y + dz ∂z` in coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoordVector {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl CoordVector {
    pub const fn new(dx: f64, dy: f64, dz: f64) -> Self {
        Self { dx, dy, dz }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.dx - other.dx)
            .abs()
            .max((self.dy - other.dy).abs())
            .max((self.dz - other.dz).abs())
    }
}

pub fn frame_to_coord(p: &NilPoint, v: &FrameVector) -> CoordVector {
    CoordVector::new(v.a, v.b, v.c - 0.5 * (v.a * p.y - v.b * p.x))
}

pub fn coord_to_frame(p: &NilPoint, v: &CoordVector) -> FrameVector {
    FrameVector::new(v.dx, v.dy, contact_form(p, v))
}

/// Contact form `α = dz + (y dx - x dy) / 2`.
pub fn contact_form(p: &NilPoint, v: &CoordVector) -> f64 {
    v.dz + 0.5 * (v.dx * p.y - p.x * v.dy)
}

/// Webster metric `g = dx² + dy² + α²`.
pub fn metric(p: &NilPoint, v: &CoordVector, w: &CoordVector) -> f64 {
    v.dx * w.dx + v.dy * w.dy + contact_form(p, v) * contact_form(p, w)
}

/// The endomorphism field `J` with `J E1 = E2`, `J E2 = -E1`, `J E3 = 0`.
///
/// A nonzero `perturbation` scales `J` on the contact plane by
/// `1 + perturbation`; it exists only to check that the verification harness
/// notices a wrong Lorentz force.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexStructure {
    perturbation: f64,
}

impl ComplexStructure {
    pub const STANDARD: Self = Self { perturbation: 0.0 };

    pub fn perturbed(perturbation: f64) -> Self {
        Self { perturbation }
    }

    pub fn perturbation(&self) -> f64 {
        self.perturbation
    }

    pub fn apply(&self, v: &FrameVector) -> FrameVector {
        let k = 1.0 + self.perturbation;
        FrameVector::new(-k * v.b, k * v.a, 0.0)
    }
}

/// Lorentz force of the contact magnetic field, `(a, b, c) ↦ (-b, a, 0)`.
pub fn lorentz(v: &FrameVector) -> FrameVector {
    ComplexStructure::STANDARD.apply(v)
}

/// Cross product of the oriented orthonormal frame (`E1 × E2 = E3`).
pub fn cross(v: &FrameVector, w: &FrameVector) -> FrameVector {
    FrameVector::new(
        v.b * w.c - v.c * w.b,
        v.c * w.a - v.a * w.c,
        v.a * w.b - v.b * w.a,
    )
}

/// `∇_v w` for vector fields with constant frame coefficients.
pub fn connection(v: &FrameVector, w: &FrameVector) -> FrameVector {
    FrameVector::new(
        0.5 * (v.b * w.c + v.c * w.b),
        -0.5 * (v.a * w.c + v.c * w.a),
        0.5 * (v.a * w.b - v.b * w.a),
    )
}

/// Acceleration `∇_γ' γ'` of a curve, in the frame, from the coordinates
/// `(x, y)` of the curve and its first and second coordinate derivatives.
pub fn curve_acceleration(
    x: f64,
    y: f64,
    velocity: &CoordVector,
    acceleration: &CoordVector,
) -> FrameVector {
    let p = NilPoint::new(x, y, 0.0);
    let cos_theta = contact_form(&p, velocity);
    let d_cos_theta = acceleration.dz + 0.5 * (acceleration.dx * y - x * acceleration.dy);
    FrameVector::new(
        acceleration.dx + cos_theta * velocity.dy,
        acceleration.dy - cos_theta * velocity.dx,
        d_cos_theta,
    )
}

/// A Lie subspace `m` complementary to the isotropy algebra `R E4`, with its
/// basis declared orthonormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieSubspace {
    basis: [OscVector; 3],
    // Inverse of the 3×3 block of the first three components of the basis.
    inverse: [[f64; 3]; 3],
}

impl LieSubspace {
    pub fn new(basis: [OscVector; 3]) -> Result<Self> {
        let m = [
            [basis[0].e1, basis[1].e1, basis[2].e1],
            [basis[0].e2, basis[1].e2, basis[2].e2],
            [basis[0].e3, basis[1].e3, basis[2].e3],
        ];
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if !det.is_finite() || det.abs() < 1e-12 {
            return Err(Error::Domain(
                "basis together with E4 does not span the oscillator algebra".into(),
            ));
        }
        let mut inverse = [[0.0; 3]; 3];
        for (i, row) in inverse.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                // Cofactor of m[j][i].
                let (r0, r1) = match j {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let (c0, c1) = match i {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                *entry = sign * minor / det;
            }
        }
        Ok(Self { basis, inverse })
    }

    pub fn of(decomposition: Decomposition) -> Self {
        Self::new(decomposition.basis()).expect("standard decompositions are non-degenerate")
    }

    pub fn basis(&self) -> &[OscVector; 3] {
        &self.basis
    }

    /// Coordinates of the subspace part of `v` in the basis, and the `E4`
    /// coefficient of its isotropy part.
    pub fn project(&self, v: &OscVector) -> ([f64; 3], f64) {
        let rhs = [v.e1, v.e2, v.e3];
        let coords: [f64; 3] =
            std::array::from_fn(|i| (0..3).map(|j| self.inverse[i][j] * rhs[j]).sum());
        let h = v.e4 - (0..3).map(|i| coords[i] * self.basis[i].e4).sum::<f64>();
        (coords, h)
    }

    pub fn from_coords(&self, coords: [f64; 3]) -> OscVector {
        (0..3).fold(OscVector::ZERO, |acc, i| acc + coords[i] * self.basis[i])
    }

    /// The subspace component `X_m` of `v`.
    pub fn component(&self, v: &OscVector) -> OscVector {
        self.from_coords(self.project(v).0)
    }

    /// Inner product of the subspace components.
    pub fn inner(&self, x: &OscVector, y: &OscVector) -> f64 {
        let (cx, _) = self.project(x);
        let (cy, _) = self.project(y);
        (0..3).map(|i| cx[i] * cy[i]).sum()
    }

    fn ensure_inside(&self, v: &OscVector) -> Result<()> {
        let (_, h) = self.project(v);
        if h.abs() > 1e-12 * (1.0 + v.norm()) {
            return Err(Error::Domain(format!(
                "{v:?} is not in the Lie subspace (isotropy residual {h})"
            )));
        }
        Ok(())
    }

    /// Symmetric bilinear map `U` defined by
    /// `2⟨U(X, Y), Z⟩ = ⟨X, [Z, Y]_m⟩ + ⟨Y, [Z, X]_m⟩` for all `Z ∈ m`.
    pub fn u_tensor(&self, x: &OscVector, y: &OscVector) -> Result<OscVector> {
        self.ensure_inside(x)?;
        self.ensure_inside(y)?;
        let coords = self
            .basis
            .map(|z| 0.5 * (self.inner(x, &bracket(&z, y)) + self.inner(y, &bracket(&z, x))));
        Ok(self.from_coords(coords))
    }

    /// Solve `⟨[W, V]_m, W_m⟩ = k ⟨W_m, V⟩` for all `V ∈ m` in the least-squares
    /// sense and accept when the residual is negligible.
    pub fn go_criterion(&self, w: &OscVector) -> CriterionResult {
        let (w_coords, _) = self.project(w);
        let w_m = self.from_coords(w_coords);
        let w_m_norm2: f64 = w_coords.iter().map(|c| c * c).sum();
        if w_m_norm2.sqrt() <= 1e-14 * (1.0 + w.norm()) {
            return CriterionResult::pregeodesic(0.0);
        }
        let lhs = self.basis.map(|v| self.inner(&bracket(w, &v), &w_m));
        let k = (0..3).map(|j| lhs[j] * w_coords[j]).sum::<f64>() / w_m_norm2;
        let residual = (0..3)
            .map(|j| (lhs[j] - k * w_coords[j]).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= 1e-10 * (1.0 + w.norm().powi(2)) {
            CriterionResult::pregeodesic(k)
        } else {
            CriterionResult::rejected()
        }
    }
}

/// U-tensor of the Lie subspace spanned by `basis` (three vectors whose span
/// is complementary to `R E4`).
pub fn u_tensor(basis: &[OscVector], x: &OscVector, y: &OscVector) -> Result<OscVector> {
    let basis: [OscVector; 3] = basis
        .try_into()
        .map_err(|_| Error::Domain(format!("expected 3 basis vectors, got {}", basis.len())))?;
    LieSubspace::new(basis)?.u_tensor(x, y)
}

/// Outcome of the homogeneous geodesic criterion for `exp(sW)·o`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub is_pregeodesic: bool,
    pub k: Option<f64>,
}

impl CriterionResult {
    fn pregeodesic(k: f64) -> Self {
        Self {
            is_pregeodesic: true,
            k: Some(k),
        }
    }

    fn rejected() -> Self {
        Self {
            is_pregeodesic: false,
            k: None,
        }
    }
}

pub fn go_criterion(w: &OscVector, decomposition: Decomposition) -> CriterionResult {
    LieSubspace::of(decomposition).go_criterion(w)
}

/// The families of generators whose orbits through the origin are
/// pre-geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PregeodesicFamily {
    /// `W1 E1 + W2 E2 + W3 (E3 + E4)`.
    NaturallyReductive,
    /// `W3 E3 + W4 E4`: the Reeb flow, traversed at speed `|W3|`.
    Vertical,
    /// `W4 E4`: the orbit is the constant curve at the origin.
    Isotropy,
}

impl PregeodesicFamily {
    pub fn classify(w: &OscVector) -> Option<Self> {
        const TOL: f64 = 1e-12;
        let zero = |x: f64| x.abs() <= TOL;
        if zero(w.e1) && zero(w.e2) && zero(w.e3) {
            Some(Self::Isotropy)
        } else if zero(w.e3 - w.e4) {
            Some(Self::NaturallyReductive)
        } else if zero(w.e1) && zero(w.e2) {
            Some(Self::Vertical)
        } else {
            None
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            Self::NaturallyReductive => "W₁E₁+W₂E₂+W₃(E₃+E₄)",
            Self::Vertical => "W₃E₃+W₄E₄",
            Self::Isotropy => "W₄E₄",
        }
    }
}

impl std::fmt::Display for PregeodesicFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.formula())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{osc_action, OscElement};
    use proptest::prelude::*;

    #[test]
    fn frame_coordinate_examples() {
        let p = NilPoint::new(3.0, -1.0, 2.0);
        assert_eq!(
            frame_to_coord(&p, &FrameVector::E3),
            CoordVector::new(0.0, 0.0, 1.0)
        );
        let v = FrameVector::new(0.2, -0.4, 0.7);
        assert_eq!(
            frame_to_coord(&NilPoint::ORIGIN, &v),
            CoordVector::new(0.2, -0.4, 0.7)
        );
        let q = NilPoint::new(1.0, 2.0, 0.0);
        assert_eq!(
            frame_to_coord(&q, &FrameVector::E1),
            CoordVector::new(1.0, 0.0, -1.0)
        );
        assert_eq!(
            coord_to_frame(&q, &CoordVector::new(1.0, 0.0, -1.0)),
            FrameVector::E1
        );
        assert_eq!(
            coord_to_frame(&NilPoint::ORIGIN, &CoordVector::new(0.2, -0.4, 0.7)),
            v
        );
    }

    #[test]
    fn metric_and_contact_form_examples() {
        let p = NilPoint::new(-0.7, 4.0, 1.0);
        let e1 = frame_to_coord(&p, &FrameVector::E1);
        let e2 = frame_to_coord(&p, &FrameVector::E2);
        let e3 = frame_to_coord(&p, &FrameVector::E3);
        assert_eq!(metric(&p, &e1, &e2), 0.0);
        assert_eq!(
            metric(
                &NilPoint::ORIGIN,
                &CoordVector::new(1.0, 0.0, 0.0),
                &CoordVector::new(1.0, 0.0, 0.0)
            ),
            1.0
        );
        let q = NilPoint::new(1.0, 2.0, 0.0);
        let f1 = frame_to_coord(&q, &FrameVector::E1);
        assert_eq!(metric(&q, &f1, &f1), 1.0);

        assert_eq!(contact_form(&p, &e3), 1.0);
        assert_eq!(
            contact_form(&NilPoint::ORIGIN, &CoordVector::new(1.0, 0.0, 0.0)),
            0.0
        );
        assert_eq!(contact_form(&q, &CoordVector::new(1.0, 0.0, 0.0)), 1.0);
    }

    #[test]
    fn lorentz_and_cross_examples() {
        assert_eq!(lorentz(&FrameVector::E1), FrameVector::E2);
        assert_eq!(lorentz(&FrameVector::E2), -FrameVector::E1);
        assert_eq!(lorentz(&FrameVector::E3), FrameVector::ZERO);
        assert_eq!(
            lorentz(&FrameVector::new(1.0, 1.0, 5.0)),
            FrameVector::new(-1.0, 1.0, 0.0)
        );
        assert_eq!(cross(&FrameVector::E1, &FrameVector::E2), FrameVector::E3);
        assert_eq!(cross(&FrameVector::E3, &FrameVector::E1), FrameVector::E2);
        let v = FrameVector::new(0.3, -2.0, 1.5);
        assert_eq!(cross(&v, &v), FrameVector::ZERO);
        for e in FrameVector::basis() {
            assert_eq!(cross(&FrameVector::E3, &e), lorentz(&e));
        }
    }

    #[test]
    fn j_squares_to_minus_one_on_contact_plane() {
        for e in [FrameVector::E1, FrameVector::E2] {
            assert_eq!(lorentz(&lorentz(&e)), -e);
        }
    }

    #[test]
    fn connection_examples() {
        assert_eq!(
            connection(&FrameVector::E1, &FrameVector::E2),
            0.5 * FrameVector::E3
        );
        assert_eq!(
            connection(&FrameVector::E3, &FrameVector::E3),
            FrameVector::ZERO
        );
        assert_eq!(
            connection(&(FrameVector::E1 + FrameVector::E2), &FrameVector::E3),
            FrameVector::new(0.5, -0.5, 0.0)
        );
    }

    #[test]
    fn connection_is_metric_and_torsion_free_on_the_frame() {
        // Torsion: ∇_X Y - ∇_Y X = [X, Y] for left-invariant fields.
        for x in FrameVector::basis() {
            for y in FrameVector::basis() {
                let torsion = connection(&x, &y) - connection(&y, &x);
                let br = bracket(&x.to_nil3(), &y.to_nil3());
                assert_eq!(torsion.to_nil3(), br);
                // Metric compatibility: ⟨∇_X Y, Z⟩ + ⟨Y, ∇_X Z⟩ = 0.
                for z in FrameVector::basis() {
                    let s = connection(&x, &y).dot(&z) + y.dot(&connection(&x, &z));
                    assert_eq!(s, 0.0);
                }
            }
        }
    }

    #[test]
    fn acceleration_examples() {
        let reeb = curve_acceleration(
            0.0,
            0.0,
            &CoordVector::new(0.0, 0.0, 1.0),
            &CoordVector::new(0.0, 0.0, 0.0),
        );
        assert_eq!(reeb, FrameVector::ZERO);

        let (a, b, s) = (0.6, 0.8, 2.5);
        let line = curve_acceleration(
            a * s,
            b * s,
            &CoordVector::new(a, b, 0.0),
            &CoordVector::new(0.0, 0.0, 0.0),
        );
        assert!(line.max_abs_diff(&FrameVector::ZERO) < 1e-15);

        // x = cos s, y = sin s, z = 0 at s = 0: cos θ = (ẋ y - x ẏ)/2 = -1/2.
        let circle = curve_acceleration(
            1.0,
            0.0,
            &CoordVector::new(0.0, 1.0, 0.0),
            &CoordVector::new(-1.0, 0.0, 0.0),
        );
        assert_eq!(circle, FrameVector::new(-1.5, 0.0, 0.0));
    }

    #[test]
    fn u_tensor_on_nil3() {
        let nil3 = Decomposition::Nil3.basis();
        let e = OscVector::basis();
        let u = |i: usize, j: usize| u_tensor(&nil3, &e[i], &e[j]).unwrap();
        assert_eq!(u(0, 2), -0.5 * OscVector::E2);
        assert_eq!(u(2, 0), -0.5 * OscVector::E2);
        assert_eq!(u(1, 2), 0.5 * OscVector::E1);
        assert_eq!(u(0, 1), OscVector::ZERO);
        assert_eq!(u(2, 2), OscVector::ZERO);
        assert!(matches!(
            u_tensor(&nil3, &OscVector::E4, &OscVector::E1),
            Err(Error::Domain(_))
        ));
        assert!(u_tensor(&nil3[..2], &OscVector::E1, &OscVector::E1).is_err());
    }

    #[test]
    fn u_tensor_vanishes_on_m() {
        let m = LieSubspace::of(Decomposition::M);
        for x in m.basis() {
            for y in m.basis() {
                assert_eq!(m.u_tensor(x, y).unwrap(), OscVector::ZERO);
            }
        }
    }

    #[test]
    fn degenerate_basis_is_rejected() {
        let basis = [OscVector::E1, OscVector::E2, OscVector::E4];
        assert!(LieSubspace::new(basis).is_err());
    }

    #[test]
    fn connection_from_u_tensor_and_bracket() {
        let nil3 = LieSubspace::of(Decomposition::Nil3);
        for x in FrameVector::basis() {
            for y in FrameVector::basis() {
                let (xv, yv) = (x.to_nil3(), y.to_nil3());
                let u = nil3.u_tensor(&xv, &yv).unwrap();
                let half_bracket = 0.5 * nil3.component(&bracket(&xv, &yv));
                assert_eq!(connection(&x, &y).to_nil3(), u + half_bracket);
                let sym = connection(&x, &y) + connection(&y, &x);
                assert_eq!(sym.to_nil3(), 2.0 * u);
            }
        }
    }

    #[test]
    fn go_criterion_examples() {
        let r = go_criterion(&OscVector::new(1.0, 1.0, 1.0, 1.0), Decomposition::Nil3);
        assert_eq!(
            r,
            CriterionResult {
                is_pregeodesic: true,
                k: Some(0.0)
            }
        );
        let r = go_criterion(&OscVector::new(1.0, 0.0, 1.0, 0.0), Decomposition::Nil3);
        assert_eq!(
            r,
            CriterionResult {
                is_pregeodesic: false,
                k: None
            }
        );
        let r = go_criterion(&OscVector::E4, Decomposition::Nil3);
        assert_eq!(
            r,
            CriterionResult {
                is_pregeodesic: true,
                k: Some(0.0)
            }
        );
    }

    #[test]
    fn go_criterion_on_m_accepts_the_subspace() {
        for w in [
            OscVector::new(1.0, -2.0, 0.5, 0.5),
            OscVector::new(0.0, 0.0, 3.0, -1.0),
            OscVector::new(2.0, 1.0, 0.0, 0.0),
        ] {
            assert!(go_criterion(&w, Decomposition::M).is_pregeodesic, "{w:?}");
        }
        assert!(
            !go_criterion(&OscVector::new(1.0, 0.0, 1.0, 0.0), Decomposition::M).is_pregeodesic
        );
    }

    #[test]
    fn families() {
        use PregeodesicFamily::*;
        let f = |w: [f64; 4]| PregeodesicFamily::classify(&OscVector::from_array(w));
        assert_eq!(f([1.0, 1.0, 1.0, 1.0]), Some(NaturallyReductive));
        assert_eq!(f([0.0, 0.0, 2.0, -1.0]), Some(Vertical));
        assert_eq!(f([0.0, 0.0, 0.0, 1.0]), Some(Isotropy));
        assert_eq!(f([1.0, 0.0, 1.0, 0.0]), None);
    }

    fn coord() -> impl Strategy<Value = f64> {
        -5.0..5.0_f64
    }

    proptest! {
        #[test]
        fn frame_coord_round_trip(
            x in coord(), y in coord(), z in coord(),
            a in coord(), b in coord(), c in coord(),
        ) {
            let p = NilPoint::new(x, y, z);
            let v = FrameVector::new(a, b, c);
            let back = coord_to_frame(&p, &frame_to_coord(&p, &v));
            prop_assert!(back.max_abs_diff(&v) <= 1e-14 * (1.0 + x.abs() + y.abs()) * (1.0 + a.abs() + b.abs()));
        }

        #[test]
        fn metric_matches_frame_inner_product(
            p in prop::array::uniform3(coord()),
            v in prop::array::uniform3(coord()),
            w in prop::array::uniform3(coord()),
        ) {
            let p = NilPoint::new(p[0], p[1], p[2]);
            let v = CoordVector::new(v[0], v[1], v[2]);
            let w = CoordVector::new(w[0], w[1], w[2]);
            let g = metric(&p, &v, &w);
            let frame = coord_to_frame(&p, &v).dot(&coord_to_frame(&p, &w));
            prop_assert!((g - frame).abs() < 1e-12 * (1.0 + g.abs()));
            prop_assert_eq!(g, metric(&p, &w, &v));
            prop_assert!(metric(&p, &v, &v) >= 0.0);
        }

        #[test]
        fn metric_is_independent_of_z(
            p in prop::array::uniform3(coord()),
            v in prop::array::uniform3(coord()),
            w in prop::array::uniform3(coord()),
            dz in coord(),
        ) {
            let q = NilPoint::new(p[0], p[1], p[2]);
            let shifted = NilPoint::new(p[0], p[1], p[2] + dz);
            let v = CoordVector::new(v[0], v[1], v[2]);
            let w = CoordVector::new(w[0], w[1], w[2]);
            prop_assert_eq!(metric(&q, &v, &w), metric(&shifted, &v, &w));
        }

        #[test]
        fn metric_is_left_invariant(
            g in prop::array::uniform3(-3.0..3.0_f64),
            p in prop::array::uniform3(-3.0..3.0_f64),
            v in prop::array::uniform3(-1.0..1.0_f64),
            w in prop::array::uniform3(-1.0..1.0_f64),
        ) {
            let g = OscElement::new(g[0], g[1], g[2], 0.0);
            let p = NilPoint::new(p[0], p[1], p[2]);
            let v = CoordVector::new(v[0], v[1], v[2]);
            let w = CoordVector::new(w[0], w[1], w[2]);
            // Differential of p ↦ g·p by central differences.
            let push = |u: &CoordVector| {
                let h = 1e-5;
                let fwd = osc_action(&g, &NilPoint::new(p.x + h * u.dx, p.y + h * u.dy, p.z + h * u.dz));
                let bwd = osc_action(&g, &NilPoint::new(p.x - h * u.dx, p.y - h * u.dy, p.z - h * u.dz));
                CoordVector::new((fwd.x - bwd.x) / (2.0 * h), (fwd.y - bwd.y) / (2.0 * h), (fwd.z - bwd.z) / (2.0 * h))
            };
            let gp = osc_action(&g, &p);
            let before = metric(&p, &v, &w);
            let after = metric(&gp, &push(&v), &push(&w));
            prop_assert!((before - after).abs() < 1e-6);
        }

        #[test]
        fn cross_is_antisymmetric_and_reproduces_j(
            v in prop::array::uniform3(coord()),
            w in prop::array::uniform3(coord()),
        ) {
            let v = FrameVector::new(v[0], v[1], v[2]);
            let w = FrameVector::new(w[0], w[1], w[2]);
            prop_assert_eq!(cross(&v, &w), -cross(&w, &v));
            prop_assert_eq!(cross(&FrameVector::E3, &v), lorentz(&v));
        }

        #[test]
        fn u_tensor_is_symmetric(
            x in prop::array::uniform3(-2.0..2.0_f64),
            y in prop::array::uniform3(-2.0..2.0_f64),
        ) {
            let nil3 = LieSubspace::of(Decomposition::Nil3);
            let x = OscVector::new(x[0], x[1], x[2], 0.0);
            let y = OscVector::new(y[0], y[1], y[2], 0.0);
            prop_assert_eq!(nil3.u_tensor(&x, &y).unwrap(), nil3.u_tensor(&y, &x).unwrap());
        }
    }
}
