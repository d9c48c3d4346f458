//! Group laws, brackets and exponential maps for `Nil3` and the oscillator
//! group `Osc = Nil3 ⋊ U(1)`.
//!
//! The oscillator algebra is spanned by `E1, E2, E3, E4` with
//!
//! ```text
//! [E1, E2] = E3,   [E4, E1] = E2,   [E4, E2] = -E1,
//! ```
//!
//! all other brackets of basis vectors vanishing. `E1, E2, E3` span the
//! Heisenberg algebra and `E4` generates the rotation subgroup `U(1)`, which is
//! the isotropy group of the origin of `Nil3 = Osc / U(1)`.
//!
//! Group elements of `Osc` are stored in canonical coordinates `(x, y, z, t)`
//! and realised as the 4×4 matrices
//!
//! ```text
//!              | 1  x sin t - y cos t  x cos t + y sin t  2z |
//! M(x,y,z,t) = | 0        cos t             -sin t        x  |
//!              | 0        sin t              cos t        y  |
//!              | 0          0                  0          1  |
//! ```

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for recognising the `M(x, y, z, t)` shape.
pub const SHAPE_TOLERANCE: f64 = 1e-9;

/// Element `e1 E1 + e2 E2 + e3 E3 + e4 E4` of the oscillator algebra.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OscVector {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
}

impl OscVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const E1: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const E2: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const E3: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const E4: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(e1: f64, e2: f64, e3: f64, e4: f64) -> Self {
        Self { e1, e2, e3, e4 }
    }

    pub fn basis() -> [Self; 4] {
        [Self::E1, Self::E2, Self::E3, Self::E4]
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    /// True when the vector lies in the Heisenberg subalgebra (`e4 = 0`).
    pub fn is_nil3(&self) -> bool {
        self.e4 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other)
            .to_array()
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Matrix form `m(e1, e2, e3, e4)` inside `gl(4, R)`.
    pub fn to_matrix(&self) -> Matrix4 {
        let (x, y, z, t) = (self.e1, self.e2, self.e3, self.e4);
        Matrix4([
            [0.0, -y, x, 2.0 * z],
            [0.0, 0.0, -t, x],
            [0.0, t, 0.0, y],
            [0.0, 0.0, 0.0, 0.0],
        ])
    }

    pub fn bracket(&self, other: &Self) -> Self {
        bracket(self, other)
    }
}

impl Add for OscVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.e1 + o.e1,
            self.e2 + o.e2,
            self.e3 + o.e3,
            self.e4 + o.e4,
        )
    }
}

impl Sub for OscVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.e1 - o.e1,
            self.e2 - o.e2,
            self.e3 - o.e3,
            self.e4 - o.e4,
        )
    }
}

impl Neg for OscVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.e1, -self.e2, -self.e3, -self.e4)
    }
}

impl Mul<OscVector> for f64 {
    type Output = OscVector;
    fn mul(self, v: OscVector) -> OscVector {
        OscVector::new(self * v.e1, self * v.e2, self * v.e3, self * v.e4)
    }
}

/// Point `(x, y, z)` of the Heisenberg group in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NilPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl NilPoint {
    pub const ORIGIN: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Euclidean distance in coordinates.
    pub fn distance(&self, other: &Self) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    /// The Heisenberg point as the element `(x, y, z, 0)` of `Osc`.
    pub fn to_osc(&self) -> OscElement {
        OscElement::new(self.x, self.y, self.z, 0.0)
    }
}

impl Mul for NilPoint {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        nil_multiply(&self, &rhs)
    }
}

/// Element of `Osc` in canonical coordinates. `t` is kept unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OscElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl OscElement {
    pub const IDENTITY: Self = Self::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { x, y, z, t }
    }

    /// Heisenberg component of the semidirect splitting.
    pub fn nil_part(&self) -> NilPoint {
        NilPoint::new(self.x, self.y, self.z)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
            .max((self.t - other.t).abs())
    }

    pub fn to_matrix(&self) -> Matrix4 {
        osc_to_matrix(self)
    }
}

impl Mul for OscElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        osc_multiply(&self, &rhs)
    }
}

/// Real 4×4 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Matrix4(pub [[f64; 4]; 4]);

impl Matrix4 {
    pub const ZERO: Self = Self([[0.0; 4]; 4]);

    pub fn identity() -> Self {
        let mut m = Self::ZERO;
        for i in 0..4 {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|e| *e *= k);
        out
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..4)
            .map(|j| (0..4).map(|i| self.0[i][j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|e| e.is_finite())
    }

    /// Commutator `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl Index<(usize, usize)> for Matrix4 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Matrix4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Matrix4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Matrix4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

/// Lie bracket of the oscillator algebra.
pub fn bracket(a: &OscVector, b: &OscVector) -> OscVector {
    OscVector::new(
        a.e2 * b.e4 - a.e4 * b.e2,
        a.e4 * b.e1 - a.e1 * b.e4,
        a.e1 * b.e2 - a.e2 * b.e1,
        0.0,
    )
}

/// Heisenberg group law
/// `(x1, y1, z1)(x2, y2, z2) = (x1 + x2, y1 + y2, z1 + z2 + (x1 y2 - x2 y1) / 2)`.
pub fn nil_multiply(p: &NilPoint, q: &NilPoint) -> NilPoint {
    NilPoint::new(
        p.x + q.x,
        p.y + q.y,
        p.z + q.z + 0.5 * (p.x * q.y - q.x * p.y),
    )
}

/// Group law of `Osc` in canonical coordinates; the angles add exactly.
pub fn osc_multiply(g1: &OscElement, g2: &OscElement) -> OscElement {
    let (sin, cos) = g1.t.sin_cos();
    OscElement::new(
        g1.x + g2.x * cos - g2.y * sin,
        g1.y + g2.x * sin + g2.y * cos,
        g1.z + g2.z + 0.5 * (cos * (g1.x * g2.y - g2.x * g1.y) + sin * (g1.x * g2.x + g1.y * g2.y)),
        g1.t + g2.t,
    )
}

pub fn osc_to_matrix(g: &OscElement) -> Matrix4 {
    let (x, y, z) = (g.x, g.y, g.z);
    let (sin, cos) = g.t.sin_cos();
    Matrix4([
        [1.0, x * sin - y * cos, x * cos + y * sin, 2.0 * z],
        [0.0, cos, -sin, x],
        [0.0, sin, cos, y],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

/// Recover `(x, y, z, t)` from a matrix of the form `M(x, y, z, t)`.
///
/// The angle is read off the rotation block with `atan2`; when `t_hint` is
/// given, the branch `t + 2πk` closest to the hint is returned.
pub fn matrix_to_osc(m: &Matrix4, t_hint: Option<f64>) -> Result<OscElement> {
    matrix_to_osc_with_tolerance(m, t_hint, SHAPE_TOLERANCE)
}

pub fn matrix_to_osc_with_tolerance(
    m: &Matrix4,
    t_hint: Option<f64>,
    tolerance: f64,
) -> Result<OscElement> {
    if !m.is_finite() {
        return Err(Error::Shape("non-finite entry".into()));
    }
    let expect = |i: usize, j: usize, value: f64| -> Result<()> {
        if (m[(i, j)] - value).abs() > tolerance {
            return Err(Error::Shape(format!(
                "entry ({i}, {j}) is {} but should be {value}",
                m[(i, j)]
            )));
        }
        Ok(())
    };
    for (i, j, v) in [
        (0, 0, 1.0),
        (1, 0, 0.0),
        (2, 0, 0.0),
        (3, 0, 0.0),
        (3, 1, 0.0),
        (3, 2, 0.0),
        (3, 3, 1.0),
    ] {
        expect(i, j, v)?;
    }

    let (cos, sin) = (m[(1, 1)], m[(2, 1)]);
    if (m[(2, 2)] - cos).abs() > tolerance
        || (m[(1, 2)] + sin).abs() > tolerance
        || (cos * cos + sin * sin - 1.0).abs() > tolerance
    {
        return Err(Error::Shape("rotation block is not orthogonal".into()));
    }

    let (x, y, z) = (m[(1, 3)], m[(2, 3)], 0.5 * m[(0, 3)]);
    let scale = 1.0 + x.abs() + y.abs();
    if (m[(0, 1)] - (x * sin - y * cos)).abs() > tolerance * scale
        || (m[(0, 2)] - (x * cos + y * sin)).abs() > tolerance * scale
    {
        return Err(Error::Shape(
            "first row is inconsistent with the translation column".into(),
        ));
    }

    let mut t = sin.atan2(cos);
    if let Some(hint) = t_hint {
        let turns = ((hint - t) / std::f64::consts::TAU).round();
        t += turns * std::f64::consts::TAU;
    }
    Ok(OscElement::new(x, y, z, t))
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn matrix_exp(m: &Matrix4) -> Matrix4 {
    const SCALED_NORM: f64 = 0.25;
    const MAX_TERMS: usize = 30;

    let norm = m.norm_one();
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.scale(2.0_f64.powi(-squarings));

    let mut sum = Matrix4::identity();
    let mut term = Matrix4::identity();
    for k in 1..=MAX_TERMS {
        term = (term * scaled).scale(1.0 / k as f64);
        sum = sum + term;
        if term.norm_one() <= 1e-3 * f64::EPSILON * sum.norm_one() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Exponential map of the Heisenberg algebra:
/// `exp(u E1 + v E2 + w E3) = (u, v, w)`.
pub fn exp_nil(v: &OscVector) -> Result<NilPoint> {
    if !v.is_nil3() {
        return Err(Error::Domain(format!(
            "exp_nil needs an element of nil3, got E4 coefficient {}",
            v.e4
        )));
    }
    Ok(NilPoint::new(v.e1, v.e2, v.e3))
}

/// Exponential map of the oscillator algebra, computed through the matrix
/// exponential. The angle branch is the one continuous in `v`, so that
/// `exp_osc(v).t == v.e4` up to rounding.
pub fn exp_osc(v: &OscVector) -> Result<OscElement> {
    matrix_to_osc(&matrix_exp(&v.to_matrix()), Some(v.e4))
}

/// Isometric action of `Osc` on `Nil3`:
/// `(a, b, c, t) · (x, y, z)` is the Heisenberg part of `(a, b, c, t)(x, y, z, 0)`.
pub fn osc_action(g: &OscElement, p: &NilPoint) -> NilPoint {
    let (sin, cos) = g.t.sin_cos();
    let (a, b, c) = (g.x, g.y, g.z);
    NilPoint::new(
        a + p.x * cos - p.y * sin,
        b + p.x * sin + p.y * cos,
        c + p.z + 0.5 * (cos * (a * p.y - b * p.x) + sin * (a * p.x + b * p.y)),
    )
}

/// Reductive decompositions `osc = u(1) + m` of the oscillator algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decomposition {
    /// Lie subspace `nil3 = span{E1, E2, E3}`.
    Nil3,
    /// Lie subspace `m = span{E1, E2, E3 + E4}`.
    M,
}

impl Decomposition {
    /// Basis of the Lie subspace, declared orthonormal.
    pub fn basis(&self) -> [OscVector; 3] {
        match self {
            Decomposition::Nil3 => [OscVector::E1, OscVector::E2, OscVector::E3],
            Decomposition::M => [
                OscVector::E1,
                OscVector::E2,
                OscVector::new(0.0, 0.0, 1.0, 1.0),
            ],
        }
    }
}

impl std::str::FromStr for Decomposition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nil3" => Ok(Self::Nil3),
            "m" => Ok(Self::M),
            other => Err(Error::Parse(format!("unknown decomposition `{other}`"))),
        }
    }
}

impl std::fmt::Display for Decomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Nil3 => "nil3",
            Self::M => "m",
        })
    }
}

/// Split `W` into its isotropy part (a multiple of `E4`) and its Lie subspace
/// part. The two parts add back to `W` exactly.
pub fn split(w: &OscVector, decomposition: Decomposition) -> (OscVector, OscVector) {
    match decomposition {
        Decomposition::Nil3 => (
            OscVector::new(0.0, 0.0, 0.0, w.e4),
            OscVector::new(w.e1, w.e2, w.e3, 0.0),
        ),
        Decomposition::M => (
            OscVector::new(0.0, 0.0, 0.0, w.e4 - w.e3),
            OscVector::new(w.e1, w.e2, w.e3, w.e3),
        ),
    }
}
