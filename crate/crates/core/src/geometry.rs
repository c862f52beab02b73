//! Group structure, metric family and isometries of the Heisenberg group Nil3.
//!
//! Points are stored in global coordinates `(x, y, z)`. Tangent vectors are stored
//! as coefficients in the left-invariant frame
//!
//! ```text
//! X = ∂x - (y/2) ∂z,   Y = ∂y + (x/2) ∂z,   Z = ∂z
//! ```
//!
//! at an explicit base point. The metric `g_λ` makes `(X, Y, λ^{-1/2} Z)`
//! orthonormal, so `|Z|² = λ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step used by finite-difference derivative checks.
pub const FD_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        Point::new(c[0], c[1], c[2])
    }

    /// Sup-norm distance between coordinate triples.
    pub fn max_abs_diff(&self, other: &Point) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

/// `p ⋆ q = (x₁+x₂, y₁+y₂, z₁+z₂+(x₁y₂−x₂y₁)/2)`.
pub fn group_mul(p: Point, q: Point) -> Point {
    Point {
        x: p.x + q.x,
        y: p.y + q.y,
        z: p.z + q.z + 0.5 * (p.x * q.y - q.x * p.y),
    }
}

pub fn group_inv(p: Point) -> Point {
    Point::new(-p.x, -p.y, -p.z)
}

/// The deformation parameter `λ > 0` of the metric family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricParam(f64);

impl MetricParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(MetricParam(lambda))
        } else {
            Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn sqrt(self) -> f64 {
        self.0.sqrt()
    }
}

/// A tangent vector `cx X + cy Y + cz Z` at `base`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameVector {
    pub base: Point,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl FrameVector {
    pub fn new(base: Point, cx: f64, cy: f64, cz: f64) -> Self {
        FrameVector { base, cx, cy, cz }
    }

    pub fn from_coeffs(base: Point, c: [f64; 3]) -> Self {
        FrameVector::new(base, c[0], c[1], c[2])
    }

    pub fn x(base: Point) -> Self {
        FrameVector::new(base, 1.0, 0.0, 0.0)
    }

    pub fn y(base: Point) -> Self {
        FrameVector::new(base, 0.0, 1.0, 0.0)
    }

    pub fn z(base: Point) -> Self {
        FrameVector::new(base, 0.0, 0.0, 1.0)
    }

    /// The unit vertical vector `λ^{-1/2} Z`.
    pub fn unit_vertical(lambda: MetricParam, base: Point) -> Self {
        FrameVector::new(base, 0.0, 0.0, 1.0 / lambda.sqrt())
    }

    pub fn coeffs(&self) -> [f64; 3] {
        [self.cx, self.cy, self.cz]
    }

    pub fn scale(&self, s: f64) -> Self {
        FrameVector::new(self.base, s * self.cx, s * self.cy, s * self.cz)
    }

    /// Componentwise sum; the base point of `self` is kept.
    pub fn add(&self, other: &FrameVector) -> Self {
        FrameVector::new(
            self.base,
            self.cx + other.cx,
            self.cy + other.cy,
            self.cz + other.cz,
        )
    }

    /// Components with respect to the coordinate fields `(∂x, ∂y, ∂z)`.
    pub fn to_coordinate(&self) -> [f64; 3] {
        let Point { x, y, .. } = self.base;
        [self.cx, self.cy, self.cz - 0.5 * y * self.cx + 0.5 * x * self.cy]
    }

    /// Inverse of [`FrameVector::to_coordinate`]: `∂x = X + (y/2)Z`, `∂y = Y − (x/2)Z`.
    pub fn from_coordinate(base: Point, v: [f64; 3]) -> Self {
        FrameVector::new(
            base,
            v[0],
            v[1],
            v[2] + 0.5 * base.y * v[0] - 0.5 * base.x * v[1],
        )
    }

    /// Components in the orthonormal frame `(X, Y, λ^{-1/2}Z)`.
    pub fn orthonormal(&self, lambda: MetricParam) -> [f64; 3] {
        [self.cx, self.cy, lambda.sqrt() * self.cz]
    }

    pub fn from_orthonormal(lambda: MetricParam, base: Point, e: [f64; 3]) -> Self {
        FrameVector::new(base, e[0], e[1], e[2] / lambda.sqrt())
    }
}

/// `g_λ(v, w) = v_X w_X + v_Y w_Y + λ v_Z w_Z`.
pub fn metric(lambda: MetricParam, v: &FrameVector, w: &FrameVector) -> Result<f64> {
    if v.base != w.base {
        return Err(Error::BasePointMismatch);
    }
    Ok(metric_coeffs(lambda, v.coeffs(), w.coeffs()))
}

pub(crate) fn metric_coeffs(lambda: MetricParam, v: [f64; 3], w: [f64; 3]) -> f64 {
    v[0] * w[0] + v[1] * w[1] + lambda.value() * v[2] * w[2]
}

pub fn norm(lambda: MetricParam, v: &FrameVector) -> f64 {
    metric_coeffs(lambda, v.coeffs(), v.coeffs()).sqrt()
}

/// Index into the orthonormal frame `(E1, E2, E3) = (X, Y, λ^{-1/2}Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameIndex {
    X,
    Y,
    UnitZ,
}

impl FrameIndex {
    pub const ALL: [FrameIndex; 3] = [FrameIndex::X, FrameIndex::Y, FrameIndex::UnitZ];

    pub fn idx(self) -> usize {
        match self {
            FrameIndex::X => 0,
            FrameIndex::Y => 1,
            FrameIndex::UnitZ => 2,
        }
    }
}

/// `∇_{E_i} E_j` in the orthonormal frame `(X, Y, λ^{-1/2}Z)`.
pub fn connection_table(lambda: MetricParam, i: FrameIndex, j: FrameIndex) -> [f64; 3] {
    let h = 0.5 * lambda.sqrt();
    use FrameIndex::*;
    match (i, j) {
        (X, Y) => [0.0, 0.0, h],
        (Y, X) => [0.0, 0.0, -h],
        (X, UnitZ) | (UnitZ, X) => [0.0, -h, 0.0],
        (Y, UnitZ) | (UnitZ, Y) => [h, 0.0, 0.0],
        _ => [0.0; 3],
    }
}

/// `∇_{E_i} E_j` for the (non-normalized) frame `(X, Y, Z)`, in `(X, Y, Z)` coefficients.
pub(crate) fn connection_xyz(lambda: f64, i: usize, j: usize) -> [f64; 3] {
    let h = 0.5 * lambda;
    match (i, j) {
        (0, 1) => [0.0, 0.0, 0.5],
        (1, 0) => [0.0, 0.0, -0.5],
        (0, 2) | (2, 0) => [0.0, -h, 0.0],
        (1, 2) | (2, 1) => [h, 0.0, 0.0],
        _ => [0.0; 3],
    }
}

/// `Σ v^i w^j ∇_{E_i} E_j` in frame coefficients: the connection term of `∇_v W`
/// for frame-coefficient vectors `v`, `w`.
pub(crate) fn connection_term(lambda: f64, v: [f64; 3], w: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, vi) in v.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            let c = vi * wj;
            if c == 0.0 {
                continue;
            }
            let e = connection_xyz(lambda, i, j);
            for k in 0..3 {
                out[k] += c * e[k];
            }
        }
    }
    out
}

/// Covariant derivative `∇_v F` of a vector field given by its frame coefficients,
/// with the directional derivative of the coefficients taken by central differences.
pub fn covariant_derivative_fd<F>(lambda: MetricParam, field: F, v: &FrameVector, h: f64) -> FrameVector
where
    F: Fn(Point) -> [f64; 3],
{
    let p = v.base;
    let d = v.to_coordinate();
    let shift = |s: f64| Point::new(p.x + s * d[0], p.y + s * d[1], p.z + s * d[2]);
    let plus = field(shift(h));
    let minus = field(shift(-h));
    let at = field(p);
    let conn = connection_term(lambda.value(), v.coeffs(), at);
    let mut c = [0.0; 3];
    for k in 0..3 {
        c[k] = (plus[k] - minus[k]) / (2.0 * h) + conn[k];
    }
    FrameVector::from_coeffs(p, c)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalized(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Orthonormal basis `(V1, V2 = aU + b λ^{-1/2}Z)` of a tangent plane with
/// `V1, U` horizontal and `a ≥ 0`.
#[derive(Clone, Copy, Debug)]
pub struct SpecialBasis {
    pub v1: FrameVector,
    pub u: FrameVector,
    pub a: f64,
    pub b: f64,
}

pub fn special_basis(lambda: MetricParam, v1: &FrameVector, v2: &FrameVector) -> Result<SpecialBasis> {
    if v1.base != v2.base {
        return Err(Error::BasePointMismatch);
    }
    let base = v1.base;
    let o1 = v1.orthonormal(lambda);
    let o2 = v2.orthonormal(lambda);
    let n = cross(o1, o2);
    let n_len = dot(n, n).sqrt();
    let scale = dot(o1, o1).sqrt() * dot(o2, o2).sqrt();
    if !(n_len > 1e-12 * scale.max(1e-300)) {
        return Err(Error::DegenerateSpan(n_len));
    }
    let n = normalized(n);
    // the horizontal line of the plane is orthogonal to both n and E3
    let h = cross([0.0, 0.0, 1.0], n);
    let h = if dot(h, h).sqrt() > 1e-14 {
        normalized(h)
    } else {
        // horizontal plane
        normalized([o1[0], o1[1], 0.0])
    };
    let w = cross(n, h);
    let a = (w[0] * w[0] + w[1] * w[1]).sqrt();
    let b = w[2];
    let u = if a > 1e-300 {
        [w[0] / a, w[1] / a, 0.0]
    } else {
        [-h[1], h[0], 0.0]
    };
    Ok(SpecialBasis {
        v1: FrameVector::from_orthonormal(lambda, base, h),
        u: FrameVector::from_orthonormal(lambda, base, u),
        a,
        b,
    })
}

/// Sectional curvature `λ(b² − 3a²)/4` of the plane spanned by `v1`, `v2`.
pub fn sectional_curvature(lambda: MetricParam, v1: &FrameVector, v2: &FrameVector) -> Result<f64> {
    let sb = special_basis(lambda, v1, v2)?;
    Ok(0.25 * lambda.value() * (sb.b * sb.b - 3.0 * sb.a * sb.a))
}

/// Isometries generated by left translations and horizontal rotations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Isometry {
    LeftTranslation(Point),
    HorizontalRotation(f64),
    /// Applied first to last.
    Composite(Vec<Isometry>),
}

impl Isometry {
    pub fn apply(&self, p: Point) -> Point {
        match self {
            Isometry::LeftTranslation(q) => group_mul(*q, p),
            Isometry::HorizontalRotation(u) => {
                let (s, c) = u.sin_cos();
                Point::new(p.x * c - p.y * s, p.x * s + p.y * c, p.z)
            }
            Isometry::Composite(list) => list.iter().fold(p, |acc, iso| iso.apply(acc)),
        }
    }

    pub fn inverse(&self) -> Isometry {
        match self {
            Isometry::LeftTranslation(q) => Isometry::LeftTranslation(group_inv(*q)),
            Isometry::HorizontalRotation(u) => Isometry::HorizontalRotation(-u),
            Isometry::Composite(list) => {
                Isometry::Composite(list.iter().rev().map(Isometry::inverse).collect())
            }
        }
    }

    /// Coordinate Jacobian at `p`. Both generators are affine in coordinates.
    pub fn jacobian(&self, p: Point) -> [[f64; 3]; 3] {
        match self {
            Isometry::LeftTranslation(q) => [
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [-0.5 * q.y, 0.5 * q.x, 1.0],
            ],
            Isometry::HorizontalRotation(u) => {
                let (s, c) = u.sin_cos();
                [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
            }
            Isometry::Composite(list) => {
                let mut jac = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
                let mut at = p;
                for iso in list {
                    jac = mat_mul(&iso.jacobian(at), &jac);
                    at = iso.apply(at);
                }
                jac
            }
        }
    }

    /// Differential of the isometry acting on a tangent vector.
    pub fn push_vector(&self, v: &FrameVector) -> FrameVector {
        match self {
            // left-invariant frame is preserved
            Isometry::LeftTranslation(_) => FrameVector::new(self.apply(v.base), v.cx, v.cy, v.cz),
            Isometry::HorizontalRotation(u) => {
                let (s, c) = u.sin_cos();
                FrameVector::new(
                    self.apply(v.base),
                    c * v.cx - s * v.cy,
                    s * v.cx + c * v.cy,
                    v.cz,
                )
            }
            Isometry::Composite(list) => list.iter().fold(*v, |acc, iso| iso.push_vector(&acc)),
        }
    }
}

pub(crate) fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub(crate) fn mat_vec(a: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [dot(a[0], v), dot(a[1], v), dot(a[2], v)]
}

/// `V = a1 F1 + a2 F2 + a3 F3 + a4 F4` with
/// `F1 = X + yZ`, `F2 = Y − xZ`, `F3 = Z`, `F4 = −yX + xY − ((x²+y²)/2) Z`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct KillingField {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl KillingField {
    pub const F1: KillingField = KillingField { a1: 1.0, a2: 0.0, a3: 0.0, a4: 0.0 };
    pub const F2: KillingField = KillingField { a1: 0.0, a2: 1.0, a3: 0.0, a4: 0.0 };
    pub const F3: KillingField = KillingField { a1: 0.0, a2: 0.0, a3: 1.0, a4: 0.0 };
    pub const F4: KillingField = KillingField { a1: 0.0, a2: 0.0, a3: 0.0, a4: 1.0 };

    pub fn new(a1: f64, a2: f64, a3: f64, a4: f64) -> Self {
        KillingField { a1, a2, a3, a4 }
    }

    /// Unit-speed vertical translation field `λ^{-1/2} Z`.
    pub fn vertical(lambda: MetricParam) -> Self {
        KillingField::new(0.0, 0.0, 1.0 / lambda.sqrt(), 0.0)
    }

    pub fn coeffs_at(&self, p: Point) -> [f64; 3] {
        let Point { x, y, .. } = p;
        [
            self.a1 - self.a4 * y,
            self.a2 + self.a4 * x,
            self.a3 + self.a1 * y - self.a2 * x - 0.5 * self.a4 * (x * x + y * y),
        ]
    }
}

pub fn killing_eval(field: &KillingField, p: Point) -> FrameVector {
    FrameVector::from_coeffs(p, field.coeffs_at(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(l: f64) -> MetricParam {
        MetricParam::new(l).unwrap()
    }

    #[test]
    fn group_law_examples() {
        let p = Point::new(0.3, -1.2, 2.5);
        assert_eq!(group_mul(Point::ORIGIN, p), p);
        assert_eq!(
            group_mul(Point::new(1.0, 0.0, 0.0), Point::new(0.0, 1.0, 0.0)),
            Point::new(1.0, 1.0, 0.5)
        );
        assert_eq!(group_mul(p, group_inv(p)), Point::ORIGIN);
    }

    #[test]
    fn metric_examples() {
        let o = Point::ORIGIN;
        assert_eq!(metric(lam(1.0), &FrameVector::z(o), &FrameVector::z(o)).unwrap(), 1.0);
        assert_eq!(metric(lam(4.0), &FrameVector::z(o), &FrameVector::z(o)).unwrap(), 4.0);
        let v = FrameVector::new(o, 1.0, 0.0, 1.0);
        assert_eq!(metric(lam(2.0), &v, &FrameVector::y(o)).unwrap(), 0.0);
        let w = FrameVector::y(Point::new(1.0, 0.0, 0.0));
        assert!(matches!(metric(lam(2.0), &v, &w), Err(Error::BasePointMismatch)));
    }

    #[test]
    fn frame_is_orthonormal() {
        let p = Point::new(0.7, -0.2, 3.0);
        for l in [0.5, 1.0, 4.0, 100.0] {
            let lm = lam(l);
            let frame = [
                FrameVector::x(p),
                FrameVector::y(p),
                FrameVector::unit_vertical(lm, p),
            ];
            for (i, a) in frame.iter().enumerate() {
                for (j, b) in frame.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    let got = metric(lm, a, b).unwrap();
                    assert!((got - expected).abs() <= 1e-15, "λ={l} ({i},{j}) -> {got}");
                }
            }
        }
    }

    #[test]
    fn rejects_non_positive_lambda() {
        assert!(MetricParam::new(0.0).is_err());
        assert!(MetricParam::new(-1.0).is_err());
        assert!(MetricParam::new(f64::NAN).is_err());
    }

    #[test]
    fn coordinate_frame_roundtrip() {
        let p = Point::new(1.5, -2.0, 0.1);
        let v = FrameVector::new(p, 0.3, -0.7, 1.1);
        let back = FrameVector::from_coordinate(p, v.to_coordinate());
        assert!((back.cx - v.cx).abs() < 1e-15);
        assert!((back.cy - v.cy).abs() < 1e-15);
        assert!((back.cz - v.cz).abs() < 1e-15);
        // ∂x = X + (y/2) Z
        let dx = FrameVector::from_coordinate(p, [1.0, 0.0, 0.0]);
        assert_eq!(dx.coeffs(), [1.0, 0.0, -1.0]);
    }

    #[test]
    fn connection_examples() {
        let l = lam(9.0);
        assert_eq!(connection_table(l, FrameIndex::X, FrameIndex::X), [0.0; 3]);
        assert_eq!(connection_table(l, FrameIndex::X, FrameIndex::Y), [0.0, 0.0, 1.5]);
    }

    #[test]
    fn connection_is_torsion_free() {
        // ∇_X Y − ∇_Y X = [X, Y] = Z, ∇_X Z − ∇_Z X = 0, ∇_Y Z − ∇_Z Y = 0
        for l in [0.5, 1.0, 4.0] {
            let xy = connection_xyz(l, 0, 1);
            let yx = connection_xyz(l, 1, 0);
            assert_eq!([xy[0] - yx[0], xy[1] - yx[1], xy[2] - yx[2]], [0.0, 0.0, 1.0]);
            assert_eq!(connection_xyz(l, 0, 2), connection_xyz(l, 2, 0));
            assert_eq!(connection_xyz(l, 1, 2), connection_xyz(l, 2, 1));
        }
    }

    #[test]
    fn connection_is_metric_compatible() {
        // orthonormal frame: <∇_i E_j, E_k> + <E_j, ∇_i E_k> = 0
        let l = lam(3.0);
        for i in FrameIndex::ALL {
            for j in FrameIndex::ALL {
                for k in FrameIndex::ALL {
                    let a = connection_table(l, i, j)[k.idx()];
                    let b = connection_table(l, i, k)[j.idx()];
                    assert_eq!(a + b, 0.0);
                }
            }
        }
    }

    #[test]
    fn sectional_curvature_examples() {
        let p = Point::new(0.4, 1.0, -2.0);
        for l in [0.5, 1.0, 4.0, 100.0] {
            let lm = lam(l);
            let kxy = sectional_curvature(lm, &FrameVector::x(p), &FrameVector::y(p)).unwrap();
            assert_eq!(kxy, -0.75 * l);
            let kxz = sectional_curvature(lm, &FrameVector::x(p), &FrameVector::z(p)).unwrap();
            assert_eq!(kxz, 0.25 * l);
            let kyz = sectional_curvature(lm, &FrameVector::y(p), &FrameVector::z(p)).unwrap();
            assert_eq!(kyz, 0.25 * l);
            // a² = b² = 1/2: plane spanned by X and (Y + λ^{-1/2}Z)/√2
            let v2 = FrameVector::new(p, 0.0, 1.0, 1.0 / lm.sqrt());
            let k = sectional_curvature(lm, &FrameVector::x(p), &v2).unwrap();
            assert!((k + 0.25 * l).abs() < 1e-14 * l);
        }
    }

    #[test]
    fn sectional_curvature_degenerate() {
        let p = Point::ORIGIN;
        let v = FrameVector::new(p, 1.0, 2.0, 3.0);
        assert!(matches!(
            sectional_curvature(lam(1.0), &v, &v.scale(2.0)),
            Err(Error::DegenerateSpan(_))
        ));
    }

    #[test]
    fn killing_examples() {
        let p = Point::new(2.0, -3.0, 1.0);
        assert_eq!(killing_eval(&KillingField::F3, p).coeffs(), [0.0, 0.0, 1.0]);
        assert_eq!(
            killing_eval(&KillingField::F4, Point::new(1.0, 0.0, 0.0)).coeffs(),
            [0.0, 1.0, -0.5]
        );
        assert_eq!(killing_eval(&KillingField::F1, Point::ORIGIN).coeffs(), [1.0, 0.0, 0.0]);
        let v = KillingField::new(0.5, -2.0, 1.5, 0.0);
        let c = killing_eval(&v, p).coeffs();
        assert_eq!(c[2], 1.5 + 0.5 * p.y + 2.0 * p.x);
    }

    #[test]
    fn killing_fields_match_coordinate_generators() {
        // F1 = ∂x + (y/2)∂z, F2 = ∂y − (x/2)∂z, F4 = −y∂x + x∂y
        let p = Point::new(0.7, -1.3, 0.2);
        let f1 = killing_eval(&KillingField::F1, p).to_coordinate();
        let f2 = killing_eval(&KillingField::F2, p).to_coordinate();
        let f4 = killing_eval(&KillingField::F4, p).to_coordinate();
        let close = |a: [f64; 3], b: [f64; 3]| (0..3).all(|i| (a[i] - b[i]).abs() < 1e-15);
        assert!(close(f1, [1.0, 0.0, 0.5 * p.y]));
        assert!(close(f2, [0.0, 1.0, -0.5 * p.x]));
        assert!(close(f4, [-p.y, p.x, 0.0]));
    }

    #[test]
    fn only_f3_has_constant_norm() {
        let lm = lam(2.0);
        let grid: Vec<Point> = (0..5)
            .flat_map(|i| (0..5).map(move |j| Point::new(i as f64 - 2.0, 0.5 * j as f64 - 1.0, 0.3)))
            .collect();
        let variance = |k: KillingField| {
            let n: Vec<f64> = grid.iter().map(|p| norm(lm, &killing_eval(&k, *p))).collect();
            let mean = n.iter().sum::<f64>() / n.len() as f64;
            n.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n.len() as f64
        };
        for p in &grid {
            assert!((norm(lm, &killing_eval(&KillingField::F3, *p)) - lm.sqrt()).abs() < 1e-15);
        }
        assert!(variance(KillingField::F3) < 1e-28);
        assert!(variance(KillingField::F1) > 0.0);
        assert!(variance(KillingField::F2) > 0.0);
        assert!(variance(KillingField::F4) > 0.0);
    }

    #[test]
    fn isometry_inverse_and_differential() {
        let iso = Isometry::Composite(vec![
            Isometry::LeftTranslation(Point::new(1.0, -2.0, 0.5)),
            Isometry::HorizontalRotation(0.7),
            Isometry::LeftTranslation(Point::new(-0.3, 0.4, 2.0)),
        ]);
        let p = Point::new(0.2, 0.9, -1.1);
        let back = iso.inverse().apply(iso.apply(p));
        assert!(back.max_abs_diff(&p) < 1e-13);

        // analytic differential agrees with the coordinate Jacobian
        let v = FrameVector::new(p, 0.3, -1.2, 0.8);
        let pushed = iso.push_vector(&v);
        let via_jac = FrameVector::from_coordinate(
            iso.apply(p),
            mat_vec(&iso.jacobian(p), v.to_coordinate()),
        );
        for k in 0..3 {
            assert!((pushed.coeffs()[k] - via_jac.coeffs()[k]).abs() < 1e-13);
        }
    }
}
