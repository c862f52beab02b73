//! Fundamental forms and curvatures of immersed surfaces in `(Nil3, g_λ)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    connection_term, mat_vec, metric_coeffs, sectional_curvature, FrameVector, Isometry,
    KillingField, MetricParam, Point,
};

/// Tangent basis `V1, V2` of a parametrized patch in frame coefficients, with
/// `dv[i][j] = ∂(a_j, b_j, c_j)/∂v_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchJet {
    pub point: Point,
    pub v: [[f64; 3]; 2],
    pub dv: [[[f64; 3]; 2]; 2],
}

impl PatchJet {
    pub fn tangent(&self, i: usize) -> FrameVector {
        FrameVector::from_coeffs(self.point, self.v[i])
    }
}

/// Second-order jet of a parametrization `(v1, v2) ↦ (x, y, z)` in coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordJet {
    pub point: Point,
    /// `d[i] = ∂p/∂v_i`
    pub d: [[f64; 3]; 2],
    /// `dd[i][j] = ∂²p/∂v_i∂v_j`
    pub dd: [[[f64; 3]; 2]; 2],
}

impl CoordJet {
    /// Fourth-order central differences of `map` at `(v1, v2)`.
    pub fn from_map<F>(map: F, v1: f64, v2: f64, h: f64) -> Self
    where
        F: Fn(f64, f64) -> Point,
    {
        let at = |s: f64, t: f64| map(v1 + s * h, v2 + t * h).to_array();
        let comb = |terms: &[(f64, [f64; 3])], scale: f64| {
            let mut out = [0.0; 3];
            for (w, p) in terms {
                for k in 0..3 {
                    out[k] += w * p[k];
                }
            }
            out.map(|v| v * scale)
        };
        let first = |dir: (f64, f64)| {
            comb(
                &[
                    (-1.0, at(2.0 * dir.0, 2.0 * dir.1)),
                    (8.0, at(dir.0, dir.1)),
                    (-8.0, at(-dir.0, -dir.1)),
                    (1.0, at(-2.0 * dir.0, -2.0 * dir.1)),
                ],
                1.0 / (12.0 * h),
            )
        };
        let center = at(0.0, 0.0);
        let pure = |dir: (f64, f64)| {
            comb(
                &[
                    (-1.0, at(2.0 * dir.0, 2.0 * dir.1)),
                    (16.0, at(dir.0, dir.1)),
                    (-30.0, center),
                    (16.0, at(-dir.0, -dir.1)),
                    (-1.0, at(-2.0 * dir.0, -2.0 * dir.1)),
                ],
                1.0 / (12.0 * h * h),
            )
        };
        let w = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
        let mut terms = Vec::with_capacity(16);
        for (si, wi) in w {
            for (tj, wj) in w {
                terms.push((wi * wj, at(si, tj)));
            }
        }
        let mixed = comb(&terms, 1.0 / (144.0 * h * h));
        CoordJet {
            point: Point::from_array(center),
            d: [first((1.0, 0.0)), first((0.0, 1.0))],
            dd: [[pure((1.0, 0.0)), mixed], [mixed, pure((0.0, 1.0))]],
        }
    }

    /// Image of the jet under an isometry. Both generators are affine in
    /// coordinates, so the chain rule is exact.
    pub fn pushforward(&self, iso: &Isometry) -> Self {
        let jac = iso.jacobian(self.point);
        let mut out = *self;
        out.point = iso.apply(self.point);
        for i in 0..2 {
            out.d[i] = mat_vec(&jac, self.d[i]);
            for j in 0..2 {
                out.dd[i][j] = mat_vec(&jac, self.dd[i][j]);
            }
        }
        out
    }

    pub fn to_patch(&self) -> PatchJet {
        let Point { x, y, .. } = self.point;
        let d = &self.d;
        let frame = |v: [f64; 3]| [v[0], v[1], v[2] + 0.5 * (y * v[0] - x * v[1])];
        let mut dv = [[[0.0; 3]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let s = self.dd[i][j];
                dv[i][j] = [
                    s[0],
                    s[1],
                    s[2] + 0.5 * (d[i][1] * d[j][0] + y * s[0] - d[i][0] * d[j][1] - x * s[1]),
                ];
            }
        }
        PatchJet {
            point: self.point,
            v: [frame(d[0]), frame(d[1])],
            dv,
        }
    }
}

/// Horizontal graph `z = u(x, y)` with its partial derivatives up to order two.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize)]
pub struct GraphJet {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub u_x: f64,
    pub u_y: f64,
    pub u_xx: f64,
    pub u_xy: f64,
    pub u_yy: f64,
}

impl GraphJet {
    pub fn alpha(&self) -> f64 {
        self.u_x + 0.5 * self.y
    }

    pub fn beta(&self) -> f64 {
        self.u_y - 0.5 * self.x
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y, self.u)
    }

    /// `1 + λα² + λβ²`
    pub fn w(&self, lambda: MetricParam) -> f64 {
        let (a, b) = (self.alpha(), self.beta());
        1.0 + lambda.value() * (a * a + b * b)
    }

    /// The parametrization `(x, y) ↦ (x, y, u)` as a coordinate jet.
    pub fn coord_jet(&self) -> CoordJet {
        CoordJet {
            point: self.point(),
            d: [[1.0, 0.0, self.u_x], [0.0, 1.0, self.u_y]],
            dd: [
                [[0.0, 0.0, self.u_xx], [0.0, 0.0, self.u_xy]],
                [[0.0, 0.0, self.u_xy], [0.0, 0.0, self.u_yy]],
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeData {
    pub g: [[f64; 2]; 2],
    pub a: [[f64; 2]; 2],
    /// `tr(A g^{-1})`, the sum of the principal curvatures.
    pub h: f64,
    pub normal: FrameVector,
    pub tangents: [FrameVector; 2],
}

impl ShapeData {
    pub fn det_g(&self) -> f64 {
        self.g[0][0] * self.g[1][1] - self.g[0][1] * self.g[1][0]
    }
}

/// `∇_{V_i} V_j` for the coordinate fields of a patch.
pub fn patch_covariant(lambda: MetricParam, jet: &PatchJet, i: usize, j: usize) -> FrameVector {
    let conn = connection_term(lambda.value(), jet.v[i], jet.v[j]);
    let d = jet.dv[i][j];
    FrameVector::from_coeffs(jet.point, [d[0] + conn[0], d[1] + conn[1], d[2] + conn[2]])
}

fn trace_with_inverse(a: &[[f64; 2]; 2], g: &[[f64; 2]; 2]) -> f64 {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    (a[0][0] * g[1][1] - 2.0 * a[0][1] * g[0][1] + a[1][1] * g[0][0]) / det
}

/// Shape data from a patch jet. The normal is `V1 × V2` in the orthonormal frame.
pub fn patch_shape(lambda: MetricParam, jet: &PatchJet) -> Result<ShapeData> {
    let mut g = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = metric_coeffs(lambda, jet.v[i], jet.v[j]);
        }
    }
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(det > 1e-12) {
        return Err(Error::SingularMetric(det));
    }
    let t1 = jet.tangent(0);
    let t2 = jet.tangent(1);
    let o1 = t1.orthonormal(lambda);
    let o2 = t2.orthonormal(lambda);
    let n = [
        o1[1] * o2[2] - o1[2] * o2[1],
        o1[2] * o2[0] - o1[0] * o2[2],
        o1[0] * o2[1] - o1[1] * o2[0],
    ];
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let normal = FrameVector::from_orthonormal(lambda, jet.point, [n[0] / len, n[1] / len, n[2] / len]);
    let mut a = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            a[i][j] = metric_coeffs(lambda, patch_covariant(lambda, jet, i, j).coeffs(), normal.coeffs());
        }
    }
    let off = 0.5 * (a[0][1] + a[1][0]);
    a[0][1] = off;
    a[1][0] = off;
    Ok(ShapeData {
        g,
        a,
        h: trace_with_inverse(&a, &g),
        normal,
        tangents: [t1, t2],
    })
}

/// Closed-form shape data of a horizontal graph, normal with positive `Z` component.
pub fn graph_shape(lambda: MetricParam, jet: &GraphJet) -> ShapeData {
    let l = lambda.value();
    let (al, be) = (jet.alpha(), jet.beta());
    let w = jet.w(lambda);
    let g = [[1.0 + l * al * al, l * al * be], [l * al * be, 1.0 + l * be * be]];
    let s = l / (l * w).sqrt();
    let off = s * (jet.u_xy + 0.5 * l * (be * be - al * al));
    let a = [
        [s * (jet.u_xx + l * al * be), off],
        [off, s * (jet.u_yy - l * al * be)],
    ];
    let p = jet.point();
    let nd = (l * w).sqrt();
    ShapeData {
        g,
        a,
        h: trace_with_inverse(&a, &g),
        normal: FrameVector::new(p, -al * l / nd, -be * l / nd, 1.0 / nd),
        tangents: [FrameVector::new(p, 1.0, 0.0, al), FrameVector::new(p, 0.0, 1.0, be)],
    }
}

/// `det(A g^{-1})`.
pub fn gaussian_curvature(shape: &ShapeData) -> Result<f64> {
    let det_g = shape.det_g();
    if !(det_g.abs() > 1e-14) {
        return Err(Error::SingularMetric(det_g));
    }
    let det_a = shape.a[0][0] * shape.a[1][1] - shape.a[0][1] * shape.a[1][0];
    Ok(det_a / det_g)
}

/// Ambient sectional curvature of the tangent plane of a graph,
/// `λ(λα² + λβ² − 3) / (4(1 + λα² + λβ²))`.
pub fn graph_tangent_sectional(lambda: MetricParam, jet: &GraphJet) -> f64 {
    let l = lambda.value();
    let q = l * (jet.alpha().powi(2) + jet.beta().powi(2));
    0.25 * l * (q - 3.0) / (1.0 + q)
}

/// Intrinsic curvature `K̄(TM) + det(A g^{-1})` of a graph. At characteristic
/// points the tangent plane is handed to the ambient sectional curvature directly.
pub fn intrinsic_curvature(lambda: MetricParam, jet: &GraphJet, shape: &ShapeData) -> Result<f64> {
    let ambient = if jet.alpha() != 0.0 || jet.beta() != 0.0 {
        graph_tangent_sectional(lambda, jet)
    } else {
        sectional_curvature(lambda, &shape.tangents[0], &shape.tangents[1])?
    };
    Ok(ambient + gaussian_curvature(shape)?)
}

/// Intrinsic curvature of a general patch through the Gauss equation.
pub fn patch_intrinsic_curvature(lambda: MetricParam, shape: &ShapeData) -> Result<f64> {
    Ok(sectional_curvature(lambda, &shape.tangents[0], &shape.tangents[1])? + gaussian_curvature(shape)?)
}

/// `H − g_λ(ν, V(p))`.
pub fn translator_residual(lambda: MetricParam, shape: &ShapeData, field: &KillingField, p: Point) -> f64 {
    let v = field.coeffs_at(p);
    shape.h - metric_coeffs(lambda, shape.normal.coeffs(), v)
}

/// Residual for the unit vertical field `λ^{-1/2} Z`.
pub fn vertical_residual(lambda: MetricParam, shape: &ShapeData) -> f64 {
    translator_residual(lambda, shape, &KillingField::vertical(lambda), shape.normal.base)
}

/// `g_λ(ν, λ^{-1/2} Z)`; equal to ±1 exactly at characteristic points.
pub fn vertical_alignment(lambda: MetricParam, shape: &ShapeData) -> f64 {
    lambda.sqrt() * shape.normal.cz
}

/// A graph point is characteristic when its tangent plane is horizontal.
pub fn graph_is_characteristic(jet: &GraphJet) -> bool {
    jet.alpha() == 0.0 && jet.beta() == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{group_mul, metric};

    fn lam(l: f64) -> MetricParam {
        MetricParam::new(l).unwrap()
    }

    fn check_invariants(lambda: MetricParam, s: &ShapeData) {
        let n = norm_of(lambda, &s.normal);
        assert!((n - 1.0).abs() < 1e-12, "normal norm {n}");
        for t in &s.tangents {
            assert!(metric(lambda, &s.normal, t).unwrap().abs() < 1e-12);
        }
        assert!(s.det_g() > 0.0);
        assert_eq!(s.a[0][1], s.a[1][0]);
    }

    fn norm_of(lambda: MetricParam, v: &FrameVector) -> f64 {
        crate::geometry::norm(lambda, v)
    }

    fn sample_graph(x: f64, y: f64) -> GraphJet {
        // u = sin(x) y² / 3 + x³/5 − xy
        GraphJet {
            x,
            y,
            u: x.sin() * y * y / 3.0 + x.powi(3) / 5.0 - x * y,
            u_x: x.cos() * y * y / 3.0 + 0.6 * x * x - y,
            u_y: 2.0 * x.sin() * y / 3.0 - x,
            u_xx: -x.sin() * y * y / 3.0 + 1.2 * x,
            u_xy: 2.0 * x.cos() * y / 3.0 - 1.0,
            u_yy: 2.0 * x.sin() / 3.0,
        }
    }

    #[test]
    fn horizontal_plane() {
        let l = lam(1.0);
        let s = graph_shape(l, &GraphJet::default());
        assert_eq!(s.h, 0.0);
        assert_eq!(s.normal.coeffs(), [0.0, 0.0, 1.0]);
        assert_eq!(s.g, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(vertical_residual(l, &s), -1.0);
        // det(A g^{-1}) at (1, 0): A12 = λ(λ/2)(β² − α²)/√(λW) with β = −1/2
        let l = lam(2.0);
        let jet = GraphJet { x: 1.0, ..Default::default() };
        let s = graph_shape(l, &jet);
        let w: f64 = 1.0 + 2.0 * 0.25;
        let a12 = 2.0 * 1.0 * 0.25 / (2.0 * w).sqrt();
        let expected = -a12 * a12 / (1.0 + 2.0 * 0.25);
        assert!((gaussian_curvature(&s).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn tilted_plane_is_minimal() {
        for l in [0.5, 1.0, 4.0] {
            for c in [0.0, 1.0, 2.0] {
                for (x, y) in [(0.3, -1.0), (2.0, 0.5), (-1.0, 3.0)] {
                    let jet = GraphJet {
                        x,
                        y,
                        u: 0.5 * x * y + c * x,
                        u_x: 0.5 * y + c,
                        u_y: 0.5 * x,
                        u_xy: 0.5,
                        ..Default::default()
                    };
                    assert_eq!(jet.alpha(), y + c);
                    assert_eq!(jet.beta(), 0.0);
                    assert!(graph_shape(lam(l), &jet).h.abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn graph_closed_form_matches_patch_route() {
        for l in [0.5, 1.0, 4.0, 30.0] {
            let lm = lam(l);
            for (x, y) in [(0.3, -1.0), (1.2, 0.5), (-0.7, 2.0)] {
                let jet = sample_graph(x, y);
                let closed = graph_shape(lm, &jet);
                let patch = patch_shape(lm, &jet.coord_jet().to_patch()).unwrap();
                check_invariants(lm, &closed);
                check_invariants(lm, &patch);
                // printed mean curvature formula
                let (al, be) = (jet.alpha(), jet.beta());
                let w = jet.w(lm);
                let h = l.sqrt() / w.powf(1.5)
                    * (jet.u_xx * (1.0 + l * be * be) + jet.u_yy * (1.0 + l * al * al)
                        - 2.0 * jet.u_xy * l * al * be);
                let tol = 1e-12 * (1.0 + h.abs());
                assert!((closed.h - h).abs() < tol, "{} vs {h}", closed.h);
                assert!((patch.h - h).abs() < tol, "{} vs {h}", patch.h);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((closed.a[i][j] - patch.a[i][j]).abs() < 1e-12 * (1.0 + l));
                        assert!((closed.g[i][j] - patch.g[i][j]).abs() < 1e-12 * (1.0 + l));
                    }
                }
                for k in 0..3 {
                    assert!((closed.normal.coeffs()[k] - patch.normal.coeffs()[k]).abs() < 1e-13 * (1.0 + l));
                }
                assert!((vertical_alignment(lm, &closed) - 1.0 / w.sqrt()).abs() < 1e-14);
                let gauss = patch_intrinsic_curvature(lm, &patch).unwrap();
                let direct = intrinsic_curvature(lm, &jet, &closed).unwrap();
                assert!((gauss - direct).abs() < 1e-10 * (1.0 + l * l));
            }
        }
    }

    #[test]
    fn vertical_plane_patch() {
        // (v1, 0, v2): V1 = X + 0·Z, V2 = Z
        let l = lam(3.0);
        let jet = CoordJet {
            point: Point::new(0.7, 0.0, -1.0),
            d: [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            dd: [[[0.0; 3]; 2]; 2],
        }
        .to_patch();
        assert_eq!(patch_covariant(l, &jet, 1, 1).coeffs(), [0.0; 3]);
        let s = patch_shape(l, &jet).unwrap();
        assert_eq!(s.h, 0.0);
        assert!(vertical_residual(l, &s).abs() < 1e-15);
    }

    #[test]
    fn covariant_derivative_is_symmetric_for_coordinate_fields() {
        // [V1, V2] = 0 for coordinate fields, so ∇_{V1}V2 = ∇_{V2}V1
        let l = lam(2.5);
        let map = |a: f64, b: f64| Point::new(a.cos() * b, a.sin() * b + a, a * b * b);
        let jet = CoordJet::from_map(map, 0.4, 1.3, 1e-3).to_patch();
        let d12 = patch_covariant(l, &jet, 0, 1).coeffs();
        let d21 = patch_covariant(l, &jet, 1, 0).coeffs();
        for k in 0..3 {
            assert!((d12[k] - d21[k]).abs() < 1e-6);
        }
    }

    fn helicoid_map(c: f64, gamma: impl Fn(f64) -> (f64, f64)) -> impl Fn(f64, f64) -> Point {
        move |v1, v2| {
            let (g1, g2) = gamma(v1);
            let (s, co) = v2.sin_cos();
            Point::new(co * g1 - s * g2, s * g1 + co * g2, c * v2)
        }
    }

    #[test]
    fn helicoid_second_vertical_derivative() {
        // ∇_{V2}V2 = (λ(2c − r²)/2 − 1)(xX + yY) for (e^{iv2}γ(v1), c v2)
        let l = 1.7;
        let c = 0.8;
        let gamma = |t: f64| (1.0 + 0.3 * t, 0.5 * t * t);
        let map = helicoid_map(c, gamma);
        let jet = CoordJet::from_map(&map, 0.6, 0.9, 1e-3).to_patch();
        let p = jet.point;
        let r2 = p.x * p.x + p.y * p.y;
        let f = 0.5 * l * (2.0 * c - r2) - 1.0;
        let got = patch_covariant(lam(l), &jet, 1, 1).coeffs();
        assert!((got[0] - f * p.x).abs() < 1e-8);
        assert!((got[1] - f * p.y).abs() < 1e-8);
        assert!(got[2].abs() < 1e-8);
    }

    #[test]
    fn isometry_invariance_of_mean_curvature() {
        let l = lam(1.3);
        let isos = [
            Isometry::HorizontalRotation(1.1),
            Isometry::LeftTranslation(Point::new(0.4, -2.0, 0.7)),
            Isometry::Composite(vec![
                Isometry::HorizontalRotation(-0.6),
                Isometry::LeftTranslation(Point::new(-1.5, 0.3, 2.0)),
            ]),
        ];
        for (iso, (x, y)) in isos.iter().flat_map(|i| [(i, (0.3, -1.0)), (i, (1.2, 0.5))]) {
            let jet = sample_graph(x, y);
            let h0 = graph_shape(l, &jet).h;
            let map = |a: f64, b: f64| {
                let g = sample_graph(a, b);
                iso.apply(g.point())
            };
            let fd = CoordJet::from_map(map, x, y, 1e-3);
            let h_fd = patch_shape(l, &fd.to_patch()).unwrap().h;
            let h_exact = patch_shape(l, &jet.coord_jet().pushforward(&iso).to_patch()).unwrap().h;
            assert!((h_fd - h0).abs() < 1e-8, "{h_fd} vs {h0}");
            assert!((h_exact - h0).abs() < 1e-12);
        }
    }

    #[test]
    fn left_translation_of_graph_point() {
        let q = Point::new(1.0, 2.0, 3.0);
        let p = Point::new(-0.5, 0.25, 1.0);
        let jet = CoordJet {
            point: p,
            d: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            dd: [[[0.0; 3]; 2]; 2],
        };
        assert_eq!(jet.pushforward(&Isometry::LeftTranslation(q)).point, group_mul(q, p));
    }

    #[test]
    fn characteristic_points() {
        let l = lam(2.0);
        let jet = GraphJet::default();
        assert!(graph_is_characteristic(&jet));
        assert_eq!(vertical_alignment(l, &graph_shape(l, &jet)), 1.0);
        let jet = GraphJet { y: 0.5, ..Default::default() };
        assert!(!graph_is_characteristic(&jet));
        assert!(vertical_alignment(l, &graph_shape(l, &jet)) < 1.0);
        // fallback path: horizontal tangent plane gives −3λ/4
        let k = intrinsic_curvature(l, &GraphJet::default(), &graph_shape(l, &GraphJet::default())).unwrap();
        assert_eq!(k, -1.5 + gaussian_curvature(&graph_shape(l, &GraphJet::default())).unwrap());
    }
}
