//! Small geometric primitives: bilinear patches, quadrature, distances.

use nalgebra::{Matrix3, Vector3};

pub type Vec3 = Vector3<f64>;

/// Abscissae of the 2-point Gauss rule on [0, 1].
pub const GAUSS2: [f64; 2] = [
    0.5 - 0.288_675_134_594_812_87,
    0.5 + 0.288_675_134_594_812_87,
];

/// A bilinear quadrilateral patch through four corners.
///
/// The parametrisation is `x(u, v) = (1-u)(1-v) c00 + u(1-v) c10 + uv c11 +
/// (1-u)v c01` over the unit square, the minimal interpolant of four points.
#[derive(Debug, Clone, Copy)]
pub struct BilinearPatch {
    pub c00: Vec3,
    pub c10: Vec3,
    pub c11: Vec3,
    pub c01: Vec3,
}

impl BilinearPatch {
    pub fn new(c00: Vec3, c10: Vec3, c11: Vec3, c01: Vec3) -> Self {
        Self { c00, c10, c11, c01 }
    }

    pub fn point(&self, u: f64, v: f64) -> Vec3 {
        self.c00 * ((1.0 - u) * (1.0 - v))
            + self.c10 * (u * (1.0 - v))
            + self.c11 * (u * v)
            + self.c01 * ((1.0 - u) * v)
    }

    fn tangents(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        let xu = (self.c10 - self.c00) * (1.0 - v) + (self.c11 - self.c01) * v;
        let xv = (self.c01 - self.c00) * (1.0 - u) + (self.c11 - self.c10) * u;
        (xu, xv)
    }

    /// Surface area by 2x2 tensor Gauss quadrature (exact for planar quads).
    pub fn area(&self) -> f64 {
        let mut a = 0.0;
        for &u in &GAUSS2 {
            for &v in &GAUSS2 {
                let (xu, xv) = self.tangents(u, v);
                a += 0.25 * xu.cross(&xv).norm();
            }
        }
        a
    }

    /// Integral of the pointwise normal over the patch, which for the corner
    /// ordering `c00, c10, c11, c01` equals half the cross product of the
    /// diagonals.
    pub fn averaged_normal(&self) -> Vec3 {
        0.5 * (self.c11 - self.c00).cross(&(self.c01 - self.c10))
    }

    /// Integral of a scalar field over the patch, 2x2 Gauss.
    pub fn integrate(&self, f: &dyn Fn(Vec3) -> f64) -> f64 {
        let mut s = 0.0;
        for &u in &GAUSS2 {
            for &v in &GAUSS2 {
                let (xu, xv) = self.tangents(u, v);
                s += 0.25 * xu.cross(&xv).norm() * f(self.point(u, v));
            }
        }
        s
    }

    /// Integral of `x·n` over the patch, 2x2 Gauss (exact: degree (2,2)).
    pub fn integrate_x_dot_n(&self) -> f64 {
        let mut s = 0.0;
        for &u in &GAUSS2 {
            for &v in &GAUSS2 {
                let (xu, xv) = self.tangents(u, v);
                s += 0.25 * xu.cross(&xv).dot(&self.point(u, v));
            }
        }
        s
    }

    pub fn centroid_of_corners(&self) -> Vec3 {
        (self.c00 + self.c10 + self.c11 + self.c01) * 0.25
    }
}

/// Integral of a scalar along the straight segment `[a, b]`, 2-point Gauss.
pub fn integrate_segment(a: Vec3, b: Vec3, f: &dyn Fn(Vec3) -> f64) -> f64 {
    let len = (b - a).norm();
    GAUSS2
        .iter()
        .map(|&t| 0.5 * len * f(a + (b - a) * t))
        .sum()
}

/// Orthogonal distance from `x` to the line through `a` and `b`.
pub fn point_line_distance(x: Vec3, a: Vec3, b: Vec3) -> f64 {
    let d = b - a;
    let n = d.norm();
    if n == 0.0 {
        return (x - a).norm();
    }
    (x - a).cross(&d).norm() / n
}

/// Orthogonal distance from `x` to the plane through `origin` with unit
/// normal `n`.
pub fn point_plane_distance(x: Vec3, origin: Vec3, n: Vec3) -> f64 {
    (x - origin).dot(&n).abs()
}

/// Solves the 3x3 system `[b0 b1 b2] a = rhs` for the coordinates of `rhs`
/// in the (not necessarily orthogonal) basis; returns the coordinates and the
/// determinant of the basis matrix.
pub fn decompose_in_basis(b0: Vec3, b1: Vec3, b2: Vec3, rhs: Vec3) -> Option<(Vec3, f64)> {
    let m = Matrix3::from_columns(&[b0, b1, b2]);
    let det = m.determinant();
    m.lu().solve(&rhs).map(|a| (a, det))
}
