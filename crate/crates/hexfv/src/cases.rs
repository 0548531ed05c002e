//! Manufactured test problems: exact solution, oblique fields, boundary data.
//!
//! The exact solution is `T̄(x) = 1/|x − x₀|` with `x₀ = (−0.3, −0.2, −0.1)`
//! outside every test domain, so `T̄` is smooth and harmonic on `Ω̄`. Note the
//! source formula is written as a reciprocal of a vector; the harmonic
//! fundamental-solution reading `1/|x − x₀|` is used here.
//!
//! The oblique condition `∇T·V = g` on `Γ` is normalized at construction:
//! dividing by `V·n` gives `V/(V·n) = n + W` with `W` tangential, and the
//! datum becomes `g = ∇T̄·(n + W)`.

use crate::domain::DomainId;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

const X0: Vec3 = Vec3::new(-0.3, -0.2, -0.1);

/// Exact solution `1/|x − x₀|`.
pub fn t_bar(x: Vec3) -> f64 {
    1.0 / (x - X0).norm()
}

/// Gradient of the exact solution, `−(x − x₀)/|x − x₀|³`.
pub fn grad_t_bar(x: Vec3) -> Vec3 {
    let d = x - X0;
    -d / d.norm().powi(3)
}

/// The built-in oblique vector fields, plus a pure-Neumann smoke field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObliqueField {
    /// `V = (−1, −1, −1)`.
    ConstantDiag,
    /// `V = (x, y, −1)`; on the flat `Γ` of the cube, `div_Γ W = 2`.
    LinearXY,
    /// `V = (−x, z, −1)`.
    LinearXZ,
    /// `V = (0.3, 0.2, 0.1) − x`.
    Radial,
    /// `V = (11.4301, 0, −1)`, about 85° away from the cube `Γ` normal.
    NearTangential,
    /// `V = n` (pure Neumann, `W = 0`).
    Normal,
}

impl ObliqueField {
    pub fn name(&self) -> &'static str {
        match self {
            ObliqueField::ConstantDiag => "constant",
            ObliqueField::LinearXY => "affine_xy",
            ObliqueField::LinearXZ => "affine_xz",
            ObliqueField::Radial => "radial",
            ObliqueField::NearTangential => "near_tangential",
            ObliqueField::Normal => "normal",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "constant" => Some(ObliqueField::ConstantDiag),
            "affine_xy" => Some(ObliqueField::LinearXY),
            "affine_xz" => Some(ObliqueField::LinearXZ),
            "radial" => Some(ObliqueField::Radial),
            "near_tangential" => Some(ObliqueField::NearTangential),
            "normal" => Some(ObliqueField::Normal),
            _ => None,
        }
    }

    pub fn all() -> [ObliqueField; 6] {
        [
            ObliqueField::ConstantDiag,
            ObliqueField::LinearXY,
            ObliqueField::LinearXZ,
            ObliqueField::Radial,
            ObliqueField::NearTangential,
            ObliqueField::Normal,
        ]
    }
}

/// A manufactured problem: a domain together with an oblique field.
#[derive(Debug, Clone)]
pub struct Case {
    pub domain: DomainId,
    pub field: ObliqueField,
    pub name: String,
}

impl Case {
    /// Builds the case, rejecting oblique fields that are tangential or
    /// inward somewhere on `Γ` (checked on a parameter sample of `Γ`).
    pub fn new(domain: DomainId, field: ObliqueField) -> Result<Case> {
        let case = Case {
            domain,
            field,
            name: format!("{}/{}", domain.name(), field.name()),
        };
        let ranges = domain.param_ranges();
        let n = 24;
        for a in 0..=n {
            for b in 0..=n {
                let w = Vec3::new(
                    ranges[0].0 + (ranges[0].1 - ranges[0].0) * a as f64 / n as f64,
                    ranges[1].0 + (ranges[1].1 - ranges[1].0) * b as f64 / n as f64,
                    ranges[2].0,
                );
                let x = domain.map(w);
                let vn = case.v(x).dot(&domain.gamma_normal(x));
                if vn <= 1e-8 {
                    return Err(Error::TangentialObliqueField {
                        vdotn: vn,
                        at: [x.x, x.y, x.z],
                    });
                }
            }
        }
        Ok(case)
    }

    /// The oblique field `V` at `x` (for `Normal`, meaningful on `Γ` only).
    pub fn v(&self, x: Vec3) -> Vec3 {
        match self.field {
            ObliqueField::ConstantDiag => Vec3::new(-1.0, -1.0, -1.0),
            ObliqueField::LinearXY => Vec3::new(x.x, x.y, -1.0),
            ObliqueField::LinearXZ => Vec3::new(-x.x, x.z, -1.0),
            ObliqueField::Radial => Vec3::new(0.3, 0.2, 0.1) - x,
            ObliqueField::NearTangential => Vec3::new(11.4301, 0.0, -1.0),
            ObliqueField::Normal => self.domain.gamma_normal(x),
        }
    }

    /// Tangential part `W = V/(V·n) − n` at `x ∈ Γ`.
    pub fn w(&self, x: Vec3) -> Vec3 {
        let n = self.domain.gamma_normal(x);
        self.v(x) / self.v(x).dot(&n) - n
    }

    /// Normalized oblique datum `g = ∇T̄·(n + W)` at `x ∈ Γ`.
    pub fn g(&self, x: Vec3) -> f64 {
        let n = self.domain.gamma_normal(x);
        grad_t_bar(x).dot(&(n + self.w(x)))
    }

    /// Dirichlet data on `∂Ω ∖ Γ`.
    pub fn dirichlet(&self, x: Vec3) -> f64 {
        t_bar(x)
    }
}

/// The built-in experiment cases plus a pure-Neumann smoke case on the cube.
pub fn builtin_cases() -> Vec<Case> {
    [
        (DomainId::Cube, ObliqueField::ConstantDiag),
        (DomainId::Cube, ObliqueField::LinearXY),
        (DomainId::Cube, ObliqueField::LinearXZ),
        (DomainId::Cube, ObliqueField::NearTangential),
        (DomainId::Cube, ObliqueField::Normal),
        (DomainId::Tesseroid, ObliqueField::Radial),
        (DomainId::PerturbedSphereSection, ObliqueField::Radial),
    ]
    .into_iter()
    .map(|(d, f)| Case::new(d, f).expect("builtin cases are valid"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_solution_value_and_gradient() {
        let x = Vec3::new(0.5, 0.5, 0.5);
        // |x - x0| = |(0.8, 0.7, 0.6)|.
        let r = (0.64f64 + 0.49 + 0.36).sqrt();
        assert_relative_eq!(t_bar(x), 1.0 / r, max_relative = 1e-14);
        // Finite-difference check of the gradient.
        let eps = 1e-6;
        for d in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[d] += eps;
            xm[d] -= eps;
            let fd = (t_bar(xp) - t_bar(xm)) / (2.0 * eps);
            assert_relative_eq!(grad_t_bar(x)[d], fd, max_relative = 1e-8);
        }
    }

    #[test]
    fn constant_field_on_cube_normalizes_to_expected_w() {
        let c = Case::new(DomainId::Cube, ObliqueField::ConstantDiag).unwrap();
        let x = Vec3::new(0.4, 0.7, 0.0);
        // n = (0,0,-1), V·n = 1, W = V - n = (-1,-1,0).
        let w = c.w(x);
        assert_relative_eq!(w.x, -1.0, max_relative = 1e-14);
        assert_relative_eq!(w.y, -1.0, max_relative = 1e-14);
        assert_relative_eq!(w.z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn w_is_tangential_and_g_consistent_on_all_builtins() {
        for c in builtin_cases() {
            let ranges = c.domain.param_ranges();
            for a in 1..6 {
                for b in 1..6 {
                    let w = Vec3::new(
                        ranges[0].0 + (ranges[0].1 - ranges[0].0) * a as f64 / 6.0,
                        ranges[1].0 + (ranges[1].1 - ranges[1].0) * b as f64 / 6.0,
                        ranges[2].0,
                    );
                    let x = c.domain.map(w);
                    let n = c.domain.gamma_normal(x);
                    assert!(c.w(x).dot(&n).abs() < 1e-10, "case {}", c.name);
                    let lhs = grad_t_bar(x).dot(&(n + c.w(x)));
                    assert_relative_eq!(lhs, c.g(x), epsilon = 1e-12);
                    // The normalization preserves the original condition.
                    let v = c.v(x);
                    assert_relative_eq!(
                        grad_t_bar(x).dot(&v),
                        c.g(x) * v.dot(&n),
                        max_relative = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn normal_field_has_zero_w() {
        let c = Case::new(DomainId::Tesseroid, ObliqueField::Normal).unwrap();
        let x = c.domain.map(Vec3::new(1.5, 0.4, 1.0));
        assert!(c.w(x).norm() < 1e-14);
    }

    #[test]
    fn tangential_fields_are_rejected() {
        // On the tesseroid Γ (inner sphere, n = -x/|x|), the near-tangential
        // cube field has V·n < 0 somewhere.
        assert!(matches!(
            Case::new(DomainId::Tesseroid, ObliqueField::NearTangential),
            Err(Error::TangentialObliqueField { .. })
        ));
    }
}
