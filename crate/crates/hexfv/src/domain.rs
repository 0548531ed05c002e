//! Analytic test domains and their parametrisations.
//!
//! Every domain is the image of a parameter box under a smooth map. The third
//! parameter direction is transverse to the oblique-condition surface `Γ`,
//! which is the image of the `w2 = lo2` face of the box.

use crate::geometry::Vec3;

const U_LO: f64 = 3.0 * std::f64::consts::PI / 8.0;
const U_HI: f64 = 5.0 * std::f64::consts::PI / 8.0;
const V_LO: f64 = 0.0;
const V_HI: f64 = std::f64::consts::PI / 4.0;

/// The analytic computational domains used in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainId {
    /// Unit cube `[0,1]^3`, `Γ` = bottom face `z = 0`.
    Cube,
    /// Spherical box `r ∈ (1,2)`, `u ∈ (3π/8, 5π/8)`, `v ∈ (0, π/4)`,
    /// `Γ` = inner sphere `r = 1`.
    Tesseroid,
    /// Tesseroid whose radius is modulated by
    /// `1 + 0.04 (2 - r)(sin 10u + sin 10v)`, so the outer sphere is exact
    /// and `Γ` is a rough perturbed surface.
    PerturbedSphereSection,
}

impl DomainId {
    pub fn name(&self) -> &'static str {
        match self {
            DomainId::Cube => "cube",
            DomainId::Tesseroid => "tesseroid",
            DomainId::PerturbedSphereSection => "perturbed_sphere_section",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "cube" => Some(DomainId::Cube),
            "tesseroid" => Some(DomainId::Tesseroid),
            "perturbed_sphere_section" => Some(DomainId::PerturbedSphereSection),
            _ => None,
        }
    }

    /// Parameter box `[lo, hi]` per direction; direction 2 is transverse to
    /// `Γ` (the `lo` end lies on `Γ`).
    pub fn param_ranges(&self) -> [(f64, f64); 3] {
        match self {
            DomainId::Cube => [(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)],
            DomainId::Tesseroid | DomainId::PerturbedSphereSection => {
                [(U_LO, U_HI), (V_LO, V_HI), (1.0, 2.0)]
            }
        }
    }

    /// Maps parameter coordinates `(w0, w1, w2)` to a physical position.
    pub fn map(&self, w: Vec3) -> Vec3 {
        match self {
            DomainId::Cube => w,
            DomainId::Tesseroid => {
                let (u, v, r) = (w[0], w[1], w[2]);
                r * radial_dir(u, v)
            }
            DomainId::PerturbedSphereSection => {
                let (u, v, r) = (w[0], w[1], w[2]);
                let rho = r * (1.0 + 0.04 * (2.0 - r) * ((10.0 * u).sin() + (10.0 * v).sin()));
                rho * radial_dir(u, v)
            }
        }
    }

    /// Outward unit normal of the domain on `Γ`, evaluated at a position on
    /// `Γ`. For the curved domains the parameters are recovered from the
    /// radial direction of `x`, which the perturbation leaves unchanged.
    pub fn gamma_normal(&self, x: Vec3) -> Vec3 {
        match self {
            DomainId::Cube => Vec3::new(0.0, 0.0, -1.0),
            DomainId::Tesseroid => -x / x.norm(),
            DomainId::PerturbedSphereSection => {
                let d = x / x.norm();
                let u = d.z.clamp(-1.0, 1.0).acos();
                let v = d.y.atan2(d.x);
                let rho = 1.0 + 0.04 * ((10.0 * u).sin() + (10.0 * v).sin());
                let rho_u = 0.4 * (10.0 * u).cos();
                let rho_v = 0.4 * (10.0 * v).cos();
                let r_hat = radial_dir(u, v);
                let u_hat = Vec3::new(u.cos() * v.cos(), u.cos() * v.sin(), -u.sin());
                let v_hat = Vec3::new(-v.sin(), v.cos(), 0.0);
                // x_u × x_v for the surface ρ(u,v) r̂(u,v); it points radially
                // outward, away from the domain r > 1, hence the sign flip.
                let cross = rho * rho * u.sin() * r_hat
                    - rho_u * rho * u.sin() * u_hat
                    - rho * rho_v * v_hat;
                -cross / cross.norm()
            }
        }
    }
}

fn radial_dir(u: f64, v: f64) -> Vec3 {
    Vec3::new(u.sin() * v.cos(), u.sin() * v.sin(), u.cos())
}
