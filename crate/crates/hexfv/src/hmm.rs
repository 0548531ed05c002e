//! Hybrid mimetic mixed surface diffusion fluxes on `Γ`-faces.
//!
//! On each `Γ`-face `σ` with representative point `x_p` and edge unknowns
//! `φ_e`, the fluxes `F_{σ,e}(φ)` are defined by the local bilinear identity
//!
//! `Σ_e F_{σ,e}(φ)(ψ_p − ψ_e) = |σ| ∇_{Γ,σ}φ·∇_{Γ,σ}ψ
//!     + Σ_e (|e|/d⊥_pe) S_{p,e}(φ) S_{p,e}(ψ)`
//!
//! for all `ψ`, where `∇_{Γ,σ}φ = (1/|σ|) Σ_e |e| (φ_e − φ_p) n_{σ,e}` and
//! `S_{p,e}(φ) = φ_e − φ_p − ∇_{Γ,σ}φ·(x̄_e − x_p)` is the stabilisation
//! residual. Writing `δ_e = φ_e − φ_p`, the identity yields
//! `F_{σ,e}(φ) = Σ_{e'} A[e][e'](φ_p − φ_{e'})` with the symmetric positive
//! definite matrix `A = |σ| GᵀG + (I − DG)ᵀ diag(|e|/d⊥) (I − DG)`.

use nalgebra::{Matrix4, SMatrix};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mesh::Mesh;

/// Local flux operator of one `Γ`-face.
#[derive(Debug, Clone)]
pub struct HmmLocalOperator {
    pub face: usize,
    /// Global `Γ`-edge ids, in the face's local edge order.
    pub edges: [usize; 4],
    /// `F_{σ,e}(φ) = Σ_{e'} a[(e, e')] (φ_p − φ_{e'})`.
    pub a: Matrix4<f64>,
    /// Gradient reconstruction: `∇_{Γ,σ}φ = grad · (φ_e − φ_p)_e`.
    pub grad: SMatrix<f64, 3, 4>,
}

impl HmmLocalOperator {
    /// Fluxes through all four edges for given `φ_p` and edge values.
    pub fn fluxes(&self, phi_p: f64, phi_e: [f64; 4]) -> [f64; 4] {
        let mut f = [0.0; 4];
        for e in 0..4 {
            for ep in 0..4 {
                f[e] += self.a[(e, ep)] * (phi_p - phi_e[ep]);
            }
        }
        f
    }
}

/// Builds the local HMM operator of a `Γ`-face.
pub fn hmm_local_operator(mesh: &Mesh, sigma: usize) -> Result<HmmLocalOperator> {
    let face = &mesh.faces[sigma];
    let gd = face
        .gamma
        .as_ref()
        .expect("hmm_local_operator requires a Γ-face");
    let x_p = mesh.cells[face.p].x;
    let area = face.area;

    let mut grad = SMatrix::<f64, 3, 4>::zeros();
    let mut d = SMatrix::<f64, 4, 3>::zeros();
    let mut stab_w = [0.0f64; 4];
    for le in 0..4 {
        let e = &mesh.gamma_edges[gd.edges[le]];
        let n: Vec3 = gd.conormals[le];
        for r in 0..3 {
            grad[(r, le)] = e.length * n[r] / area;
            d[(le, r)] = (e.midpoint - x_p)[r];
        }
        if gd.d_perp[le] < 1e-14 {
            return Err(Error::PointOnEdgeLine {
                face: sigma,
                dist: gd.d_perp[le],
            });
        }
        stab_w[le] = e.length / gd.d_perp[le];
    }

    let s = Matrix4::identity() - d * grad;
    let mut a = grad.transpose() * grad * area;
    a += s.transpose() * Matrix4::from_diagonal(&stab_w.into()) * s;

    Ok(HmmLocalOperator {
        face: sigma,
        edges: gd.edges,
        a,
        grad,
    })
}
