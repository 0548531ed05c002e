//! Interpolation, discrete norms, error reports, and convergence rates.

use crate::assemble::Scheme;
use crate::cases::{t_bar, Case};
use crate::field::DiscreteField;
use crate::geometry::{integrate_segment, Vec3};
use crate::mesh::{FaceKind, Mesh};
use crate::solver::SolveStats;

/// Interpolant of the exact solution: point values at representative and
/// Dirichlet points, 2-point Gauss averages on `Γ`-edges.
pub fn interpolate(mesh: &Mesh, _case: &Case) -> DiscreteField {
    interpolate_fn(mesh, &t_bar)
}

/// Interpolant of an arbitrary function.
pub fn interpolate_fn(mesh: &Mesh, f: &dyn Fn(Vec3) -> f64) -> DiscreteField {
    let mut field = DiscreteField::zeros(mesh);
    for (ci, c) in mesh.cells.iter().enumerate() {
        field.cells[ci] = f(c.x);
    }
    for (eid, e) in mesh.gamma_edges.iter().enumerate() {
        field.edges[eid] = integrate_segment(e.a, e.b, f) / e.length;
    }
    for (fid, face) in mesh.faces.iter().enumerate() {
        if let FaceKind::Dirichlet { x_q } = face.kind {
            field.face_data[fid] = f(x_q);
        }
    }
    field
}

/// All discrete seminorms and norms of a field.
#[derive(Debug, Clone, Copy)]
pub struct Seminorms {
    pub vh_omega: f64,
    pub vh_gamma: f64,
    pub vh: f64,
    pub l2_omega: f64,
    pub l2_gamma: f64,
}

/// Evaluates the seminorms:
/// `|φ|²_{V_h,Ω} = Σ_{σ∉F_Γ} (|σ|/d_pq)(φ_p − φ_q)²` (Dirichlet faces with
/// `φ_q` from the data slot), `|φ|²_{V_h,Γ} = Σ_σ Σ_e (|e|/d⊥)(φ_p − φ_e)²`,
/// `‖φ‖²_{V_h} = |φ|²_{V_h,Ω} + h_Γ|φ|²_{V_h,Γ}`, and piecewise-constant
/// `L²` norms over cells and `Γ`-faces.
pub fn seminorms(mesh: &Mesh, field: &DiscreteField) -> Seminorms {
    let mut vh_omega2 = 0.0;
    for (fid, f) in mesh.faces.iter().enumerate() {
        let phi_q = match f.kind {
            FaceKind::Interior { q } => field.cells[q],
            FaceKind::Dirichlet { .. } => field.face_data[fid],
            FaceKind::Gamma => continue,
        };
        let g = f.geom.as_ref().unwrap();
        let d = field.cells[f.p] - phi_q;
        vh_omega2 += f.area / g.d_pq * d * d;
    }
    let mut vh_gamma2 = 0.0;
    let mut l2_gamma2 = 0.0;
    for &fid in &mesh.gamma_faces {
        let f = &mesh.faces[fid];
        let gd = f.gamma.as_ref().unwrap();
        for le in 0..4 {
            let e = &mesh.gamma_edges[gd.edges[le]];
            let d = field.cells[f.p] - field.edges[gd.edges[le]];
            vh_gamma2 += e.length / gd.d_perp[le] * d * d;
        }
        l2_gamma2 += f.area * field.cells[f.p] * field.cells[f.p];
    }
    let l2_omega2: f64 = mesh
        .cells
        .iter()
        .zip(&field.cells)
        .map(|(c, &v)| c.volume * v * v)
        .sum();
    Seminorms {
        vh_omega: vh_omega2.sqrt(),
        vh_gamma: vh_gamma2.sqrt(),
        vh: (vh_omega2 + mesh.h_gamma * vh_gamma2).sqrt(),
        l2_omega: l2_omega2.sqrt(),
        l2_gamma: l2_gamma2.sqrt(),
    }
}

/// Error norms of a solve, against the interpolant of the exact solution.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub h: f64,
    pub h_gamma: f64,
    pub l2_omega: f64,
    pub l2_gamma: f64,
    /// `V_h` and `V_{h,Γ}` exist only for the centred scheme (edge unknowns).
    pub vh: Option<f64>,
    pub vh_gamma: Option<f64>,
    pub vh_omega: f64,
    pub n_cells: usize,
    pub n_edge_unknowns: usize,
    pub scheme: Scheme,
    pub r: f64,
    pub solver: Option<SolveStats>,
}

/// Builds the error report for a solved field. Both fields carry the same
/// data in their data slots, so differences vanish there and the seminorms
/// measure only the unknowns' error.
pub fn error_report(
    mesh: &Mesh,
    solved: &DiscreteField,
    case: &Case,
    scheme: Scheme,
    r: f64,
    solver: Option<SolveStats>,
) -> ErrorReport {
    let mut diff = solved.sub(&interpolate(mesh, case));
    if !scheme.has_edge_unknowns() {
        // No edge unknowns: surface norms are not defined for this scheme.
        diff.edges.iter_mut().for_each(|v| *v = 0.0);
    }
    let s = seminorms(mesh, &diff);
    ErrorReport {
        h: mesh.h,
        h_gamma: mesh.h_gamma,
        l2_omega: s.l2_omega,
        l2_gamma: s.l2_gamma,
        vh: scheme.has_edge_unknowns().then_some(s.vh),
        vh_gamma: scheme.has_edge_unknowns().then_some(s.vh_gamma),
        vh_omega: s.vh_omega,
        n_cells: mesh.n_cells(),
        n_edge_unknowns: mesh.n_edge_unknowns,
        scheme,
        r,
        solver,
    }
}

/// Experimental order of convergence between consecutive levels:
/// `rate_i = ln(e_i/e_{i+1}) / ln(h_i/h_{i+1})`.
pub fn eoc(levels: &[(f64, f64)]) -> Vec<f64> {
    levels
        .windows(2)
        .map(|w| ((w[0].1 / w[1].1).ln()) / ((w[0].0 / w[1].0).ln()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::ObliqueField;
    use crate::domain::DomainId;
    use crate::grid::generate_grid;
    use crate::mesh::build_mesh;
    use approx::assert_relative_eq;

    fn mesh(n: usize, amp: f64, seed: u64) -> Mesh {
        build_mesh(generate_grid(DomainId::Cube, (n, n, n), amp, seed).unwrap()).unwrap()
    }

    #[test]
    fn interpolant_point_value() {
        let m = mesh(3, 0.0, 0);
        let c = Case::new(DomainId::Cube, ObliqueField::ConstantDiag).unwrap();
        let i = interpolate(&m, &c);
        let p = m.cell_at((2, 2, 2)).unwrap();
        // x_p = (0.5, 0.5, 0.5): T̄ = 1/|(0.8, 0.7, 0.6)|.
        assert_relative_eq!(
            i.cells[p],
            1.0 / (0.64f64 + 0.49 + 0.36).sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(i.cells[p], 0.819_231_920_519_05, max_relative = 1e-12);
    }

    #[test]
    fn interpolant_edge_average_is_exact_for_affine() {
        let m = mesh(3, 0.15, 5);
        let cvec = Vec3::new(0.3, -0.8, 0.5);
        let f = |x: Vec3| cvec.dot(&x);
        let i = interpolate_fn(&m, &f);
        for (eid, e) in m.gamma_edges.iter().enumerate() {
            assert_relative_eq!(
                i.edges[eid],
                cvec.dot(&(0.5 * (e.a + e.b))),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn constant_field_has_zero_seminorms() {
        let m = mesh(3, 0.2, 2);
        let i = interpolate_fn(&m, &|_| 4.2);
        let s = seminorms(&m, &i);
        assert!(s.vh_omega < 1e-13 && s.vh_gamma < 1e-13 && s.vh < 1e-13);
        assert!(s.l2_omega > 0.0 && s.l2_gamma > 0.0);
    }

    #[test]
    fn single_jump_across_one_face() {
        let m = mesh(3, 0.0, 0);
        let mut field = interpolate_fn(&m, &|_| 0.0);
        let p = m.cell_at((2, 2, 2)).unwrap();
        field.cells[p] = 1.0;
        let s = seminorms(&m, &field);
        // Six faces of area h², distance h each see a unit jump.
        let expect = (6.0 * 0.25f64).sqrt();
        assert_relative_eq!(s.vh_omega, expect, max_relative = 1e-12);
    }

    #[test]
    fn norm_composition_identity() {
        let m = mesh(4, 0.2, 8);
        let i = interpolate_fn(&m, &|x| (3.0 * x.x).sin() + x.y * x.z);
        let s = seminorms(&m, &i);
        assert_relative_eq!(
            s.vh * s.vh,
            s.vh_omega * s.vh_omega + m.h_gamma * s.vh_gamma * s.vh_gamma,
            max_relative = 1e-12
        );
    }

    #[test]
    fn error_of_interpolant_against_itself_is_zero() {
        let m = mesh(3, 0.1, 1);
        let c = Case::new(DomainId::Cube, ObliqueField::ConstantDiag).unwrap();
        let i = interpolate(&m, &c);
        let rep = error_report(&m, &i, &c, Scheme::Central, 1.0, None);
        assert!(rep.l2_omega < 1e-14);
        assert!(rep.vh.unwrap() < 1e-13);
        assert!(rep.vh_omega < 1e-13);
    }

    #[test]
    fn eoc_of_model_sequences() {
        let r = eoc(&[(0.1, 1e-2), (0.05, 5e-3)]);
        assert_relative_eq!(r[0], 1.0, max_relative = 1e-12);
        let r = eoc(&[(0.1, 1e-2), (0.05, 2.5e-3)]);
        assert_relative_eq!(r[0], 2.0, max_relative = 1e-12);
        // A representative error pair with a known rate.
        let r = eoc(&[(3.660e-01, 9.412e-03), (1.685e-01, 3.922e-03)]);
        assert_relative_eq!(r[0], 1.128, max_relative = 1e-3);
    }
}
