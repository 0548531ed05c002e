//! Global system assembly for the three schemes, and the variational probe.

use crate::cases::Case;
use crate::error::Result;
use crate::field::{DiscreteField, DofMap};
use crate::flux::{
    advective_bracket, inner_flux_stencil, splitting_boundary_stencil, surface_div_bracket,
    upwind_boundary_stencil,
};
use crate::geometry::{integrate_segment, Vec3};
use crate::hmm::hmm_local_operator;
use crate::mesh::{FaceKind, Mesh};
use crate::solver::{bicgstab, solve_dense, CsrMatrix, SolveStats};
use crate::stencil::LinearStencil;

/// Problem data consumed by assembly: the oblique field and boundary data.
/// `Case` supplies the manufactured problems; tests may supply synthetic ones.
pub trait ProblemData {
    /// Oblique field `V` (used by the splitting scheme).
    fn v(&self, x: Vec3) -> Vec3;
    /// Tangential advection field `W` on `Γ`.
    fn w(&self, x: Vec3) -> Vec3;
    /// Normalized oblique datum `g` on `Γ`.
    fn g(&self, x: Vec3) -> f64;
    /// Dirichlet datum on `∂Ω ∖ Γ` (also evaluated at `∂Γ` and corner data
    /// points of the vertex averaging blocks).
    fn dirichlet(&self, x: Vec3) -> f64;
}

impl ProblemData for Case {
    fn v(&self, x: Vec3) -> Vec3 {
        Case::v(self, x)
    }
    fn w(&self, x: Vec3) -> Vec3 {
        Case::w(self, x)
    }
    fn g(&self, x: Vec3) -> f64 {
        Case::g(self, x)
    }
    fn dirichlet(&self, x: Vec3) -> f64 {
        Case::dirichlet(self, x)
    }
}

/// The three discretizations of the oblique boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Centred advection with edge unknowns and `R h_Γ` stabilization.
    Central,
    /// Upwinded advection, cell unknowns only.
    Upwind,
    /// Normal flux reconstructed from the oblique datum, cell unknowns only.
    Splitting,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Central => "central",
            Scheme::Upwind => "upwind",
            Scheme::Splitting => "splitting",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "central" => Some(Scheme::Central),
            "upwind" => Some(Scheme::Upwind),
            "splitting" => Some(Scheme::Splitting),
            _ => None,
        }
    }

    pub fn has_edge_unknowns(&self) -> bool {
        matches!(self, Scheme::Central)
    }
}

/// An assembled sparse system.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dofs: DofMap,
    pub scheme: Scheme,
    pub r: f64,
    pub h_gamma: f64,
}

/// Average of the Dirichlet datum along a `Γ`-edge (2-point Gauss).
pub fn edge_data(mesh: &Mesh, prob: &dyn ProblemData, eid: usize) -> f64 {
    let e = &mesh.gamma_edges[eid];
    integrate_segment(e.a, e.b, &|x| prob.dirichlet(x)) / e.length
}

/// Default stabilization parameter: `max(1, ‖W‖_∞)` sampled at the `Γ`-edge
/// quadrature points.
pub fn default_r(mesh: &Mesh, prob: &dyn ProblemData) -> f64 {
    let mut wmax = 0.0f64;
    for e in &mesh.gamma_edges {
        for &t in &crate::geometry::GAUSS2 {
            let x = e.a + (e.b - e.a) * t;
            wmax = wmax.max(prob.w(x).norm());
        }
    }
    wmax.max(1.0)
}

fn rows_to_system(
    rows: Vec<LinearStencil>,
    rhs_raw: Vec<f64>,
    dofs: DofMap,
    scheme: Scheme,
    r: f64,
    h_gamma: f64,
) -> LinearSystem {
    let mut rhs = Vec::with_capacity(rows.len());
    let mut mat_rows = Vec::with_capacity(rows.len());
    for (row, b) in rows.into_iter().zip(rhs_raw) {
        rhs.push(b - row.constant);
        mat_rows.push(row.terms().to_vec());
    }
    LinearSystem {
        matrix: CsrMatrix::from_rows(mat_rows),
        rhs,
        dofs,
        scheme,
        r,
        h_gamma,
    }
}

fn add_inner_fluxes(mesh: &Mesh, prob: &dyn ProblemData, rows: &mut [LinearStencil]) {
    let data = |x| prob.dirichlet(x);
    for (fid, f) in mesh.faces.iter().enumerate() {
        if f.is_gamma() {
            continue;
        }
        let s = inner_flux_stencil(mesh, fid, &data);
        rows[f.p].add_scaled(&s, 1.0);
        if let FaceKind::Interior { q } = f.kind {
            rows[q].add_scaled(&s, -1.0);
        }
    }
}

/// Centred stabilized scheme: cell balances with edge unknowns, plus edge
/// conservativity rows. Edge rows are scaled by `−R h_Γ` so that the matrix
/// is exactly the representation of the scheme's bilinear form.
pub fn assemble_central(mesh: &Mesh, prob: &dyn ProblemData, r: f64) -> Result<LinearSystem> {
    if r <= 0.0 {
        return Err(crate::error::Error::NonPositiveR(r));
    }
    let dofs = DofMap::with_edges(mesh);
    let mut rows = vec![LinearStencil::new(); dofs.total()];
    let mut rhs = vec![0.0; dofs.total()];
    add_inner_fluxes(mesh, prob, &mut rows);

    let scale = r * mesh.h_gamma;
    let w = |x| prob.w(x);
    for &fid in &mesh.gamma_faces {
        let f = &mesh.faces[fid];
        let gd = f.gamma.as_ref().unwrap();
        let p = f.p;

        // Each edge term lands on a dof or, across ∂Γ, on the constant.
        let edge_slot = |row: &mut LinearStencil, le: usize, coeff: f64| {
            let eid = gd.edges[le];
            match mesh.gamma_edges[eid].interior_rank {
                Some(rank) => row.add(dofs.edge(rank), coeff),
                None => row.add_constant(coeff * edge_data(mesh, prob, eid)),
            }
        };

        for le in 0..4 {
            let b = advective_bracket(mesh, fid, le, &w);
            edge_slot(&mut rows[p], le, b);
        }
        let div = surface_div_bracket(mesh, fid, &w);
        rows[p].add(p, -div);

        let op = hmm_local_operator(mesh, fid)?;
        for le in 0..4 {
            for lep in 0..4 {
                let a = op.a[(le, lep)];
                // Stabilization in the cell balance: R h_Γ Σ_e F_{σ,e}(T).
                rows[p].add(p, scale * a);
                edge_slot(&mut rows[p], lep, -scale * a);
                // Conservativity row of interior edge le: F_{σ,e} + F_{τ,e} = 0.
                if let Some(rank) = mesh.gamma_edges[gd.edges[le]].interior_rank {
                    let row = dofs.edge(rank);
                    let mut part = LinearStencil::new();
                    part.add(p, -scale * a);
                    edge_slot(&mut part, lep, scale * a);
                    rows[row].add_scaled(&part, 1.0);
                }
            }
        }
        rhs[p] += f.patch(mesh).integrate(&|x| prob.g(x));
    }
    Ok(rows_to_system(rows, rhs, dofs, Scheme::Central, r, mesh.h_gamma))
}

/// Upwind scheme: cell unknowns only, upwinded boundary advection.
pub fn assemble_upwind(mesh: &Mesh, prob: &dyn ProblemData) -> Result<LinearSystem> {
    let dofs = DofMap::cells_only(mesh);
    let mut rows = vec![LinearStencil::new(); dofs.total()];
    let mut rhs = vec![0.0; dofs.total()];
    add_inner_fluxes(mesh, prob, &mut rows);
    let w = |x| prob.w(x);
    let data = |x| prob.dirichlet(x);
    for &fid in &mesh.gamma_faces {
        let f = &mesh.faces[fid];
        for le in 0..4 {
            let s = upwind_boundary_stencil(mesh, fid, le, &w, &data);
            rows[f.p].add_scaled(&s, 1.0);
        }
        rows[f.p].add(f.p, -surface_div_bracket(mesh, fid, &w));
        rhs[f.p] += f.patch(mesh).integrate(&|x| prob.g(x));
    }
    Ok(rows_to_system(rows, rhs, dofs, Scheme::Upwind, default_r(mesh, prob), mesh.h_gamma))
}

/// Splitting scheme: the `Γ`-face normal flux is reconstructed from the
/// oblique datum; cell unknowns only.
pub fn assemble_splitting(mesh: &Mesh, prob: &dyn ProblemData) -> Result<LinearSystem> {
    let dofs = DofMap::cells_only(mesh);
    let mut rows = vec![LinearStencil::new(); dofs.total()];
    let rhs = vec![0.0; dofs.total()];
    add_inner_fluxes(mesh, prob, &mut rows);
    let v = |x| prob.v(x);
    let g = |x| prob.g(x);
    let data = |x| prob.dirichlet(x);
    for &fid in &mesh.gamma_faces {
        let s = splitting_boundary_stencil(mesh, fid, &v, &g, &data)?;
        rows[mesh.faces[fid].p].add_scaled(&s, 1.0);
    }
    Ok(rows_to_system(rows, rhs, dofs, Scheme::Splitting, default_r(mesh, prob), mesh.h_gamma))
}

/// Dispatches on the scheme; `r` defaults to [`default_r`] for the centred
/// scheme and is ignored by the others.
pub fn assemble(
    mesh: &Mesh,
    prob: &dyn ProblemData,
    scheme: Scheme,
    r: Option<f64>,
) -> Result<LinearSystem> {
    match scheme {
        Scheme::Central => assemble_central(mesh, prob, r.unwrap_or_else(|| default_r(mesh, prob))),
        Scheme::Upwind => assemble_upwind(mesh, prob),
        Scheme::Splitting => assemble_splitting(mesh, prob),
    }
}

/// Fills the data slots of a field: Dirichlet face values and `∂Γ`-edge
/// averages.
pub fn populate_data(mesh: &Mesh, prob: &dyn ProblemData, field: &mut DiscreteField) {
    for (fid, f) in mesh.faces.iter().enumerate() {
        if let FaceKind::Dirichlet { x_q } = f.kind {
            field.face_data[fid] = prob.dirichlet(x_q);
        }
    }
    for (eid, e) in mesh.gamma_edges.iter().enumerate() {
        if !e.is_interior() {
            field.edges[eid] = edge_data(mesh, prob, eid);
        }
    }
}

/// Solves the system with BiCGStab and returns the discrete field with data
/// slots populated.
pub fn solve(
    mesh: &Mesh,
    prob: &dyn ProblemData,
    system: &LinearSystem,
    tol: f64,
    max_iter: usize,
) -> Result<(DiscreteField, SolveStats)> {
    let (x, stats) = bicgstab(&system.matrix, &system.rhs, tol, max_iter)?;
    let mut field = DiscreteField::zeros(mesh);
    populate_data(mesh, prob, &mut field);
    field.set_unknowns(mesh, &system.dofs, &x);
    Ok((field, stats))
}

/// Dense LU verification solve (small systems only).
pub fn solve_dense_oracle(
    mesh: &Mesh,
    prob: &dyn ProblemData,
    system: &LinearSystem,
) -> Result<DiscreteField> {
    let x = solve_dense(&system.matrix, &system.rhs)?;
    let mut field = DiscreteField::zeros(mesh);
    populate_data(mesh, prob, &mut field);
    field.set_unknowns(mesh, &system.dofs, &x);
    Ok(field)
}

/// Evaluates the centred scheme's bilinear form `a_h(φ, ψ)`.
///
/// `φ`'s fluxes are built with `phi_data` supplying its Dirichlet-point
/// values (zero for test fields, the case data for solved/interpolated
/// fields); `ψ` is read slot-wise from its field, with `ψ_q` at Dirichlet
/// faces and `ψ_e` at `∂Γ`-edges taken from its data slots.
pub fn bilinear_probe(
    mesh: &Mesh,
    prob: &dyn ProblemData,
    r: f64,
    phi: &DiscreteField,
    phi_data: &dyn Fn(Vec3) -> f64,
    psi: &DiscreteField,
) -> f64 {
    let mut acc = 0.0;
    for (fid, f) in mesh.faces.iter().enumerate() {
        if f.is_gamma() {
            continue;
        }
        let flux = inner_flux_stencil(mesh, fid, phi_data).apply(&phi.cells);
        let psi_q = match f.kind {
            FaceKind::Interior { q } => psi.cells[q],
            _ => psi.face_data[fid],
        };
        acc += flux * (psi.cells[f.p] - psi_q);
    }
    let w = |x| prob.w(x);
    for &fid in &mesh.gamma_faces {
        let f = &mesh.faces[fid];
        let gd = f.gamma.as_ref().unwrap();
        let p = f.p;
        for le in 0..4 {
            let eid = gd.edges[le];
            let b = advective_bracket(mesh, fid, le, &w);
            acc += b * phi.edges[eid] * (psi.cells[p] - psi.edges[eid]);
        }
        acc -= surface_div_bracket(mesh, fid, &w) * phi.cells[p] * psi.cells[p];
        let op = hmm_local_operator(mesh, fid).expect("valid Γ-face");
        let phi_e: [f64; 4] = std::array::from_fn(|le| phi.edges[gd.edges[le]]);
        let fluxes = op.fluxes(phi.cells[p], phi_e);
        for le in 0..4 {
            acc += r * mesh.h_gamma * fluxes[le] * (psi.cells[p] - psi.edges[gd.edges[le]]);
        }
    }
    acc
}

/// Load functional `ℓ_h(ψ) = Σ_σ (∫_σ g) ψ_p` over `Γ`-faces.
pub fn ell_h(mesh: &Mesh, prob: &dyn ProblemData, psi: &DiscreteField) -> f64 {
    mesh.gamma_faces
        .iter()
        .map(|&fid| {
            let f = &mesh.faces[fid];
            f.patch(mesh).integrate(&|x| prob.g(x)) * psi.cells[f.p]
        })
        .sum()
}
