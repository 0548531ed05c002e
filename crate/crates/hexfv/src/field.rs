//! Degrees of freedom and discrete fields over a mesh.

use crate::mesh::Mesh;

/// Bijection between unknowns and mesh entities: one dof per control volume,
/// plus (for the centred stabilized scheme) one per interior `Γ`-edge.
/// Dirichlet faces and `∂Γ`-edges are data, never dofs.
#[derive(Debug, Clone, Copy)]
pub struct DofMap {
    pub n_cells: usize,
    pub n_edges: usize,
}

impl DofMap {
    /// Cells plus interior `Γ`-edge unknowns.
    pub fn with_edges(mesh: &Mesh) -> Self {
        Self {
            n_cells: mesh.n_cells(),
            n_edges: mesh.n_edge_unknowns,
        }
    }

    /// Cells only (upwind and splitting schemes).
    pub fn cells_only(mesh: &Mesh) -> Self {
        Self {
            n_cells: mesh.n_cells(),
            n_edges: 0,
        }
    }

    pub fn total(&self) -> usize {
        self.n_cells + self.n_edges
    }

    pub fn cell(&self, c: usize) -> usize {
        debug_assert!(c < self.n_cells);
        c
    }

    pub fn edge(&self, interior_rank: usize) -> usize {
        debug_assert!(interior_rank < self.n_edges);
        self.n_cells + interior_rank
    }
}

/// Values attached to every slot of the discrete space: one per cell, one per
/// `Γ`-edge (data on `∂Γ`), and one per Dirichlet face (always data).
#[derive(Debug, Clone)]
pub struct DiscreteField {
    pub cells: Vec<f64>,
    pub edges: Vec<f64>,
    /// Indexed by global face id; meaningful only at Dirichlet faces.
    pub face_data: Vec<f64>,
}

impl DiscreteField {
    pub fn zeros(mesh: &Mesh) -> Self {
        Self {
            cells: vec![0.0; mesh.n_cells()],
            edges: vec![0.0; mesh.gamma_edges.len()],
            face_data: vec![0.0; mesh.faces.len()],
        }
    }

    /// Slot-wise difference `self - other`.
    pub fn sub(&self, other: &DiscreteField) -> DiscreteField {
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        DiscreteField {
            cells: zip(&self.cells, &other.cells),
            edges: zip(&self.edges, &other.edges),
            face_data: zip(&self.face_data, &other.face_data),
        }
    }

    /// Copies cell and interior-edge unknowns out of a raw solution vector,
    /// leaving data slots untouched.
    pub fn set_unknowns(&mut self, mesh: &Mesh, dofs: &DofMap, x: &[f64]) {
        self.cells.copy_from_slice(&x[..dofs.n_cells]);
        if dofs.n_edges > 0 {
            for (eid, e) in mesh.gamma_edges.iter().enumerate() {
                if let Some(r) = e.interior_rank {
                    self.edges[eid] = x[dofs.edge(r)];
                }
            }
        }
    }
}
