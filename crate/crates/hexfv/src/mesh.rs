//! Generalized hexahedral meshes built from a grid of representative points.
//!
//! Every non-Dirichlet grid point owns a hexahedral control volume whose
//! vertices are arithmetic means of small blocks of neighbouring points:
//! blocks of 8 points in the interior, clamped to 4, 2 or 1 points near the
//! boundary so that the cells tile the domain exactly, boundary cells reach
//! the boundary, and the representative point of a `Γ` cell lies on its
//! `Γ`-face.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{point_line_distance, BilinearPatch, Vec3};
use crate::grid::{PointClass, RepresentativeGrid};

/// Threshold on the basis determinant below which a face is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// One participant of a vertex averaging block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexMember {
    /// Representative point of a control volume (a degree of freedom).
    Cell(usize),
    /// Dirichlet boundary data point at the given position.
    Data(Vec3),
}

/// Classification of a cell vertex for regularity bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    /// Averaging block of 8 control volumes.
    Interior,
    /// All members are `Γ`-cells; the vertex sits on (a chord of) `Γ`.
    Gamma,
    /// At least one member is a Dirichlet data point.
    Dirichlet,
}

/// A deduplicated cell corner: position plus its averaging block.
#[derive(Debug, Clone)]
pub struct Vertex {
    pub pos: Vec3,
    pub members: Vec<VertexMember>,
}

/// What lies on the far side of a face, seen from its owner cell `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceKind {
    /// Another control volume.
    Interior { q: usize },
    /// The Dirichlet boundary; `x_q` is the boundary data point.
    Dirichlet { x_q: Vec3 },
    /// The oblique-condition surface `Γ`.
    Gamma,
}

/// Transmissive geometry of a non-`Γ` face.
///
/// `s` points from `x_p` to `x_q`; `t_circ` and `t_sq` are the unit diagonal
/// directions of the face; `a` holds the coordinates of `ñ/|σ|` in the basis
/// `(s, t_circ, t_sq)` and `det` the basis determinant.
#[derive(Debug, Clone, Copy)]
pub struct FaceGeom {
    pub s: Vec3,
    pub t_circ: Vec3,
    pub t_sq: Vec3,
    pub d_pq: f64,
    pub d_circ: f64,
    pub d_sq: f64,
    pub a: [f64; 3],
    pub det: f64,
}

impl FaceGeom {
    /// Transmissibility-normalised coefficients `(β, α°, α□)` with
    /// `ñ/|σ| = (1/β) s − (α°/β) t° − (α□/β) t□`.
    pub fn beta_alpha(&self) -> (f64, f64, f64) {
        let beta = 1.0 / self.a[0];
        (beta, -self.a[1] * beta, -self.a[2] * beta)
    }
}

/// Surface data of a `Γ`-face: its four boundary edges with outward unit
/// conormals and the distances from the representative point to each edge
/// line.
#[derive(Debug, Clone)]
pub struct GammaFaceData {
    pub edges: [usize; 4],
    pub conormals: [Vec3; 4],
    pub d_perp: [f64; 4],
}

/// A quadrilateral face of a control volume.
///
/// The four vertices are cyclic and oriented so that the averaged normal
/// `ñ = ½ (w2 − w0) × (w3 − w1)` points out of the owner cell `p`. The
/// diagonal `(w0, w2)` is the `(⊖, ⊕)` pair and `(w1, w3)` the `(⊟, ⊞)` pair.
#[derive(Debug, Clone)]
pub struct Face {
    pub p: usize,
    pub kind: FaceKind,
    pub verts: [usize; 4],
    pub area: f64,
    pub ntilde: Vec3,
    pub centroid: Vec3,
    pub diameter: f64,
    pub geom: Option<FaceGeom>,
    pub gamma: Option<GammaFaceData>,
}

impl Face {
    pub fn is_gamma(&self) -> bool {
        matches!(self.kind, FaceKind::Gamma)
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self.kind, FaceKind::Dirichlet { .. })
    }

    /// Bilinear patch through the face corners, oriented with `ñ`.
    pub fn patch(&self, mesh: &Mesh) -> BilinearPatch {
        let [a, b, c, d] = self.verts;
        BilinearPatch::new(
            mesh.vertices[a].pos,
            mesh.vertices[b].pos,
            mesh.vertices[c].pos,
            mesh.vertices[d].pos,
        )
    }

    /// Unit normal in the direction of the averaged normal.
    pub fn unit_normal(&self) -> Vec3 {
        self.ntilde / self.ntilde.norm()
    }
}

/// A straight edge of a `Γ`-face.
#[derive(Debug, Clone)]
pub struct GammaEdge {
    pub a: Vec3,
    pub b: Vec3,
    pub length: f64,
    pub midpoint: Vec3,
    /// Adjacent `Γ`-faces; two for interior edges, one on `∂Γ`.
    pub faces: Vec<usize>,
    /// Rank among interior edges (an edge unknown), `None` on `∂Γ`.
    pub interior_rank: Option<usize>,
}

impl GammaEdge {
    pub fn is_interior(&self) -> bool {
        self.interior_rank.is_some()
    }
}

/// A hexahedral control volume. Corner `(ci, cj, ck) ∈ {0,1}³` is stored at
/// `verts[ci + 2 cj + 4 ck]`; `faces` holds `[-x, +x, -y, +y, -z, +z]`.
#[derive(Debug, Clone)]
pub struct Cell {
    pub ijk: (usize, usize, usize),
    pub x: Vec3,
    pub verts: [usize; 8],
    pub faces: [usize; 6],
    pub volume: f64,
    pub diameter: f64,
    pub is_gamma: bool,
}

/// The full mesh: control volumes, faces, `Γ`-edges and shared vertices.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub grid: RepresentativeGrid,
    pub cells: Vec<Cell>,
    pub faces: Vec<Face>,
    pub vertices: Vec<Vertex>,
    pub gamma_edges: Vec<GammaEdge>,
    pub interior_faces: Vec<usize>,
    pub dirichlet_faces: Vec<usize>,
    pub gamma_faces: Vec<usize>,
    pub n_edge_unknowns: usize,
    /// Largest cell diameter.
    pub h: f64,
    /// Largest `Γ`-face diameter.
    pub h_gamma: f64,
    cell_of_ijk: HashMap<(usize, usize, usize), usize>,
    pair_face: HashMap<(usize, usize), usize>,
}

impl Mesh {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_at(&self, ijk: (usize, usize, usize)) -> Option<usize> {
        self.cell_of_ijk.get(&ijk).copied()
    }

    /// Interior face between two cells, if they are face-adjacent.
    pub fn face_between(&self, a: usize, b: usize) -> Option<usize> {
        self.pair_face.get(&(a.min(b), a.max(b))).copied()
    }

    /// The cell on the other side of an interior face.
    pub fn face_other(&self, face: usize, cell: usize) -> Option<usize> {
        match self.faces[face].kind {
            FaceKind::Interior { q } => Some(if self.faces[face].p == cell { q } else { self.faces[face].p }),
            _ => None,
        }
    }

    /// Position of the value point opposite the owner: `x_q` for interior and
    /// Dirichlet faces, `None` for `Γ`-faces.
    pub fn opposite_point(&self, face: usize) -> Option<Vec3> {
        match self.faces[face].kind {
            FaceKind::Interior { q } => Some(self.cells[q].x),
            FaceKind::Dirichlet { x_q } => Some(x_q),
            FaceKind::Gamma => None,
        }
    }

    pub fn member_pos(&self, m: &VertexMember) -> Vec3 {
        match *m {
            VertexMember::Cell(c) => self.cells[c].x,
            VertexMember::Data(p) => p,
        }
    }

    pub fn vertex_class(&self, vid: usize) -> VertexClass {
        let mut all_gamma = true;
        for m in &self.vertices[vid].members {
            match *m {
                VertexMember::Data(_) => return VertexClass::Dirichlet,
                VertexMember::Cell(c) => all_gamma &= self.cells[c].is_gamma,
            }
        }
        if all_gamma {
            VertexClass::Gamma
        } else {
            VertexClass::Interior
        }
    }
}

/// Builds the control volume mesh over a grid of representative points.
pub fn build_mesh(grid: RepresentativeGrid) -> Result<Mesh> {
    let (ii, jj, kk) = grid.dims;
    let (ni, nj, nk) = grid.n();
    let max = [ni - 1, nj - 1, nk - 1];
    // Inclusive cell index ranges per direction; k = 0 is the Γ layer.
    let lo = [1usize, 1, 0];
    let hi = [ii, jj, kk];

    // Enumerate cells.
    let mut cell_of_ijk = HashMap::new();
    let mut cells: Vec<Cell> = Vec::new();
    for k in lo[2]..=hi[2] {
        for j in lo[1]..=hi[1] {
            for i in lo[0]..=hi[0] {
                let idx = cells.len();
                cell_of_ijk.insert((i, j, k), idx);
                cells.push(Cell {
                    ijk: (i, j, k),
                    x: grid.point(i, j, k),
                    verts: [usize::MAX; 8],
                    faces: [usize::MAX; 6],
                    volume: 0.0,
                    diameter: 0.0,
                    is_gamma: k == 0,
                });
            }
        }
    }

    // Build deduplicated vertices from per-direction averaging blocks.
    let mut vertex_ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut vertices: Vec<Vertex> = Vec::new();
    let block = |t: usize, m: isize, d: usize| -> Vec<usize> {
        let t2 = t as isize + m;
        if t2 < 0 || t2 > max[d] as isize {
            vec![t]
        } else if (t2 as usize) < lo[d] || t2 as usize > hi[d] {
            vec![t2 as usize]
        } else {
            vec![t, t2 as usize]
        }
    };
    for ci in 0..cells.len() {
        let (i, j, k) = cells[ci].ijk;
        for ck in 0..2usize {
            for cj in 0..2usize {
                for cci in 0..2usize {
                    let bx = block(i, 2 * cci as isize - 1, 0);
                    let by = block(j, 2 * cj as isize - 1, 1);
                    let bz = block(k, 2 * ck as isize - 1, 2);
                    let mut lins: Vec<usize> = Vec::with_capacity(8);
                    for &a in &bx {
                        for &b in &by {
                            for &c in &bz {
                                lins.push(grid.lin(a, b, c));
                            }
                        }
                    }
                    lins.sort_unstable();
                    let vid = *vertex_ids.entry(lins.clone()).or_insert_with(|| {
                        let mut pos = Vec3::zeros();
                        let mut members = Vec::with_capacity(lins.len());
                        for &a in &bx {
                            for &b in &by {
                                for &c in &bz {
                                    let p = grid.point(a, b, c);
                                    pos += p;
                                    members.push(match grid.class(a, b, c) {
                                        PointClass::Dirichlet => VertexMember::Data(p),
                                        _ => VertexMember::Cell(cell_of_ijk[&(a, b, c)]),
                                    });
                                }
                            }
                        }
                        pos /= members.len() as f64;
                        vertices.push(Vertex { pos, members });
                        vertices.len() - 1
                    });
                    cells[ci].verts[cci + 2 * cj + 4 * ck] = vid;
                }
            }
        }
    }

    // Cell diameters.
    let mut h = 0.0f64;
    for c in &mut cells {
        let mut d = 0.0f64;
        for a in 0..8 {
            for b in (a + 1)..8 {
                d = d.max((vertices[c.verts[a]].pos - vertices[c.verts[b]].pos).norm());
            }
        }
        c.diameter = d;
        h = h.max(d);
    }

    // Corner selections for the six face directions: for direction d and side
    // m the fixed corner bit is (m+1)/2; the remaining two bits run cyclically
    // so the four corners are a cyclic quadrilateral.
    let face_corners = |d: usize, side: usize| -> [usize; 4] {
        let cyc = [(0usize, 0usize), (1, 0), (1, 1), (0, 1)];
        cyc.map(|(a, b)| match d {
            0 => side + 2 * a + 4 * b,
            1 => a + 2 * side + 4 * b,
            _ => a + 2 * b + 4 * side,
        })
    };

    let mut faces: Vec<Face> = Vec::new();
    let mut interior_faces = Vec::new();
    let mut dirichlet_faces = Vec::new();
    let mut gamma_faces = Vec::new();
    let mut pair_face = HashMap::new();

    for ci in 0..cells.len() {
        let (i, j, k) = cells[ci].ijk;
        let t = [i, j, k];
        for d in 0..3 {
            for (side, m) in [(0usize, -1isize), (1, 1)] {
                let t2 = t[d] as isize + m;
                let mut n = t;
                let kind = if t2 < 0 {
                    // Below the Γ layer: the bottom face of a Γ cell.
                    FaceKind::Gamma
                } else {
                    n[d] = t2 as usize;
                    if let Some(&q) = cell_of_ijk.get(&(n[0], n[1], n[2])) {
                        if m < 0 {
                            continue; // already created from the neighbour
                        }
                        FaceKind::Interior { q }
                    } else {
                        FaceKind::Dirichlet {
                            x_q: grid.point(n[0], n[1], n[2]),
                        }
                    }
                };

                let mut verts = face_corners(d, side).map(|c| cells[ci].verts[c]);
                let pos = verts.map(|v| vertices[v].pos);
                let centroid = (pos[0] + pos[1] + pos[2] + pos[3]) * 0.25;
                let outward = match kind {
                    FaceKind::Interior { q } => cells[q].x - cells[ci].x,
                    FaceKind::Dirichlet { x_q } => x_q - cells[ci].x,
                    FaceKind::Gamma => {
                        let cc: Vec3 = cells[ci]
                            .verts
                            .iter()
                            .map(|&v| vertices[v].pos)
                            .sum::<Vec3>()
                            / 8.0;
                        centroid - cc
                    }
                };
                let mut ntilde = 0.5 * (pos[2] - pos[0]).cross(&(pos[3] - pos[1]));
                if ntilde.dot(&outward) < 0.0 {
                    verts.swap(1, 3);
                    ntilde = -ntilde;
                }

                let pos = verts.map(|v| vertices[v].pos);
                let patch = BilinearPatch::new(pos[0], pos[1], pos[2], pos[3]);
                let area = patch.area();
                let mut diameter = 0.0f64;
                for a in 0..4 {
                    for b in (a + 1)..4 {
                        diameter = diameter.max((pos[a] - pos[b]).norm());
                    }
                }

                let fid = faces.len();
                let geom = match kind {
                    FaceKind::Gamma => None,
                    _ => {
                        let x_q = match kind {
                            FaceKind::Interior { q } => cells[q].x,
                            FaceKind::Dirichlet { x_q } => x_q,
                            FaceKind::Gamma => unreachable!(),
                        };
                        Some(face_geom(fid, cells[ci].x, x_q, &pos, ntilde, area)?)
                    }
                };

                faces.push(Face {
                    p: ci,
                    kind,
                    verts,
                    area,
                    ntilde,
                    centroid,
                    diameter,
                    geom,
                    gamma: None,
                });
                cells[ci].faces[2 * d + side] = fid;
                match kind {
                    FaceKind::Interior { q } => {
                        // The matching slot of the neighbour (opposite side).
                        cells[q].faces[2 * d + (1 - side)] = fid;
                        pair_face.insert((ci.min(q), ci.max(q)), fid);
                        interior_faces.push(fid);
                    }
                    FaceKind::Dirichlet { .. } => dirichlet_faces.push(fid),
                    FaceKind::Gamma => gamma_faces.push(fid),
                }
            }
        }
    }

    // Cell volumes via the divergence theorem: |p| = (1/3) Σ_σ ∫_σ x·n.
    for ci in 0..cells.len() {
        let mut vol = 0.0;
        for &fid in &cells[ci].faces {
            let f = &faces[fid];
            let [a, b, c, d] = f.verts;
            let patch = BilinearPatch::new(
                vertices[a].pos,
                vertices[b].pos,
                vertices[c].pos,
                vertices[d].pos,
            );
            let sign = if f.p == ci { 1.0 } else { -1.0 };
            vol += sign * patch.integrate_x_dot_n() / 3.0;
        }
        if vol <= 0.0 {
            return Err(Error::DegenerateCell {
                cell: ci,
                volume: vol,
            });
        }
        cells[ci].volume = vol;
    }

    // Γ-edges, shared between neighbouring Γ-faces.
    let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut gamma_edges: Vec<GammaEdge> = Vec::new();
    let mut face_edges: HashMap<usize, [usize; 4]> = HashMap::new();
    for &fid in &gamma_faces {
        let verts = faces[fid].verts;
        let mut local = [0usize; 4];
        for le in 0..4 {
            let (va, vb) = (verts[le], verts[(le + 1) % 4]);
            let key = (va.min(vb), va.max(vb));
            let eid = *edge_ids.entry(key).or_insert_with(|| {
                let a = vertices[va].pos;
                let b = vertices[vb].pos;
                gamma_edges.push(GammaEdge {
                    a,
                    b,
                    length: (b - a).norm(),
                    midpoint: 0.5 * (a + b),
                    faces: Vec::new(),
                    interior_rank: None,
                });
                gamma_edges.len() - 1
            });
            gamma_edges[eid].faces.push(fid);
            local[le] = eid;
        }
        face_edges.insert(fid, local);
    }
    let mut n_edge_unknowns = 0;
    for e in &mut gamma_edges {
        if e.faces.len() == 2 {
            e.interior_rank = Some(n_edge_unknowns);
            n_edge_unknowns += 1;
        }
    }

    // Conormals: per edge a single unit vector in the mean tangent plane,
    // oriented out of the first adjacent face and negated for the second, so
    // conormals of the two sides cancel exactly.
    let mut conormals: HashMap<usize, [Vec3; 4]> = gamma_faces
        .iter()
        .map(|&f| (f, [Vec3::zeros(); 4]))
        .collect();
    for (eid, e) in gamma_edges.iter().enumerate() {
        let n_avg: Vec3 = e.faces.iter().map(|&f| faces[f].unit_normal()).sum::<Vec3>()
            / e.faces.len() as f64;
        let cross = n_avg.cross(&(e.b - e.a));
        if cross.norm() < DEGENERACY_TOL {
            return Err(Error::ZeroConormal { face: e.faces[0] });
        }
        let mut n = cross / cross.norm();
        let f0 = e.faces[0];
        if n.dot(&(e.midpoint - cells[faces[f0].p].x)) < 0.0 {
            n = -n;
        }
        for (which, &f) in e.faces.iter().enumerate() {
            let sign = if which == 0 { 1.0 } else { -1.0 };
            let local = face_edges[&f];
            for le in 0..4 {
                if local[le] == eid {
                    conormals.get_mut(&f).unwrap()[le] = sign * n;
                }
            }
        }
    }

    let mut h_gamma = 0.0f64;
    for &fid in &gamma_faces {
        let local = face_edges[&fid];
        let xp = cells[faces[fid].p].x;
        let mut d_perp = [0.0f64; 4];
        for le in 0..4 {
            let e = &gamma_edges[local[le]];
            let d = point_line_distance(xp, e.a, e.b);
            if d < 1e-14 {
                return Err(Error::PointOnEdgeLine { face: fid, dist: d });
            }
            d_perp[le] = d;
        }
        h_gamma = h_gamma.max(faces[fid].diameter);
        faces[fid].gamma = Some(GammaFaceData {
            edges: local,
            conormals: conormals[&fid],
            d_perp,
        });
    }

    Ok(Mesh {
        grid,
        cells,
        faces,
        vertices,
        gamma_edges,
        interior_faces,
        dirichlet_faces,
        gamma_faces,
        n_edge_unknowns,
        h,
        h_gamma,
        cell_of_ijk,
        pair_face,
    })
}

fn face_geom(
    fid: usize,
    x_p: Vec3,
    x_q: Vec3,
    pos: &[Vec3; 4],
    ntilde: Vec3,
    area: f64,
) -> Result<FaceGeom> {
    let d_pq = (x_q - x_p).norm();
    let d_circ = (pos[2] - pos[0]).norm();
    let d_sq = (pos[3] - pos[1]).norm();
    if d_pq < DEGENERACY_TOL || d_circ < DEGENERACY_TOL || d_sq < DEGENERACY_TOL {
        return Err(Error::DegenerateFace { face: fid, det: 0.0 });
    }
    let s = (x_q - x_p) / d_pq;
    let t_circ = (pos[2] - pos[0]) / d_circ;
    let t_sq = (pos[3] - pos[1]) / d_sq;
    let (a, det) = crate::geometry::decompose_in_basis(s, t_circ, t_sq, ntilde / area)
        .filter(|(_, det)| det.abs() >= DEGENERACY_TOL)
        .ok_or(Error::DegenerateFace { face: fid, det: 0.0 })?;
    if a[0] <= DEGENERACY_TOL {
        return Err(Error::DegenerateFace { face: fid, det });
    }
    Ok(FaceGeom {
        s,
        t_circ,
        t_sq,
        d_pq,
        d_circ,
        d_sq,
        a: [a[0], a[1], a[2]],
        det,
    })
}
