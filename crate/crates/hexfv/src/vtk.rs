//! Legacy-VTK export of meshes and cell fields.
//!
//! Writes ASCII `DATASET UNSTRUCTURED_GRID` files with hexahedral cells and
//! the cell scalars `T` (the solution) and `error`, readable by standard
//! viewers.

use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::field::DiscreteField;
use crate::geometry::Vec3;
use crate::mesh::Mesh;

/// VTK hexahedron corner order (bottom quad counterclockwise, then top)
/// expressed in the cell's local `ci + 2 cj + 4 ck` corner indexing.
const VTK_HEX_ORDER: [usize; 8] = [0, 1, 3, 2, 4, 5, 7, 6];

/// Writes the mesh with per-cell scalars `T` and `error`.
pub fn write_vtk(
    mesh: &Mesh,
    t: &[f64],
    error: &[f64],
    out: &mut dyn Write,
) -> std::io::Result<()> {
    assert_eq!(t.len(), mesh.n_cells());
    assert_eq!(error.len(), mesh.n_cells());
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "hexahedral finite volume solution")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.vertices.len())?;
    for v in &mesh.vertices {
        writeln!(out, "{:.17e} {:.17e} {:.17e}", v.pos.x, v.pos.y, v.pos.z)?;
    }
    writeln!(out, "CELLS {} {}", mesh.n_cells(), 9 * mesh.n_cells())?;
    for c in &mesh.cells {
        write!(out, "8")?;
        for &lc in &VTK_HEX_ORDER {
            write!(out, " {}", c.verts[lc])?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.n_cells())?;
    for _ in &mesh.cells {
        writeln!(out, "12")?;
    }
    writeln!(out, "CELL_DATA {}", mesh.n_cells())?;
    for (name, data) in [("T", t), ("error", error)] {
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for v in data {
            writeln!(out, "{v:.17e}")?;
        }
    }
    Ok(())
}

/// Exports a solved field to `path`, with `error` per cell.
pub fn export_solution(
    mesh: &Mesh,
    field: &DiscreteField,
    error: &[f64],
    path: &Path,
) -> Result<()> {
    if path.as_os_str().is_empty() {
        return Err(crate::error::Error::Config(
            "empty export path".to_string(),
        ));
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_vtk(mesh, &field.cells, error, &mut out)?;
    Ok(())
}

/// Reads back the `POINTS` section of a legacy-VTK file (for verification).
pub fn read_vtk_points(text: &str) -> Option<Vec<Vec3>> {
    let mut lines = text.lines();
    let n: usize = loop {
        let line = lines.next()?;
        if let Some(rest) = line.strip_prefix("POINTS ") {
            break rest.split_whitespace().next()?.parse().ok()?;
        }
    };
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines.next()?;
        let mut it = line.split_whitespace().map(str::parse::<f64>);
        let (x, y, z) = (it.next()?.ok()?, it.next()?.ok()?, it.next()?.ok()?);
        points.push(Vec3::new(x, y, z));
    }
    Some(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainId;
    use crate::grid::generate_grid;
    use crate::mesh::build_mesh;

    fn cube_mesh(n: usize, amp: f64, seed: u64) -> Mesh {
        build_mesh(generate_grid(DomainId::Cube, (n, n, n), amp, seed).unwrap()).unwrap()
    }

    #[test]
    fn constant_field_export_structure() {
        let m = cube_mesh(2, 0.0, 0);
        let t = vec![3.5; m.n_cells()];
        let e = vec![0.0; m.n_cells()];
        let mut buf = Vec::new();
        write_vtk(&m, &t, &e, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // 2×2×3 cells on the 2³ grid (Γ layer plus two interior layers).
        assert!(text.contains(&format!("CELLS {} {}", m.n_cells(), 9 * m.n_cells())));
        assert!(text.contains("SCALARS T double 1"));
        assert!(text.contains("SCALARS error double 1"));
        assert_eq!(text.matches("3.5").count(), m.n_cells());
        // One hexahedron type tag per cell.
        assert_eq!(text.lines().filter(|l| *l == "12").count(), m.n_cells());
    }

    #[test]
    fn points_round_trip_to_mesh_vertices() {
        let m = cube_mesh(3, 0.2, 17);
        let t = vec![0.0; m.n_cells()];
        let mut buf = Vec::new();
        write_vtk(&m, &t, &t, &mut buf).unwrap();
        let pts = read_vtk_points(&String::from_utf8(buf).unwrap()).unwrap();
        assert_eq!(pts.len(), m.vertices.len());
        for (p, v) in pts.iter().zip(&m.vertices) {
            assert!((p - v.pos).norm() < 1e-12);
        }
    }

    #[test]
    fn hexahedron_connectivity_is_positive_volume_ordering() {
        // For each cell the VTK ordering must list the bottom quad
        // counterclockwise seen from the top: the (right-handed) volume of
        // the ordered corner tetrahedron is positive.
        let m = cube_mesh(3, 0.15, 5);
        for c in &m.cells {
            let v = |lc: usize| m.vertices[c.verts[VTK_HEX_ORDER[lc]]].pos;
            let det = (v(1) - v(0))
                .cross(&(v(3) - v(0)))
                .dot(&(v(4) - v(0)));
            assert!(det > 0.0);
        }
    }

    #[test]
    fn empty_path_is_rejected() {
        let m = cube_mesh(2, 0.0, 0);
        let f = DiscreteField::zeros(&m);
        let e = vec![0.0; m.n_cells()];
        assert!(export_solution(&m, &f, &e, Path::new("")).is_err());
    }

    #[test]
    fn export_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.vtk");
        let m = cube_mesh(2, 0.0, 0);
        let f = DiscreteField::zeros(&m);
        let e = vec![0.0; m.n_cells()];
        export_solution(&m, &f, &e, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# vtk DataFile Version 3.0"));
    }
}
