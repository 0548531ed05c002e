//! Solve on a tesseroid mesh and export the solution plus pointwise error as
//! a legacy-VTK unstructured grid (viewable in ParaView or VisIt).
//!
//! Run with: `cargo run --release --example export_vtk`

use hexfv::assemble::Scheme;
use hexfv::cases::{Case, ObliqueField};
use hexfv::domain::DomainId;
use hexfv::grid::generate_grid;
use hexfv::mesh::build_mesh;
use hexfv::norms::interpolate;
use hexfv::study::solve_case;
use hexfv::vtk::export_solution;
use hexfv::Result;

fn main() -> Result<()> {
    // A section of a spherical shell with the oblique condition on its inner
    // surface; the radial field plays the role of a simplified gravity vector.
    let mesh = build_mesh(generate_grid(DomainId::Tesseroid, (9, 9, 9), 0.15, 42)?)?;
    let case = Case::new(DomainId::Tesseroid, ObliqueField::Radial)?;
    let (field, stats, _r) = solve_case(&mesh, &case, Scheme::Central, None, 1e-10, None)?;
    println!(
        "solved {} cells in {} iterations",
        mesh.n_cells(),
        stats.iterations
    );

    let exact = interpolate(&mesh, &case);
    let error: Vec<f64> = field
        .cells
        .iter()
        .zip(&exact.cells)
        .map(|(s, e)| (s - e).abs())
        .collect();

    let path = std::path::Path::new("tesseroid_radial.vtk");
    export_solution(&mesh, &field, &error, path)?;
    println!("wrote {}", path.display());
    Ok(())
}
