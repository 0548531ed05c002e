//! Solve a single problem on a perturbed cube mesh and print the error norms.
//!
//! Run with: `cargo run --example solve_cube`

use hexfv::cases::{Case, ObliqueField};
use hexfv::domain::DomainId;
use hexfv::grid::generate_grid;
use hexfv::mesh::build_mesh;
use hexfv::study::solve_case;
use hexfv::{assemble::Scheme, norms::error_report, Result};

fn main() -> Result<()> {
    // A 7³ grid on the unit cube, randomly perturbed by 15 % of the spacing.
    let grid = generate_grid(DomainId::Cube, (7, 7, 7), 0.15, 42)?;
    let mesh = build_mesh(grid)?;
    println!(
        "mesh: {} cells, {} faces, h = {:.4e}",
        mesh.n_cells(),
        mesh.faces.len(),
        mesh.h
    );

    // Constant oblique field V = (−1, −1, −1) on Γ; exact solution 1/|x − x₀|.
    let case = Case::new(DomainId::Cube, ObliqueField::ConstantDiag)?;
    let (field, stats, r) = solve_case(&mesh, &case, Scheme::Central, None, 1e-10, None)?;
    println!(
        "solved with R = {r:.3} in {} iterations (residual {:.3e})",
        stats.iterations, stats.residual
    );

    let rep = error_report(&mesh, &field, &case, Scheme::Central, r, Some(stats));
    println!("L2_Omega  = {:.6e}", rep.l2_omega);
    println!("L2_Gamma  = {:.6e}", rep.l2_gamma);
    println!("Vh        = {:.6e}", rep.vh.unwrap());
    println!("VhGamma   = {:.6e}", rep.vh_gamma.unwrap());
    Ok(())
}
