//! Compute the four mesh regularity factors across a refinement family and
//! report the worst offending face of each.
//!
//! Run with: `cargo run --release --example regularity_audit`

use hexfv::domain::DomainId;
use hexfv::grid::generate_grid;
use hexfv::mesh::build_mesh;
use hexfv::regularity::regularity_report;
use hexfv::Result;

fn main() -> Result<()> {
    println!("{:>4} {:>10} {:>10} {:>10} {:>10} {:>10}", "n", "h", "reg", "reg_Omega", "reg_Gamma", "varrho");
    for n in [3usize, 7, 15] {
        let mesh = build_mesh(generate_grid(DomainId::Cube, (n, n, n), 0.15, 42)?)?;
        let rep = regularity_report(&mesh);
        println!(
            "{n:>4} {:>10.4e} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            mesh.h, rep.reg_mesh, rep.reg_mesh_omega, rep.reg_mesh_gamma, rep.varrho_mesh_omega
        );
        // The varrho offender is the face closest to losing coercivity.
        let off = &rep.varrho_offender;
        let centroid = mesh.faces[off.face].centroid;
        println!(
            "     tightest coercivity margin {:.4} at face {} (centroid {:.3}, {:.3}, {:.3})",
            off.value, off.face, centroid.x, centroid.y, centroid.z
        );
    }
    println!("\nvarrho stays positive but shrinks under refinement: the random");
    println!("perturbation keeps cells uniformly shaped while the face stencils");
    println!("grow relatively more oblique, so the coercivity margin tightens.");
    Ok(())
}
