//! Demonstrate how the normal-splitting variant degrades and finally breaks
//! down when the oblique field is nearly tangential to Γ, while the centred
//! scheme keeps converging.
//!
//! Run with: `cargo run --release --example splitting_breakdown`

use hexfv::assemble::Scheme;
use hexfv::cases::{Case, ObliqueField};
use hexfv::domain::DomainId;
use hexfv::grid::generate_grid;
use hexfv::mesh::build_mesh;
use hexfv::norms::error_report;
use hexfv::study::solve_case;
use hexfv::Result;

fn main() -> Result<()> {
    // V = (11.43, 0, -1): about 5° from tangential on the flat Γ. The
    // splitting scheme divides by V·n face by face, so its surface part is
    // amplified by |V|/(V·n) ≈ 11.5 and the system loses coercivity.
    let case = Case::new(DomainId::Cube, ObliqueField::NearTangential)?;

    for n in [3usize, 7, 15] {
        let mesh = build_mesh(generate_grid(DomainId::Cube, (n, n, n), 0.15, 42)?)?;
        for scheme in [Scheme::Central, Scheme::Splitting] {
            match solve_case(&mesh, &case, scheme, None, 1e-10, None) {
                Ok((field, stats, r)) => {
                    let rep = error_report(&mesh, &field, &case, scheme, r, Some(stats));
                    println!(
                        "n = {n:>2} {:>9}: ok, {} iterations, VhOmega = {:.4e}",
                        scheme.name(),
                        rep.solver.as_ref().unwrap().iterations,
                        rep.vh_omega
                    );
                }
                Err(e) => {
                    println!("n = {n:>2} {:>9}: FAILED: {e}", scheme.name());
                }
            }
        }
    }
    Ok(())
}
