//! Run a full refinement study and print the errors table with observed
//! convergence rates.
//!
//! Run with: `cargo run --release --example study_convergence`

use hexfv::config::ExperimentConfig;
use hexfv::study::run_study_in_memory;
use hexfv::Result;

fn main() -> Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.levels = vec![(3, 3, 3), (7, 7, 7), (15, 15, 15)];

    let out = run_study_in_memory(&cfg)?;

    println!("errors.csv:");
    print!("{}", out.errors_csv);
    println!();
    println!("regularity.csv:");
    print!("{}", out.regularity_csv);
    println!();
    println!("meta.csv:");
    print!("{}", out.meta_csv);

    if let Some(e) = out.first_error() {
        println!("\nfirst level failure: {e}");
    }
    Ok(())
}
