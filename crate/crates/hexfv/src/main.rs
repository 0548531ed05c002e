//! Thin command-line driver over the `hexfv` library.
//!
//! Verbs: `solve` (one mesh, one report), `study` (refinement study with CSV
//! artifacts), `regularity` (mesh audit, no solves), `export` (legacy-VTK
//! solution dump). Exit codes: 0 ok, 2 configuration error, 3 solver failure,
//! 4 mesh degeneracy.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hexfv::config::ExperimentConfig;
use hexfv::norms::interpolate;
use hexfv::study::{regularity_audit, run_study, solve_single};
use hexfv::vtk::export_solution;
use hexfv::Error;

#[derive(Parser)]
#[command(name = "hexfv", about = "Finite volume solver for the Laplace equation with oblique boundary conditions", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Config file plus per-key overrides (same keys as the file format).
#[derive(Args)]
struct Opts {
    /// Path to a key = value config file; defaults apply if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// cube | tesseroid | perturbed_sphere_section
    #[arg(long)]
    domain: Option<String>,
    /// constant | affine_xy | affine_xz | radial | near_tangential | normal
    #[arg(long)]
    case: Option<String>,
    /// central | upwind | splitting
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated IxJxK refinement levels, e.g. 3x3x3,7x7x7
    #[arg(long)]
    levels: Option<String>,
    /// Grid perturbation amplitude in [0, 0.5)
    #[arg(long)]
    amplitude: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Stabilisation parameter, or `auto`
    #[arg(long)]
    r: Option<String>,
    /// Relative solver tolerance
    #[arg(long)]
    tol: Option<String>,
    /// Solver iteration cap, or `auto`
    #[arg(long)]
    max_iter: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
}

impl Opts {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides: [(&str, &Option<String>); 10] = [
            ("domain", &self.domain),
            ("case", &self.case),
            ("scheme", &self.scheme),
            ("levels", &self.levels),
            ("amplitude", &self.amplitude),
            ("seed", &self.seed),
            ("r", &self.r),
            ("tol", &self.tol),
            ("max_iter", &self.max_iter),
            ("output_dir", &self.output_dir),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one case on one mesh and print the error report.
    Solve {
        #[command(flatten)]
        opts: Opts,
        /// Grid dimensions IxJxK (default: the first refinement level).
        #[arg(long)]
        dims: Option<String>,
        /// Also write the solution as legacy VTK to this path.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Run the refinement study and write CSV artifacts to the output dir.
    Study {
        #[command(flatten)]
        opts: Opts,
    },
    /// Print the regularity factors per level as CSV (no solves).
    Regularity {
        #[command(flatten)]
        opts: Opts,
    },
    /// Solve and write the solution as legacy VTK.
    Export {
        #[command(flatten)]
        opts: Opts,
        /// Output .vtk path.
        path: PathBuf,
        /// Grid dimensions IxJxK (default: the first refinement level).
        #[arg(long)]
        dims: Option<String>,
    },
}

fn parse_dims(cfg: &ExperimentConfig, dims: &Option<String>) -> Result<(usize, usize, usize), Error> {
    match dims {
        None => Ok(cfg.levels[0]),
        Some(s) => {
            // Reuse the config parser for the IxJxK syntax.
            let mut probe = cfg.clone();
            probe.set("levels", s)?;
            Ok(probe.levels[0])
        }
    }
}

fn solve_and_export(
    cfg: &ExperimentConfig,
    dims: (usize, usize, usize),
    export: Option<&PathBuf>,
    print_report: bool,
) -> Result<(), Error> {
    let (mesh, case, solved, rep) = solve_single(cfg, dims)?;
    if print_report {
        let stats = rep.solver.unwrap();
        println!("domain = {}", cfg.domain.name());
        println!("case = {}", cfg.case);
        println!("scheme = {}", rep.scheme.name());
        println!("dims = {}x{}x{}", dims.0, dims.1, dims.2);
        println!("h = {:.6e}", rep.h);
        println!("n_cells = {}", rep.n_cells);
        println!("n_edge_unknowns = {}", rep.n_edge_unknowns);
        println!("R = {:.6e}", rep.r);
        println!("iterations = {}", stats.iterations);
        println!("residual = {:.3e}", stats.residual);
        println!("L2_Omega = {:.6e}", rep.l2_omega);
        println!("L2_Gamma = {:.6e}", rep.l2_gamma);
        match (rep.vh, rep.vh_gamma) {
            (Some(vh), Some(vg)) => {
                println!("Vh = {vh:.6e}");
                println!("VhGamma = {vg:.6e}");
            }
            _ => println!("VhOmega = {:.6e}", rep.vh_omega),
        }
    }
    if let Some(path) = export {
        let exact = interpolate(&mesh, &case);
        let error: Vec<f64> = solved
            .cells
            .iter()
            .zip(&exact.cells)
            .map(|(s, e)| (s - e).abs())
            .collect();
        export_solution(&mesh, &solved, &error, path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Solve { opts, dims, export } => {
            let cfg = opts.resolve()?;
            let dims = parse_dims(&cfg, &dims)?;
            solve_and_export(&cfg, dims, export.as_ref(), true)
        }
        Cmd::Study { opts } => {
            let cfg = opts.resolve()?;
            let out = run_study(&cfg)?;
            print!("{}", out.errors_csv);
            eprintln!("artifacts in {}", cfg.output_dir.display());
            match out.levels.into_iter().find_map(|l| l.outcome.err()) {
                None => Ok(()),
                Some(e) => Err(e),
            }
        }
        Cmd::Regularity { opts } => {
            let cfg = opts.resolve()?;
            print!("{}", regularity_audit(&cfg)?);
            Ok(())
        }
        Cmd::Export { opts, path, dims } => {
            let cfg = opts.resolve()?;
            let dims = parse_dims(&cfg, &dims)?;
            solve_and_export(&cfg, dims, Some(&path), false)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DegenerateFace { .. }
        | Error::DegenerateCell { .. }
        | Error::ZeroConormal { .. }
        | Error::PointOnEdgeLine { .. } => 4,
        Error::SplittingBreakdown { .. }
        | Error::SolverBreakdown { .. }
        | Error::SolverMaxIter { .. }
        | Error::SingularMatrix
        | Error::DenseTooLarge(_) => 3,
        Error::InvalidDims(_)
        | Error::InvalidAmplitude(_)
        | Error::TangentialObliqueField { .. }
        | Error::NonPositiveR(_)
        | Error::Config(_)
        | Error::Io(_) => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
