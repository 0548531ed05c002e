//! Refinement studies: per-level solve, regularity audit, and CSV artifacts.

use std::fmt::Write as _;

use crate::assemble::{assemble, default_r, solve, Scheme};
use crate::cases::{Case, ObliqueField};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::field::DiscreteField;
use crate::grid::generate_grid;
use crate::mesh::{build_mesh, Mesh};
use crate::norms::{error_report, ErrorReport};
use crate::regularity::{regularity_report, RegularityReport};
use crate::solver::SolveStats;

/// One refinement level of a study.
#[derive(Debug)]
pub struct LevelRecord {
    pub dims: (usize, usize, usize),
    pub h: f64,
    pub regularity: RegularityReport,
    /// Stabilisation parameter actually used.
    pub r: f64,
    /// Error report, or the per-level failure (the study continues).
    pub outcome: std::result::Result<ErrorReport, Error>,
}

/// All artifacts of a refinement study.
#[derive(Debug)]
pub struct StudyOutcome {
    pub levels: Vec<LevelRecord>,
    /// `h, L2_Omega, EOC, L2_Gamma, EOC, Vh, EOC, VhGamma, EOC` for the
    /// centred scheme; `h, L2_Omega, EOC, L2_Gamma, EOC, VhOmega, EOC`
    /// otherwise. Failed levels carry a diagnostic in the first error column.
    pub errors_csv: String,
    /// `h, reg_mesh, reg_mesh_omega, reg_mesh_gamma, varrho` per level.
    pub regularity_csv: String,
    /// Sizes, stabilisation parameter and solver statistics per level.
    pub meta_csv: String,
}

impl StudyOutcome {
    /// First per-level failure, if any.
    pub fn first_error(&self) -> Option<&Error> {
        self.levels.iter().find_map(|l| l.outcome.as_ref().err())
    }
}

/// Assembles and solves one case on one mesh. `r = None` selects the default
/// stabilisation `max(1, ‖W‖_∞)`; `max_iter = None` caps at 20 × unknowns.
/// Returns the solved field, solver statistics, and the `R` used.
pub fn solve_case(
    mesh: &Mesh,
    case: &Case,
    scheme: Scheme,
    r: Option<f64>,
    tol: f64,
    max_iter: Option<usize>,
) -> Result<(DiscreteField, SolveStats, f64)> {
    let r = r.unwrap_or_else(|| default_r(mesh, case));
    let system = assemble(mesh, case, scheme, Some(r))?;
    let max_iter = max_iter.unwrap_or(20 * system.matrix.n);
    let (field, stats) = solve(mesh, case, &system, tol, max_iter)?;
    Ok((field, stats, r))
}

fn fmt_h(h: f64) -> String {
    format!("{h:.4e}")
}

fn fmt_err(e: f64) -> String {
    format!("{e:.6e}")
}

fn fmt_eoc(r: Option<f64>) -> String {
    r.map_or(String::new(), |v| format!("{v:.3}"))
}

/// The per-norm error columns of a report, in CSV order for its scheme.
fn error_columns(rep: &ErrorReport) -> Vec<f64> {
    match rep.scheme {
        Scheme::Central => vec![
            rep.l2_omega,
            rep.l2_gamma,
            rep.vh.unwrap(),
            rep.vh_gamma.unwrap(),
        ],
        _ => vec![rep.l2_omega, rep.l2_gamma, rep.vh_omega],
    }
}

fn errors_header(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::Central => "h,L2_Omega,EOC,L2_Gamma,EOC,Vh,EOC,VhGamma,EOC",
        _ => "h,L2_Omega,EOC,L2_Gamma,EOC,VhOmega,EOC",
    }
}

/// Runs the full refinement study described by the config and writes
/// `errors.csv`, `regularity.csv`, `meta.csv` and the resolved `config.txt`
/// into the output directory. Solver failures are recorded per level and the
/// study continues; grid or mesh construction failures abort.
pub fn run_study(cfg: &ExperimentConfig) -> Result<StudyOutcome> {
    let outcome = run_study_in_memory(cfg)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    std::fs::write(cfg.output_dir.join("errors.csv"), &outcome.errors_csv)?;
    std::fs::write(cfg.output_dir.join("regularity.csv"), &outcome.regularity_csv)?;
    std::fs::write(cfg.output_dir.join("meta.csv"), &outcome.meta_csv)?;
    cfg.save(&cfg.output_dir.join("config.txt"))?;
    Ok(outcome)
}

/// [`run_study`] without touching the file system.
pub fn run_study_in_memory(cfg: &ExperimentConfig) -> Result<StudyOutcome> {
    let field = ObliqueField::from_name(&cfg.case)
        .ok_or_else(|| Error::Config(format!("unknown case `{}`", cfg.case)))?;
    let case = Case::new(cfg.domain, field)?;

    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut errors_csv = String::from(errors_header(cfg.scheme));
    errors_csv.push('\n');
    let mut regularity_csv = String::from("h,reg_mesh,reg_mesh_omega,reg_mesh_gamma,varrho\n");
    let mut meta_csv =
        String::from("level,dims,h,n_cells,n_edge_unknowns,r,iterations,residual,status\n");

    let n_error_cols = error_columns(&dummy_report(cfg.scheme)).len();
    // Previous successful level per column, for EOC against the last good h.
    let mut prev: Option<(f64, Vec<f64>)> = None;

    for (li, &dims) in cfg.levels.iter().enumerate() {
        let grid = generate_grid(cfg.domain, dims, cfg.amplitude, cfg.seed)?;
        let mesh = build_mesh(grid)?;
        let reg = regularity_report(&mesh);
        regularity_csv.push_str(&regularity_row(mesh.h, &reg));

        let solved = solve_case(&mesh, &case, cfg.scheme, cfg.r, cfg.tol, cfg.max_iter);
        let (r_used, outcome, stats) = match solved {
            Ok((f, stats, r)) => {
                let rep = error_report(&mesh, &f, &case, cfg.scheme, r, Some(stats));
                (r, Ok(rep), Some(stats))
            }
            Err(e) => (
                cfg.r.unwrap_or_else(|| default_r(&mesh, &case)),
                Err(e),
                None,
            ),
        };

        match &outcome {
            Ok(rep) => {
                let cols = error_columns(rep);
                let mut line = fmt_h(rep.h);
                for (c, &e) in cols.iter().enumerate() {
                    let eoc = prev.as_ref().map(|(ph, pe)| {
                        (pe[c] / e).ln() / (ph / rep.h).ln()
                    });
                    let _ = write!(line, ",{},{}", fmt_err(e), fmt_eoc(eoc));
                }
                errors_csv.push_str(&line);
                errors_csv.push('\n');
                prev = Some((rep.h, cols));
            }
            Err(e) => {
                let mut line = format!("{},failed: {e}", fmt_h(mesh.h));
                for _ in 0..(2 * n_error_cols - 1) {
                    line.push(',');
                }
                errors_csv.push_str(&line);
                errors_csv.push('\n');
            }
        }

        let (status, iters, resid) = match (&outcome, stats) {
            (Ok(_), Some(s)) => ("ok".to_string(), s.iterations.to_string(), format!("{:.3e}", s.residual)),
            (Err(e), _) => (format!("failed: {e}"), String::new(), String::new()),
            _ => unreachable!(),
        };
        let _ = writeln!(
            meta_csv,
            "{},{}x{}x{},{},{},{},{r_used:.6e},{},{},\"{status}\"",
            li,
            dims.0,
            dims.1,
            dims.2,
            fmt_h(mesh.h),
            mesh.n_cells(),
            mesh.n_edge_unknowns,
            iters,
            resid,
        );

        levels.push(LevelRecord {
            dims,
            h: mesh.h,
            regularity: reg,
            r: r_used,
            outcome,
        });
    }

    Ok(StudyOutcome {
        levels,
        errors_csv,
        regularity_csv,
        meta_csv,
    })
}

/// Builds the mesh for one level of the config and solves its case once.
/// Returns the mesh, the case, the solved field and its error report.
pub fn solve_single(
    cfg: &ExperimentConfig,
    dims: (usize, usize, usize),
) -> Result<(Mesh, Case, DiscreteField, ErrorReport)> {
    let field = ObliqueField::from_name(&cfg.case)
        .ok_or_else(|| Error::Config(format!("unknown case `{}`", cfg.case)))?;
    let case = Case::new(cfg.domain, field)?;
    let mesh = build_mesh(generate_grid(cfg.domain, dims, cfg.amplitude, cfg.seed)?)?;
    let (solved, stats, r) = solve_case(&mesh, &case, cfg.scheme, cfg.r, cfg.tol, cfg.max_iter)?;
    let rep = error_report(&mesh, &solved, &case, cfg.scheme, r, Some(stats));
    Ok((mesh, case, solved, rep))
}

/// Regularity factors per refinement level, as CSV (no solves).
pub fn regularity_audit(cfg: &ExperimentConfig) -> Result<String> {
    let mut csv = String::from("h,reg_mesh,reg_mesh_omega,reg_mesh_gamma,varrho\n");
    for &dims in &cfg.levels {
        let mesh = build_mesh(generate_grid(cfg.domain, dims, cfg.amplitude, cfg.seed)?)?;
        csv.push_str(&regularity_row(mesh.h, &regularity_report(&mesh)));
    }
    Ok(csv)
}

fn regularity_row(h: f64, reg: &RegularityReport) -> String {
    format!(
        "{},{:.6e},{:.6e},{:.6e},{:.6e}\n",
        fmt_h(h),
        reg.reg_mesh,
        reg.reg_mesh_omega,
        reg.reg_mesh_gamma,
        reg.varrho_mesh_omega
    )
}

/// Placeholder report used only to count columns per scheme.
fn dummy_report(scheme: Scheme) -> ErrorReport {
    ErrorReport {
        h: 1.0,
        h_gamma: 1.0,
        l2_omega: 1.0,
        l2_gamma: 1.0,
        vh: scheme.has_edge_unknowns().then_some(1.0),
        vh_gamma: scheme.has_edge_unknowns().then_some(1.0),
        vh_omega: 1.0,
        n_cells: 0,
        n_edge_unknowns: 0,
        scheme,
        r: 1.0,
        solver: None,
    }
}
