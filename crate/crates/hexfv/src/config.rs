//! Experiment configuration: a flat `key = value` text format.
//!
//! The format is deliberately minimal: one `key = value` pair per line, `#`
//! comments, unknown keys rejected. A config serialises back to text and
//! round-trips exactly.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::assemble::Scheme;
use crate::domain::DomainId;
use crate::error::{Error, Result};

/// Everything needed to reproduce a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub domain: DomainId,
    /// Name of a built-in case (an oblique field), e.g. `constant`.
    pub case: String,
    pub scheme: Scheme,
    /// Grid dimensions `(I, J, K)` per refinement level, coarse to fine.
    pub levels: Vec<(usize, usize, usize)>,
    /// Grid perturbation amplitude as a fraction of the uniform spacing.
    pub amplitude: f64,
    pub seed: u64,
    /// Stabilisation parameter; `None` selects `max(1, ‖W‖_∞)` per mesh.
    pub r: Option<f64>,
    /// Relative residual tolerance of the iterative solver.
    pub tol: f64,
    /// Iteration cap; `None` selects `20 ×` the number of unknowns.
    pub max_iter: Option<usize>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            domain: DomainId::Cube,
            case: "constant".to_string(),
            scheme: Scheme::Central,
            levels: vec![(3, 3, 3), (7, 7, 7), (15, 15, 15)],
            amplitude: 0.15,
            seed: 42,
            r: None,
            tol: 1e-10,
            max_iter: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<_> = s.split('x').collect();
    let err = || Error::Config(format!("invalid dims `{s}`, expected IxJxK"));
    if parts.len() != 3 {
        return Err(err());
    }
    let mut d = [0usize; 3];
    for (slot, p) in d.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|_| err())?;
    }
    Ok((d[0], d[1], d[2]))
}

impl ExperimentConfig {
    /// Parses the flat `key = value` format. Later assignments override
    /// earlier ones; unknown keys are errors.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("invalid {what} `{value}`"));
        match key {
            "domain" => {
                self.domain = DomainId::from_name(value).ok_or_else(|| bad("domain"))?;
            }
            "case" => self.case = value.to_string(),
            "scheme" => {
                self.scheme = Scheme::from_name(value).ok_or_else(|| bad("scheme"))?;
            }
            "levels" => {
                let levels: Result<Vec<_>> = value.split(',').map(parse_dims).collect();
                self.levels = levels?;
                if self.levels.is_empty() {
                    return Err(bad("levels"));
                }
            }
            "amplitude" => {
                let a: f64 = value.parse().map_err(|_| bad("amplitude"))?;
                if !(0.0..0.5).contains(&a) {
                    return Err(Error::Config(format!(
                        "amplitude {a} outside [0, 0.5)"
                    )));
                }
                self.amplitude = a;
            }
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "r" => {
                self.r = match value {
                    "auto" => None,
                    _ => Some(value.parse().map_err(|_| bad("r"))?),
                };
            }
            "tol" => {
                let t: f64 = value.parse().map_err(|_| bad("tol"))?;
                if !(t > 0.0) {
                    return Err(Error::Config(format!("tol {t} must be positive")));
                }
                self.tol = t;
            }
            "max_iter" => {
                self.max_iter = match value {
                    "auto" => None,
                    _ => Some(value.parse().map_err(|_| bad("max_iter"))?),
                };
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Canonical serialisation; `from_text(to_text(c)) == c`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "domain = {}", self.domain.name());
        let _ = writeln!(s, "case = {}", self.case);
        let _ = writeln!(s, "scheme = {}", self.scheme.name());
        let levels: Vec<String> = self
            .levels
            .iter()
            .map(|(i, j, k)| format!("{i}x{j}x{k}"))
            .collect();
        let _ = writeln!(s, "levels = {}", levels.join(","));
        let _ = writeln!(s, "amplitude = {}", self.amplitude);
        let _ = writeln!(s, "seed = {}", self.seed);
        match self.r {
            Some(r) => drop(writeln!(s, "r = {r}")),
            None => drop(writeln!(s, "r = auto")),
        }
        let _ = writeln!(s, "tol = {}", self.tol);
        match self.max_iter {
            Some(m) => drop(writeln!(s, "max_iter = {m}")),
            None => drop(writeln!(s, "max_iter = auto")),
        }
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        s
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_text())?)
    }
}
