//! Finite volume solver for the 3D Laplace equation with oblique derivative
//! boundary conditions on generalized hexahedral meshes.
//!
//! The boundary condition `∇T·V = g` on a distinguished surface `Γ` (with `V`
//! non-tangential) is recast as a Neumann condition plus a surface
//! advection-reaction term, discretised with a stabilised centred scheme.
//! Upwind and normal-splitting variants are provided for comparison, together
//! with mesh regularity diagnostics, discrete energy norms, and a convergence
//! study driver.
//!
//! The main entry points are:
//! - [`grid::generate_grid`] and [`mesh::build_mesh`] to produce a mesh,
//! - [`cases::builtin_cases`] for the manufactured test problems,
//! - [`assemble`] to build the linear systems and [`solver`] to solve them,
//! - [`norms`] for interpolation, error norms and convergence rates,
//! - [`study::run_study`] for a full refinement experiment.

pub mod assemble;
pub mod cases;
pub mod config;
pub mod domain;
pub mod error;
pub mod field;
pub mod flux;
pub mod geometry;
pub mod grid;
pub mod hmm;
pub mod mesh;
pub mod norms;
pub mod regularity;
pub mod rng;
pub mod solver;
pub mod stencil;
pub mod study;
pub mod vtk;

pub use error::{Error, Result};
