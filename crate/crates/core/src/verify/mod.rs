//! Manufactured problems, discrete error norms, convergence studies and the property
//! checks run against the discretization.

mod checks;
mod errors;
mod problems;
mod study;

pub use checks::{
    commutation_defect, consistency_problem, curved_commutation_gap, divergence_theorem_gap, error_equation_gap, infsup_dense,
    infsup_lanczos, infsup_sequence, min_ritz_value, patch_test, property_suite, test_meshes, CheckResult, Consistency, Gauge,
};
pub use errors::{compute_errors, energy_squared, local_velocity, pressure_mean, project_pressure, project_velocity, ErrorNorms};
pub use problems::{Field, Hessians, ManufacturedProblem};
pub use study::{
    convergence_study, observed_order, problem_mesh, run_mesh, sci, ErrorReport, LevelResult, Orders, Run, StudyConfig,
};

use crate::assembly::AssemblyError;
use crate::mesh::MeshError;
use crate::solver::SolverError;
use crate::wg::WgError;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown problem {0}; expected 1, 2 or 3")]
    UnknownProblem(u32),
    #[error("problem {problem}: derivative mismatch {error:e} at ({x}, {y})")]
    DerivativeMismatch { problem: u32, x: f64, y: f64, error: f64 },
    #[error("level {level}: {source}")]
    Level {
        level: u32,
        #[source]
        source: Box<VerifyError>,
    },
    #[error("velocity stiffness is not positive definite")]
    NotPositiveDefinite,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Wg(#[from] WgError),
    #[error(transparent)]
    Map(#[from] crate::refmap::MapError),
}
