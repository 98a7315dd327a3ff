use crate::assembly::AssemblyError;
use crate::mesh::MeshError;
use crate::refmap::MapError;
use crate::solver::SolverError;
use crate::verify::VerifyError;
use crate::wg::WgError;

/// Any failure of the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Wg(#[from] WgError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}
