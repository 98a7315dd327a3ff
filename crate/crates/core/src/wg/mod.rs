//! Polynomial bases, L² projections and the discrete weak gradient and divergence.

mod basis;
mod cell;

pub use basis::{poly_dim, CellBasis, EdgeBasis};
pub use cell::{trace_degree, CellEdgeSpace, EdgeSpace, QuadOrder, WgCell};

use crate::refmap::MapError;

#[derive(Debug, thiserror::Error)]
pub enum WgError {
    #[error("singular mass matrix on {what} {id}")]
    SingularMass { what: &'static str, id: usize },
    #[error(transparent)]
    Map(#[from] MapError),
}
