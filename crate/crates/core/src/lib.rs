//! Weak Galerkin discretization of two-phase Stokes interface problems on
//! interface-fitted meshes whose interface cells carry the exact curved arc.
//!
//! The pipeline is
//! [`mesh`] (background grid, interface fitting) →
//! [`refmap`] (cell maps and quadrature) →
//! [`wg`] (bases, projections, weak operators) →
//! [`assembly`] (saddle-point system with constraints) →
//! [`solver`] (direct factorization) →
//! [`verify`] (manufactured problems, errors, property checks).

pub mod assembly;
pub mod error;
pub mod mesh;
pub mod refmap;
pub mod solver;
pub mod verify;
pub mod wg;

pub use error::Error;

/// Points and vectors in the plane.
pub type Vec2 = nalgebra::Vector2<f64>;
/// Constant 2×2 matrices (viscosity coefficients, gradients).
pub type Mat2 = nalgebra::Matrix2<f64>;

/// 2D cross product `a.x*b.y - a.y*b.x`.
#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}
