//! Global saddle-point system: DOF numbering, local forms, boundary and interface
//! constraints, and the mean-zero pressure gauge.
//!
//! Constraints are applied while scattering: boundary traces are fixed to `Q_b g`, the
//! side-two trace of every interface edge is replaced by `u_1b - Q_b φ`, and the
//! resulting affine shifts move to the right-hand side. The constrained matrix is
//!
//! ```text
//! [ A_s  Bᵀ  0 ]
//! [ B    0   g ]
//! [ 0    gᵀ  0 ]
//! ```
//!
//! where `g` integrates the pressure over the domain.

mod dofs;
mod sparse;

pub use dofs::{DofMap, SlotKind};
pub use sparse::{CsrMatrix, TripletBuilder};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::mesh::{EdgeTag, InterfaceMesh, Subdomain};
use crate::wg::{QuadOrder, WgCell, WgError};
use crate::{Mat2, Vec2};

#[derive(Debug, thiserror::Error)]
pub enum AssemblyError {
    #[error("cell {cell}: {source}")]
    Cell {
        cell: usize,
        #[source]
        source: WgError,
    },
    #[error("velocity DOF {dof} constrained twice with different values ({first:e} and {second:e})")]
    InconsistentConstraint { dof: usize, first: f64, second: f64 },
    #[error("coefficient of subdomain {side} is not symmetric positive definite")]
    NotPositiveDefinite { side: u8 },
}

/// Coefficients and data of a two-phase Stokes interface problem.
pub trait ProblemData: Sync {
    /// Constant viscosity coefficient of a subdomain.
    fn coefficient(&self, side: Subdomain) -> Mat2;
    fn body_force(&self, side: Subdomain, x: &Vec2) -> Vec2;
    /// Dirichlet velocity on the domain boundary, seen from a cell of subdomain `side`.
    fn boundary_velocity(&self, side: Subdomain, x: &Vec2) -> Vec2;
    /// `u_1 - u_2` on the interface.
    fn velocity_jump(&self, x: &Vec2) -> Vec2;
    /// Jump of the normal stress on the interface; `normal` points out of subdomain one.
    fn flux_jump(&self, x: &Vec2, normal: &Vec2) -> Vec2;
}

/// Ellipticity bounds `(k1, k2)` of both coefficients, measured on random unit vectors.
pub fn coefficient_bounds(data: &dyn ProblemData, seed: u64) -> Result<(f64, f64), AssemblyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for side in [Subdomain::One, Subdomain::Two] {
        let a = data.coefficient(side);
        let bad = AssemblyError::NotPositiveDefinite { side: side.label() };
        if (a - a.transpose()).amax() > 1e-14 * a.amax() {
            return Err(bad);
        }
        for _ in 0..64 {
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let v = Vec2::new(t.cos(), t.sin());
            let q = v.dot(&(a * v));
            lo = lo.min(q);
            hi = hi.max(q);
        }
        if lo <= 0.0 {
            return Err(bad);
        }
    }
    Ok((lo, hi))
}

/// Local matrices and load of one cell, as velocity vectors of length `2 ns`.
#[derive(Clone, Debug)]
pub struct LocalForms {
    /// `(A ∇_w v, ∇_w w)_T`.
    pub stiffness: DMatrix<f64>,
    /// `s_T(v, w)`.
    pub stabilizer: DMatrix<f64>,
    /// `-(∇_w·v, q)_T`, `dim P_{k-1} × 2 ns`.
    pub divergence: DMatrix<f64>,
    /// `(f, v_0)_T`.
    pub load: DVector<f64>,
}

pub fn local_forms(cell: &WgCell, data: &dyn ProblemData) -> LocalForms {
    let side = cell.geo.subdomain;
    LocalForms {
        stiffness: cell.vector_block(&cell.stiffness(&data.coefficient(side))),
        stabilizer: cell.vector_block(&cell.stabilizer()),
        divergence: cell.divergence_form(),
        load: cell.load(|x| data.body_force(side, x)),
    }
}

/// `⟨ψ, v_b⟩_e` on local interface edge `j` of `cell`, per component
/// (length `2 (trace degree + 1)`).
pub fn interface_load(cell: &WgCell, j: usize, data: &dyn ProblemData) -> DVector<f64> {
    let e = &cell.edges[j];
    assert!(e.interface, "edge {} is not on the interface", e.space.edge);
    let sign = if cell.geo.subdomain == Subdomain::One { 1.0 } else { -1.0 };
    let nb = e.space.dim();
    let mut out = DVector::zeros(2 * nb);
    for (q, (x, n)) in e.space.rule.points.iter().zip(&e.normals).enumerate() {
        let psi = data.flux_jump(x, &(sign * n));
        let w = e.space.rule.weights[q];
        for l in 0..nb {
            let phi = w * e.space.values[(q, l)];
            out[l] += phi * psi.x;
            out[nb + l] += phi * psi.y;
        }
    }
    out
}

/// Values of the constrained velocity DOFs (`Q_b g` on the boundary, `-Q_b φ` shifts on
/// side-two interface traces), zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraints {
    pub offset: DVector<f64>,
    set: Vec<bool>,
}

impl Constraints {
    pub fn new(n_velocity: usize) -> Self {
        Constraints {
            offset: DVector::zeros(n_velocity),
            set: vec![false; n_velocity],
        }
    }

    /// Records the constraint value of a full velocity DOF.
    pub fn fix(&mut self, dof: usize, value: f64) -> Result<(), AssemblyError> {
        if self.set[dof] {
            let first = self.offset[dof];
            if (first - value).abs() > 1e-10 {
                return Err(AssemblyError::InconsistentConstraint {
                    dof,
                    first,
                    second: value,
                });
            }
            return Ok(());
        }
        self.set[dof] = true;
        self.offset[dof] = value;
        Ok(())
    }

    pub fn is_set(&self, dof: usize) -> bool {
        self.set[dof]
    }
}

/// The constrained saddle-point system.
#[derive(Clone, Debug)]
pub struct SaddlePointSystem {
    pub dofs: DofMap,
    /// `a + s` on free velocity DOFs.
    pub a: CsrMatrix,
    /// `b` with rows per pressure DOF and columns per free velocity DOF.
    pub b: CsrMatrix,
    /// `∫_T q` for every pressure basis function.
    pub gauge: DVector<f64>,
    pub f: DVector<f64>,
    pub g: DVector<f64>,
    pub constraints: Constraints,
}

impl SaddlePointSystem {
    pub fn dim(&self) -> usize {
        self.dofs.num_unknowns()
    }

    /// The full symmetric matrix including the gauge row and column.
    pub fn matrix(&self) -> CsrMatrix {
        let nf = self.dofs.n_free;
        let lam = self.dofs.multiplier();
        let mut t = TripletBuilder::new(self.dim(), self.dim());
        t.reserve(self.a.nnz() + 2 * self.b.nnz() + 2 * self.dofs.num_unknowns());
        let bt = self.b.transpose();
        for i in 0..nf {
            for (j, v) in self.a.row(i) {
                t.push(i, j, v);
            }
            for (p, v) in bt.row(i) {
                t.push(i, nf + p, v);
            }
        }
        for p in 0..self.dofs.n_pressure {
            for (j, v) in self.b.row(p) {
                t.push(nf + p, j, v);
            }
            if self.gauge[p] != 0.0 {
                t.push(nf + p, lam, self.gauge[p]);
            }
        }
        for p in 0..self.dofs.n_pressure {
            if self.gauge[p] != 0.0 {
                t.push(lam, nf + p, self.gauge[p]);
            }
        }
        t.build()
    }

    pub fn rhs(&self) -> DVector<f64> {
        let mut r = DVector::zeros(self.dim());
        r.rows_mut(0, self.dofs.n_free).copy_from(&self.f);
        r.rows_mut(self.dofs.n_free, self.dofs.n_pressure).copy_from(&self.g);
        r
    }

    /// Per-cell unknown sets that couple only to themselves and to the remaining
    /// unknowns: interior velocities and the non-constant pressures.
    pub fn cell_blocks(&self) -> Vec<Vec<usize>> {
        let d = &self.dofs;
        (0..d.cell_interior.len())
            .map(|c| {
                let mut idx: Vec<usize> = d.cell_interior[c].clone().collect();
                idx.extend((1..d.np).map(|a| d.pressure_unknown(c, a)));
                idx
            })
            .collect()
    }

    /// Full velocity vector (both interface slots, constrained values filled in) from a
    /// vector of unknowns.
    pub fn full_velocity(&self, x: &[f64]) -> DVector<f64> {
        let d = &self.dofs;
        DVector::from_fn(d.n_velocity, |i, _| {
            d.unknown(i).map_or(0.0, |u| x[u]) + self.constraints.offset[i]
        })
    }
}

/// Worker count from `WG_THREADS`, defaulting to the available parallelism.
pub fn worker_threads() -> usize {
    std::env::var("WG_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` on a pool of [`worker_threads`] workers.
pub fn with_workers<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(worker_threads()).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Builds the weak Galerkin cell of every mesh cell in parallel, in cell order.
pub fn build_cells(mesh: &InterfaceMesh, k: usize, order: QuadOrder) -> Result<Vec<WgCell>, AssemblyError> {
    with_workers(|| {
        (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| WgCell::new(mesh, c, k, order).map_err(|source| AssemblyError::Cell { cell: c, source }))
            .collect()
    })
}

struct CellContribution {
    full: Vec<usize>,
    matrix: DMatrix<f64>,
    divergence: DMatrix<f64>,
    load: DVector<f64>,
    /// Constraint value per local DOF (zero on free DOFs).
    offset: DVector<f64>,
    constant_mean: f64,
}

fn cell_contribution(
    mesh: &InterfaceMesh,
    dofs: &DofMap,
    c: usize,
    order: QuadOrder,
    data: &dyn ProblemData,
) -> Result<CellContribution, AssemblyError> {
    let cell = WgCell::new(mesh, c, dofs.k, order).map_err(|source| AssemblyError::Cell { cell: c, source })?;
    let forms = local_forms(&cell, data);
    let side = cell.geo.subdomain;
    let mut load = forms.load;
    let mut offset = DVector::zeros(2 * cell.ns);
    for j in 0..cell.num_edges() {
        let e = &cell.edges[j];
        let r = cell.edge_range(j);
        let nb = r.len();
        let put = |v: &mut DVector<f64>, vals: &DVector<f64>, comp: usize, scale: f64| {
            for l in 0..nb {
                v[comp * cell.ns + r.start + l] += scale * vals[l];
            }
        };
        match mesh.edges[e.space.edge].tag {
            EdgeTag::Boundary => {
                for comp in 0..2 {
                    let qb = e.space.project(|x| data.boundary_velocity(side, x)[comp]);
                    put(&mut offset, &qb, comp, 1.0);
                }
            }
            EdgeTag::Interface if side == Subdomain::Two => {
                for comp in 0..2 {
                    let qb = e.space.project(|x| data.velocity_jump(x)[comp]);
                    put(&mut offset, &qb, comp, -1.0);
                }
            }
            EdgeTag::Interface => {
                let psi = interface_load(&cell, j, data);
                for comp in 0..2 {
                    let part = psi.rows(comp * nb, nb).clone_owned();
                    put(&mut load, &part, comp, 1.0);
                }
            }
            EdgeTag::Interior => {}
        }
    }
    Ok(CellContribution {
        full: dofs.local_to_full(mesh, c),
        matrix: forms.stiffness + forms.stabilizer,
        divergence: forms.divergence,
        load,
        offset,
        constant_mean: cell.pressure_means()[0],
    })
}

/// Assembles the constrained system with the default quadrature for degree `k`.
pub fn assemble(mesh: &InterfaceMesh, k: usize, data: &dyn ProblemData) -> Result<SaddlePointSystem, AssemblyError> {
    assemble_with(mesh, k, data, QuadOrder::for_degree(k))
}

/// Assembles the constrained system. Local forms are computed in parallel; the scatter
/// runs in cell order, so the result does not depend on the worker count.
pub fn assemble_with(
    mesh: &InterfaceMesh,
    k: usize,
    data: &dyn ProblemData,
    order: QuadOrder,
) -> Result<SaddlePointSystem, AssemblyError> {
    coefficient_bounds(data, 0)?;
    let dofs = DofMap::new(mesh, k);
    let parts: Vec<CellContribution> = with_workers(|| {
        (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| cell_contribution(mesh, &dofs, c, order, data))
            .collect::<Result<_, _>>()
    })?;

    let nf = dofs.n_free;
    let mut constraints = Constraints::new(dofs.n_velocity);
    let mut at = TripletBuilder::new(nf, nf);
    let mut bt = TripletBuilder::new(dofs.n_pressure, nf);
    at.reserve(parts.iter().map(|p| p.matrix.len()).sum());
    bt.reserve(parts.iter().map(|p| p.divergence.len()).sum());
    let mut f = DVector::zeros(nf);
    let mut g = DVector::zeros(dofs.n_pressure);
    let mut gauge = DVector::zeros(dofs.n_pressure);
    for (c, part) in parts.iter().enumerate() {
        let unknowns: Vec<Option<usize>> = part.full.iter().map(|&i| dofs.unknown(i)).collect();
        for (i, &full) in part.full.iter().enumerate() {
            if part.offset[i] != 0.0 || dofs.unknown(full).is_none() {
                constraints.fix(full, part.offset[i])?;
            }
        }
        for (i, ui) in unknowns.iter().enumerate() {
            let Some(ui) = *ui else { continue };
            f[ui] += part.load[i];
            for (j, uj) in unknowns.iter().enumerate() {
                let v = part.matrix[(i, j)];
                if v == 0.0 {
                    continue;
                }
                if let Some(uj) = *uj {
                    at.push(ui, uj, v);
                }
                f[ui] -= v * part.offset[j];
            }
        }
        for a in 0..dofs.np {
            let p = dofs.pressure[c].start + a;
            for (j, uj) in unknowns.iter().enumerate() {
                let v = part.divergence[(a, j)];
                if v == 0.0 {
                    continue;
                }
                if let Some(uj) = *uj {
                    bt.push(p, uj, v);
                }
                g[p] -= v * part.offset[j];
            }
        }
        // the orthonormal pressure basis makes every non-constant function mean-zero
        gauge[dofs.pressure[c].start] = part.constant_mean;
    }
    Ok(SaddlePointSystem {
        dofs,
        a: at.build(),
        b: bt.build(),
        gauge,
        f,
        g,
        constraints,
    })
}
