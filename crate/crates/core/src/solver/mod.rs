//! Direct solution of the constrained saddle-point system and recovery of the discrete
//! velocity and pressure.
//!
//! Interior velocities and non-constant pressures of a cell couple only to that cell's
//! traces and constant pressure. They are eliminated cell by cell with dense LU, the
//! remaining trace/constant-pressure/multiplier system is factored with sparse LU, and
//! iterative refinement against the full matrix follows.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::Mat;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::assembly::{with_workers, CsrMatrix, SaddlePointSystem, TripletBuilder};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("singular system: {reason}")]
    SingularSystem { reason: String },
    #[error("condensation blocks {first} and {second} are coupled")]
    CoupledBlocks { first: usize, second: usize },
}

fn singular(reason: impl Into<String>) -> SolverError {
    SolverError::SingularSystem { reason: reason.into() }
}

/// Converts to faer's compressed-column format.
pub fn to_faer(m: &CsrMatrix) -> SparseColMat<usize, f64> {
    let t = m.transpose();
    let symbolic = SymbolicSparseColMat::new_checked(m.nrows, m.ncols, t.indptr, None, t.indices);
    SparseColMat::new(symbolic, t.values)
}

struct BlockFactor {
    inner: Vec<usize>,
    outer: Vec<usize>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    /// `M_II^{-1} M_IO`.
    coupling: DMatrix<f64>,
    /// `M_OI`.
    back: DMatrix<f64>,
}

/// Reusable factorization of a square sparse matrix with a set of disjoint unknown blocks
/// that are condensed out before the sparse factorization.
pub struct Factorization {
    n: usize,
    blocks: Vec<BlockFactor>,
    reduced: Vec<usize>,
    position: Vec<usize>,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    pub reduced_nnz: usize,
}

const NONE: usize = usize::MAX;

fn factor_block(
    m: &CsrMatrix,
    mt: &CsrMatrix,
    owner: &[usize],
    b: usize,
    inner: &[usize],
) -> Result<BlockFactor, SolverError> {
    let ni = inner.len();
    let local = |i: usize| inner.iter().position(|&x| x == i).unwrap();
    let mut outer = Vec::new();
    for &i in inner {
        for (j, _) in m.row(i).chain(mt.row(i)) {
            match owner[j] {
                NONE => outer.push(j),
                o if o == b => {}
                o => return Err(SolverError::CoupledBlocks { first: b, second: o }),
            }
        }
    }
    outer.sort_unstable();
    outer.dedup();
    let slot = |j: usize| outer.binary_search(&j).unwrap();
    let no = outer.len();
    let mut m_ii = DMatrix::zeros(ni, ni);
    let mut m_io = DMatrix::zeros(ni, no);
    let mut m_oi = DMatrix::zeros(no, ni);
    for (a, &i) in inner.iter().enumerate() {
        for (j, v) in m.row(i) {
            if owner[j] == b {
                m_ii[(a, local(j))] = v;
            } else {
                m_io[(a, slot(j))] = v;
            }
        }
        for (j, v) in mt.row(i) {
            if owner[j] != b {
                m_oi[(slot(j), a)] = v;
            }
        }
    }
    let scale = m_ii.amax();
    let lu = m_ii.lu();
    let pivot = (0..ni).map(|i| lu.u()[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if ni > 0 && !(pivot > 1e-13 * scale) {
        return Err(singular(format!("cell block {b} has no invertible interior problem")));
    }
    let coupling = lu.solve(&m_io).ok_or_else(|| singular(format!("cell block {b}")))?;
    Ok(BlockFactor {
        inner: inner.to_vec(),
        outer,
        lu,
        coupling,
        back: m_oi,
    })
}

impl Factorization {
    pub fn new(m: &CsrMatrix, blocks: &[Vec<usize>]) -> Result<Self, SolverError> {
        assert_eq!(m.nrows, m.ncols);
        let n = m.nrows;
        let mut owner = vec![NONE; n];
        for (b, idx) in blocks.iter().enumerate() {
            for &i in idx {
                assert_eq!(owner[i], NONE, "unknown {i} in two blocks");
                owner[i] = b;
            }
        }
        let mt = m.transpose();
        let factors: Vec<BlockFactor> = with_workers(|| {
            blocks
                .par_iter()
                .enumerate()
                .map(|(b, idx)| factor_block(m, &mt, &owner, b, idx))
                .collect::<Result<_, _>>()
        })?;

        let reduced: Vec<usize> = (0..n).filter(|&i| owner[i] == NONE).collect();
        let mut position = vec![NONE; n];
        for (r, &i) in reduced.iter().enumerate() {
            position[i] = r;
        }
        let nr = reduced.len();
        let mut t = TripletBuilder::new(nr, nr);
        for &i in &reduced {
            for (j, v) in m.row(i) {
                if owner[j] == NONE {
                    t.push(position[i], position[j], v);
                }
            }
        }
        for f in &factors {
            let schur = &f.back * &f.coupling;
            for (a, &i) in f.outer.iter().enumerate() {
                for (c, &j) in f.outer.iter().enumerate() {
                    t.push(position[i], position[j], -schur[(a, c)]);
                }
            }
        }
        let reduced_matrix = t.build();
        let reduced_nnz = reduced_matrix.nnz();
        let lu = to_faer(&reduced_matrix)
            .sp_lu()
            .map_err(|e| singular(format!("sparse LU of the condensed system failed ({e:?}); is the pressure gauge present and the mesh connected?")))?;
        Ok(Factorization {
            n,
            blocks: factors,
            reduced,
            position,
            lu,
            reduced_nnz,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn reduced_dim(&self) -> usize {
        self.reduced.len()
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        assert_eq!(rhs.len(), self.n);
        let mut r = Mat::<f64>::from_fn(self.reduced.len(), 1, |i, _| rhs[self.reduced[i]]);
        let inner_rhs = |f: &BlockFactor| DVector::from_iterator(f.inner.len(), f.inner.iter().map(|&i| rhs[i]));
        for f in &self.blocks {
            let z = f.lu.solve(&inner_rhs(f)).expect("factored block");
            let contrib = &f.back * z;
            for (a, &i) in f.outer.iter().enumerate() {
                r[(self.position[i], 0)] -= contrib[a];
            }
        }
        let xr = self.lu.solve(&r);
        let mut x = DVector::zeros(self.n);
        for (p, &i) in self.reduced.iter().enumerate() {
            x[i] = xr[(p, 0)];
        }
        for f in &self.blocks {
            let xo = DVector::from_iterator(f.outer.len(), f.outer.iter().map(|&i| x[i]));
            let xi = f.lu.solve(&inner_rhs(f)).expect("factored block") - &f.coupling * xo;
            for (a, &i) in f.inner.iter().enumerate() {
                x[i] = xi[a];
            }
        }
        x
    }
}

/// Factorization and residual statistics of one solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub dim: usize,
    pub reduced_dim: usize,
    pub reduced_nnz: usize,
    pub refinement_steps: usize,
    /// `‖M x - rhs‖ / ‖rhs‖` (absolute when the right-hand side vanishes).
    pub relative_residual: f64,
}

/// Discrete solution: full velocity vector (both interface slots), pressure coefficients
/// and the gauge multiplier.
#[derive(Clone, Debug)]
pub struct WgSolution {
    pub velocity: DVector<f64>,
    pub pressure: DVector<f64>,
    pub multiplier: f64,
    /// The solved vector of unknowns.
    pub unknowns: DVector<f64>,
    pub report: SolveReport,
}

const MAX_REFINEMENT: usize = 4;

/// Solves `M x = rhs` with a prepared factorization and iterative refinement.
pub fn solve_refined(m: &CsrMatrix, fact: &Factorization, rhs: &DVector<f64>) -> Result<(DVector<f64>, usize, f64), SolverError> {
    let norm = rhs.norm();
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let mut x = fact.solve(rhs);
    let mut res = (rhs - m.mul_vec(x.as_slice())).norm() / scale;
    let mut steps = 0;
    while steps < MAX_REFINEMENT && res > 1e-15 {
        let r = rhs - m.mul_vec(x.as_slice());
        let candidate = &x + fact.solve(&r);
        let next = (rhs - m.mul_vec(candidate.as_slice())).norm() / scale;
        steps += 1;
        if !(next < res) {
            break;
        }
        x = candidate;
        res = next;
    }
    if !res.is_finite() || res > 1e-8 {
        return Err(singular(format!("relative residual {res:e} after refinement")));
    }
    Ok((x, steps, res))
}

/// Solves the constrained system.
pub fn solve(system: &SaddlePointSystem) -> Result<WgSolution, SolverError> {
    faer::set_global_parallelism(faer::Par::Seq);
    if system.gauge.iter().all(|&g| g == 0.0) {
        return Err(singular("pressure gauge missing"));
    }
    let m = system.matrix();
    let fact = Factorization::new(&m, &system.cell_blocks())?;
    let rhs = system.rhs();
    let (x, steps, res) = solve_refined(&m, &fact, &rhs)?;
    let d = &system.dofs;
    Ok(WgSolution {
        velocity: system.full_velocity(x.as_slice()),
        pressure: x.rows(d.n_free, d.n_pressure).clone_owned(),
        multiplier: x[d.multiplier()],
        report: SolveReport {
            dim: fact.dim(),
            reduced_dim: fact.reduced_dim(),
            reduced_nnz: fact.reduced_nnz,
            refinement_steps: steps,
            relative_residual: res,
        },
        unknowns: x,
    })
}

/// Residuals of the three block rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport {
    /// `‖A_s u + Bᵀ p - F‖`.
    pub momentum: f64,
    /// `‖B u + g λ - G‖`.
    pub divergence: f64,
    /// `|gᵀ p|`.
    pub gauge: f64,
    /// `‖u‖` over the free velocity unknowns.
    pub velocity_norm: f64,
    pub load_norm: f64,
}

impl ResidualReport {
    pub fn relative_momentum(&self) -> f64 {
        self.momentum / self.load_norm.max(f64::MIN_POSITIVE)
    }

    pub fn relative_divergence(&self) -> f64 {
        self.divergence / self.velocity_norm.max(f64::MIN_POSITIVE)
    }
}

/// Residuals of a vector of unknowns `x` against the system.
pub fn residual_report(system: &SaddlePointSystem, x: &[f64]) -> ResidualReport {
    let d = &system.dofs;
    let (u, rest) = x.split_at(d.n_free);
    let (p, lam) = rest.split_at(d.n_pressure);
    let momentum = system.a.mul_vec(u) + system.b.tr_mul_vec(p) - &system.f;
    let divergence = system.b.mul_vec(u) + &system.gauge * lam[0] - &system.g;
    let gauge = system.gauge.dot(&DVector::from_column_slice(p));
    ResidualReport {
        momentum: momentum.norm(),
        divergence: divergence.norm(),
        gauge: gauge.abs(),
        velocity_norm: DVector::from_column_slice(u).norm(),
        load_norm: system.f.norm().max(system.g.norm()),
    }
}
