use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::basis::{poly_dim, CellBasis, EdgeBasis};
use super::WgError;
use crate::mesh::InterfaceMesh;
use crate::refmap::{edge_quadrature, CellGeometry, EdgeRule};
use crate::{Mat2, Vec2};

/// Quadrature exactness used for cell and edge integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadOrder {
    pub cell: usize,
    pub edge: usize,
}

impl QuadOrder {
    /// `2k + 2` on cells and edges.
    pub fn for_degree(k: usize) -> Self {
        QuadOrder {
            cell: 2 * k + 2,
            edge: 2 * k + 2,
        }
    }

    pub fn uniform(m: usize) -> Self {
        QuadOrder { cell: m, edge: m }
    }
}

/// Trace degree on an edge: `k` on interface edges, `k - 1` elsewhere.
pub fn trace_degree(mesh: &InterfaceMesh, e: usize, k: usize) -> usize {
    if mesh.edges[e].is_interface() {
        k
    } else {
        k - 1
    }
}

fn factor(m: DMatrix<f64>, what: &'static str, id: usize) -> Result<Cholesky<f64, Dyn>, WgError> {
    Cholesky::new(m).ok_or(WgError::SingularMass { what, id })
}

/// Trace polynomials of one edge with their quadrature and mass matrix.
#[derive(Clone, Debug)]
pub struct EdgeSpace {
    pub edge: usize,
    pub basis: EdgeBasis,
    pub rule: EdgeRule,
    /// Basis values at the rule's points, one row per point.
    pub values: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl EdgeSpace {
    pub fn new(mesh: &InterfaceMesh, e: usize, k: usize, m_edge: usize) -> Result<Self, WgError> {
        Self::from_rule(e, trace_degree(mesh, e, k), edge_quadrature(mesh, e, m_edge))
    }

    pub fn from_rule(edge: usize, degree: usize, rule: EdgeRule) -> Result<Self, WgError> {
        let basis = EdgeBasis { degree };
        let nb = basis.dim();
        let nq = rule.params.len();
        let mut values = DMatrix::zeros(nq, nb);
        let mut buf = Vec::new();
        for (q, &s) in rule.params.iter().enumerate() {
            basis.values(s, &mut buf);
            for l in 0..nb {
                values[(q, l)] = buf[l];
            }
        }
        let mut mass = DMatrix::zeros(nb, nb);
        for (q, &w) in rule.weights.iter().enumerate() {
            for l in 0..nb {
                for m in 0..nb {
                    mass[(l, m)] += w * values[(q, l)] * values[(q, m)];
                }
            }
        }
        let chol = factor(mass.clone(), "edge", edge)?;
        Ok(EdgeSpace {
            edge,
            basis,
            rule,
            values,
            mass,
            chol,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// L² projection of the values `f` sampled at the rule's points.
    pub fn project_samples(&self, f: &[f64]) -> DVector<f64> {
        let mut rhs = DVector::zeros(self.dim());
        for (q, (&w, &fq)) in self.rule.weights.iter().zip(f).enumerate() {
            for l in 0..self.dim() {
                rhs[l] += w * fq * self.values[(q, l)];
            }
        }
        self.chol.solve(&rhs)
    }

    pub fn project<F: Fn(&Vec2) -> f64>(&self, f: F) -> DVector<f64> {
        let samples: Vec<f64> = self.rule.points.iter().map(f).collect();
        self.project_samples(&samples)
    }

    /// Values at the rule's points of the trace with coefficients `coef`.
    pub fn sample(&self, coef: &[f64]) -> DVector<f64> {
        &self.values * DVector::from_column_slice(coef)
    }
}

/// One edge of a cell: the shared edge space plus cell-side data.
#[derive(Clone, Debug)]
pub struct CellEdgeSpace {
    pub space: EdgeSpace,
    pub interface: bool,
    /// Outward unit normals at the edge points.
    pub normals: Vec<Vec2>,
    /// Offset of this edge's coefficients within the scalar local vector.
    pub offset: usize,
    /// Cell basis values at the edge points, one row per point.
    pub cell_values: DMatrix<f64>,
    /// `C[l, b] = ⟨λ_l, ψ_b⟩_e`.
    pub coupling: DMatrix<f64>,
}

/// Weak Galerkin spaces and operators on one cell.
///
/// A scalar local vector is laid out as `[interior (P_k) | edge 0 | edge 1 | ...]`, in the
/// cell's counter-clockwise edge order; a velocity vector stacks the two components.
#[derive(Clone, Debug)]
pub struct WgCell {
    pub geo: CellGeometry,
    pub k: usize,
    pub basis: CellBasis,
    /// `h_T`, used by the stabilizer.
    pub h: f64,
    /// `dim P_k`.
    pub n0: usize,
    /// `dim P_{k-1}`.
    pub np: usize,
    /// Scalar local dimension.
    pub ns: usize,
    pub edges: Vec<CellEdgeSpace>,
    /// Cell basis values and gradients at the cell quadrature points, one row per point.
    pub values: DMatrix<f64>,
    pub grad_x: DMatrix<f64>,
    pub grad_y: DMatrix<f64>,
    /// `P_k` mass matrix (identity up to rounding); the `P_{k-1}` mass is its leading block.
    pub mass: DMatrix<f64>,
    /// Mass matrix of the scaled monomials before orthonormalization.
    pub monomial_mass: DMatrix<f64>,
    mass_chol: Cholesky<f64, Dyn>,
    pmass_chol: Cholesky<f64, Dyn>,
    /// `R_j[a, ·]`: right-hand side of the weak derivative in direction `j` tested with `φ_a`.
    pub moments: [DMatrix<f64>; 2],
    /// `G_j = M_{k-1}^{-1} R_j`: weak derivative coefficients in direction `j`.
    pub gradient: [DMatrix<f64>; 2],
}

impl WgCell {
    pub fn new(mesh: &InterfaceMesh, c: usize, k: usize, order: QuadOrder) -> Result<Self, WgError> {
        assert!(k >= 1, "polynomial degree must be at least 1");
        let geo = CellGeometry::new(mesh, c, order.cell, order.edge)?;
        let h = geo.diameter;
        let (n0, np) = (poly_dim(k), poly_dim(k - 1));
        let w = DMatrix::from_diagonal(&DVector::from_column_slice(&geo.quad.weights));

        // orthonormalize the scaled monomials: M = L Lᵀ, φ = L⁻¹ m
        let monomials = CellBasis::new(geo.centroid, h, k);
        let mut raw = DMatrix::zeros(geo.quad.len(), n0);
        let mut v = vec![0.0; n0];
        for (q, x) in geo.quad.points.iter().enumerate() {
            monomials.values(x, &mut v);
            raw.row_mut(q).copy_from_slice(&v);
        }
        let monomial_mass = raw.transpose() * &w * &raw;
        let l = factor(monomial_mass.clone(), "cell", c)?.unpack();
        let t = l.solve_lower_triangular(&DMatrix::identity(n0, n0)).ok_or(WgError::SingularMass { what: "cell", id: c })?;
        let basis = monomials.with_transform(t);

        let nq = geo.quad.len();
        let mut values = DMatrix::zeros(nq, n0);
        let mut grad_x = DMatrix::zeros(nq, n0);
        let mut grad_y = DMatrix::zeros(nq, n0);
        let (mut dx, mut dy) = (vec![0.0; n0], vec![0.0; n0]);
        for (q, x) in geo.quad.points.iter().enumerate() {
            basis.values_and_gradients(x, &mut v, &mut dx, &mut dy);
            for a in 0..n0 {
                values[(q, a)] = v[a];
                grad_x[(q, a)] = dx[a];
                grad_y[(q, a)] = dy[a];
            }
        }
        let wv = &w * &values;
        let mass = values.transpose() * &wv;
        let mass = 0.5 * (&mass + mass.transpose());
        let mass_chol = factor(mass.clone(), "cell", c)?;
        let pmass_chol = factor(mass.view((0, 0), (np, np)).clone_owned(), "cell", c)?;

        let mut edges = Vec::with_capacity(geo.edges.len());
        let mut offset = n0;
        for eg in &geo.edges {
            let space = EdgeSpace::from_rule(eg.edge, trace_degree(mesh, eg.edge, k), eg.rule.clone())?;
            let nqe = eg.rule.points.len();
            let mut cell_values = DMatrix::zeros(nqe, n0);
            for (q, x) in eg.rule.points.iter().enumerate() {
                basis.values(x, &mut v);
                for a in 0..n0 {
                    cell_values[(q, a)] = v[a];
                }
            }
            let we = DMatrix::from_diagonal(&DVector::from_column_slice(&eg.rule.weights));
            let coupling = space.values.transpose() * &we * &cell_values;
            let nb = space.dim();
            edges.push(CellEdgeSpace {
                space,
                interface: eg.interface,
                normals: eg.normals.clone(),
                offset,
                cell_values,
                coupling,
            });
            offset += nb;
        }
        let ns = offset;

        // R_j[a, b] = -(ψ_b, ∂_j φ_a)_T on interior, ⟨λ_l, φ_a n_j⟩_e on edges
        let mut moments = [DMatrix::zeros(np, ns), DMatrix::zeros(np, ns)];
        for (j, grad) in [&grad_x, &grad_y].into_iter().enumerate() {
            let block = -(grad.columns(0, np).transpose() * &wv);
            moments[j].view_mut((0, 0), (np, n0)).copy_from(&block);
        }
        for e in &edges {
            let nb = e.space.dim();
            for (q, (&wq, n)) in e.space.rule.weights.iter().zip(&e.normals).enumerate() {
                for a in 0..np {
                    let phi = e.cell_values[(q, a)];
                    for l in 0..nb {
                        let base = wq * phi * e.space.values[(q, l)];
                        moments[0][(a, e.offset + l)] += base * n.x;
                        moments[1][(a, e.offset + l)] += base * n.y;
                    }
                }
            }
        }
        let gradient = [pmass_chol.solve(&moments[0]), pmass_chol.solve(&moments[1])];

        Ok(WgCell {
            geo,
            k,
            basis,
            h,
            n0,
            np,
            ns,
            edges,
            values,
            grad_x,
            grad_y,
            mass,
            monomial_mass,
            mass_chol,
            pmass_chol,
            moments,
            gradient,
        })
    }

    /// Spectral condition number of the scaled-monomial mass matrix.
    pub fn monomial_condition(&self) -> f64 {
        let e = self.monomial_mass.clone().symmetric_eigen().eigenvalues;
        e.max() / e.min()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Range of local edge `j`'s coefficients within the scalar local vector.
    pub fn edge_range(&self, j: usize) -> std::ops::Range<usize> {
        let e = &self.edges[j];
        e.offset..e.offset + e.space.dim()
    }

    pub fn pressure_mass(&self) -> DMatrix<f64> {
        self.mass.view((0, 0), (self.np, self.np)).clone_owned()
    }

    /// `∫_T φ_a` for the pressure basis.
    pub fn pressure_means(&self) -> DVector<f64> {
        let w = DVector::from_column_slice(&self.geo.quad.weights);
        self.values.columns(0, self.np).transpose() * w
    }

    // ---- projections ----

    fn moments_of(&self, f: &[f64], dim: usize) -> DVector<f64> {
        let mut rhs = DVector::zeros(dim);
        for (q, (&w, &fq)) in self.geo.quad.weights.iter().zip(f).enumerate() {
            for a in 0..dim {
                rhs[a] += w * fq * self.values[(q, a)];
            }
        }
        rhs
    }

    fn samples<F: Fn(&Vec2) -> f64>(&self, f: F) -> Vec<f64> {
        self.geo.quad.points.iter().map(f).collect()
    }

    /// `Q_0`: L² projection onto `P_k(T)`.
    pub fn project_interior<F: Fn(&Vec2) -> f64>(&self, f: F) -> DVector<f64> {
        self.mass_chol.solve(&self.moments_of(&self.samples(f), self.n0))
    }

    /// L² projection onto `P_{k-1}(T)` (pressure and tensor entries).
    pub fn project_pressure<F: Fn(&Vec2) -> f64>(&self, f: F) -> DVector<f64> {
        self.pmass_chol.solve(&self.moments_of(&self.samples(f), self.np))
    }

    /// Entrywise projection of a tensor field onto `[P_{k-1}(T)]^{2×2}`; entry `[i][j]`
    /// approximates `G_ij`.
    pub fn project_tensor<F: Fn(&Vec2) -> Mat2>(&self, g: F) -> [[DVector<f64>; 2]; 2] {
        let vals: Vec<Mat2> = self.geo.quad.points.iter().map(g).collect();
        let entry = |i: usize, j: usize| {
            let s: Vec<f64> = vals.iter().map(|m| m[(i, j)]).collect();
            self.pmass_chol.solve(&self.moments_of(&s, self.np))
        };
        [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
    }

    /// `Q_b` on local edge `j`.
    pub fn project_trace<F: Fn(&Vec2) -> f64>(&self, j: usize, f: F) -> DVector<f64> {
        self.edges[j].space.project(f)
    }

    /// `Q_h u` as a local velocity vector of length `2 ns`.
    pub fn project_velocity<F: Fn(&Vec2) -> Vec2>(&self, u: F) -> DVector<f64> {
        let mut out = DVector::zeros(2 * self.ns);
        for c in 0..2 {
            let base = c * self.ns;
            let q0 = self.project_interior(|x| u(x)[c]);
            out.rows_mut(base, self.n0).copy_from(&q0);
            for j in 0..self.num_edges() {
                let r = self.edge_range(j);
                let qb = self.project_trace(j, |x| u(x)[c]);
                out.rows_mut(base + r.start, r.len()).copy_from(&qb);
            }
        }
        out
    }

    // ---- weak operators ----

    /// Weak gradient of a scalar local vector: coefficients of the two weak partial
    /// derivatives in `P_{k-1}(T)`.
    pub fn weak_gradient(&self, v: &[f64]) -> [DVector<f64>; 2] {
        let v = DVector::from_column_slice(v);
        [&self.gradient[0] * &v, &self.gradient[1] * &v]
    }

    /// Weak divergence of a local velocity vector.
    pub fn weak_divergence(&self, v: &[f64]) -> DVector<f64> {
        let (a, b) = v.split_at(self.ns);
        &self.gradient[0] * DVector::from_column_slice(a) + &self.gradient[1] * DVector::from_column_slice(b)
    }

    // ---- local forms ----

    /// Scalar block of `(A ∇_w v, ∇_w w)_T`, with `A` acting on the derivative index.
    pub fn stiffness(&self, a: &Mat2) -> DMatrix<f64> {
        let mut k = DMatrix::zeros(self.ns, self.ns);
        for j in 0..2 {
            for l in 0..2 {
                if a[(j, l)] != 0.0 {
                    k += a[(j, l)] * self.gradient[j].transpose() * &self.moments[l];
                }
            }
        }
        0.5 * (&k + k.transpose())
    }

    /// Scalar block of the stabilizer: `h_T^{-1}⟨Q_b v_0 - v_b, Q_b w_0 - w_b⟩` on edges off the
    /// interface, `h_T^{-1}⟨v_0 - v_b, w_0 - w_b⟩` on interface edges.
    pub fn stabilizer(&self) -> DMatrix<f64> {
        let (n0, ns) = (self.n0, self.ns);
        let mut s = DMatrix::zeros(ns, ns);
        for e in &self.edges {
            let nb = e.space.dim();
            let c = &e.coupling;
            let interior = if e.interface {
                let we = DMatrix::from_diagonal(&DVector::from_column_slice(&e.space.rule.weights));
                e.cell_values.transpose() * we * &e.cell_values
            } else {
                c.transpose() * e.space.chol.solve(c)
            };
            let mut blk = s.view_mut((0, 0), (n0, n0));
            blk += interior;
            let mut blk = s.view_mut((0, e.offset), (n0, nb));
            blk -= c.transpose();
            let mut blk = s.view_mut((e.offset, 0), (nb, n0));
            blk -= c;
            let mut blk = s.view_mut((e.offset, e.offset), (nb, nb));
            blk += &e.space.mass;
        }
        s /= self.h;
        0.5 * (&s + s.transpose())
    }

    /// `−(∇_w·v, q)_T`: `np × 2ns`.
    pub fn divergence_form(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.np, 2 * self.ns);
        b.view_mut((0, 0), (self.np, self.ns)).copy_from(&(-&self.moments[0]));
        b.view_mut((0, self.ns), (self.np, self.ns)).copy_from(&(-&self.moments[1]));
        b
    }

    /// `(f, v_0)_T` as a local velocity vector (edge entries zero).
    pub fn load<F: Fn(&Vec2) -> Vec2>(&self, f: F) -> DVector<f64> {
        let vals: Vec<Vec2> = self.geo.quad.points.iter().map(f).collect();
        let mut out = DVector::zeros(2 * self.ns);
        for c in 0..2 {
            let s: Vec<f64> = vals.iter().map(|v| v[c]).collect();
            out.rows_mut(c * self.ns, self.n0).copy_from(&self.moments_of(&s, self.n0));
        }
        out
    }

    /// Block-diagonal vector form of a scalar block.
    pub fn vector_block(&self, scalar: &DMatrix<f64>) -> DMatrix<f64> {
        let ns = self.ns;
        let mut m = DMatrix::zeros(2 * ns, 2 * ns);
        m.view_mut((0, 0), (ns, ns)).copy_from(scalar);
        m.view_mut((ns, ns), (ns, ns)).copy_from(scalar);
        m
    }

    /// Value at `x` of the interior polynomial with coefficients `coef`.
    pub fn eval_interior(&self, coef: &[f64], x: &Vec2) -> f64 {
        self.basis.eval(coef, x)
    }
}
