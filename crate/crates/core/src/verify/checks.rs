use faer::linalg::solvers::Solve;
use faer::Mat;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::errors::{local_velocity, pressure_mean, project_pressure, project_velocity, ErrorNorms};
use super::study::{problem_mesh, run_mesh};
use super::{Field, ManufacturedProblem, VerifyError};
use crate::assembly::{assemble_with, build_cells, CsrMatrix, SaddlePointSystem};
use crate::mesh::{build_background_mesh, InterfaceCurve, InterfaceMesh, MeshKind, Rect};
use crate::refmap::CellGeometry;
use crate::solver::{solve, to_faer};
use crate::wg::{CellBasis, QuadOrder, WgCell};
use crate::{Mat2, Vec2};

/// Random polynomial vector field in scaled monomials about a cell's centroid.
struct RandomField {
    basis: CellBasis,
    coef: [Vec<f64>; 2],
}

impl RandomField {
    fn new(cell: &WgCell, degree: usize, rng: &mut ChaCha8Rng) -> Self {
        let basis = CellBasis::new(cell.geo.centroid, cell.h, degree);
        let mut draw = || (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>();
        let coef = [draw(), draw()];
        RandomField { basis, coef }
    }

    fn value(&self, x: &Vec2) -> Vec2 {
        Vec2::new(self.basis.eval(&self.coef[0], x), self.basis.eval(&self.coef[1], x))
    }

    fn gradient(&self, x: &Vec2) -> Mat2 {
        let n = self.basis.dim();
        let (mut v, mut dx, mut dy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        self.basis.values_and_gradients(x, &mut v, &mut dx, &mut dy);
        let dot = |d: &[f64], c: &[f64]| d.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
        Mat2::new(
            dot(&dx, &self.coef[0]),
            dot(&dy, &self.coef[0]),
            dot(&dx, &self.coef[1]),
            dot(&dy, &self.coef[1]),
        )
    }
}

/// Largest coefficient defect of `∇_w Q_h u = ℚ_h ∇u` and `∇_w·Q_h u = 𝒬_h ∇·u` on straight
/// cells, over `trials` random polynomial fields of degree `k + 1`.
pub fn commutation_defect(seed: u64, trials: usize) -> Result<f64, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let meshes = [MeshKind::Tri, MeshKind::Quad].map(|kind| build_background_mesh(Rect::biunit(), 0, kind));
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mesh = &meshes[t % 2];
        let k = 1 + (t / 2) % 3;
        let c = rng.random_range(0..mesh.num_cells());
        let cell = WgCell::new(mesh, c, k, QuadOrder::for_degree(k))?;
        let u = RandomField::new(&cell, k + 1, &mut rng);
        let v = cell.project_velocity(|x| u.value(x));
        let grad = cell.project_tensor(|x| u.gradient(x));
        for comp in 0..2 {
            let wg = cell.weak_gradient(&v.as_slice()[comp * cell.ns..(comp + 1) * cell.ns]);
            for j in 0..2 {
                worst = worst.max((&wg[j] - &grad[comp][j]).amax());
            }
        }
        let div = cell.project_pressure(|x| u.gradient(x).trace());
        worst = worst.max((cell.weak_divergence(v.as_slice()) - div).amax());
    }
    Ok(worst)
}

/// On curved interface cells, the largest gap between the commutation defects
/// `(∇_w Q_h u - ℚ_h ∇u, τ)` and `(∇_w·Q_h u - 𝒬_h ∇·u, q)` and their interface terms
/// `⟨Q_b u - u, τ n⟩` and `⟨(Q_b u - u)·n, q⟩`.
pub fn curved_commutation_gap(seed: u64, trials: usize) -> Result<f64, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let curve = InterfaceCurve::polar_star(0.5, 0.25, 2.0);
    let mut worst: f64 = 0.0;
    for (m, kind) in [MeshKind::Tri, MeshKind::Quad].into_iter().enumerate() {
        let mesh = crate::mesh::fit_interface(&build_background_mesh(Rect::biunit(), 1, kind), curve)?;
        let curved: Vec<usize> = (0..mesh.num_cells()).filter(|&c| mesh.cell_is_curved(c)).collect();
        for t in (m..trials).step_by(2) {
            let k = 1 + t % 3;
            let c = curved[rng.random_range(0..curved.len())];
            let cell = WgCell::new(&mesh, c, k, QuadOrder::uniform(20))?;
            let u = RandomField::new(&cell, k + 2, &mut rng);
            let v = cell.project_velocity(|x| u.value(x));
            let grad = cell.project_tensor(|x| u.gradient(x));
            let div = cell.project_pressure(|x| u.gradient(x).trace());
            let mass = cell.pressure_mass();
            let tau: Vec<DVector<f64>> = (0..2).map(|_| DVector::from_fn(cell.np, |_, _| rng.random_range(-1.0..1.0))).collect();
            let at = |coef: &DVector<f64>, x: &Vec2| cell.eval_interior(coef.as_slice(), x);

            // (defect, interface term) for each gradient component, then the divergence
            let mut terms = [[0.0; 2]; 3];
            for comp in 0..2 {
                let wg = cell.weak_gradient(&v.as_slice()[comp * cell.ns..(comp + 1) * cell.ns]);
                for j in 0..2 {
                    let d = &wg[j] - &grad[comp][j];
                    terms[comp][0] += (d.transpose() * &mass * &tau[j])[0];
                }
            }
            let d = cell.weak_divergence(v.as_slice()) - div;
            terms[2][0] = (d.transpose() * &mass * &tau[0])[0];
            for j in 0..cell.num_edges() {
                let e = &cell.edges[j];
                if !e.interface {
                    continue;
                }
                let r = cell.edge_range(j);
                for comp in 0..2 {
                    let base = comp * cell.ns;
                    let qb = e.space.sample(&v.as_slice()[base + r.start..base + r.end]);
                    for (q, x) in e.space.rule.points.iter().enumerate() {
                        let w = e.space.rule.weights[q];
                        let n = e.normals[q];
                        let diff = qb[q] - u.value(x)[comp];
                        let tn = at(&tau[0], x) * n.x + at(&tau[1], x) * n.y;
                        terms[comp][1] += w * diff * tn;
                        terms[2][1] += w * diff * at(&tau[0], x) * n[comp];
                    }
                }
            }
            for [defect, interface] in terms {
                worst = worst.max((defect - interface).abs());
            }
        }
    }
    Ok(worst)
}

/// Largest relative gap `|∫_T ∇·F - ∮ F·n| / (∫_T |∇·F| + ∮ |F·n|)` over every cell of
/// the given meshes, for a fixed cubic field `F`.
pub fn divergence_theorem_gap(meshes: &[InterfaceMesh]) -> Result<f64, VerifyError> {
    let field = |x: &Vec2| Vec2::new(x.x.powi(3) + x.x * x.y, x.x * x.x * x.y - x.y.powi(3) / 3.0 + x.x * x.x);
    let div = |x: &Vec2| 3.0 * x.x * x.x + x.y + x.x * x.x - x.y * x.y;
    let mut worst: f64 = 0.0;
    for mesh in meshes {
        for c in 0..mesh.num_cells() {
            let geo = CellGeometry::new(mesh, c, 8, 8)?;
            let inside = geo.quad.integrate(div);
            let mut scale = geo.quad.integrate(|x| div(x).abs());
            let mut flux = 0.0;
            for e in &geo.edges {
                for ((x, w), n) in e.rule.points.iter().zip(&e.rule.weights).zip(&e.normals) {
                    let f = field(x).dot(n);
                    flux += w * f;
                    scale += (w * f).abs();
                }
            }
            worst = worst.max((inside - flux).abs() / scale);
        }
    }
    Ok(worst)
}

/// Solves polynomial data of degree `k` on a straight mesh without interface.
pub fn patch_test(k: usize, kind: MeshKind, level: u32) -> Result<ErrorNorms, VerifyError> {
    let problem = ManufacturedProblem::patch(k);
    let mesh = problem_mesh(&problem, level, kind, false)?;
    Ok(run_mesh(&problem, k, &mesh, QuadOrder::for_degree(k))?.errors)
}

/// The four consistency functionals of one cell for a test velocity `v` and pressure `q`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Consistency {
    /// `⟨v_0 - v_b, A ∇u·n - A ℚ_h(∇u)·n⟩_∂T`.
    pub flux: f64,
    /// `⟨v_0 - v_b, (p - 𝒬_h p) n⟩_∂T`.
    pub pressure: f64,
    /// `⟨Q_b u - u, A ∇_w v·n⟩` on interface edges.
    pub interface_gradient: f64,
    /// `⟨Q_b u - u, q n⟩` on interface edges.
    pub interface_divergence: f64,
}

fn consistency_terms(cell: &WgCell, problem: &ManufacturedProblem, v: &DVector<f64>, q: &DVector<f64>) -> Consistency {
    let side = cell.geo.subdomain;
    let a = problem.coefficient_of(side);
    let (n0, np, ns) = (cell.n0, cell.np, cell.ns);
    let qgrad = cell.project_tensor(|x| problem.velocity_gradient(side, x));
    let qp = cell.project_pressure(|x| problem.pressure(side, x));
    let wgrad: Vec<[DVector<f64>; 2]> = (0..2).map(|c| cell.weak_gradient(&v.as_slice()[c * ns..(c + 1) * ns])).collect();
    let mut out = Consistency::default();
    for j in 0..cell.num_edges() {
        let e = &cell.edges[j];
        let r = cell.edge_range(j);
        let qb: Vec<DVector<f64>> = (0..2).map(|c| cell.project_trace(j, |x| problem.velocity(side, x)[c])).collect();
        for (m, x) in e.space.rule.points.iter().enumerate() {
            let w = e.space.rule.weights[m];
            let n = e.normals[m];
            let an = a.transpose() * n;
            let phi0 = e.cell_values.row(m);
            let poly = |coef: &[f64]| coef.iter().enumerate().map(|(i, c)| c * phi0[i]).sum::<f64>();
            let lam = e.space.values.row(m);
            let grad = problem.velocity_gradient(side, x);
            let p_gap = problem.pressure(side, x) - poly(&qp.as_slice()[..np]);
            for c in 0..2 {
                let vc = &v.as_slice()[c * ns..(c + 1) * ns];
                let v0 = poly(&vc[..n0]);
                let vb: f64 = (0..r.len()).map(|l| lam[l] * vc[r.start + l]).sum();
                let projected = Vec2::new(poly(qgrad[c][0].as_slice()), poly(qgrad[c][1].as_slice()));
                let exact = Vec2::new(grad[(c, 0)], grad[(c, 1)]);
                out.flux += w * (v0 - vb) * an.dot(&(exact - projected));
                out.pressure += w * (v0 - vb) * p_gap * n[c];
                if e.interface {
                    let trace: f64 = (0..r.len()).map(|l| lam[l] * qb[c][l]).sum();
                    let gap = trace - problem.velocity(side, x)[c];
                    let wg = Vec2::new(poly(wgrad[c][0].as_slice()), poly(wgrad[c][1].as_slice()));
                    out.interface_gradient += w * gap * an.dot(&wg);
                    out.interface_divergence += w * gap * poly(q.as_slice()) * n[c];
                }
            }
        }
    }
    out
}

/// Mismatch of the two error equations
/// `a_s(e_h, v) + b(v, ε_h) = ℓ1 - ℓ2 + ℓ3 + s(Q_h u, v)` and `b(e_h, q) = -ℓ4(q)` for
/// `trials` random `v` in the homogeneous test space and random mean-zero `q`, relative
/// to the size of the terms before cancellation.
pub fn error_equation_gap(problem: &ManufacturedProblem, mesh: &InterfaceMesh, k: usize, seed: u64, trials: usize) -> Result<f64, VerifyError> {
    let order = QuadOrder::uniform(40);
    let system = assemble_with(mesh, k, problem, order)?;
    let sol = solve(&system)?;
    let cells = build_cells(mesh, k, order)?;
    let d = &system.dofs;
    let qu = project_velocity(mesh, d, &cells, problem);
    let qp = project_pressure(d, &cells, problem, pressure_mean(&cells, problem));
    let e = &qu - &sol.velocity;
    let eps = &qp - &sol.pressure;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let x: Vec<f64> = (0..d.n_free).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = DVector::from_fn(d.n_velocity, |i, _| d.unknown(i).map_or(0.0, |u| x[u]));
        let mut q = DVector::from_fn(d.n_pressure, |_, _| rng.random_range(-1.0..1.0));
        q -= &system.gauge * (system.gauge.dot(&q) / system.gauge.norm_squared());

        let (mut lhs, mut rhs, mut scale) = (0.0, 0.0, 0.0);
        let (mut lhs2, mut rhs2, mut scale2) = (0.0, 0.0, 0.0);
        for (c, cell) in cells.iter().enumerate() {
            let vl = local_velocity(mesh, d, c, &v);
            let el = local_velocity(mesh, d, c, &e);
            let ul = local_velocity(mesh, d, c, &qu);
            let hl = local_velocity(mesh, d, c, &sol.velocity);
            let pr = d.pressure[c].clone();
            let epsl = eps.rows(pr.start, d.np).clone_owned();
            let (qpl, phl) = (qp.rows(pr.start, d.np), sol.pressure.rows(pr.start, d.np));
            let ql = q.rows(pr.start, d.np).clone_owned();
            let a = cell.vector_block(&(cell.stiffness(&problem.coefficient_of(cell.geo.subdomain)) + cell.stabilizer()));
            let s = cell.vector_block(&cell.stabilizer());
            let b = cell.divergence_form();
            let t = consistency_terms(cell, problem, &vl, &ql);
            let parts_l = [(el.transpose() * &a * &vl)[0], (epsl.transpose() * &b * &vl)[0]];
            let parts_r = [t.flux, -t.pressure, t.interface_gradient, (ul.transpose() * &s * &vl)[0]];
            lhs += parts_l.iter().sum::<f64>();
            rhs += parts_r.iter().sum::<f64>();
            // e_h and ε_h are differences of O(1) vectors; measure against the operands
            let operands = [
                (ul.transpose() * &a * &vl)[0],
                (hl.transpose() * &a * &vl)[0],
                (qpl.transpose() * &b * &vl)[0],
                (phl.transpose() * &b * &vl)[0],
            ];
            scale += operands.iter().chain(&parts_r).map(|p| p.abs()).sum::<f64>();
            let be = (ql.transpose() * &b * &el)[0];
            lhs2 += be;
            rhs2 -= t.interface_divergence;
            // ∇·u = 0, so b(Q_h u, q) is itself a cancellation of O(1) products
            let (qa, ba) = (ql.abs(), b.abs());
            scale2 += (qa.transpose() * &ba * (ul.abs() + hl.abs()))[0] + t.interface_divergence.abs();
        }
        worst = worst.max((lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE));
        worst = worst.max((lhs2 - rhs2).abs() / scale2.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Polynomial field with a coefficient jump across a curved interface: all four
/// consistency functionals are nonzero for it at `k = 2`.
pub fn consistency_problem() -> ManufacturedProblem {
    ManufacturedProblem {
        id: 0,
        curve: Some(InterfaceCurve::polar_star(0.5, 0.25, 2.0)),
        coefficients: [Mat2::identity(), 10.0 * Mat2::identity()],
        field: Field::Polynomial(3),
        true_sides: false,
    }
}

fn cholesky(a: &CsrMatrix) -> Option<faer::sparse::linalg::solvers::Llt<usize, f64>> {
    faer::set_global_parallelism(faer::Par::Seq);
    to_faer(a).sp_cholesky(faer::Side::Lower).ok()
}

fn solve_with(llt: &faer::sparse::linalg::solvers::Llt<usize, f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let r = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    let x = llt.solve(&r);
    DVector::from_fn(rhs.len(), |i, _| x[(i, 0)])
}

/// Smallest Ritz value of the constrained `A_s` from inverse iteration; zero when `A_s`
/// is not positive definite (its Cholesky factorization breaks down).
pub fn min_ritz_value(a: &CsrMatrix, seed: u64) -> f64 {
    let Some(llt) = cholesky(a) else { return 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DVector::from_fn(a.nrows, |_, _| rng.random_range(-1.0..1.0));
    x.normalize_mut();
    for _ in 0..60 {
        x = solve_with(&llt, &x);
        let n = x.norm();
        if !n.is_finite() || n == 0.0 {
            return 0.0;
        }
        x /= n;
    }
    x.dot(&a.mul_vec(x.as_slice()))
}

/// Whether the constant pressure is removed before measuring the inf-sup constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    Projected,
    Ignored,
}

struct SchurOperator<'a> {
    system: &'a SaddlePointSystem,
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
    gauge: Option<DVector<f64>>,
}

impl SchurOperator<'_> {
    fn new(system: &SaddlePointSystem, gauge: Gauge) -> Result<SchurOperator<'_>, VerifyError> {
        let llt = cholesky(&system.a).ok_or(VerifyError::NotPositiveDefinite)?;
        let gauge = match gauge {
            Gauge::Projected => Some(system.gauge.normalize()),
            Gauge::Ignored => None,
        };
        Ok(SchurOperator { system, llt, gauge })
    }

    fn project(&self, q: &mut DVector<f64>) {
        if let Some(g) = &self.gauge {
            let c = g.dot(q);
            q.axpy(-c, g, 1.0);
        }
    }

    /// `P B A_s⁻¹ Bᵀ P q`.
    fn apply(&self, q: &DVector<f64>) -> DVector<f64> {
        let mut q = q.clone();
        self.project(&mut q);
        let w = solve_with(&self.llt, &self.system.b.tr_mul_vec(q.as_slice()));
        let mut out = self.system.b.mul_vec(w.as_slice());
        self.project(&mut out);
        out
    }

    fn dim(&self) -> usize {
        self.system.dofs.n_pressure
    }
}

/// Discrete inf-sup constant `min_q sup_v b(v, q) / (|||v||| ‖q‖)` as the square root of
/// the smallest eigenvalue of `B A_s⁻¹ Bᵀ`, by Lanczos with full reorthogonalization.
/// The orthonormal pressure basis makes the pressure mass matrix the identity.
pub fn infsup_lanczos(system: &SaddlePointSystem, gauge: Gauge, max_steps: usize, seed: u64) -> Result<f64, VerifyError> {
    let op = SchurOperator::new(system, gauge)?;
    let n = op.dim();
    let steps = max_steps.min(n - usize::from(gauge == Gauge::Projected));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    op.project(&mut q);
    q.normalize_mut();
    let mut basis: Vec<DVector<f64>> = vec![q];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut last = f64::INFINITY;
    let mut smallest = f64::INFINITY;
    for j in 0..steps {
        let mut w = op.apply(&basis[j]);
        let a = w.dot(&basis[j]);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
            op.project(&mut w);
        }
        let nb = w.norm();
        let m = alpha.len();
        if m % 5 == 0 || nb < 1e-12 || j + 1 == steps {
            let t = DMatrix::from_fn(m, m, |r, c| match r.abs_diff(c) {
                0 => alpha[r],
                1 => beta[r.min(c)],
                _ => 0.0,
            });
            smallest = SymmetricEigen::new(t).eigenvalues.min();
            if (last - smallest).abs() <= 1e-10 * smallest.abs().max(1e-300) || nb < 1e-12 {
                break;
            }
            last = smallest;
        }
        beta.push(nb);
        basis.push(w / nb);
    }
    Ok(smallest.max(0.0).sqrt())
}

/// Dense reference for [`infsup_lanczos`]: all eigenvalues of `B A_s⁻¹ Bᵀ`; with the gauge
/// projected, the eigenvalue of the constant pressure is skipped.
pub fn infsup_dense(system: &SaddlePointSystem, gauge: Gauge) -> Result<f64, VerifyError> {
    let op = SchurOperator::new(system, gauge)?;
    let n = op.dim();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        s.set_column(i, &op.apply(&e));
    }
    let s = 0.5 * (&s + s.transpose());
    let mut eig: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let skip = usize::from(gauge == Gauge::Projected);
    Ok(eig[skip].max(0.0).sqrt())
}

/// Inf-sup constants of problem meshes at the given levels.
pub fn infsup_sequence(problem: &ManufacturedProblem, k: usize, kind: MeshKind, levels: &[u32]) -> Result<Vec<f64>, VerifyError> {
    levels
        .iter()
        .map(|&n| {
            let mesh = problem_mesh(problem, n, kind, false)?;
            let system = assemble_with(&mesh, k, problem, QuadOrder::for_degree(k))?;
            infsup_lanczos(&system, Gauge::Projected, 400, 1)
        })
        .collect()
}

/// Outcome of one property check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl CheckResult {
    fn below(name: &'static str, value: f64, bound: f64) -> Self {
        CheckResult {
            name,
            value,
            bound,
            passed: value < bound,
        }
    }

    fn above(name: &'static str, value: f64, bound: f64) -> Self {
        CheckResult {
            name,
            value,
            bound,
            passed: value > bound,
        }
    }
}

/// Fitted meshes of both interface problems on both mesh kinds at the given level.
pub fn test_meshes(level: u32) -> Result<Vec<(ManufacturedProblem, InterfaceMesh)>, VerifyError> {
    let mut out = Vec::new();
    for id in [1, 3] {
        let problem = ManufacturedProblem::new(id)?;
        for kind in [MeshKind::Tri, MeshKind::Quad] {
            let mesh = problem_mesh(&problem, level, kind, false)?;
            out.push((problem.clone(), mesh));
        }
    }
    Ok(out)
}

/// Runs every property check with random inputs drawn from `seed`.
pub fn property_suite(seed: u64) -> Result<Vec<CheckResult>, VerifyError> {
    let mut out = vec![
        CheckResult::below("commutation on straight cells", commutation_defect(seed, 100)?, 1e-11),
        CheckResult::below("commutation on curved cells", curved_commutation_gap(seed.wrapping_add(1), 20)?, 1e-10),
    ];
    let small = test_meshes(1)?;
    let mut meshes: Vec<InterfaceMesh> = small.iter().map(|(_, m)| m.clone()).collect();
    meshes.extend(test_meshes(2)?.into_iter().map(|(_, m)| m));
    out.push(CheckResult::below("divergence theorem", divergence_theorem_gap(&meshes)?, 1e-10));

    let mut patch: f64 = 0.0;
    for k in 1..=3 {
        for kind in [MeshKind::Tri, MeshKind::Quad] {
            let e = patch_test(k, kind, 1)?;
            patch = patch.max(e.energy).max(e.l2_velocity).max(e.l2_pressure);
        }
    }
    out.push(CheckResult::below("patch test", patch, 1e-9));

    let cp = consistency_problem();
    let mesh = problem_mesh(&cp, 1, MeshKind::Tri, false)?;
    let mut gap = error_equation_gap(&cp, &mesh, 2, seed.wrapping_add(2), 3)?;
    let (p1, quad) = &small[1];
    gap = gap.max(error_equation_gap(p1, quad, 3, seed.wrapping_add(3), 3)?);
    out.push(CheckResult::below("error equation", gap, 1e-9));

    let (mut ritz, mut divergence) = (f64::INFINITY, 0.0f64);
    for (problem, mesh) in &small {
        for k in 1..=3 {
            let system = assemble_with(mesh, k, problem, QuadOrder::for_degree(k))?;
            ritz = ritz.min(min_ritz_value(&system.a, seed));
            let sol = solve(&system)?;
            divergence = divergence.max(crate::solver::residual_report(&system, sol.unknowns.as_slice()).relative_divergence());
        }
    }
    out.push(CheckResult::above("smallest Ritz value of A_s", ritz, 0.0));
    out.push(CheckResult::below("divergence residual", divergence, 1e-10));
    Ok(out)
}
