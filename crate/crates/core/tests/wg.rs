use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wgstokes::mesh::{build_background_mesh, fit_interface, InterfaceCurve, InterfaceMesh, MeshKind, Rect};
use wgstokes::refmap::gauss_legendre;
use wgstokes::wg::{poly_dim, CellBasis, QuadOrder, WgCell};
use wgstokes::{Mat2, Vec2};

fn straight_mesh(kind: MeshKind) -> InterfaceMesh {
    build_background_mesh(Rect::biunit(), 0, kind)
}

fn curved_mesh(kind: MeshKind) -> InterfaceMesh {
    fit_interface(&build_background_mesh(Rect::biunit(), 1, kind), InterfaceCurve::polar_star(0.5, 0.25, 2.0)).unwrap()
}

/// Random polynomial of the given degree in the cell's scaled coordinates.
struct RandomPoly {
    basis: CellBasis,
    coef: Vec<f64>,
}

impl RandomPoly {
    fn new(cell: &WgCell, degree: usize, rng: &mut ChaCha8Rng) -> Self {
        let basis = CellBasis::new(cell.geo.centroid, cell.h, degree);
        let coef = (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        RandomPoly { basis, coef }
    }

    fn value(&self, x: &Vec2) -> f64 {
        self.basis.eval(&self.coef, x)
    }

    fn gradient(&self, x: &Vec2) -> Vec2 {
        let n = self.basis.dim();
        let (mut v, mut dx, mut dy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        self.basis.values_and_gradients(x, &mut v, &mut dx, &mut dy);
        let dot = |d: &[f64]| d.iter().zip(&self.coef).map(|(a, b)| a * b).sum::<f64>();
        Vec2::new(dot(&dx), dot(&dy))
    }
}

fn mass_inner(cell: &WgCell, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a.transpose() * cell.pressure_mass() * b)[0]
}

#[test]
fn constant_fields_have_zero_weak_derivatives() {
    for kind in [MeshKind::Tri, MeshKind::Quad] {
        let mesh = curved_mesh(kind);
        for k in 1..=3 {
            for c in 0..mesh.cells.len() {
                let cell = WgCell::new(&mesh, c, k, QuadOrder::for_degree(k)).unwrap();
                let v = cell.project_velocity(|_| Vec2::new(1.5, -0.7));
                let [gx, gy] = cell.weak_gradient(&v.as_slice()[..cell.ns]);
                // curved cells integrate the mapped geometry only up to quadrature error
                let tol = if mesh.cell_is_curved(c) { 1e-10 } else { 1e-11 };
                assert!(gx.amax() < tol && gy.amax() < tol, "cell {c} k={k}");
                assert!(cell.weak_divergence(v.as_slice()).amax() < tol);
                let s = cell.vector_block(&cell.stabilizer());
                let a = cell.vector_block(&cell.stiffness(&Mat2::identity()));
                assert!((v.transpose() * &s * &v)[0].abs() < 1e-12);
                assert!((v.transpose() * &a * &v)[0].abs() < 1e-12);
            }
        }
    }
}

#[test]
fn straight_cell_commutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for kind in [MeshKind::Tri, MeshKind::Quad] {
        let mesh = straight_mesh(kind);
        for k in 1..=3 {
            for trial in 0..17 {
                let c = (trial * 7) % mesh.cells.len();
                let cell = WgCell::new(&mesh, c, k, QuadOrder::for_degree(k)).unwrap();
                let u = [RandomPoly::new(&cell, k + 1, &mut rng), RandomPoly::new(&cell, k + 1, &mut rng)];
                let v = cell.project_velocity(|x| Vec2::new(u[0].value(x), u[1].value(x)));
                let grad = cell.project_tensor(|x| {
                    let (g0, g1) = (u[0].gradient(x), u[1].gradient(x));
                    Mat2::new(g0.x, g0.y, g1.x, g1.y)
                });
                for comp in 0..2 {
                    let wg = cell.weak_gradient(&v.as_slice()[comp * cell.ns..(comp + 1) * cell.ns]);
                    for j in 0..2 {
                        worst = worst.max((&wg[j] - &grad[comp][j]).amax());
                    }
                }
                let div = cell.project_pressure(|x| u[0].gradient(x).x + u[1].gradient(x).y);
                worst = worst.max((cell.weak_divergence(v.as_slice()) - div).amax());
            }
        }
    }
    assert!(worst < 1e-11, "worst defect {worst:e}");
}

#[test]
fn curved_cell_commutation_defect_is_interface_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for kind in [MeshKind::Tri, MeshKind::Quad] {
        let mesh = curved_mesh(kind);
        let curved: Vec<usize> = (0..mesh.cells.len()).filter(|&c| mesh.cell_is_curved(c)).collect();
        for k in 1..=3 {
            for trial in 0..4 {
                let c = curved[(trial * 5 + k) % curved.len()];
                let cell = WgCell::new(&mesh, c, k, QuadOrder::uniform(20)).unwrap();
                let u = [RandomPoly::new(&cell, k + 2, &mut rng), RandomPoly::new(&cell, k + 2, &mut rng)];
                let uf = |x: &Vec2| Vec2::new(u[0].value(x), u[1].value(x));
                let v = cell.project_velocity(uf);
                let tau: Vec<DVector<f64>> = (0..2).map(|_| DVector::from_fn(cell.np, |_, _| rng.random_range(-1.0..1.0))).collect();
                let tau_at = |coef: &DVector<f64>, x: &Vec2| cell.eval_interior(coef.as_slice(), x);

                // interface correction ⟨Q_b u − u, τ·n⟩ and ⟨Q_b u − u, τ n⟩ per component
                let (mut grad_rhs, mut div_rhs) = ([0.0; 2], 0.0);
                let mut scale = 0.0;
                for j in 0..cell.num_edges() {
                    let e = &cell.edges[j];
                    if !e.interface {
                        continue;
                    }
                    let r = cell.edge_range(j);
                    for comp in 0..2 {
                        let qb = e.space.sample(&v.as_slice()[comp * cell.ns + r.start..comp * cell.ns + r.end]);
                        for (q, x) in e.space.rule.points.iter().enumerate() {
                            let w = e.space.rule.weights[q];
                            let n = e.normals[q];
                            let diff = qb[q] - uf(x)[comp];
                            grad_rhs[comp] += w * diff * (tau_at(&tau[0], x) * n.x + tau_at(&tau[1], x) * n.y);
                            div_rhs += w * diff * tau_at(&tau[0], x) * n[comp];
                            scale += w * uf(x)[comp].abs();
                        }
                    }
                }
                let grad = cell.project_tensor(|x| {
                    let (g0, g1) = (u[0].gradient(x), u[1].gradient(x));
                    Mat2::new(g0.x, g0.y, g1.x, g1.y)
                });
                for comp in 0..2 {
                    let wg = cell.weak_gradient(&v.as_slice()[comp * cell.ns..(comp + 1) * cell.ns]);
                    let lhs: f64 = (0..2).map(|j| mass_inner(&cell, &(&wg[j] - &grad[comp][j]), &tau[j])).sum();
                    assert!((lhs - grad_rhs[comp]).abs() < 1e-10 * scale.max(1.0), "grad k={k} cell {c}: {lhs:e} vs {:e}", grad_rhs[comp]);
                }
                let div = cell.project_pressure(|x| u[0].gradient(x).x + u[1].gradient(x).y);
                let lhs = mass_inner(&cell, &(cell.weak_divergence(v.as_slice()) - div), &tau[0]);
                assert!((lhs - div_rhs).abs() < 1e-10 * scale.max(1.0), "div k={k} cell {c}: {lhs:e} vs {div_rhs:e}");
                // the defect is generically nonzero on curved cells
                assert!(grad_rhs[0].abs() + grad_rhs[1].abs() > 1e-14);
            }
        }
    }
}

#[test]
fn divergence_theorem_on_every_cell() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for kind in [MeshKind::Tri, MeshKind::Quad] {
        for mesh in [straight_mesh(kind), curved_mesh(kind)] {
            for c in 0..mesh.cells.len() {
                let k = 3;
                let cell = WgCell::new(&mesh, c, k, QuadOrder::for_degree(k)).unwrap();
                for _ in 0..5 {
                    let q = [RandomPoly::new(&cell, k, &mut rng), RandomPoly::new(&cell, k, &mut rng)];
                    let div = cell.geo.quad.integrate(|x| q[0].gradient(x).x + q[1].gradient(x).y);
                    let mut flux = 0.0;
                    let mut scale = 0.0;
                    for e in &cell.edges {
                        for (x, (w, n)) in e.space.rule.points.iter().zip(e.space.rule.weights.iter().zip(&e.normals)) {
                            flux += w * (q[0].value(x) * n.x + q[1].value(x) * n.y);
                            scale += w * (q[0].value(x).abs() + q[1].value(x).abs());
                        }
                    }
                    assert!((flux - div).abs() < 1e-10 * scale, "cell {c}: {flux} vs {div}");
                }
            }
        }
    }
}

#[test]
fn interior_projection_reproduces_polynomials_and_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mesh = curved_mesh(MeshKind::Tri);
    for k in 1..=3 {
        for c in [0, 5, 40] {
            let cell = WgCell::new(&mesh, c, k, QuadOrder::for_degree(k)).unwrap();
            let p = RandomPoly::new(&cell, k, &mut rng);
            let coef = cell.project_interior(|x| p.value(x));
            for x in cell.geo.quad.points.iter().step_by(3) {
                assert!((cell.eval_interior(coef.as_slice(), x) - p.value(x)).abs() < 1e-12);
            }
            let f = |x: &Vec2| (3.0 * x.x).sin() + x.y.exp();
            let once = cell.project_interior(f);
            let twice = cell.project_interior(|x| cell.eval_interior(once.as_slice(), x));
            assert!((&once - &twice).amax() < 1e-13, "cell {c} k={k}");
            assert!(cell.project_interior(|_| 0.0).amax() == 0.0);
        }
    }
}

/// Dense Gram oracle on a square cell `[x0, x0+s] × [y0, y0+s]` with a 50×50 tensor rule and
/// the plain monomial basis `x^i y^j`.
fn gram_projection_oracle(x0: f64, y0: f64, s: f64, k: usize, f: &dyn Fn(&Vec2) -> f64) -> impl Fn(&Vec2) -> f64 {
    let (gx, gw) = gauss_legendre(50);
    let exps: Vec<(i32, i32)> = (0..=k as i32).flat_map(|d| (0..=d).map(move |j| (d - j, j))).collect();
    let n = exps.len();
    let mono = move |x: &Vec2, (i, j): (i32, i32)| x.x.powi(i) * x.y.powi(j);
    let mut g = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for (a, wa) in gx.iter().zip(gw) {
        for (b, wb) in gx.iter().zip(gw) {
            let x = Vec2::new(x0 + 0.5 * s * (a + 1.0), y0 + 0.5 * s * (b + 1.0));
            let w = wa * wb * 0.25 * s * s;
            for p in 0..n {
                rhs[p] += w * f(&x) * mono(&x, exps[p]);
                for q in 0..n {
                    g[(p, q)] += w * mono(&x, exps[p]) * mono(&x, exps[q]);
                }
            }
        }
    }
    let coef = g.lu().solve(&rhs).unwrap();
    move |x: &Vec2| (0..n).map(|p| coef[p] * mono(x, exps[p])).sum()
}

#[test]
fn projections_match_dense_gram_oracle() {
    let mesh = straight_mesh(MeshKind::Quad);
    // cell 5 is [-0.5, 0] × [-0.5, 0]
    let c = 5;
    assert_eq!(mesh.cell_points(c)[0], Vec2::new(-0.5, -0.5));
    let cell1 = WgCell::new(&mesh, c, 1, QuadOrder::uniform(30)).unwrap();
    let sin = |x: &Vec2| x.x.sin();
    let ours = cell1.project_interior(sin);
    let oracle = gram_projection_oracle(-0.5, -0.5, 0.5, 1, &sin);
    for x in &cell1.geo.quad.points {
        assert!((cell1.eval_interior(ours.as_slice(), x) - oracle(x)).abs() < 1e-12);
    }
    // pressure projection of e^x with k = 1 is onto constants
    let exp = |x: &Vec2| x.x.exp();
    let ours = cell1.project_pressure(exp);
    let oracle = gram_projection_oracle(-0.5, -0.5, 0.5, 0, &exp);
    assert!((cell1.eval_interior(ours.as_slice(), &cell1.geo.centroid) - oracle(&Vec2::zeros())).abs() < 1e-12);
    // Q_b of x² onto constants on the bottom edge y = -0.5, x ∈ [-0.5, 0]: mean of x² is 1/12
    let j = (0..cell1.num_edges())
        .find(|&j| cell1.edges[j].space.rule.points.iter().all(|p| (p.y + 0.5).abs() < 1e-14))
        .unwrap();
    let qb = cell1.project_trace(j, |x| x.x * x.x);
    assert!((qb[0] - 1.0 / 12.0).abs() < 1e-14);
}

#[test]
fn tensor_projection_reproduces_gradient() {
    let mesh = straight_mesh(MeshKind::Tri);
    let cell = WgCell::new(&mesh, 3, 2, QuadOrder::for_degree(2)).unwrap();
    // u = (x², 0): ∇u = [[2x, 0], [0, 0]] is linear, hence reproduced for k = 2
    let g = cell.project_tensor(|x| Mat2::new(2.0 * x.x, 0.0, 0.0, 0.0));
    for x in &cell.geo.quad.points {
        assert!((cell.eval_interior(g[0][0].as_slice(), x) - 2.0 * x.x).abs() < 1e-13);
    }
    assert!(g[0][1].amax() < 1e-14 && g[1][0].amax() < 1e-14);
    let p = cell.project_pressure(|_| 3.0);
    assert!(p.rows(1, p.len() - 1).amax() < 1e-13);
    assert!((cell.eval_interior(p.as_slice(), &cell.geo.centroid) - 3.0).abs() < 1e-13);
}

#[test]
fn trace_projection_on_curved_edge_reproduces_parameter_polynomials() {
    let mesh = curved_mesh(MeshKind::Tri);
    let e = mesh.edges.iter().position(|e| e.is_curved()).unwrap();
    let c = mesh.edges[e].cells[0];
    for k in 1..=3 {
        let cell = WgCell::new(&mesh, c, k, QuadOrder::for_degree(k)).unwrap();
        let j = cell.edges.iter().position(|x| x.space.edge == e).unwrap();
        let space = &cell.edges[j].space;
        assert_eq!(space.dim(), k + 1);
        // a polynomial of degree k in the edge parameter
        let f: Vec<f64> = space.rule.params.iter().map(|s| 1.0 - 2.0 * s + s.powi(k as i32)).collect();
        let coef = space.project_samples(&f);
        let back = space.sample(coef.as_slice());
        for (a, b) in back.iter().zip(&f) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn weak_gradient_of_single_edge_trace_matches_dense_oracle() {
    let mesh = curved_mesh(MeshKind::Quad);
    let c = (0..mesh.cells.len()).find(|&c| mesh.cell_is_curved(c)).unwrap();
    let k = 2;
    let cell = WgCell::new(&mesh, c, k, QuadOrder::for_degree(k)).unwrap();
    for j in 0..cell.num_edges() {
        let r = cell.edge_range(j);
        let mut v = vec![0.0; cell.ns];
        v[r.start] = 0.3;
        v[r.end - 1] -= 0.8;
        let wg = cell.weak_gradient(&v);
        // oracle: tensor mass matrix from fresh quadrature and edge moments against the basis
        let np = cell.np;
        let mut m = DMatrix::zeros(np, np);
        let mut pv = vec![0.0; cell.n0];
        for (x, w) in cell.geo.quad.points.iter().zip(&cell.geo.quad.weights) {
            cell.basis.values(x, &mut pv);
            for a in 0..np {
                for b in 0..np {
                    m[(a, b)] += w * pv[a] * pv[b];
                }
            }
        }
        let e = &cell.edges[j];
        let trace = e.space.sample(&v[r.clone()]);
        for dir in 0..2 {
            let mut rhs = DVector::zeros(np);
            for (q, x) in e.space.rule.points.iter().enumerate() {
                cell.basis.values(x, &mut pv);
                for a in 0..np {
                    rhs[a] += e.space.rule.weights[q] * trace[q] * pv[a] * e.normals[q][dir];
                }
            }
            let expect = m.clone().lu().solve(&rhs).unwrap();
            assert!((&wg[dir] - expect).amax() < 1e-10);
        }
    }
}

#[test]
fn local_forms_on_straight_cell() {
    let mesh = straight_mesh(MeshKind::Tri);
    let cell = WgCell::new(&mesh, 2, 1, QuadOrder::for_degree(1)).unwrap();
    // v = Q_h(x, 0): ∇u = e_1 ⊗ e_1, so (∇_w v, ∇_w v) = |T|
    let v = cell.project_velocity(|x| Vec2::new(x.x, 0.0));
    let a = cell.vector_block(&cell.stiffness(&Mat2::identity()));
    assert!(((v.transpose() * &a * &v)[0] - cell.geo.area).abs() < 1e-14);
    let s = cell.stabilizer();
    assert!((&s - s.transpose()).amax() == 0.0);
    let eig = s.clone().symmetric_eigen().eigenvalues;
    assert!(eig.min() > -1e-12);
    assert_eq!(cell.divergence_form().shape(), (poly_dim(0), 2 * cell.ns));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn weak_operators_are_linear(seed in any::<u64>(), k in 1usize..=3, alpha in -3.0f64..3.0) {
        let mesh = curved_mesh(MeshKind::Tri);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = rng.random_range(0..mesh.cells.len());
        let cell = WgCell::new(&mesh, c, k, QuadOrder::for_degree(k)).unwrap();
        let x: Vec<f64> = (0..2 * cell.ns).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..2 * cell.ns).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + b).collect();
        let dz = cell.weak_divergence(&z);
        let dxy = alpha * cell.weak_divergence(&x) + cell.weak_divergence(&y);
        prop_assert!((dz - &dxy).amax() <= 1e-13 * (1.0 + dxy.amax()));
        let gz = cell.weak_gradient(&z[..cell.ns]);
        let (gx, gy) = (cell.weak_gradient(&x[..cell.ns]), cell.weak_gradient(&y[..cell.ns]));
        for j in 0..2 {
            let expect = alpha * &gx[j] + &gy[j];
            prop_assert!((&gz[j] - &expect).amax() <= 1e-13 * (1.0 + expect.amax()));
        }
        // stabilizer and stiffness are positive semidefinite
        let s = cell.stabilizer();
        let a = cell.stiffness(&Mat2::new(2.0, 0.5, 0.5, 1.0));
        let xs = DVector::from_column_slice(&x[..cell.ns]);
        prop_assert!((xs.transpose() * &s * &xs)[0] >= -1e-12);
        prop_assert!((xs.transpose() * &a * &xs)[0] >= -1e-12);
    }
}
