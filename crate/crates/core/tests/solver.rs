use nalgebra::DVector;
use wgstokes::assembly::{assemble, build_cells, ProblemData, SaddlePointSystem, SlotKind, TripletBuilder};
use wgstokes::mesh::{build_background_mesh, fit_interface, InterfaceMesh, MeshKind, Rect, Subdomain};
use wgstokes::solver::{residual_report, solve, Factorization, SolverError};
use wgstokes::verify::ManufacturedProblem;
use wgstokes::wg::QuadOrder;
use wgstokes::{Mat2, Vec2};

fn problem_and_mesh(id: u32, kind: MeshKind) -> (ManufacturedProblem, InterfaceMesh) {
    let problem = ManufacturedProblem::new(id).unwrap();
    let mesh = fit_interface(&build_background_mesh(Rect::biunit(), 1, kind), problem.curve.unwrap()).unwrap();
    (problem, mesh)
}

/// Every datum of another problem multiplied by a constant.
struct Scaled<'a>(&'a ManufacturedProblem, f64);

impl ProblemData for Scaled<'_> {
    fn coefficient(&self, side: Subdomain) -> Mat2 {
        self.0.coefficient(side)
    }
    fn body_force(&self, side: Subdomain, x: &Vec2) -> Vec2 {
        self.1 * self.0.body_force(side, x)
    }
    fn boundary_velocity(&self, side: Subdomain, x: &Vec2) -> Vec2 {
        self.1 * self.0.boundary_velocity(side, x)
    }
    fn velocity_jump(&self, x: &Vec2) -> Vec2 {
        self.1 * self.0.velocity_jump(x)
    }
    fn flux_jump(&self, x: &Vec2, normal: &Vec2) -> Vec2 {
        self.1 * self.0.flux_jump(x, normal)
    }
}

#[test]
fn zero_data_gives_zero_solution() {
    let (problem, mesh) = problem_and_mesh(3, MeshKind::Quad);
    let sys = assemble(&mesh, 2, &Scaled(&problem, 0.0)).unwrap();
    let sol = solve(&sys).unwrap();
    assert_eq!(sol.velocity.amax(), 0.0);
    assert_eq!(sol.pressure.amax(), 0.0);
    assert_eq!(sol.multiplier, 0.0);
}

#[test]
fn matches_dense_lu() {
    let (problem, mesh) = problem_and_mesh(1, MeshKind::Quad);
    let sys = assemble(&mesh, 1, &problem).unwrap();
    let sol = solve(&sys).unwrap();
    let dense = sys.matrix().to_dense().lu().solve(&sys.rhs()).unwrap();
    let gap = (&sol.unknowns - &dense).amax() / dense.amax();
    assert!(gap < 1e-10, "{gap:e}");
}

#[test]
fn solution_is_linear_in_the_data() {
    let (problem, mesh) = problem_and_mesh(3, MeshKind::Tri);
    let one = solve(&assemble(&mesh, 2, &problem).unwrap()).unwrap();
    let three = solve(&assemble(&mesh, 2, &Scaled(&problem, 3.0)).unwrap()).unwrap();
    let gap = (&three.unknowns - 3.0 * &one.unknowns).amax() / three.unknowns.amax();
    assert!(gap < 1e-12, "{gap:e}");
}

#[test]
fn repeated_solves_are_bitwise_equal() {
    let (problem, mesh) = problem_and_mesh(1, MeshKind::Tri);
    let sys = assemble(&mesh, 2, &problem).unwrap();
    let a = solve(&sys).unwrap();
    let b = solve(&sys).unwrap();
    assert_eq!(a.unknowns, b.unknowns);
    assert_eq!(a.report, b.report);
}

#[test]
fn side_two_traces_carry_the_jump() {
    let (problem, mesh) = problem_and_mesh(1, MeshKind::Tri);
    let k = 2;
    let sys = assemble(&mesh, k, &problem).unwrap();
    let sol = solve(&sys).unwrap();
    let cells = build_cells(&mesh, k, QuadOrder::for_degree(k)).unwrap();
    let d = &sys.dofs;
    let mut checked = 0;
    for cell in cells.iter().filter(|c| c.geo.subdomain == Subdomain::Two) {
        for j in 0..cell.num_edges() {
            let e = cell.edges[j].space.edge;
            if d.slot_kind[e].get(1) != Some(&SlotKind::Eliminated) {
                continue;
            }
            let (one, two) = (d.edge_slots[e][0].clone(), d.edge_slots[e][1].clone());
            let nb = one.len() / 2;
            for comp in 0..2 {
                let jump = cell.project_trace(j, |x| problem.velocity_jump(x)[comp]);
                for l in 0..nb {
                    let gap = sol.velocity[one.start + comp * nb + l] - sol.velocity[two.start + comp * nb + l] - jump[l];
                    assert!(gap.abs() < 1e-12, "edge {e}: {gap:e}");
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn residual_grows_linearly_with_perturbation() {
    let (problem, mesh) = problem_and_mesh(3, MeshKind::Quad);
    let sys = assemble(&mesh, 1, &problem).unwrap();
    let sol = solve(&sys).unwrap();
    let base = residual_report(&sys, sol.unknowns.as_slice());
    assert!(base.relative_momentum() < 1e-12);
    assert!(base.relative_divergence() < 1e-12);
    let dir = DVector::from_fn(sys.dim(), |i, _| ((i * 7919) % 13) as f64 / 13.0 - 0.5);
    let r = |eps: f64| {
        let x = &sol.unknowns + eps * &dir;
        let rep = residual_report(&sys, x.as_slice());
        rep.momentum.hypot(rep.divergence)
    };
    let (r1, r2) = (r(1e-6), r(2e-6));
    assert!(r1 > 1e3 * base.momentum.hypot(base.divergence));
    assert!((r2 / r1 - 2.0).abs() < 1e-3, "{}", r2 / r1);
}

#[test]
fn missing_gauge_is_singular() {
    let (problem, mesh) = problem_and_mesh(1, MeshKind::Quad);
    let mut sys: SaddlePointSystem = assemble(&mesh, 1, &problem).unwrap();
    sys.gauge.fill(0.0);
    assert!(matches!(solve(&sys), Err(SolverError::SingularSystem { .. })));
}

#[test]
fn coupled_blocks_are_rejected() {
    let mut t = TripletBuilder::new(3, 3);
    for i in 0..3 {
        t.push(i, i, 2.0);
    }
    t.push(0, 1, 1.0);
    let m = t.build();
    assert!(matches!(
        Factorization::new(&m, &[vec![0], vec![1]]),
        Err(SolverError::CoupledBlocks { first: 0, second: 1 })
    ));
    // condensing one block of a valid system reproduces the direct solution
    let fact = Factorization::new(&m, &[vec![0]]).unwrap();
    let x = fact.solve(&DVector::from_vec(vec![3.0, 2.0, 4.0]));
    assert!((x - DVector::from_vec(vec![1.0, 1.0, 2.0])).amax() < 1e-15);
}
