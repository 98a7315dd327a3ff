use std::f64::consts::PI;

use proptest::prelude::*;
use wgstokes::mesh::{
    build_background_mesh, fit_interface, mesh_statistics, parse_mesh, write_mesh, EdgeGeometry,
    EdgeTag, InterfaceCurve, InterfaceMesh, MeshError, MeshKind, Rect, Subdomain, TOL_GEOM,
};
use wgstokes::refmap::{edge_quadrature, CellGeometry};

fn fitted(curve: InterfaceCurve, n: u32, kind: MeshKind) -> InterfaceMesh {
    fit_interface(&build_background_mesh(Rect::biunit(), n, kind), curve)
        .unwrap_or_else(|e| panic!("{} {} n={n}: {e}", curve.kind_name(), kind.name()))
}

/// Adaptive Simpson quadrature, used as an independent oracle.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    // start from a fixed subdivision: periodic integrands can fool the first Simpson estimate
    const PIECES: usize = 64;
    (0..PIECES)
        .map(|i| {
            let (a, b) = (a + (b - a) * i as f64 / PIECES as f64, a + (b - a) * (i + 1) as f64 / PIECES as f64);
            let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
            rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol / PIECES as f64, 50)
        })
        .sum()
}

fn star_arc_length_oracle(base: f64, amp: f64, freq: f64) -> f64 {
    let speed = |th: f64| {
        let r = base + amp * (freq * th).sin();
        let dr = amp * freq * (freq * th).cos();
        (r * r + dr * dr).sqrt()
    };
    adaptive_simpson(&speed, 0.0, 2.0 * PI, 1e-13)
}

fn interface_length(mesh: &InterfaceMesh) -> f64 {
    (0..mesh.edges.len())
        .filter(|&e| mesh.edges[e].is_interface())
        .map(|e| edge_quadrature(mesh, e, 20).measure())
        .sum()
}

fn subdomain_area(mesh: &InterfaceMesh, side: Subdomain) -> f64 {
    (0..mesh.cells.len())
        .filter(|&c| mesh.cells[c].subdomain == side)
        .map(|c| CellGeometry::new(mesh, c, 6, 6).unwrap().area)
        .sum()
}

/// Structural invariants every fitted mesh must satisfy.
fn check_fitted(mesh: &InterfaceMesh) {
    let curve = mesh.curve.expect("fitted mesh carries its curve");
    for (id, e) in mesh.edges.iter().enumerate() {
        assert_eq!(e.is_curved(), e.tag == EdgeTag::Interface, "edge {id}");
        assert_eq!(e.slots(), if e.is_interface() { 2 } else { 1 });
        match e.tag {
            EdgeTag::Boundary => assert_eq!(e.cells.len(), 1),
            _ => assert_eq!(e.cells.len(), 2),
        }
        if let EdgeGeometry::Curved { t0, t1 } = e.geometry {
            assert!(t1 > t0);
            let [a, b] = e.vertices;
            assert!((curve.point(t0) - mesh.vertices[a]).norm() < TOL_GEOM);
            assert!((curve.point(t1) - mesh.vertices[b]).norm() < TOL_GEOM);
            assert_eq!(mesh.cells[e.cells[0]].subdomain, Subdomain::One);
            assert_eq!(mesh.cells[e.cells[1]].subdomain, Subdomain::Two);
            // arc is at least as long as its chord and not much longer
            let chord = (mesh.vertices[a] - mesh.vertices[b]).norm();
            let arc = edge_quadrature(mesh, id, 20).measure();
            assert!(arc >= chord * (1.0 - 1e-14) && arc <= chord * 1.2, "edge {id}: arc {arc} chord {chord}");
        }
    }
    for (c, cell) in mesh.cells.iter().enumerate() {
        let curved = cell.edges.iter().filter(|ce| mesh.edges[ce.edge].is_curved()).count();
        assert!(curved <= 1, "cell {c} has {curved} curved edges");
        assert_eq!(mesh.cell_is_curved(c), curved == 1);
        // every vertex strictly off the curve agrees with the cell's side
        for &v in &cell.vertices {
            let lvl = curve.level(&mesh.vertices[v]);
            if lvl.abs() > 1e-9 {
                assert_eq!(lvl < 0.0, cell.subdomain == Subdomain::One, "cell {c} vertex {v}");
            }
        }
    }

    // outward normals of the two owners cancel at every shared quadrature point
    let geo: Vec<CellGeometry> = (0..mesh.cells.len())
        .map(|c| CellGeometry::new(mesh, c, 4, 6).unwrap())
        .collect();
    for (id, e) in mesh.edges.iter().enumerate() {
        if e.cells.len() != 2 {
            continue;
        }
        let [g0, g1] = [&geo[e.cells[0]], &geo[e.cells[1]]];
        let (a, b) = (
            &g0.edges[g0.local_edge(id).unwrap()],
            &g1.edges[g1.local_edge(id).unwrap()],
        );
        for (p, (n0, n1)) in a.rule.points.iter().zip(a.normals.iter().zip(&b.normals)) {
            assert!((n0 + n1).norm() < 1e-12, "edge {id} at {p:?}");
        }
    }

    let total: f64 = geo.iter().map(|g| g.area).sum();
    assert!((total - 4.0).abs() < 1e-10 * 4.0, "total area {total}");
    let s = mesh_statistics(mesh).unwrap();
    assert!(s.pass, "regularity violations in cells {:?}", s.violations);
}

#[test]
fn fitted_meshes_satisfy_invariants() {
    for curve in [InterfaceCurve::circle(0.5), InterfaceCurve::polar_star(0.5, 0.25, 2.0)] {
        for kind in [MeshKind::Tri, MeshKind::Quad] {
            for n in 1..=3 {
                check_fitted(&fitted(curve, n, kind));
            }
        }
    }
}

#[test]
fn circle_interface_length_and_inner_area() {
    let oracle = star_arc_length_oracle(0.5, 0.0, 1.0);
    assert!((oracle - PI).abs() < 1e-10);
    for kind in [MeshKind::Tri, MeshKind::Quad] {
        let m = fitted(InterfaceCurve::circle(0.5), 2, kind);
        assert!((interface_length(&m) - oracle).abs() < 1e-8);
        assert!((subdomain_area(&m, Subdomain::One) - PI / 4.0).abs() < 1e-8);
        assert!((subdomain_area(&m, Subdomain::Two) - (4.0 - PI / 4.0)).abs() < 1e-8);
    }
}

#[test]
fn star_interface_length_matches_adaptive_oracle() {
    let oracle = star_arc_length_oracle(0.5, 0.25, 2.0);
    for kind in [MeshKind::Tri, MeshKind::Quad] {
        let m = fitted(InterfaceCurve::polar_star(0.5, 0.25, 2.0), 2, kind);
        assert!((interface_length(&m) - oracle).abs() < 1e-8, "{}", interface_length(&m) - oracle);
        // inner area is half the integral of r²
        let inner = adaptive_simpson(&|th: f64| 0.5 * (0.5 + 0.25 * (2.0 * th).sin()).powi(2), 0.0, 2.0 * PI, 1e-14);
        assert!((subdomain_area(&m, Subdomain::One) - inner).abs() < 1e-8);
    }
}

#[test]
fn curve_inside_one_cell_is_rejected() {
    // shifted domain so the origin is interior to a level-0 cell
    let bg = build_background_mesh(Rect::new(-0.9, -0.9, 1.1, 1.1), 0, MeshKind::Quad);
    let err = fit_interface(&bg, InterfaceCurve::circle(0.05)).unwrap_err();
    assert!(matches!(err, MeshError::CellCutTwice { .. }), "{err}");
}

#[test]
fn invalid_inputs_are_rejected() {
    let bg = build_background_mesh(Rect::biunit(), 2, MeshKind::Tri);
    let err = fit_interface(&bg, InterfaceCurve::polar_star(1.0 / 7.0, 1.0 / 7.0, 5.0)).unwrap_err();
    assert!(matches!(err, MeshError::InvalidCurve), "{err}");
    let err = fit_interface(&bg, InterfaceCurve::circle(1.0)).unwrap_err();
    assert!(matches!(err, MeshError::CurveOutsideDomain), "{err}");
    let m = fit_interface(&bg, InterfaceCurve::circle(0.5)).unwrap();
    assert!(matches!(fit_interface(&m, InterfaceCurve::circle(0.5)), Err(MeshError::AlreadyFitted)));
}

#[test]
fn background_refinement_halves_h() {
    let h: Vec<f64> = (0..4)
        .map(|n| mesh_statistics(&build_background_mesh(Rect::biunit(), n, MeshKind::Quad)).unwrap().h)
        .collect();
    assert!((h[0] - 2f64.sqrt() / 2.0).abs() < 1e-15);
    for w in h.windows(2) {
        assert!(w[1] <= 0.5 * w[0] * (1.0 + 1e-14));
    }
}

#[test]
fn fitted_h_decreases_under_refinement() {
    for kind in [MeshKind::Tri, MeshKind::Quad] {
        let h: Vec<f64> = (1..=4)
            .map(|n| mesh_statistics(&fitted(InterfaceCurve::circle(0.5), n, kind)).unwrap().h)
            .collect();
        for w in h.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 1.6 && ratio < 2.5, "{} ratio {ratio}", kind.name());
        }
    }
}

#[test]
fn text_format_round_trip_is_exact() {
    for kind in [MeshKind::Tri, MeshKind::Quad] {
        let m = fitted(InterfaceCurve::polar_star(0.5, 0.25, 2.0), 2, kind);
        let text = write_mesh(&m);
        let back = parse_mesh(&text).unwrap();
        assert_eq!(write_mesh(&back), text);
        assert_eq!(back.vertices, m.vertices);
        for (a, b) in back.edges.iter().zip(&m.edges) {
            assert_eq!(a.vertices, b.vertices);
            assert_eq!(a.geometry, b.geometry);
            assert_eq!(a.tag, b.tag);
            assert_eq!(a.cells, b.cells);
        }
        for (a, b) in back.cells.iter().zip(&m.cells) {
            assert_eq!(a.vertices, b.vertices);
            assert_eq!(a.subdomain, b.subdomain);
        }
    }
}

#[test]
fn malformed_text_reports_line() {
    let m = fitted(InterfaceCurve::circle(0.5), 1, MeshKind::Quad);
    let text = write_mesh(&m).replacen("interior", "sideways", 1);
    match parse_mesh(&text) {
        Err(MeshError::Parse { line, .. }) => assert!(line > 5),
        other => panic!("expected parse error, got {:?}", other.map(|_| ())),
    }
    assert!(matches!(parse_mesh("WGMESH 2\n"), Err(MeshError::Parse { line: 1, .. })));
}

#[test]
fn chord_mesh_keeps_topology() {
    let m = fitted(InterfaceCurve::circle(0.5), 2, MeshKind::Tri);
    let c = m.with_chords();
    assert!(c.chord_interface);
    assert_eq!(c.edges.len(), m.edges.len());
    assert!(c.edges.iter().all(|e| !e.is_curved()));
    assert_eq!(
        c.edges.iter().filter(|e| e.is_interface()).count(),
        m.edges.iter().filter(|e| e.is_interface()).count()
    );
    // the inscribed polygon loses area against the disk
    assert!(subdomain_area(&c, Subdomain::One) < PI / 4.0);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn random_circles_fit(radius in 0.3f64..0.7, quad in any::<bool>()) {
        let kind = if quad { MeshKind::Quad } else { MeshKind::Tri };
        let m = fitted(InterfaceCurve::circle(radius), 2, kind);
        check_fitted(&m);
        prop_assert!((interface_length(&m) - 2.0 * PI * radius).abs() < 1e-8);
    }

    #[test]
    fn random_stars_fit(amp in 0.0f64..0.2, freq in 1u32..4, quad in any::<bool>()) {
        let kind = if quad { MeshKind::Quad } else { MeshKind::Tri };
        let m = fitted(InterfaceCurve::polar_star(0.5, amp, freq as f64), 2, kind);
        check_fitted(&m);
        prop_assert!((interface_length(&m) - star_arc_length_oracle(0.5, amp, freq as f64)).abs() < 1e-8);
    }
}
