//! Reference-to-physical cell maps and quadrature on cells and edges.
//!
//! Straight triangles use the affine map, straight quadrilaterals the bilinear map.
//! A curved cell is split into one curved triangle, whose map follows the exact arc,
//! and a fan of straight triangles sharing the curved triangle's apex.

mod gauss;

pub use gauss::{
    gauss_legendre, gauss_unit, legendre_values, legendre_with_derivative, points_for_exactness,
    unit_square_rule, unit_triangle_rule,
};

use crate::mesh::{EdgeGeometry, InterfaceCurve, InterfaceMesh, Subdomain};
use crate::{cross, Mat2, Vec2};

/// Minimum number of Gauss points along a curved arc.
pub const CURVED_MIN_POINTS: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum MapError {
    #[error("non-positive Jacobian in cell {cell} at ({x}, {y})")]
    NonPositiveJacobian { cell: usize, x: f64, y: f64 },
}

/// One piece of a cell map.
#[derive(Clone, Copy, Debug)]
pub enum SubMap {
    /// Unit triangle: `x = origin + ξ e1 + η e2`.
    Affine { origin: Vec2, e1: Vec2, e2: Vec2 },
    /// Unit square onto the quadrilateral with counter-clockwise `corners`.
    Bilinear { corners: [Vec2; 4] },
    /// Unit triangle with `(0,0) → apex`, `(1,0) → p(t0)`, `(0,1) → p(t1)`:
    /// `x = (1−ξ−η)·apex + (ξ+η)·p(t0 + (t1−t0)·η/(ξ+η))`.
    /// Restricted to the hypotenuse it is exactly the arc.
    CurvedTriangle {
        apex: Vec2,
        curve: InterfaceCurve,
        t0: f64,
        t1: f64,
    },
}

impl SubMap {
    pub fn map(&self, xi: f64, eta: f64) -> Vec2 {
        match *self {
            SubMap::Affine { origin, e1, e2 } => origin + xi * e1 + eta * e2,
            SubMap::Bilinear { corners: [a, b, c, d] } => {
                (1.0 - xi) * (1.0 - eta) * a + xi * (1.0 - eta) * b + xi * eta * c + (1.0 - xi) * eta * d
            }
            SubMap::CurvedTriangle { apex, curve, t0, t1 } => {
                let r = xi + eta;
                if r == 0.0 {
                    return apex;
                }
                let g = curve.point(t0 + (t1 - t0) * eta / r);
                (1.0 - r) * apex + r * g
            }
        }
    }

    /// Jacobian `∂x/∂(ξ, η)` (columns are the two partial derivatives).
    pub fn jacobian(&self, xi: f64, eta: f64) -> Mat2 {
        match *self {
            SubMap::Affine { e1, e2, .. } => Mat2::from_columns(&[e1, e2]),
            SubMap::Bilinear { corners: [a, b, c, d] } => {
                let dxi = (1.0 - eta) * (b - a) + eta * (c - d);
                let deta = (1.0 - xi) * (d - a) + xi * (c - b);
                Mat2::from_columns(&[dxi, deta])
            }
            SubMap::CurvedTriangle { apex, curve, t0, t1 } => {
                let r = xi + eta;
                let s = eta / r;
                let t = t0 + (t1 - t0) * s;
                let g = curve.point(t) - apex;
                let dg = curve.derivative(t) * (t1 - t0);
                Mat2::from_columns(&[g - s * dg, g + (1.0 - s) * dg])
            }
        }
    }

    pub fn det_jacobian(&self, xi: f64, eta: f64) -> f64 {
        self.jacobian(xi, eta).determinant()
    }

    fn is_square(&self) -> bool {
        matches!(self, SubMap::Bilinear { .. })
    }

    /// Reference points used to audit the sign of the Jacobian.
    fn probe_points(&self, m: usize) -> Vec<(f64, f64)> {
        if self.is_square() {
            unit_square_rule(m).iter().map(|p| (p.0, p.1)).collect()
        } else {
            let mut pts: Vec<(f64, f64)> = unit_triangle_rule(m).iter().map(|p| (p.0, p.1)).collect();
            for i in 0..=32 {
                let s = i as f64 / 32.0;
                pts.push((1.0 - s, s));
            }
            pts
        }
    }

    /// Pushes a rule of exactness `m` (for polynomial integrands on straight pieces)
    /// into `out`.
    fn push_rule(&self, m: usize, out: &mut QuadratureRule) {
        match *self {
            SubMap::Affine { origin, e1, e2 } => {
                let det = cross(&e1, &e2);
                for (xi, eta, w) in unit_triangle_rule(m) {
                    out.points.push(origin + xi * e1 + eta * e2);
                    out.weights.push(w * det);
                }
            }
            SubMap::Bilinear { .. } => {
                for (xi, eta, w) in unit_square_rule(m + 1) {
                    out.points.push(self.map(xi, eta));
                    out.weights.push(w * self.det_jacobian(xi, eta));
                }
            }
            SubMap::CurvedTriangle { apex, curve, t0, t1 } => {
                let nr = m.div_ceil(2) + 1;
                let ns = points_for_exactness(m).max(CURVED_MIN_POINTS);
                let gs = gauss_unit(ns);
                for &(r, wr) in &gauss_unit(nr) {
                    for &(s, ws) in &gs {
                        let t = t0 + (t1 - t0) * s;
                        let g = curve.point(t) - apex;
                        let dg = curve.derivative(t) * (t1 - t0);
                        out.points.push(apex + r * g);
                        out.weights.push(wr * ws * r * cross(&g, &dg));
                    }
                }
            }
        }
    }
}

/// Map of a whole cell as a union of pieces.
#[derive(Clone, Debug)]
pub struct CellMap {
    pub cell: usize,
    pub pieces: Vec<SubMap>,
}

/// Positive-weight quadrature rule with physical points.
#[derive(Clone, Debug, Default)]
pub struct QuadratureRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: FnMut(&Vec2) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }
}

/// Quadrature on an edge, carrying the edge parameter `s ∈ [-1, 1]` of every point
/// (in the edge's own orientation) and the unit tangent in that orientation.
#[derive(Clone, Debug, Default)]
pub struct EdgeRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub params: Vec<f64>,
    pub tangents: Vec<Vec2>,
}

impl EdgeRule {
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: FnMut(&Vec2) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }
}

/// Traversal parameters of curved local edge `j` of cell `c` (start, end), if curved.
fn traversal_arc(mesh: &InterfaceMesh, c: usize, j: usize) -> Option<(f64, f64)> {
    let ce = mesh.cells[c].edges[j];
    match mesh.edges[ce.edge].geometry {
        EdgeGeometry::Straight => None,
        EdgeGeometry::Curved { t0, t1 } => Some(if ce.reversed { (t1, t0) } else { (t0, t1) }),
    }
}

/// Sine of the smallest angle between `p(t) − apex` and the arc tangent along the arc
/// `p(ta) → p(tb)`; positive iff the curved triangle (apex, p(ta), p(tb)) has positive Jacobian
/// at the sampled points.
fn curved_quality(apex: &Vec2, curve: &InterfaceCurve, ta: f64, tb: f64) -> f64 {
    let mut q = f64::INFINITY;
    for i in 0..=32 {
        let t = ta + (tb - ta) * i as f64 / 32.0;
        let g = curve.point(t) - apex;
        let dg = curve.derivative(t) * (tb - ta);
        q = q.min(cross(&g, &dg) / (g.norm() * dg.norm()));
    }
    q
}

fn triangle_quality(a: &Vec2, b: &Vec2, c: &Vec2) -> f64 {
    let (u, v, w) = (b - a, c - b, a - c);
    2.0 * cross(&u, &(c - a)) / (u.norm_squared() + v.norm_squared() + w.norm_squared())
}

/// Picks the apex for splitting the polygon `pts` (counter-clockwise, with the arc
/// running from the last point to the first, parameters `ta → tb`) into one curved
/// triangle and straight fan triangles. Returns the index of the apex among
/// `1..pts.len()-1` maximizing the worst shape quality, or `None` if every choice
/// produces a non-positive Jacobian.
pub fn choose_curved_apex(pts: &[Vec2], curve: &InterfaceCurve, ta: f64, tb: f64) -> Option<usize> {
    let n = pts.len();
    let mut best: Option<(usize, f64)> = None;
    for j in 1..n - 1 {
        let mut q = curved_quality(&pts[j], curve, ta, tb);
        for i in (0..j.saturating_sub(1)).chain(j + 1..n - 1) {
            q = q.min(triangle_quality(&pts[j], &pts[i], &pts[i + 1]));
        }
        if q > 0.0 && best.is_none_or(|(_, bq)| q > bq) {
            best = Some((j, q));
        }
    }
    best.map(|b| b.0)
}

/// Whether the polygon `pts` (arc from the last point to the first, parameters `ta → tb`)
/// can be split by adding the arc midpoint `p((ta+tb)/2)` as an extra vertex: curved
/// triangles `(pts[1]; mid → pts[0])` and `(pts[n-2]; pts[n-1] → mid)` plus a straight fan from
/// the midpoint.
pub fn midpoint_split_valid(pts: &[Vec2], curve: &InterfaceCurve, ta: f64, tb: f64) -> bool {
    let n = pts.len();
    let tm = 0.5 * (ta + tb);
    let mid = curve.point(tm);
    let mut q = curved_quality(&pts[1], curve, tm, tb).min(curved_quality(&pts[n - 2], curve, ta, tm));
    for i in 1..n - 2 {
        q = q.min(triangle_quality(&mid, &pts[i], &pts[i + 1]));
    }
    q > 0.0
}

/// Pieces covering a polygon with one curved segment (from the last point to the first).
pub fn curved_polygon_pieces(pts: &[Vec2], curve: &InterfaceCurve, ta: f64, tb: f64) -> Option<Vec<SubMap>> {
    let n = pts.len();
    let mut pieces = Vec::new();
    if let Some(apex) = choose_curved_apex(pts, curve, ta, tb) {
        pieces.push(SubMap::CurvedTriangle {
            apex: pts[apex],
            curve: *curve,
            t0: ta,
            t1: tb,
        });
        for i in (0..apex.saturating_sub(1)).chain(apex + 1..n - 1) {
            pieces.push(SubMap::Affine {
                origin: pts[apex],
                e1: pts[i] - pts[apex],
                e2: pts[i + 1] - pts[apex],
            });
        }
    } else if midpoint_split_valid(pts, curve, ta, tb) {
        let tm = 0.5 * (ta + tb);
        let mid = curve.point(tm);
        pieces.push(SubMap::CurvedTriangle {
            apex: pts[1],
            curve: *curve,
            t0: tm,
            t1: tb,
        });
        pieces.push(SubMap::CurvedTriangle {
            apex: pts[n - 2],
            curve: *curve,
            t0: ta,
            t1: tm,
        });
        for i in 1..n - 2 {
            pieces.push(SubMap::Affine {
                origin: mid,
                e1: pts[i] - mid,
                e2: pts[i + 1] - mid,
            });
        }
    } else {
        return None;
    }
    Some(pieces)
}

/// Builds the map of cell `c` and checks the sign of its Jacobian on a probe grid.
pub fn build_cell_map(mesh: &InterfaceMesh, c: usize, probe_degree: usize) -> Result<CellMap, MapError> {
    let pts = mesh.cell_points(c);
    let n = pts.len();
    let curved = (0..n).find_map(|j| traversal_arc(mesh, c, j).map(|arc| (j, arc)));
    let mut pieces = Vec::new();
    match curved {
        None if n == 3 => pieces.push(SubMap::Affine {
            origin: pts[0],
            e1: pts[1] - pts[0],
            e2: pts[2] - pts[0],
        }),
        None if n == 4 => pieces.push(SubMap::Bilinear {
            corners: [pts[0], pts[1], pts[2], pts[3]],
        }),
        None => {
            for i in 1..n - 1 {
                pieces.push(SubMap::Affine {
                    origin: pts[0],
                    e1: pts[i] - pts[0],
                    e2: pts[i + 1] - pts[0],
                });
            }
        }
        Some((k, (ta, tb))) => {
            let curve = mesh.curve.expect("curved edge without curve");
            let rot: Vec<Vec2> = (0..n).map(|i| pts[(k + 1 + i) % n]).collect();
            pieces = curved_polygon_pieces(&rot, &curve, ta, tb).ok_or(MapError::NonPositiveJacobian {
                cell: c,
                x: rot[0].x,
                y: rot[0].y,
            })?;
        }
    }
    for piece in &pieces {
        for (xi, eta) in piece.probe_points(probe_degree.max(1)) {
            let (xi, eta) = if xi + eta == 0.0 { (1e-3, 1e-3) } else { (xi, eta) };
            if piece.det_jacobian(xi, eta) <= 0.0 {
                let x = piece.map(xi, eta);
                return Err(MapError::NonPositiveJacobian { cell: c, x: x.x, y: x.y });
            }
        }
    }
    Ok(CellMap { cell: c, pieces })
}

/// Cell quadrature of declared exactness `m` (clamped to at least 1).
pub fn cell_quadrature(map: &CellMap, m: usize) -> QuadratureRule {
    let m = m.max(1);
    let mut rule = QuadratureRule {
        exactness: m,
        ..Default::default()
    };
    for piece in &map.pieces {
        piece.push_rule(m, &mut rule);
    }
    rule
}

/// Edge quadrature of exactness `m` (clamped to at least 1); curved edges use at least
/// [`CURVED_MIN_POINTS`] Gauss points in the curve parameter with arc-length weights.
pub fn edge_quadrature(mesh: &InterfaceMesh, e: usize, m: usize) -> EdgeRule {
    let m = m.max(1);
    let n = match mesh.edges[e].geometry {
        EdgeGeometry::Straight => points_for_exactness(m),
        EdgeGeometry::Curved { .. } => points_for_exactness(m).max(CURVED_MIN_POINTS),
    };
    let (xs, ws) = gauss_legendre(n);
    let mut rule = EdgeRule::default();
    for (&s, &w) in xs.iter().zip(ws) {
        let d = mesh.edge_derivative(e, s);
        let len = d.norm();
        rule.points.push(mesh.edge_point(e, s));
        rule.weights.push(w * len);
        rule.params.push(s);
        rule.tangents.push(d / len);
    }
    rule
}

/// Geometry of one edge seen from one of its cells.
#[derive(Clone, Debug)]
pub struct CellEdgeGeometry {
    pub edge: usize,
    pub interface: bool,
    pub curved: bool,
    pub rule: EdgeRule,
    /// Unit normals pointing out of the cell at the rule's points.
    pub normals: Vec<Vec2>,
}

/// Everything downstream needs about a cell: quadrature, size, centroid and edges.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub cell: usize,
    pub subdomain: Subdomain,
    pub curved: bool,
    pub quad: QuadratureRule,
    pub area: f64,
    pub centroid: Vec2,
    pub diameter: f64,
    pub edges: Vec<CellEdgeGeometry>,
}

impl CellGeometry {
    /// `m_cell`, `m_edge`: quadrature exactness on the cell and its edges.
    pub fn new(mesh: &InterfaceMesh, c: usize, m_cell: usize, m_edge: usize) -> Result<Self, MapError> {
        let map = build_cell_map(mesh, c, m_cell)?;
        let quad = cell_quadrature(&map, m_cell);
        let area = quad.measure();
        let centroid = quad
            .points
            .iter()
            .zip(&quad.weights)
            .map(|(x, w)| *w * x)
            .sum::<Vec2>()
            / area;
        let cell = &mesh.cells[c];
        let mut boundary_pts = mesh.cell_points(c);
        let mut edges = Vec::with_capacity(cell.edges.len());
        for ce in &cell.edges {
            let edge = &mesh.edges[ce.edge];
            let rule = edge_quadrature(mesh, ce.edge, m_edge);
            let sign = if ce.reversed { -1.0 } else { 1.0 };
            let normals = rule
                .tangents
                .iter()
                .map(|t| sign * Vec2::new(t.y, -t.x))
                .collect();
            if edge.is_curved() {
                for i in 1..32 {
                    boundary_pts.push(mesh.edge_point(ce.edge, -1.0 + 2.0 * i as f64 / 32.0));
                }
            }
            edges.push(CellEdgeGeometry {
                edge: ce.edge,
                interface: edge.is_interface(),
                curved: edge.is_curved(),
                rule,
                normals,
            });
        }
        let mut diameter: f64 = 0.0;
        for (i, a) in boundary_pts.iter().enumerate() {
            for b in &boundary_pts[i + 1..] {
                diameter = diameter.max((a - b).norm());
            }
        }
        Ok(CellGeometry {
            cell: c,
            subdomain: cell.subdomain,
            curved: mesh.cell_is_curved(c),
            quad,
            area,
            centroid,
            diameter,
            edges,
        })
    }

    /// Index among `edges` of the first edge with the given global id.
    pub fn local_edge(&self, edge: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.edge == edge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_background_mesh, MeshKind, Rect};

    #[test]
    fn affine_triangle_integrates_x_squared() {
        // triangle (0,0), (2,0), (0,1): ∫ x² = 2/3
        let map = CellMap {
            cell: 0,
            pieces: vec![SubMap::Affine {
                origin: Vec2::new(0.0, 0.0),
                e1: Vec2::new(2.0, 0.0),
                e2: Vec2::new(0.0, 1.0),
            }],
        };
        let q = cell_quadrature(&map, 2);
        assert!((q.integrate(|x| x.x * x.x) - 2.0 / 3.0).abs() < 1e-14);
        assert!((q.measure() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_maps_have_unit_jacobian() {
        let t = SubMap::Affine {
            origin: Vec2::zeros(),
            e1: Vec2::new(1.0, 0.0),
            e2: Vec2::new(0.0, 1.0),
        };
        let s = SubMap::Bilinear {
            corners: [
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ],
        };
        for (xi, eta) in [(0.1, 0.2), (0.5, 0.3), (0.9, 0.05)] {
            assert_eq!(t.det_jacobian(xi, eta), 1.0);
            assert!((s.det_jacobian(xi, eta) - 1.0).abs() < 1e-15);
            assert!((s.map(xi, eta) - Vec2::new(xi, eta)).norm() < 1e-15);
        }
    }

    #[test]
    fn curved_triangle_hypotenuse_follows_arc() {
        let curve = InterfaceCurve::circle(0.5);
        let map = SubMap::CurvedTriangle {
            apex: Vec2::new(0.0, 0.0),
            curve,
            t0: 0.0,
            t1: 0.25,
        };
        for i in 0..20 {
            let s = (i as f64 + 0.5) / 20.0;
            let x = map.map(1.0 - s, s);
            assert!((x.norm() - 0.5).abs() < 1e-14);
        }
        assert!((map.map(1.0, 0.0) - curve.point(0.0)).norm() < 1e-15);
        assert!((map.map(0.0, 1.0) - curve.point(0.25)).norm() < 1e-15);
        // quarter disk area
        let q = cell_quadrature(&CellMap { cell: 0, pieces: vec![map] }, 4);
        assert!((q.measure() - std::f64::consts::PI / 16.0).abs() < 1e-14);
    }

    #[test]
    fn curved_jacobian_matches_finite_differences() {
        let map = SubMap::CurvedTriangle {
            apex: Vec2::new(0.1, -0.05),
            curve: InterfaceCurve::polar_star(0.5, 0.25, 2.0),
            t0: 0.05,
            t1: 0.12,
        };
        let h = 1e-6;
        let (xi, eta) = (0.3, 0.4);
        let dxi = (map.map(xi + h, eta) - map.map(xi - h, eta)) / (2.0 * h);
        let deta = (map.map(xi, eta + h) - map.map(xi, eta - h)) / (2.0 * h);
        let j = map.jacobian(xi, eta);
        assert!((j.column(0) - dxi).norm() < 1e-8);
        assert!((j.column(1) - deta).norm() < 1e-8);
    }

    #[test]
    fn quarter_circle_arc_length() {
        let mesh = crate::mesh::fit_interface(
            &build_background_mesh(Rect::biunit(), 2, MeshKind::Tri),
            InterfaceCurve::circle(0.5),
        )
        .unwrap();
        let total: f64 = (0..mesh.edges.len())
            .filter(|&e| mesh.edges[e].is_curved())
            .map(|e| edge_quadrature(&mesh, e, 4).measure())
            .sum();
        assert!((total - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn segment_rules() {
        let mesh = build_background_mesh(Rect::biunit(), 0, MeshKind::Quad);
        let r = edge_quadrature(&mesh, 0, 1);
        assert!((r.measure() - 0.5).abs() < 1e-15);
        let a = mesh.vertices[mesh.edges[0].vertices[0]];
        let b = mesh.vertices[mesh.edges[0].vertices[1]];
        let mid = 0.5 * (a + b);
        assert!((r.integrate(|x| x.x) - 0.5 * mid.x).abs() < 1e-15);
    }
}
