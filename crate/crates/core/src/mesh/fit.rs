use std::collections::HashMap;

use super::{
    assemble_mesh, InterfaceCurve, InterfaceMesh, MeshError, MeshKind, PolygonCell, Side,
    Subdomain, TOL_GEOM,
};
use crate::refmap::choose_curved_apex;
use crate::Vec2;

/// Vertices closer to the curve than this fraction of their shortest incident edge are snapped.
pub const SNAP_FRACTION: f64 = 0.2;
/// Curve samples per arc used to locate the background cell containing it.
const ARC_SAMPLES: usize = 16;
/// Level samples along edges leaving a curve vertex.
const REVISIT_SAMPLES: usize = 32;

/// A point of the curve that becomes a mesh vertex.
#[derive(Clone, Copy, Debug)]
struct CurvePoint {
    t: f64,
    vertex: usize,
}

/// Fits `curve` into a straight background mesh.
///
/// Background vertices near the curve are snapped onto it, remaining crossings of
/// background edges are found by bisection, and every background cell containing an
/// arc between consecutive curve points is split along the exact arc. Triangle meshes
/// re-triangulate the pieces so that every cell is a (possibly curved) triangle.
pub fn fit_interface(
    background: &InterfaceMesh,
    curve: InterfaceCurve,
) -> Result<InterfaceMesh, MeshError> {
    let mut forced = vec![Move::Free; background.vertices.len()];
    let mut budget = MAX_ATTEMPTS;
    search(background, curve, &mut forced, 0, &mut budget)
}

/// Depth-first search over extra snaps: each failure proposes the eligible vertices of the
/// offending background cell, nearest first, and a dead branch is undone.
fn search(
    background: &InterfaceMesh,
    curve: InterfaceCurve,
    forced: &mut [Move],
    depth: usize,
    budget: &mut usize,
) -> Result<InterfaceMesh, MeshError> {
    *budget = budget.saturating_sub(1);
    let Failure { error, origin } = match fit_once(background, curve, forced) {
        Ok(mesh) => return Ok(mesh),
        Err(f) => f,
    };
    let Some(cell) = origin else { return Err(error) };
    if depth >= MAX_EXTRA_SNAPS {
        return Err(error);
    }
    for (v, m) in move_candidates(background, &curve, cell, forced) {
        if *budget == 0 {
            break;
        }
        forced[v] = m;
        match search(background, curve, forced, depth + 1, budget) {
            Ok(mesh) => return Ok(mesh),
            Err(_) => forced[v] = Move::Free,
        }
    }
    Err(error)
}

/// Vertex adjustment beyond the distance rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    Free,
    /// Snap onto the curve regardless of distance.
    Snap,
    /// Move off the curve, outward, by [`PUSH_FRACTION`] of the shortest incident edge.
    Push,
}

/// Offset of pushed vertices; above [`SNAP_FRACTION`] so they stay off the curve.
const PUSH_FRACTION: f64 = 0.3;

/// Fitting attempts allowed in the snap search.
const MAX_ATTEMPTS: usize = 64;
/// Upper bound on vertices snapped beyond the distance rule.
const MAX_EXTRA_SNAPS: usize = 8;
/// Vertices farther than this fraction of their shortest edge are never snapped.
const MAX_SNAP_FRACTION: f64 = 0.5;

struct Failure {
    error: MeshError,
    /// Background cell where the failure was detected.
    origin: Option<usize>,
}

impl From<MeshError> for Failure {
    fn from(error: MeshError) -> Self {
        let origin = match &error {
            MeshError::CellCutTwice { cells } => cells.first().copied(),
            MeshError::DegenerateCut { cell, .. } => Some(*cell),
            _ => None,
        };
        Failure { error, origin }
    }
}

fn shortest_edges(mesh: &InterfaceMesh) -> Vec<f64> {
    let mut h = vec![f64::INFINITY; mesh.vertices.len()];
    for e in &mesh.edges {
        let len = (mesh.vertices[e.vertices[0]] - mesh.vertices[e.vertices[1]]).norm();
        for &v in &e.vertices {
            h[v] = h[v].min(len);
        }
    }
    h
}

fn boundary_vertices(mesh: &InterfaceMesh) -> Vec<bool> {
    let mut b = vec![false; mesh.vertices.len()];
    for e in &mesh.edges {
        if e.cells.len() == 1 {
            b[e.vertices[0]] = true;
            b[e.vertices[1]] = true;
        }
    }
    b
}

/// Adjustments to try for a failure in `cell`: nearby vertices are snapped (nearest first),
/// then vertices that would snap anyway are pushed off the curve.
fn move_candidates(
    background: &InterfaceMesh,
    curve: &InterfaceCurve,
    cell: usize,
    forced: &[Move],
) -> Vec<(usize, Move)> {
    let h = shortest_edges(background);
    let boundary = boundary_vertices(background);
    let Some(c) = background.cells.get(cell) else { return Vec::new() };
    let mut near: Vec<(usize, f64)> = c
        .vertices
        .iter()
        .copied()
        .filter(|&v| !boundary[v] && forced[v] == Move::Free)
        .map(|v| (v, curve.closest_point(&background.vertices[v]).1))
        .filter(|&(v, d)| d < MAX_SNAP_FRACTION * h[v])
        .collect();
    near.sort_by(|a, b| a.1.total_cmp(&b.1));
    let snaps = near
        .iter()
        .filter(|&&(v, d)| d >= SNAP_FRACTION * h[v])
        .map(|&(v, _)| (v, Move::Snap));
    let pushes = near
        .iter()
        .filter(|&&(v, d)| d < SNAP_FRACTION * h[v])
        .map(|&(v, _)| (v, Move::Push));
    snaps.chain(pushes).collect()
}

fn fit_once(
    background: &InterfaceMesh,
    curve: InterfaceCurve,
    forced: &[Move],
) -> Result<InterfaceMesh, Failure> {
    if background.curve.is_some() {
        return Err(MeshError::AlreadyFitted.into());
    }
    if !curve.is_simple() {
        return Err(MeshError::InvalidCurve.into());
    }
    let d = background.domain;
    let clearance = (-d.min.x).min(d.max.x).min(-d.min.y).min(d.max.y);
    if curve.max_radius() >= clearance - TOL_GEOM {
        return Err(MeshError::CurveOutsideDomain.into());
    }

    let mut vertices = background.vertices.clone();
    let nv = vertices.len();

    let h_vertex = shortest_edges(background);
    let on_boundary = boundary_vertices(background);

    // snapping
    let mut points: Vec<CurvePoint> = Vec::new();
    let mut sign = vec![0i8; nv];
    for v in 0..nv {
        let mut x = vertices[v];
        if forced[v] == Move::Push {
            let (t, _) = curve.closest_point(&x);
            x = curve.point(t) + PUSH_FRACTION * h_vertex[v] * curve.outward_normal(t);
            vertices[v] = x;
        }
        let level = curve.level(&x);
        let snap = forced[v] == Move::Snap;
        if !on_boundary[v] && forced[v] != Move::Push && (snap || level.abs() < 2.0 * h_vertex[v]) {
            let (t, dist) = curve.closest_point(&x);
            if snap || dist < SNAP_FRACTION * h_vertex[v] {
                vertices[v] = curve.point(t);
                points.push(CurvePoint { t, vertex: v });
                continue;
            }
        }
        sign[v] = match curve.classify(&x) {
            Side::Inside => -1,
            Side::Outside => 1,
            Side::On => 0,
        };
        if sign[v] == 0 {
            // on the curve but not snappable (boundary vertex): reject
            return Err(MeshError::CurveOutsideDomain.into());
        }
    }

    // crossings of background edges: strictly opposite end signs, or an edge leaving a curve
    // vertex that passes back through the curve before its far end
    let mut crossing_of_edge: HashMap<usize, usize> = HashMap::new();
    for (id, e) in background.edges.iter().enumerate() {
        let [a, b] = e.vertices;
        let bracket = if sign[a] * sign[b] < 0 {
            Some((vertices[a], vertices[b]))
        } else if (sign[a] == 0) != (sign[b] == 0) {
            let (on, off) = if sign[a] == 0 { (a, b) } else { (b, a) };
            let (xo, xf) = (vertices[on], vertices[off]);
            let far = curve.level(&xf) < 0.0;
            // last sample (walking from the far end) on the opposite side
            (1..REVISIT_SAMPLES).rev().find_map(|i| {
                let l0 = i as f64 / REVISIT_SAMPLES as f64;
                let x0 = xo + l0 * (xf - xo);
                let lev = curve.level(&x0);
                (lev.abs() > TOL_GEOM && (lev < 0.0) != far)
                    .then(|| (x0, xo + (i + 1) as f64 / REVISIT_SAMPLES as f64 * (xf - xo)))
            })
        } else {
            None
        };
        let Some((xa, xb)) = bracket else { continue };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let la = curve.level(&xa);
        let len = (xb - xa).norm();
        while (hi - lo) * len > TOL_GEOM {
            let mid = 0.5 * (lo + hi);
            let lm = curve.level(&(xa + mid * (xb - xa)));
            if (lm < 0.0) == (la < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = xa + 0.5 * (lo + hi) * (xb - xa);
        let t = curve.parameter_of(&x);
        vertices.push(curve.point(t));
        sign.push(0);
        crossing_of_edge.insert(id, vertices.len() - 1);
        points.push(CurvePoint {
            t,
            vertex: vertices.len() - 1,
        });
    }

    let ncells = background.cells.len();
    // augmented polygons: background vertices with crossing vertices inserted
    let augmented: Vec<Vec<usize>> = background
        .cells
        .iter()
        .map(|cell| {
            let mut poly = Vec::with_capacity(cell.vertices.len() + 2);
            for (j, ce) in cell.edges.iter().enumerate() {
                poly.push(cell.vertices[j]);
                if let Some(&x) = crossing_of_edge.get(&ce.edge) {
                    poly.push(x);
                }
            }
            poly
        })
        .collect();

    if points.len() < 3 {
        // the curve does not meet enough mesh edges: it sits inside a single cell
        let c = locate(&vertices, &augmented, &curve.point(0.0)).unwrap_or(0);
        return Err(MeshError::CellCutTwice { cells: vec![c] }.into());
    }
    points.sort_by(|p, q| p.t.total_cmp(&q.t));

    let mut cells_of_vertex: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (c, poly) in augmented.iter().enumerate() {
        for &v in poly {
            cells_of_vertex[v].push(c);
        }
    }

    // assign each arc between consecutive curve points to the background cell containing it
    struct Arc {
        a: usize,
        b: usize,
        ta: f64,
        tb: f64,
    }
    let mut arcs_of_cell: Vec<Vec<Arc>> = (0..ncells).map(|_| Vec::new()).collect();
    let m = points.len();
    for i in 0..m {
        let p = points[i];
        let q = points[(i + 1) % m];
        let tq = if i + 1 == m { q.t + 1.0 } else { q.t };
        let candidates: Vec<usize> = cells_of_vertex[p.vertex]
            .iter()
            .copied()
            .filter(|c| cells_of_vertex[q.vertex].contains(c))
            .collect();
        let owner = candidates.iter().copied().find(|&c| {
            (1..ARC_SAMPLES).all(|s| {
                let t = p.t + (tq - p.t) * s as f64 / ARC_SAMPLES as f64;
                point_in_polygon(&vertices, &augmented[c], &curve.point(t))
            })
        });
        match owner {
            Some(c) => arcs_of_cell[c].push(Arc {
                a: p.vertex,
                b: q.vertex,
                ta: p.t,
                tb: tq,
            }),
            None => {
                let mut cells: Vec<usize> = cells_of_vertex[p.vertex]
                    .iter()
                    .chain(&cells_of_vertex[q.vertex])
                    .copied()
                    .collect();
                cells.sort_unstable();
                cells.dedup();
                return Err(MeshError::CellCutTwice { cells }.into());
            }
        }
    }
    for (c, arcs) in arcs_of_cell.iter().enumerate() {
        if arcs.len() > 1 {
            return Err(MeshError::CellCutTwice { cells: vec![c] }.into());
        }
    }

    let vertex_side = |v: usize| sign[v];

    // arcs joining neighbouring polygon vertices replace that segment in both adjacent cells
    let mut segment_arcs: Vec<Vec<Option<(f64, f64)>>> =
        augmented.iter().map(|p| vec![None; p.len()]).collect();
    let mut split: Vec<Option<(usize, usize, f64, f64)>> = vec![None; ncells];
    for (c, arcs) in arcs_of_cell.iter().enumerate() {
        let Some(arc) = arcs.first() else { continue };
        let poly = &augmented[c];
        let n = poly.len();
        let ia = poly.iter().position(|&v| v == arc.a).unwrap();
        let ib = poly.iter().position(|&v| v == arc.b).unwrap();
        if (ia + 1) % n == ib || (ib + 1) % n == ia {
            for (c2, poly2) in augmented.iter().enumerate() {
                let n2 = poly2.len();
                for j in 0..n2 {
                    let (u, w) = (poly2[j], poly2[(j + 1) % n2]);
                    if (u, w) == (arc.a, arc.b) {
                        set_segment(&mut segment_arcs[c2][j], (arc.ta, arc.tb), c2)?;
                    } else if (u, w) == (arc.b, arc.a) {
                        set_segment(&mut segment_arcs[c2][j], (arc.tb, arc.ta), c2)?;
                    }
                }
            }
        } else {
            split[c] = Some((ia, ib, arc.ta, arc.tb));
        }
    }

    // pieces with the background cell they came from
    let mut pieces: Vec<(PolygonCell, usize)> = Vec::new();
    for c in 0..ncells {
        let poly = &augmented[c];
        let n = poly.len();
        match split[c] {
            Some((ia, ib, ta, tb)) => {
                if segment_arcs[c].iter().any(|s| s.is_some()) {
                    return Err(MeshError::CellCutTwice { cells: vec![c] }.into());
                }
                // side one lies to the left of the arc traversed with increasing t
                let inner: Vec<usize> = cyclic(poly, ib, ia);
                let outer: Vec<usize> = cyclic(poly, ia, ib);
                for (verts, arc, side) in [
                    (inner, (ta, tb), Subdomain::One),
                    (outer, (tb, ta), Subdomain::Two),
                ] {
                    let expected = if side == Subdomain::One { -1 } else { 1 };
                    if verts.iter().any(|&v| vertex_side(v) == -expected) {
                        return Err(MeshError::DegenerateCut {
                            cell: c,
                            reason: "cut piece has vertices on both sides of the interface".into(),
                        }
                        .into());
                    }
                    let mut arcs = vec![None; verts.len()];
                    *arcs.last_mut().unwrap() = Some(arc);
                    pieces.push((
                        PolygonCell {
                            vertices: verts,
                            arcs,
                            subdomain: side,
                        },
                        c,
                    ));
                }
            }
            None => {
                let arcs = segment_arcs[c].clone();
                if arcs.iter().filter(|s| s.is_some()).count() > 1 {
                    return Err(MeshError::CellCutTwice { cells: vec![c] }.into());
                }
                let signs: Vec<i8> = poly.iter().map(|&v| vertex_side(v)).filter(|&s| s != 0).collect();
                let subdomain = if signs.is_empty() {
                    let centroid = poly.iter().map(|&v| vertices[v]).sum::<Vec2>() / n as f64;
                    match curve.classify(&centroid) {
                        Side::Outside => Subdomain::Two,
                        _ => Subdomain::One,
                    }
                } else if signs.iter().all(|&s| s < 0) {
                    Subdomain::One
                } else if signs.iter().all(|&s| s > 0) {
                    Subdomain::Two
                } else {
                    return Err(MeshError::DegenerateCut {
                        cell: c,
                        reason: "uncut cell has vertices on both sides of the interface".into(),
                    }
                    .into());
                };
                pieces.push((
                    PolygonCell {
                        vertices: poly.clone(),
                        arcs,
                        subdomain,
                    },
                    c,
                ));
            }
        }
    }

    if background.kind == MeshKind::Tri {
        // arcs that no single apex can see from one of their sides get a midpoint vertex
        let mut needs_mid: HashMap<(usize, usize), usize> = HashMap::new();
        for (p, _) in &pieces {
            if let Some((pts, ta, tb, a, b)) = rotated_piece(p, &vertices) {
                if choose_curved_apex(&pts, &curve, ta, tb).is_none() {
                    needs_mid.insert((a.min(b), a.max(b)), usize::MAX);
                }
            }
        }
        let mut triangles = Vec::with_capacity(pieces.len());
        for (p, c) in pieces {
            let split_key = rotated_piece(&p, &vertices).and_then(|(_, ta, tb, a, b)| {
                let key = (a.min(b), a.max(b));
                needs_mid.contains_key(&key).then_some((key, ta, tb))
            });
            let tris = match split_key {
                None => triangulate_piece(p, &vertices, &curve),
                Some((key, ta, tb)) => {
                    let mid = match needs_mid[&key] {
                        usize::MAX => {
                            let t = 0.5 * (ta + tb);
                            vertices.push(curve.point(t));
                            needs_mid.insert(key, vertices.len() - 1);
                            vertices.len() - 1
                        }
                        m => m,
                    };
                    split_at_midpoint(p, &vertices, &curve, mid)
                }
            };
            let tris = tris.ok_or_else(|| MeshError::DegenerateCut {
                cell: c,
                reason: "no apex gives a positive curved-triangle map".into(),
            })?;
            for t in tris {
                triangles.push((t, c));
            }
        }
        pieces = triangles;
    }
    let origin: Vec<usize> = pieces.iter().map(|p| p.1).collect();
    let to_background = |error: MeshError| -> Failure {
        match error {
            MeshError::DegenerateCut { cell, reason } => Failure {
                error: MeshError::DegenerateCut { cell, reason },
                origin: origin.get(cell).copied(),
            },
            e => e.into(),
        }
    };

    let mesh = assemble_mesh(
        background.domain,
        background.kind,
        background.level,
        Some(curve),
        vertices,
        pieces.into_iter().map(|p| p.0).collect(),
    )
    .map_err(to_background)?;
    check_sides(&mesh).map_err(to_background)?;
    let stats = super::mesh_statistics(&mesh).map_err(|e| {
        let crate::refmap::MapError::NonPositiveJacobian { cell, .. } = e;
        to_background(MeshError::DegenerateCut {
            cell,
            reason: e.to_string(),
        })
    })?;
    if let Some(&cell) = stats.violations.first() {
        return Err(to_background(MeshError::DegenerateCut {
            cell,
            reason: format!(
                "regularity bounds violated by {} cell(s) (min |T|/h_T² = {:.3e}, min |e|/h_T = {:.3e}, max |e|/h_T = {:.3e}, min inradius/h_T = {:.3e})",
                stats.violations.len(),
                stats.min_area_ratio,
                stats.min_edge_ratio,
                stats.max_edge_ratio,
                stats.min_inradius_ratio
            ),
        }));
    }
    Ok(mesh)
}

fn set_segment(
    slot: &mut Option<(f64, f64)>,
    arc: (f64, f64),
    cell: usize,
) -> Result<(), MeshError> {
    if slot.is_some() {
        return Err(MeshError::CellCutTwice { cells: vec![cell] });
    }
    *slot = Some(arc);
    Ok(())
}

/// `poly[from], poly[from+1], ..., poly[to]` cyclically.
fn cyclic(poly: &[usize], from: usize, to: usize) -> Vec<usize> {
    let n = poly.len();
    let mut out = vec![poly[from]];
    let mut i = from;
    while i != to {
        i = (i + 1) % n;
        out.push(poly[i]);
    }
    out
}

/// Splits a piece with more than three vertices into one curved triangle plus a fan of
/// straight triangles sharing the curved triangle's apex.
fn triangulate_piece(poly: PolygonCell, vertices: &[Vec2], curve: &InterfaceCurve) -> Option<Vec<PolygonCell>> {
    let n = poly.vertices.len();
    if n <= 3 {
        return Some(vec![poly]);
    }
    let Some(k) = poly.arcs.iter().position(|a| a.is_some()) else {
        // straight polygon: fan from vertex 0
        return Some((1..n - 1)
            .map(|i| PolygonCell {
                vertices: vec![poly.vertices[0], poly.vertices[i], poly.vertices[i + 1]],
                arcs: vec![None; 3],
                subdomain: poly.subdomain,
            })
            .collect());
    };
    // rotate so the curved segment is last: c_0 .. c_{n-1}, arc c_{n-1} -> c_0
    let rot: Vec<usize> = (0..n).map(|i| poly.vertices[(k + 1 + i) % n]).collect();
    let (ta, tb) = poly.arcs[k].unwrap();
    let pts: Vec<Vec2> = rot.iter().map(|&v| vertices[v]).collect();
    let apex = choose_curved_apex(&pts, curve, ta, tb)?;
    let mut out = vec![PolygonCell {
        vertices: vec![rot[0], rot[apex], rot[n - 1]],
        arcs: vec![None, None, Some((ta, tb))],
        subdomain: poly.subdomain,
    }];
    for i in (0..apex.saturating_sub(1)).chain(apex + 1..n - 1) {
        out.push(PolygonCell {
            vertices: vec![rot[apex], rot[i], rot[i + 1]],
            arcs: vec![None; 3],
            subdomain: poly.subdomain,
        });
    }
    Some(out)
}

/// Piece rotated so its curved segment runs from the last vertex to the first:
/// (points, t at last vertex, t at first vertex, last vertex id, first vertex id).
fn rotated_piece(poly: &PolygonCell, vertices: &[Vec2]) -> Option<(Vec<Vec2>, f64, f64, usize, usize)> {
    let n = poly.vertices.len();
    let k = poly.arcs.iter().position(|a| a.is_some())?;
    let (ta, tb) = poly.arcs[k].unwrap();
    let pts = (0..n).map(|i| vertices[poly.vertices[(k + 1 + i) % n]]).collect();
    Some((pts, ta, tb, poly.vertices[k], poly.vertices[(k + 1) % n]))
}

/// Triangulates a piece whose arc is split at the curve vertex `mid` (at the mean parameter).
fn split_at_midpoint(
    poly: PolygonCell,
    vertices: &[Vec2],
    curve: &InterfaceCurve,
    mid: usize,
) -> Option<Vec<PolygonCell>> {
    let n = poly.vertices.len();
    let k = poly.arcs.iter().position(|a| a.is_some())?;
    let (ta, tb) = poly.arcs[k].unwrap();
    let rot: Vec<usize> = (0..n).map(|i| poly.vertices[(k + 1 + i) % n]).collect();
    let pts: Vec<Vec2> = rot.iter().map(|&v| vertices[v]).collect();
    if !crate::refmap::midpoint_split_valid(&pts, curve, ta, tb) {
        return None;
    }
    let tm = 0.5 * (ta + tb);
    let mut out = vec![
        PolygonCell {
            vertices: vec![rot[0], rot[1], mid],
            arcs: vec![None, None, Some((tm, tb))],
            subdomain: poly.subdomain,
        },
        PolygonCell {
            vertices: vec![rot[n - 2], rot[n - 1], mid],
            arcs: vec![None, Some((ta, tm)), None],
            subdomain: poly.subdomain,
        },
    ];
    for i in 1..n - 2 {
        out.push(PolygonCell {
            vertices: vec![mid, rot[i], rot[i + 1]],
            arcs: vec![None; 3],
            subdomain: poly.subdomain,
        });
    }
    Some(out)
}

/// Winding-number test for a straight polygon given by vertex ids.
fn point_in_polygon(vertices: &[Vec2], poly: &[usize], x: &Vec2) -> bool {
    let n = poly.len();
    let mut winding = 0i32;
    for i in 0..n {
        let a = vertices[poly[i]];
        let b = vertices[poly[(i + 1) % n]];
        let side = crate::cross(&(b - a), &(x - a));
        if a.y <= x.y {
            if b.y > x.y && side > 0.0 {
                winding += 1;
            }
        } else if b.y <= x.y && side < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

fn locate(vertices: &[Vec2], polys: &[Vec<usize>], x: &Vec2) -> Option<usize> {
    polys.iter().position(|p| point_in_polygon(vertices, p, x))
}

/// Side-one owners must traverse their arc with increasing parameter (interior on the left).
fn check_sides(mesh: &InterfaceMesh) -> Result<(), MeshError> {
    for (id, e) in mesh.edges.iter().enumerate() {
        if !e.is_curved() {
            continue;
        }
        let c = e.cells[0];
        let ce = mesh.cells[c].edges.iter().find(|ce| ce.edge == id).unwrap();
        if ce.reversed {
            return Err(MeshError::DegenerateCut {
                cell: c,
                reason: format!("side-one cell lies to the right of interface edge {id}"),
            });
        }
    }
    Ok(())
}
