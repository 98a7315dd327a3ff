use super::{assemble_mesh, InterfaceMesh, MeshKind, PolygonCell, Rect, Subdomain};
use crate::Vec2;

/// Cells per side of the level-0 template.
pub const TEMPLATE_CELLS: usize = 4;

/// Uniform straight mesh of `domain` with `4·2^n` cells per side. Triangle meshes
/// split every square along its SW–NE diagonal. All cells are tagged side one.
pub fn build_background_mesh(domain: Rect, n: u32, kind: MeshKind) -> InterfaceMesh {
    let m = TEMPLATE_CELLS << n;
    let (dx, dy) = (
        (domain.max.x - domain.min.x) / m as f64,
        (domain.max.y - domain.min.y) / m as f64,
    );
    let mut vertices = Vec::with_capacity((m + 1) * (m + 1));
    for j in 0..=m {
        for i in 0..=m {
            // exact endpoints on the far sides
            let x = if i == m { domain.max.x } else { domain.min.x + i as f64 * dx };
            let y = if j == m { domain.max.y } else { domain.min.y + j as f64 * dy };
            vertices.push(Vec2::new(x, y));
        }
    }
    let id = |i: usize, j: usize| j * (m + 1) + i;
    let mut polygons = Vec::new();
    let mut push = |vs: Vec<usize>| {
        polygons.push(PolygonCell {
            arcs: vec![None; vs.len()],
            vertices: vs,
            subdomain: Subdomain::One,
        })
    };
    for j in 0..m {
        for i in 0..m {
            let (sw, se, ne, nw) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            match kind {
                MeshKind::Quad => push(vec![sw, se, ne, nw]),
                MeshKind::Tri => {
                    push(vec![sw, se, ne]);
                    push(vec![sw, ne, nw]);
                }
            }
        }
    }
    assemble_mesh(domain, kind, n, None, vertices, polygons)
        .expect("uniform background mesh is always valid")
}
