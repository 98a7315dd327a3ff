use super::InterfaceMesh;
use crate::refmap::{CellGeometry, MapError};

/// Declared regularity constants checked on every fitted mesh.
#[derive(Clone, Copy, Debug)]
pub struct RegularityBounds {
    /// Lower bound on `|T| / h_T²`.
    pub area_ratio: f64,
    /// Lower bound on `|e| / h_T` for every edge of `T`.
    pub edge_ratio: f64,
    /// Upper bound on `|e| / h_T`.
    pub edge_ratio_max: f64,
    /// Lower bound on the inscribed-radius estimate `2|T| / perimeter` over `h_T`.
    pub inradius_ratio: f64,
}

impl Default for RegularityBounds {
    fn default() -> Self {
        RegularityBounds {
            area_ratio: 0.02,
            edge_ratio: 0.05,
            edge_ratio_max: 1.5,
            inradius_ratio: 0.02,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct MeshStats {
    pub cells: usize,
    pub curved_cells: usize,
    pub interface_edges: usize,
    /// `h = max h_T`.
    pub h: f64,
    pub min_h_t: f64,
    pub max_h_t: f64,
    pub min_area_ratio: f64,
    pub min_edge_ratio: f64,
    pub max_edge_ratio: f64,
    pub min_inradius_ratio: f64,
    pub total_area: f64,
    pub interface_length: f64,
    /// Cells violating one of the bounds.
    pub violations: Vec<usize>,
    pub pass: bool,
}

/// Size and shape statistics with the default [`RegularityBounds`].
pub fn mesh_statistics(mesh: &InterfaceMesh) -> Result<MeshStats, MapError> {
    mesh_statistics_with(mesh, &RegularityBounds::default())
}

pub fn mesh_statistics_with(
    mesh: &InterfaceMesh,
    bounds: &RegularityBounds,
) -> Result<MeshStats, MapError> {
    let mut s = MeshStats {
        cells: mesh.cells.len(),
        min_h_t: f64::INFINITY,
        min_area_ratio: f64::INFINITY,
        min_edge_ratio: f64::INFINITY,
        min_inradius_ratio: f64::INFINITY,
        pass: true,
        ..Default::default()
    };
    if mesh.cells.is_empty() {
        s.min_h_t = 0.0;
        return Ok(s);
    }
    for c in 0..mesh.cells.len() {
        let g = CellGeometry::new(mesh, c, 4, 4)?;
        let h = g.diameter;
        s.h = s.h.max(h);
        s.min_h_t = s.min_h_t.min(h);
        s.max_h_t = s.max_h_t.max(h);
        s.total_area += g.area;
        if g.curved {
            s.curved_cells += 1;
        }
        let area_ratio = g.area / (h * h);
        let mut perimeter = 0.0;
        let mut ok = area_ratio >= bounds.area_ratio;
        for e in &g.edges {
            let len = e.rule.measure();
            perimeter += len;
            let r = len / h;
            s.min_edge_ratio = s.min_edge_ratio.min(r);
            s.max_edge_ratio = s.max_edge_ratio.max(r);
            ok &= r >= bounds.edge_ratio && r <= bounds.edge_ratio_max;
        }
        let inradius = 2.0 * g.area / perimeter / h;
        ok &= inradius >= bounds.inradius_ratio;
        s.min_area_ratio = s.min_area_ratio.min(area_ratio);
        s.min_inradius_ratio = s.min_inradius_ratio.min(inradius);
        if !ok {
            s.violations.push(c);
        }
    }
    for (e, edge) in mesh.edges.iter().enumerate() {
        if edge.is_interface() {
            s.interface_edges += 1;
            s.interface_length += crate::refmap::edge_quadrature(mesh, e, 4).measure();
        }
    }
    s.pass = s.violations.is_empty();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_background_mesh, MeshKind, Rect};

    #[test]
    fn uniform_quad_mesh_size() {
        let m = build_background_mesh(Rect::biunit(), 1, MeshKind::Quad);
        let s = mesh_statistics(&m).unwrap();
        assert!((s.h - 2f64.sqrt() / 4.0).abs() < 1e-15);
        assert!(s.pass);
        assert!((s.total_area - 4.0).abs() < 1e-13);
    }

    #[test]
    fn refinement_halves_h() {
        for kind in [MeshKind::Tri, MeshKind::Quad] {
            let h: Vec<f64> = (0..3)
                .map(|n| mesh_statistics(&build_background_mesh(Rect::biunit(), n, kind)).unwrap().h)
                .collect();
            assert!((h[0] / h[1] - 2.0).abs() < 1e-12 && (h[1] / h[2] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_mesh_passes() {
        let mut m = build_background_mesh(Rect::biunit(), 0, MeshKind::Quad);
        m.cells.clear();
        m.edges.clear();
        let s = mesh_statistics(&m).unwrap();
        assert_eq!(s.h, 0.0);
        assert!(s.pass);
    }
}
