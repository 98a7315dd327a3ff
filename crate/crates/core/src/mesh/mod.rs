//! Interface-fitted polygonal meshes of a rectangle.
//!
//! Cells are counter-clockwise polygons. Cells cut by the interface carry
//! exactly one curved edge that follows the exact curve parametrization.

mod background;
mod curve;
mod fit;
mod io;
mod stats;

use std::collections::HashMap;

pub use background::build_background_mesh;
pub use curve::{InterfaceCurve, Side, Subdomain, TOL_GEOM};
pub use fit::fit_interface;
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh};
pub use stats::{mesh_statistics, MeshStats, RegularityBounds};

use crate::Vec2;

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("interface meets the boundary of background cell(s) {cells:?} more than twice; refine the background mesh")]
    CellCutTwice { cells: Vec<usize> },
    #[error("cut produces a degenerate cell {cell}: {reason}")]
    DegenerateCut { cell: usize, reason: String },
    #[error("interface curve is not strictly inside the domain")]
    CurveOutsideDomain,
    #[error("interface curve is not a simple closed curve")]
    InvalidCurve,
    #[error("background mesh already carries an interface")]
    AlreadyFitted,
    #[error("mesh file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh file i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect {
            min: Vec2::new(x0, y0),
            max: Vec2::new(x1, y1),
        }
    }

    /// The square [-1, 1]².
    pub fn biunit() -> Self {
        Self::new(-1.0, -1.0, 1.0, 1.0)
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }

    pub fn on_boundary(&self, x: &Vec2, tol: f64) -> bool {
        (x.x - self.min.x).abs() <= tol
            || (x.x - self.max.x).abs() <= tol
            || (x.y - self.min.y).abs() <= tol
            || (x.y - self.max.y).abs() <= tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshKind {
    Tri,
    Quad,
}

impl MeshKind {
    pub fn name(self) -> &'static str {
        match self {
            MeshKind::Tri => "tri",
            MeshKind::Quad => "quad",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeGeometry {
    Straight,
    /// Arc of the interface curve from `p(t0)` (first vertex) to `p(t1)` (second vertex), `t0 < t1`.
    Curved { t0: f64, t1: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeTag {
    Interior,
    Boundary,
    Interface,
}

impl EdgeTag {
    pub fn name(self) -> &'static str {
        match self {
            EdgeTag::Interior => "interior",
            EdgeTag::Boundary => "boundary",
            EdgeTag::Interface => "interface",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub geometry: EdgeGeometry,
    pub tag: EdgeTag,
    /// Owning cells. On interface edges the side-one cell comes first.
    pub cells: Vec<usize>,
}

impl Edge {
    pub fn is_interface(&self) -> bool {
        self.tag == EdgeTag::Interface
    }

    pub fn is_curved(&self) -> bool {
        matches!(self.geometry, EdgeGeometry::Curved { .. })
    }

    /// Number of trace slots: two on the interface, one elsewhere.
    pub fn slots(&self) -> usize {
        if self.is_interface() {
            2
        } else {
            1
        }
    }
}

/// Reference from a cell to one of its edges. `reversed` is set when the
/// counter-clockwise traversal of the cell runs against the edge orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellEdge {
    pub edge: usize,
    pub reversed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    /// Counter-clockwise vertex ids; local edge `j` joins vertex `j` to vertex `j+1`.
    pub vertices: Vec<usize>,
    pub edges: Vec<CellEdge>,
    pub subdomain: Subdomain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceMesh {
    pub domain: Rect,
    pub kind: MeshKind,
    pub level: u32,
    pub curve: Option<InterfaceCurve>,
    /// Set when interface edges have been replaced by straight chords.
    pub chord_interface: bool,
    pub vertices: Vec<Vec2>,
    pub edges: Vec<Edge>,
    pub cells: Vec<Cell>,
}

impl InterfaceMesh {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_is_curved(&self, c: usize) -> bool {
        self.cells[c]
            .edges
            .iter()
            .any(|ce| self.edges[ce.edge].is_curved())
    }

    /// Local index of the (single) interface edge of a cell, if any.
    pub fn interface_edge_of(&self, c: usize) -> Option<usize> {
        self.cells[c]
            .edges
            .iter()
            .position(|ce| self.edges[ce.edge].is_interface())
    }

    /// Point on edge `e` at parameter `s ∈ [-1, 1]` in the edge's own orientation.
    pub fn edge_point(&self, e: usize, s: f64) -> Vec2 {
        let edge = &self.edges[e];
        match edge.geometry {
            EdgeGeometry::Straight => {
                let a = self.vertices[edge.vertices[0]];
                let b = self.vertices[edge.vertices[1]];
                0.5 * (1.0 - s) * a + 0.5 * (1.0 + s) * b
            }
            EdgeGeometry::Curved { t0, t1 } => {
                let curve = self.curve.expect("curved edge without curve");
                curve.point(t0 + 0.5 * (s + 1.0) * (t1 - t0))
            }
        }
    }

    /// `dx/ds` along edge `e` in its own orientation.
    pub fn edge_derivative(&self, e: usize, s: f64) -> Vec2 {
        let edge = &self.edges[e];
        match edge.geometry {
            EdgeGeometry::Straight => {
                0.5 * (self.vertices[edge.vertices[1]] - self.vertices[edge.vertices[0]])
            }
            EdgeGeometry::Curved { t0, t1 } => {
                let curve = self.curve.expect("curved edge without curve");
                curve.derivative(t0 + 0.5 * (s + 1.0) * (t1 - t0)) * (0.5 * (t1 - t0))
            }
        }
    }

    /// Copy of the mesh in which every curved interface edge is replaced by its chord.
    /// The edges keep their interface tag and both trace slots.
    pub fn with_chords(&self) -> InterfaceMesh {
        let mut m = self.clone();
        for e in &mut m.edges {
            e.geometry = EdgeGeometry::Straight;
        }
        m.chord_interface = true;
        m
    }

    /// Vertex positions of cell `c`.
    pub fn cell_points(&self, c: usize) -> Vec<Vec2> {
        self.cells[c]
            .vertices
            .iter()
            .map(|&v| self.vertices[v])
            .collect()
    }
}

/// A polygon cell before edges are numbered: `arcs[i]` describes the segment
/// from `vertices[i]` to `vertices[i+1]` (curve parameters at its start and end).
#[derive(Clone, Debug)]
pub(crate) struct PolygonCell {
    pub vertices: Vec<usize>,
    pub arcs: Vec<Option<(f64, f64)>>,
    pub subdomain: Subdomain,
}

/// Numbers edges, sets adjacency and tags, and orders interface owners side-one first.
pub(crate) fn assemble_mesh(
    domain: Rect,
    kind: MeshKind,
    level: u32,
    curve: Option<InterfaceCurve>,
    vertices: Vec<Vec2>,
    polygons: Vec<PolygonCell>,
) -> Result<InterfaceMesh, MeshError> {
    let mut edges: Vec<Edge> = Vec::new();
    let mut index: HashMap<(usize, usize, bool), usize> = HashMap::new();
    let mut cells = Vec::with_capacity(polygons.len());
    for (c, poly) in polygons.into_iter().enumerate() {
        let n = poly.vertices.len();
        let mut cell_edges = Vec::with_capacity(n);
        for i in 0..n {
            let a = poly.vertices[i];
            let b = poly.vertices[(i + 1) % n];
            let curved = poly.arcs[i].is_some();
            let key = (a.min(b), a.max(b), curved);
            let id = *index.entry(key).or_insert_with(|| {
                let (verts, geometry) = match poly.arcs[i] {
                    None => ([a, b], EdgeGeometry::Straight),
                    Some((ta, tb)) if ta < tb => ([a, b], EdgeGeometry::Curved { t0: ta, t1: tb }),
                    Some((ta, tb)) => ([b, a], EdgeGeometry::Curved { t0: tb, t1: ta }),
                };
                edges.push(Edge {
                    vertices: verts,
                    geometry,
                    tag: EdgeTag::Interior,
                    cells: Vec::new(),
                });
                edges.len() - 1
            });
            let edge = &mut edges[id];
            if edge.cells.len() == 2 {
                return Err(MeshError::DegenerateCut {
                    cell: c,
                    reason: format!("edge {id} shared by more than two cells"),
                });
            }
            edge.cells.push(c);
            cell_edges.push(CellEdge {
                edge: id,
                reversed: edge.vertices[0] != a,
            });
        }
        cells.push(Cell {
            vertices: poly.vertices,
            edges: cell_edges,
            subdomain: poly.subdomain,
        });
    }
    for (id, e) in edges.iter_mut().enumerate() {
        if e.is_curved() {
            e.tag = EdgeTag::Interface;
            if e.cells.len() != 2 {
                return Err(MeshError::DegenerateCut {
                    cell: e.cells[0],
                    reason: format!("interface edge {id} has a single owner"),
                });
            }
            let (s0, s1) = (cells[e.cells[0]].subdomain, cells[e.cells[1]].subdomain);
            if s0 == s1 {
                return Err(MeshError::DegenerateCut {
                    cell: e.cells[0],
                    reason: format!("both owners of interface edge {id} lie on the same side"),
                });
            }
            if s0 == Subdomain::Two {
                e.cells.swap(0, 1);
            }
        } else if e.cells.len() == 1 {
            e.tag = EdgeTag::Boundary;
            let mid = 0.5 * (vertices[e.vertices[0]] + vertices[e.vertices[1]]);
            if !domain.on_boundary(&mid, 1e-9) {
                return Err(MeshError::DegenerateCut {
                    cell: e.cells[0],
                    reason: format!("edge {id} has one owner but is not on the domain boundary"),
                });
            }
        } else if cells[e.cells[0]].subdomain != cells[e.cells[1]].subdomain {
            return Err(MeshError::DegenerateCut {
                cell: e.cells[0],
                reason: format!("straight edge {id} separates the two subdomains"),
            });
        }
    }
    Ok(InterfaceMesh {
        domain,
        kind,
        level,
        curve,
        chord_interface: false,
        vertices,
        edges,
        cells,
    })
}
