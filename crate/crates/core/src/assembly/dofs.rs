use std::ops::Range;

use crate::mesh::{EdgeTag, InterfaceMesh};
use crate::wg::{poly_dim, trace_degree};

/// Role of one trace slot in the constrained system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    /// Unknown of the system.
    Free,
    /// Boundary trace, fixed to `Q_b g`.
    Boundary,
    /// Side-two interface trace, replaced by `u_1b - Q_b φ`.
    Eliminated,
}

/// Numbering of the full weak Galerkin velocity and pressure spaces and of the system
/// unknowns.
///
/// Full velocity vector: all cell interiors (`2 dim P_k` per cell, x component first),
/// then every edge slot (`2 (trace degree + 1)` each, x component first). Pressure
/// vector: `dim P_{k-1}` per cell. System unknowns: free velocities (cell interiors
/// first, in the same order), then pressures, then the gauge multiplier.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub k: usize,
    pub n0: usize,
    pub np: usize,
    pub cell_interior: Vec<Range<usize>>,
    /// Per edge, one range per slot (slot 0 is side one or the only slot).
    pub edge_slots: Vec<Vec<Range<usize>>>,
    pub slot_kind: Vec<Vec<SlotKind>>,
    pub pressure: Vec<Range<usize>>,
    pub n_velocity: usize,
    pub n_pressure: usize,
    pub n_free: usize,
    /// Per full velocity DOF: its unknown, the side-one unknown for eliminated DOFs,
    /// `None` for boundary DOFs.
    unknown: Vec<Option<usize>>,
}

impl DofMap {
    pub fn new(mesh: &InterfaceMesh, k: usize) -> Self {
        assert!(k >= 1);
        let (n0, np) = (poly_dim(k), poly_dim(k - 1));
        let mut next = 0;
        let cell_interior: Vec<_> = (0..mesh.num_cells())
            .map(|_| {
                next += 2 * n0;
                next - 2 * n0..next
            })
            .collect();
        let mut unknown: Vec<Option<usize>> = (0..next).map(Some).collect();
        let mut n_free = next;
        let mut edge_slots = Vec::with_capacity(mesh.edges.len());
        let mut slot_kind = Vec::with_capacity(mesh.edges.len());
        for (e, edge) in mesh.edges.iter().enumerate() {
            let len = 2 * (trace_degree(mesh, e, k) + 1);
            let mut ranges: Vec<Range<usize>> = Vec::new();
            let mut kinds = Vec::new();
            for slot in 0..edge.slots() {
                let r = next..next + len;
                next += len;
                let kind = match (edge.tag, slot) {
                    (EdgeTag::Boundary, _) => SlotKind::Boundary,
                    (_, 0) => SlotKind::Free,
                    _ => SlotKind::Eliminated,
                };
                match kind {
                    SlotKind::Free => {
                        unknown.extend((n_free..n_free + len).map(Some));
                        n_free += len;
                    }
                    SlotKind::Boundary => unknown.extend(std::iter::repeat_n(None, len)),
                    SlotKind::Eliminated => {
                        let first = ranges[0].clone();
                        let aliased: Vec<_> = unknown[first].to_vec();
                        unknown.extend(aliased);
                    }
                }
                ranges.push(r);
                kinds.push(kind);
            }
            edge_slots.push(ranges);
            slot_kind.push(kinds);
        }
        let pressure = (0..mesh.num_cells()).map(|c| c * np..(c + 1) * np).collect();
        DofMap {
            k,
            n0,
            np,
            cell_interior,
            edge_slots,
            slot_kind,
            pressure,
            n_velocity: next,
            n_pressure: np * mesh.num_cells(),
            n_free,
            unknown,
        }
    }

    /// Unknown carrying the value of full velocity DOF `i` (up to a constraint offset).
    pub fn unknown(&self, i: usize) -> Option<usize> {
        self.unknown[i]
    }

    pub fn pressure_unknown(&self, c: usize, a: usize) -> usize {
        self.n_free + self.pressure[c].start + a
    }

    pub fn multiplier(&self) -> usize {
        self.n_free + self.n_pressure
    }

    pub fn num_unknowns(&self) -> usize {
        self.n_free + self.n_pressure + 1
    }

    /// Slot of edge `e` seen from cell `c`.
    pub fn slot_of(&self, mesh: &InterfaceMesh, c: usize, e: usize) -> usize {
        if mesh.edges[e].is_interface() {
            mesh.cells[c].subdomain.index()
        } else {
            0
        }
    }

    /// Full velocity index of every entry of cell `c`'s local velocity vector
    /// (`[interior | edge 0 | edge 1 ...]` per component).
    pub fn local_to_full(&self, mesh: &InterfaceMesh, c: usize) -> Vec<usize> {
        let cell = &mesh.cells[c];
        // (x-component index, offset to the y component)
        let mut scalar: Vec<(usize, usize)> = Vec::new();
        let interior = self.cell_interior[c].start;
        for a in 0..self.n0 {
            scalar.push((interior + a, self.n0));
        }
        for ce in &cell.edges {
            let r = &self.edge_slots[ce.edge][self.slot_of(mesh, c, ce.edge)];
            let nb = r.len() / 2;
            for l in 0..nb {
                scalar.push((r.start + l, nb));
            }
        }
        let mut out: Vec<usize> = scalar.iter().map(|&(i, _)| i).collect();
        out.extend(scalar.iter().map(|&(i, stride)| i + stride));
        out
    }

    /// Number of side-two interface velocity DOFs that alias a side-one unknown.
    pub fn num_eliminated(&self) -> usize {
        self.slot_kind
            .iter()
            .zip(&self.edge_slots)
            .flat_map(|(k, r)| k.iter().zip(r))
            .filter(|(k, _)| **k == SlotKind::Eliminated)
            .map(|(_, r)| r.len())
            .sum()
    }
}
