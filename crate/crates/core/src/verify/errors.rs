use nalgebra::DVector;

use super::ManufacturedProblem;
use crate::assembly::DofMap;
use crate::mesh::InterfaceMesh;
use crate::wg::WgCell;

/// Discrete errors of one solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    /// `|||Q_h u - u_h|||` in the `a_s` norm.
    pub energy: f64,
    /// `‖Q_0 u - u_0‖`.
    pub l2_velocity: f64,
    /// `‖𝒬_h p - p_h‖` with the pressure as stated.
    pub l2_pressure_raw: f64,
    /// `‖𝒬_h (p - mean p) - p_h‖`.
    pub l2_pressure: f64,
}

/// Entries of a full velocity vector seen from one cell.
pub fn local_velocity(mesh: &InterfaceMesh, dofs: &DofMap, c: usize, full: &DVector<f64>) -> DVector<f64> {
    let idx = dofs.local_to_full(mesh, c);
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| full[i]))
}

/// `Q_h u` as a full velocity vector; each interface slot takes its own side's field.
pub fn project_velocity(mesh: &InterfaceMesh, dofs: &DofMap, cells: &[WgCell], problem: &ManufacturedProblem) -> DVector<f64> {
    let mut out = DVector::zeros(dofs.n_velocity);
    for (c, cell) in cells.iter().enumerate() {
        let side = cell.geo.subdomain;
        let local = cell.project_velocity(|x| problem.velocity(side, x));
        for (v, i) in local.iter().zip(dofs.local_to_full(mesh, c)) {
            out[i] = *v;
        }
    }
    out
}

/// Mean of the stated pressure over the mesh.
pub fn pressure_mean(cells: &[WgCell], problem: &ManufacturedProblem) -> f64 {
    let (mut total, mut area) = (0.0, 0.0);
    for cell in cells {
        let side = cell.geo.subdomain;
        total += cell.geo.quad.integrate(|x| problem.pressure(side, x));
        area += cell.geo.area;
    }
    total / area
}

/// `𝒬_h (p - shift)` as a pressure vector.
pub fn project_pressure(dofs: &DofMap, cells: &[WgCell], problem: &ManufacturedProblem, shift: f64) -> DVector<f64> {
    let mut out = DVector::zeros(dofs.n_pressure);
    for (c, cell) in cells.iter().enumerate() {
        let side = cell.geo.subdomain;
        let q = cell.project_pressure(|x| problem.pressure(side, x) - shift);
        out.rows_mut(dofs.pressure[c].start, dofs.np).copy_from(&q);
    }
    out
}

/// `a_s(v, v)` of a full velocity vector.
pub fn energy_squared(mesh: &InterfaceMesh, dofs: &DofMap, cells: &[WgCell], problem: &ManufacturedProblem, v: &DVector<f64>) -> f64 {
    cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let e = local_velocity(mesh, dofs, c, v);
            let a = cell.stiffness(&problem.coefficient_of(cell.geo.subdomain)) + cell.stabilizer();
            let ns = cell.ns;
            let (ex, ey) = (e.rows(0, ns), e.rows(ns, ns));
            (ex.transpose() * &a * ex)[0] + (ey.transpose() * &a * ey)[0]
        })
        .sum()
}

fn pressure_l2(cells: &[WgCell], dofs: &DofMap, e: &DVector<f64>) -> f64 {
    cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let ec = e.rows(dofs.pressure[c].start, dofs.np);
            (ec.transpose() * cell.pressure_mass() * ec)[0]
        })
        .sum::<f64>()
        .sqrt()
}

/// All error norms of a discrete solution against the exact fields.
pub fn compute_errors(
    mesh: &InterfaceMesh,
    dofs: &DofMap,
    cells: &[WgCell],
    problem: &ManufacturedProblem,
    velocity: &DVector<f64>,
    pressure: &DVector<f64>,
) -> ErrorNorms {
    let e = project_velocity(mesh, dofs, cells, problem) - velocity;
    let energy = energy_squared(mesh, dofs, cells, problem, &e).max(0.0).sqrt();
    let mut l2u = 0.0;
    for (c, cell) in cells.iter().enumerate() {
        let r = dofs.cell_interior[c].clone();
        for comp in 0..2 {
            let e0 = e.rows(r.start + comp * dofs.n0, dofs.n0);
            l2u += (e0.transpose() * &cell.mass * e0)[0];
        }
    }
    let raw = project_pressure(dofs, cells, problem, 0.0) - pressure;
    let shifted = project_pressure(dofs, cells, problem, pressure_mean(cells, problem)) - pressure;
    ErrorNorms {
        energy,
        l2_velocity: l2u.sqrt(),
        l2_pressure_raw: pressure_l2(cells, dofs, &raw),
        l2_pressure: pressure_l2(cells, dofs, &shifted),
    }
}
