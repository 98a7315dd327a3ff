use std::fmt::Write as _;

use super::errors::{compute_errors, ErrorNorms};
use super::{ManufacturedProblem, VerifyError};
use crate::assembly::{assemble_with, build_cells, SaddlePointSystem};
use crate::mesh::{build_background_mesh, fit_interface, InterfaceMesh, MeshKind, Rect};
use crate::solver::{residual_report, solve, ResidualReport, SolveReport, WgSolution};
use crate::wg::QuadOrder;

/// Fitted mesh of level `n` for a problem; `chords` replaces curved edges by chords.
pub fn problem_mesh(problem: &ManufacturedProblem, n: u32, kind: MeshKind, chords: bool) -> Result<InterfaceMesh, VerifyError> {
    let background = build_background_mesh(Rect::biunit(), n, kind);
    let mesh = match problem.curve {
        Some(curve) => fit_interface(&background, curve)?,
        None => background,
    };
    Ok(if chords { mesh.with_chords() } else { mesh })
}

/// Everything produced by one assemble-and-solve run.
pub struct Run {
    pub system: SaddlePointSystem,
    pub solution: WgSolution,
    pub residual: ResidualReport,
    pub errors: ErrorNorms,
    pub h: f64,
}

/// Assembles, solves and measures one mesh.
pub fn run_mesh(problem: &ManufacturedProblem, k: usize, mesh: &InterfaceMesh, order: QuadOrder) -> Result<Run, VerifyError> {
    let system = assemble_with(mesh, k, problem, order)?;
    let solution = solve(&system)?;
    let residual = residual_report(&system, solution.unknowns.as_slice());
    let cells = build_cells(mesh, k, order)?;
    let h = cells.iter().map(|c| c.h).fold(0.0, f64::max);
    let errors = compute_errors(mesh, &system.dofs, &cells, problem, &solution.velocity, &solution.pressure);
    Ok(Run {
        system,
        solution,
        residual,
        errors,
        h,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelResult {
    pub n: u32,
    pub h: f64,
    pub unknowns: usize,
    pub errors: ErrorNorms,
    pub residual: ResidualReport,
    pub solve: SolveReport,
}

/// Observed orders between two consecutive levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orders {
    pub energy: f64,
    pub l2_velocity: f64,
    pub l2_pressure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub problem: u32,
    pub k: usize,
    pub levels: u32,
    pub kind: MeshKind,
    pub chords: bool,
    pub order: Option<QuadOrder>,
}

impl StudyConfig {
    pub fn new(problem: u32, k: usize, levels: u32, kind: MeshKind) -> Self {
        StudyConfig {
            problem,
            k,
            levels,
            kind,
            chords: false,
            order: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub config: StudyConfig,
    pub rows: Vec<LevelResult>,
}

/// Ratio of consecutive mesh sizes treated as an exact halving.
const HALVING_TOL: f64 = 0.02;

/// `log(e_n / e_{n+1}) / log(h_n / h_{n+1})`, with `log2` when `h` halves.
pub fn observed_order(e0: f64, e1: f64, h0: f64, h1: f64) -> f64 {
    let ratio = h0 / h1;
    if (ratio - 2.0).abs() <= HALVING_TOL * 2.0 {
        (e0 / e1).log2()
    } else {
        (e0 / e1).ln() / ratio.ln()
    }
}

impl ErrorReport {
    /// Orders per row; `None` on the first row.
    pub fn orders(&self) -> Vec<Option<Orders>> {
        let mut out = vec![None];
        for w in self.rows.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let o = |x: f64, y: f64| observed_order(x, y, a.h, b.h);
            out.push(Some(Orders {
                energy: o(a.errors.energy, b.errors.energy),
                l2_velocity: o(a.errors.l2_velocity, b.errors.l2_velocity),
                l2_pressure: o(a.errors.l2_pressure, b.errors.l2_pressure),
            }));
        }
        out.truncate(self.rows.len());
        out
    }

    pub fn finest_orders(&self) -> Option<Orders> {
        self.orders().last().copied().flatten()
    }

    /// Largest `‖B u + g λ - G‖ / ‖u‖` over all levels.
    pub fn worst_divergence_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual.relative_divergence()).fold(0.0, f64::max)
    }

    pub const CSV_HEADER: &'static str = "n,h,energy_err,energy_order,l2u_err,l2u_order,l2p_err,l2p_order";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        let opt = |o: Option<f64>| o.map(sci).unwrap_or_default();
        for (r, o) in self.rows.iter().zip(self.orders()) {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.n,
                sci(r.h),
                sci(r.errors.energy),
                opt(o.map(|o| o.energy)),
                sci(r.errors.l2_velocity),
                opt(o.map(|o| o.l2_velocity)),
                sci(r.errors.l2_pressure),
                opt(o.map(|o| o.l2_pressure)),
            );
        }
        s
    }

    pub fn to_table(&self) -> String {
        let c = &self.config;
        let mut s = format!(
            "problem {} k={} {} mesh{}\n",
            c.problem,
            c.k,
            c.kind.name(),
            if c.chords { " (chords)" } else { "" }
        );
        let _ = writeln!(
            s,
            "{:>2} {:>11} {:>8} {:>11} {:>6} {:>11} {:>6} {:>11} {:>6} {:>11}",
            "n", "h", "dofs", "energy", "order", "l2 u", "order", "l2 p", "order", "l2 p raw"
        );
        let fmt = |o: Option<f64>| o.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
        for (r, o) in self.rows.iter().zip(self.orders()) {
            let _ = writeln!(
                s,
                "{:>2} {:>11} {:>8} {:>11} {:>6} {:>11} {:>6} {:>11} {:>6} {:>11}",
                r.n,
                sci(r.h),
                r.unknowns,
                sci(r.errors.energy),
                fmt(o.map(|o| o.energy)),
                sci(r.errors.l2_velocity),
                fmt(o.map(|o| o.l2_velocity)),
                sci(r.errors.l2_pressure),
                fmt(o.map(|o| o.l2_pressure)),
                sci(r.errors.l2_pressure_raw),
            );
        }
        s
    }
}

/// Scientific notation with 5 significant digits and a signed two-digit exponent.
pub fn sci(x: f64) -> String {
    let s = format!("{x:.4e}");
    match s.split_once('e') {
        Some((m, e)) => {
            let e: i32 = e.parse().unwrap_or(0);
            format!("{m}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
        }
        None => s,
    }
}

/// Runs levels `1..=levels` and records errors.
pub fn convergence_study(config: &StudyConfig) -> Result<ErrorReport, VerifyError> {
    let mut problem = ManufacturedProblem::new(config.problem)?;
    if config.chords {
        // the chord mesh no longer follows the curve; the data still does
        problem = problem.with_true_sides();
    }
    let order = config.order.unwrap_or(QuadOrder::for_degree(config.k));
    let mut rows = Vec::new();
    for n in 1..=config.levels {
        let level = |e: VerifyError| VerifyError::Level {
            level: n,
            source: Box::new(e),
        };
        let mesh = problem_mesh(&problem, n, config.kind, config.chords).map_err(level)?;
        let run = run_mesh(&problem, config.k, &mesh, order).map_err(level)?;
        rows.push(LevelResult {
            n,
            h: run.h,
            unknowns: run.system.dim(),
            errors: run.errors,
            residual: run.residual,
            solve: run.solution.report,
        });
    }
    Ok(ErrorReport {
        config: config.clone(),
        rows,
    })
}
