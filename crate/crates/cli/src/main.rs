use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wgstokes::assembly::assemble_with;
use wgstokes::mesh::{write_mesh, MeshKind};
use wgstokes::verify::{convergence_study, infsup_lanczos, patch_test, problem_mesh, property_suite, sci, Gauge, ManufacturedProblem, StudyConfig};
use wgstokes::wg::QuadOrder;

/// Weak Galerkin solver for two-phase Stokes interface problems on curved interface-fitted meshes.
#[derive(Parser, Debug)]
#[command(name = "wgstokes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence study over levels 1..=levels: prints a table and writes CSV.
    Study(RunArgs),
    /// Solves polynomial data on a straight mesh, which must be reproduced exactly.
    Patch(RunArgs),
    /// Discrete inf-sup constant per level.
    Infsup(RunArgs),
    /// Writes the fitted mesh of level `--levels` in WGMESH format.
    MeshDump(DumpArgs),
    /// Runs the property suite; exits 1 if any check fails.
    Check {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Tri,
    Quad,
}

impl From<Kind> for MeshKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Tri => MeshKind::Tri,
            Kind::Quad => MeshKind::Quad,
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=3))]
    problem: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=3))]
    k: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=8))]
    levels: u32,
    #[arg(long, value_enum, default_value_t = Kind::Tri)]
    mesh: Kind,
    /// CSV destination (study only); printed after the table when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Quadrature exactness on cells and edges; defaults to 2k + 2.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=40))]
    quad_order: Option<u64>,
    /// Replace curved interface edges by their chords.
    #[arg(long)]
    chords: bool,
}

impl RunArgs {
    fn k(&self) -> usize {
        self.k as usize
    }

    fn order(&self) -> QuadOrder {
        self.quad_order.map_or(QuadOrder::for_degree(self.k()), |m| QuadOrder::uniform(m as usize))
    }
}

#[derive(Args, Debug)]
struct DumpArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=3))]
    problem: u32,
    /// Refinement level of the dumped mesh.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(0..=8))]
    levels: u32,
    #[arg(long, value_enum, default_value_t = Kind::Tri)]
    mesh: Kind,
    #[arg(long)]
    chords: bool,
    /// Mesh destination; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also assemble with degree `--k` and write the velocity stiffness here as COO text.
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=3))]
    k: u64,
}

type Failure = Box<dyn std::error::Error>;

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    ChecksFailed,
}

fn write_to(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn study(args: &RunArgs) -> Result<Outcome, Failure> {
    let mut config = StudyConfig::new(args.problem, args.k(), args.levels, args.mesh.into());
    config.chords = args.chords;
    config.order = args.quad_order.map(|m| QuadOrder::uniform(m as usize));
    let report = convergence_study(&config)?;
    print!("{}", report.to_table());
    if args.output.is_none() {
        println!();
    }
    write_to(&args.output, &report.to_csv())?;
    Ok(Outcome::Ok)
}

fn patch(args: &RunArgs) -> Result<Outcome, Failure> {
    let e = patch_test(args.k(), args.mesh.into(), args.levels)?;
    println!(
        "patch k={} {} level {}: energy {} l2 u {} l2 p {}",
        args.k,
        MeshKind::from(args.mesh).name(),
        args.levels,
        sci(e.energy),
        sci(e.l2_velocity),
        sci(e.l2_pressure)
    );
    let worst = e.energy.max(e.l2_velocity).max(e.l2_pressure);
    Ok(if worst < 1e-9 { Outcome::Ok } else { Outcome::ChecksFailed })
}

fn infsup(args: &RunArgs) -> Result<Outcome, Failure> {
    let problem = ManufacturedProblem::new(args.problem)?;
    println!("n,h_cells,pressure_dofs,beta");
    for n in 1..=args.levels {
        let mut mesh = problem_mesh(&problem, n, args.mesh.into(), false)?;
        if args.chords {
            mesh = mesh.with_chords();
        }
        let system = assemble_with(&mesh, args.k(), &problem, args.order())?;
        let beta = infsup_lanczos(&system, Gauge::Projected, 400, 1)?;
        println!("{n},{},{},{}", mesh.num_cells(), system.dofs.n_pressure, sci(beta));
    }
    Ok(Outcome::Ok)
}

fn mesh_dump(args: &DumpArgs) -> Result<Outcome, Failure> {
    let problem = ManufacturedProblem::new(args.problem)?;
    let mesh = problem_mesh(&problem, args.levels, args.mesh.into(), args.chords)?;
    write_to(&args.output, &write_mesh(&mesh))?;
    if let Some(path) = &args.system {
        let k = args.k as usize;
        let system = assemble_with(&mesh, k, &problem, QuadOrder::for_degree(k))?;
        system.a.write_coo(BufWriter::new(File::create(path)?))?;
    }
    Ok(Outcome::Ok)
}

fn check(seed: u64) -> Result<Outcome, Failure> {
    let mut all = true;
    for c in property_suite(seed)? {
        all &= c.passed;
        let relation = if c.name.starts_with("smallest") { ">" } else { "<" };
        println!(
            "{} {}: {} ({relation} {})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            sci(c.value),
            sci(c.bound)
        );
    }
    Ok(if all { Outcome::Ok } else { Outcome::ChecksFailed })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Study(a) => study(a),
        Command::Patch(a) => patch(a),
        Command::Infsup(a) => infsup(a),
        Command::MeshDump(a) => mesh_dump(a),
        Command::Check { seed } => check(*seed),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = e.source();
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(1)
        }
    }
}
