use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use awayfw::constants::{estimate_quadratic_constants, EstimateOptions};
use awayfw::geometry::pyramidal_width_estimate;
use awayfw::harness::export::{write_constants_csv, write_trace_csv};
use awayfw::harness::{
    affine_invariance_check, fit_geometric_rate, load_polytope, load_problem, run_experiment, run_solver, ExperimentOptions,
    Solver, Transform,
};
use awayfw::{Error, PolytopeKind, SolverConfig, StepRule};
use clap::{Args, Parser, Subcommand};

const EXIT_AUDIT: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Frank-Wolfe and away-steps Frank-Wolfe experiment driver.
#[derive(Parser)]
#[command(name = "awayfw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver and write its trace.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Trace CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the problem constants.
    Constants {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directions per face and base point for the pyramidal width.
        #[arg(long, default_value_t = 200)]
        directions: usize,
        /// Constants CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Polytope geometry.
    Geometry {
        #[command(subcommand)]
        command: GeometryCommand,
    },
    /// Run a solver and check its trace against the convergence bounds.
    Audit {
        #[command(flatten)]
        run: RunArgs,
        /// Also check the inequalities among the constants.
        #[arg(long)]
        all_theorems: bool,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional trace CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare runs on a problem and on a linearly transformed copy.
    Invariance {
        #[arg(long)]
        problem: String,
        /// scale:c, random:seed or permute:seed
        #[arg(long)]
        transform: String,
        /// fw or afw; both when omitted.
        #[arg(long)]
        solver: Option<String>,
        #[arg(long, default_value = "line_search_exact")]
        step_rule: String,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        gap_tol: f64,
    },
}

#[derive(Subcommand)]
enum GeometryCommand {
    /// Sampled upper bound on the pyramidal width.
    Pdirw {
        /// simplex:d, box:d or file:<spec.json>
        #[arg(long)]
        polytope: String,
        #[arg(long, default_value_t = 200)]
        directions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Problem JSON path or family:<name>:<dim>:<seed>.
    #[arg(long)]
    problem: String,
    /// fw or afw
    #[arg(long, default_value = "afw")]
    solver: String,
    #[arg(long, default_value = "line_search_exact")]
    step_rule: String,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    gap_tol: f64,
}

impl RunArgs {
    fn config(&self) -> Result<(Solver, SolverConfig), Error> {
        let cfg = SolverConfig {
            max_iters: self.max_iters,
            gap_tolerance: self.gap_tol,
            nu: self.nu,
            ..SolverConfig::with_rule(self.step_rule.parse()?)
        };
        cfg.validate()?;
        Ok((self.solver.parse()?, cfg))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Numeric(_) => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Solve { run, out } => {
            let spec = load_problem(&run.problem)?;
            let (solver, cfg) = run.config()?;
            let trace = run_solver(&spec, &cfg, solver, &spec.exact_constants())?;
            write_trace_csv(&trace, spec.fstar, output(&out)?)?;
            let last = trace.last().expect("traces hold the start iterate");
            eprintln!(
                "{} {} on {}: {} iterations, f = {:.12e}, h = {:.3e}, gap = {:.3e}",
                solver,
                cfg.step_rule,
                spec.name,
                last.k,
                last.f_value,
                last.f_value - spec.fstar,
                last.gap
            );
            if let Ok(fit) = fit_geometric_rate(&trace, spec.fstar) {
                eprintln!("fitted ratio {:.6} (r^2 {:.4}, {} points)", fit.ratio(), fit.r_squared, fit.steps_used);
            }
            Ok(0)
        }
        Command::Constants {
            problem,
            samples,
            seed,
            directions,
            out,
        } => {
            let spec = load_problem(&problem)?;
            let opts = EstimateOptions {
                samples,
                seed,
                pdirw_directions: directions,
                ..EstimateOptions::default()
            };
            let est = estimate_quadratic_constants(&spec.objective, &spec.poly, &spec.xstar, &opts)?;
            print!("{}", est.report());
            if let Some(path) = &out {
                write_constants_csv(&est, File::create(path)?)?;
            }
            Ok(0)
        }
        Command::Geometry {
            command: GeometryCommand::Pdirw { polytope, directions, seed },
        } => {
            let poly = load_polytope(&polytope)?;
            let est = pyramidal_width_estimate(&poly, directions, seed)?;
            println!("pdirw = {:.12}", est.value);
            println!(
                "faces {}, base points {}, directions evaluated {}",
                est.faces, est.base_points, est.directions_evaluated
            );
            println!("argmin face {:?}", est.argmin_face);
            println!("argmin point {:?}", est.argmin_point.as_slice());
            println!("argmin direction {:?}", est.argmin_direction.as_slice());
            if *poly.kind() == PolytopeKind::Simplex {
                let conj = 2.0 / (poly.num_vertices() as f64).sqrt();
                println!("conjectured 2/sqrt(n) = {:.12}, difference {:+.3e}", conj, est.value - conj);
            }
            Ok(0)
        }
        Command::Audit {
            run,
            all_theorems,
            samples,
            seed,
            out,
        } => {
            let spec = load_problem(&run.problem)?;
            let (solver, cfg) = run.config()?;
            let opts = ExperimentOptions {
                constants: EstimateOptions {
                    samples,
                    seed,
                    ..EstimateOptions::default()
                },
                all_theorems,
                trace_csv: out,
            };
            let report = run_experiment(&spec, &cfg, solver, &opts)?;
            println!("{} {} on {} ({} iterates)", solver, cfg.step_rule, spec.name, report.trace.len());
            for line in &report.audits {
                println!("{line}");
            }
            if let Some(fit) = &report.rate_fit {
                println!("fitted ratio {:.6} (r^2 {:.4}, {} points)", fit.ratio(), fit.r_squared, fit.steps_used);
            }
            Ok(if report.passed() { 0 } else { EXIT_AUDIT })
        }
        Command::Invariance {
            problem,
            transform,
            solver,
            step_rule,
            max_iters,
            gap_tol,
        } => {
            let spec = load_problem(&problem)?;
            let t: Transform = transform.parse()?;
            let (m, m_inv) = t.matrices(spec.poly.dim())?;
            let cfg = SolverConfig {
                max_iters,
                gap_tolerance: gap_tol,
                ..SolverConfig::with_rule(step_rule.parse::<StepRule>()?)
            };
            cfg.validate()?;
            let solvers = match solver {
                Some(s) => vec![s.parse()?],
                None => vec![Solver::Fw, Solver::Afw],
            };
            let mut pass = true;
            for s in solvers {
                let r = affine_invariance_check(&spec, &m, &m_inv, &cfg, s)?;
                println!("{r}");
                pass &= r.pass;
            }
            Ok(if pass { 0 } else { EXIT_AUDIT })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
