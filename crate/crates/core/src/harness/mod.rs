//! Experiment driver: problem families, solver runs with rate audits, trace
//! export, empirical rate fitting and affine-invariance checks.

pub mod experiment;
pub mod export;
pub mod invariance;
pub mod problem;
pub mod ratefit;

pub use experiment::{run_experiment, run_solver, AuditLine, ExperimentOptions, ExperimentReport, Solver, Verdict};
pub use invariance::{affine_invariance_check, InvarianceReport, Transform};
pub use problem::{generate_problem, load_polytope, load_problem, Family, OptimumLocation, ProblemSpec};
pub use ratefit::{fit_geometric_rate, fit_geometric_rate_window, RateFit};
