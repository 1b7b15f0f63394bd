//! Frank-Wolfe and away-steps Frank-Wolfe over polytopes given by their
//! vertices, with tools for estimating the affine-invariant constants that
//! govern their convergence rates, and an experiment harness that audits
//! observed runs against those rates.
//!
//! ```
//! use awayfw::{solve_afw, ActiveSet, ConstantEstimates, QuadraticObjective, SolverConfig, VPolytope};
//! use nalgebra::DVector;
//!
//! let poly = VPolytope::simplex(3).unwrap();
//! let f = QuadraticObjective::squared_distance(&DVector::from_vec(vec![0.6, 0.6, -0.2]));
//! let trace = solve_afw(&f, &poly, &ActiveSet::vertex(2), &SolverConfig::default(),
//!                       &ConstantEstimates::from_curvature(2.0, 2.0, 2.0)).unwrap();
//! let x = &trace.last().unwrap().x;
//! assert!((x[0] - 0.5).abs() < 1e-9 && x[2].abs() < 1e-9);
//! ```

pub mod active_set;
pub mod afw;
pub mod constants;
pub mod error;
pub mod fw;
pub mod geometry;
pub mod harness;
pub mod linesearch;
pub mod objective;
pub mod oracles;
pub mod polytope;
pub mod trace;

/// Dense real vector used for points, gradients and directions.
pub type RealVector = nalgebra::DVector<f64>;

pub use active_set::{active_set_point, ActiveSet};
pub use afw::solve_afw;
pub use constants::{ConstantEstimates, Provenance};
pub use error::{Error, Result};
pub use fw::solve_fw;
pub use objective::{Objective, QuadraticObjective};
pub use oracles::{lmo, OracleAnswer};
pub use polytope::{Halfspace, PolytopeKind, VPolytope};
pub use trace::{InexactMode, IterateRecord, RunTrace, SolverConfig, StepRule, StepType};
