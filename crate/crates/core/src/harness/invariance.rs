//! Checks that solvers and constants are unchanged by a linear
//! reparameterization `x = M y`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::active_set::ActiveSet;
use crate::afw::solve_afw;
use crate::constants::{curvature_quadratic_exact, ConstantEstimates};
use crate::error::{config, Error, Result};
use crate::fw::solve_fw;
use crate::harness::experiment::Solver;
use crate::harness::problem::ProblemSpec;
use crate::trace::SolverConfig;

pub const TRAJECTORY_TOLERANCE: f64 = 1e-8;
pub const CONSTANT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `c · I`.
    Scale(f64),
    /// `U · diag(s) · Vᵀ` with Haar-like orthogonal factors and singular
    /// values in `[1, 10]`, so the condition number is at most 10.
    Random(u64),
    /// A seeded coordinate permutation.
    Permute(u64),
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("expected scale:c, random:seed or permute:seed, got '{s}'")))?;
        let bad = || Error::Config(format!("bad transform argument '{arg}'"));
        match kind {
            "scale" => {
                let c: f64 = arg.parse().map_err(|_| bad())?;
                if c == 0.0 || !c.is_finite() {
                    return config("scale factor must be finite and nonzero");
                }
                Ok(Transform::Scale(c))
            }
            "random" => Ok(Transform::Random(arg.parse().map_err(|_| bad())?)),
            "permute" => Ok(Transform::Permute(arg.parse().map_err(|_| bad())?)),
            _ => config(format!("unknown transform '{kind}'")),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Scale(c) => write!(f, "scale:{c}"),
            Transform::Random(s) => write!(f, "random:{s}"),
            Transform::Permute(s) => write!(f, "permute:{s}"),
        }
    }
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    // fix column signs so the factor is uniquely determined by g
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

impl Transform {
    /// `(M, M⁻¹)` in dimension `n`.
    pub fn matrices(&self, n: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        match *self {
            Transform::Scale(c) => Ok((DMatrix::identity(n, n) * c, DMatrix::identity(n, n) / c)),
            Transform::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let u = random_orthogonal(n, &mut rng);
                let v = random_orthogonal(n, &mut rng);
                let dist = Uniform::new_inclusive(1.0, 10.0).expect("valid range");
                let s: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
                let m = &u * DMatrix::from_diagonal(&DVector::from_vec(s.clone())) * v.transpose();
                let inv = &v * DMatrix::from_diagonal(&DVector::from_iterator(n, s.iter().map(|x| 1.0 / x))) * u.transpose();
                Ok((m, inv))
            }
            Transform::Permute(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let m = DMatrix::from_fn(n, n, |i, j| if perm[i] == j { 1.0 } else { 0.0 });
                let inv = m.transpose();
                Ok((m, inv))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub solver: Solver,
    pub steps_original: usize,
    pub steps_transformed: usize,
    /// `max_k ‖M x̂_k − x_k‖_∞`.
    pub max_deviation: f64,
    pub step_types_match: bool,
    pub drop_counts_match: bool,
    /// `|Ĉ_f − C_f|`.
    pub curvature_difference: f64,
    pub pass: bool,
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} invariance: max deviation {:.3e} (tol {:.0e}), steps {} vs {}, step types {}, drops {}, |dCf| {:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.solver,
            self.max_deviation,
            TRAJECTORY_TOLERANCE,
            self.steps_original,
            self.steps_transformed,
            if self.step_types_match { "match" } else { "differ" },
            if self.drop_counts_match { "match" } else { "differ" },
            self.curvature_difference
        )
    }
}

/// Runs `solver` on `spec` and on `f∘M` over `M⁻¹ D` (same vertex order, same
/// start atom) and compares the trajectories and curvature constants.
pub fn affine_invariance_check(
    spec: &ProblemSpec,
    m: &DMatrix<f64>,
    m_inv: &DMatrix<f64>,
    cfg: &SolverConfig,
    solver: Solver,
) -> Result<InvarianceReport> {
    let n = spec.poly.dim();
    if m.shape() != (n, n) || m_inv.shape() != (n, n) {
        return Err(Error::Structural("transform must be square of the problem dimension".into()));
    }
    if (m * m_inv - DMatrix::identity(n, n)).amax() > 1e-9 {
        return Err(Error::Config("m_inv is not the inverse of m".into()));
    }
    let poly_t = spec.poly.linear_preimage(m, m_inv)?;
    let obj_t = spec.objective.compose_linear(m)?;
    let (cf, cfm, cfa) = curvature_quadratic_exact(spec.objective.a(), &spec.poly);
    let (cf_t, cfm_t, cfa_t) = curvature_quadratic_exact(obj_t.a(), &poly_t);
    let k = ConstantEstimates::from_curvature(cf, cfm, cfa);
    let k_t = ConstantEstimates::from_curvature(cf_t, cfm_t, cfa_t);
    let start = ActiveSet::vertex(spec.start_vertex());
    let (a, b) = match solver {
        Solver::Fw => (
            solve_fw(&spec.objective, &spec.poly, &start, cfg, &k)?,
            solve_fw(&obj_t, &poly_t, &start, cfg, &k_t)?,
        ),
        Solver::Afw => (
            solve_afw(&spec.objective, &spec.poly, &start, cfg, &k)?,
            solve_afw(&obj_t, &poly_t, &start, cfg, &k_t)?,
        ),
    };
    let mut max_deviation = 0.0f64;
    for (ra, rb) in a.records.iter().zip(&b.records) {
        max_deviation = max_deviation.max((m * &rb.x - &ra.x).amax());
    }
    if a.len() != b.len() {
        max_deviation = f64::INFINITY;
    }
    let step_types_match = a.step_types() == b.step_types();
    let drop_counts_match = a.drop_counts() == b.drop_counts();
    let curvature_difference = (cf - cf_t).abs().max((cfa - cfa_t).abs());
    let pass = max_deviation <= TRAJECTORY_TOLERANCE
        && step_types_match
        && drop_counts_match
        && curvature_difference <= CONSTANT_TOLERANCE * (1.0 + cf.abs());
    Ok(InvarianceReport {
        solver,
        steps_original: a.len(),
        steps_transformed: b.len(),
        max_deviation,
        step_types_match,
        drop_counts_match,
        curvature_difference,
        pass,
    })
}
