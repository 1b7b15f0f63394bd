//! Solver runs with rate audits.
//!
//! Every audit compares an observed quantity against a bound derived from the
//! problem's constants and reports pass, fail, or vacuous (the governing
//! constant is numerically zero, so the bound says nothing).

use std::fmt;
use std::fs::File;
use std::path::PathBuf;
use std::str::FromStr;

use crate::afw::solve_afw;
use crate::constants::{bound_checks, estimate_quadratic_constants, restricted_mu, ConstantEstimates, EstimateOptions};
use crate::error::{Error, Result};
use crate::fw::solve_fw;
use crate::geometry::interior_radius;
use crate::harness::export::write_trace_csv;
use crate::harness::problem::ProblemSpec;
use crate::harness::ratefit::{fit_geometric_rate, RateFit};
use crate::polytope::PolytopeKind;
use crate::trace::{RunTrace, SolverConfig, StepRule, StepType};

/// Relative slack `1e-12·h_0` on per-step contraction checks.
pub const STEP_SLACK: f64 = 1e-12;
/// Absolute slack on the gap certificate `h_k ≤ g_k`.
pub const CERTIFICATE_SLACK: f64 = 1e-10;
/// Constants at or below this make a rate bound vacuous.
pub const VACUOUS_CONSTANT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Fw,
    Afw,
}

impl Solver {
    pub fn as_str(self) -> &'static str {
        match self {
            Solver::Fw => "fw",
            Solver::Afw => "afw",
        }
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fw" => Ok(Solver::Fw),
            "afw" => Ok(Solver::Afw),
            other => Err(Error::Config(format!("unknown solver '{other}' (fw or afw)"))),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Runs `solver` on `spec` from its default start vertex.
pub fn run_solver(spec: &ProblemSpec, cfg: &SolverConfig, solver: Solver, constants: &ConstantEstimates) -> Result<RunTrace> {
    let start = spec.start();
    let mut trace = match solver {
        Solver::Fw => solve_fw(&spec.objective, &spec.poly, &start, cfg, constants)?,
        Solver::Afw => solve_afw(&spec.objective, &spec.poly, &start, cfg, constants)?,
    };
    trace.problem_id = spec.name.clone();
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Vacuous => "VACUOUS",
        }
    }
}

/// Pass when `observed ≤ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditLine {
    /// The result being audited.
    pub name: String,
    /// What `observed` and `bound` measure.
    pub quantity: String,
    pub bound: f64,
    pub observed: f64,
    pub verdict: Verdict,
}

impl AuditLine {
    fn check(name: &str, quantity: &str, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            quantity: quantity.into(),
            bound,
            observed,
            verdict: if observed <= bound { Verdict::Pass } else { Verdict::Fail },
        }
    }

    fn vacuous(name: &str, quantity: &str, observed: f64, bound: f64) -> Self {
        Self {
            verdict: Verdict::Vacuous,
            ..Self::check(name, quantity, observed, bound)
        }
    }
}

impl fmt::Display for AuditLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} observed {:.6e}, bound {:.6e}",
            self.verdict.as_str(),
            self.name,
            self.quantity,
            self.observed,
            self.bound
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    pub constants: EstimateOptions,
    /// Also audit the inequalities among the constants themselves.
    pub all_theorems: bool,
    pub trace_csv: Option<PathBuf>,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            constants: EstimateOptions::default(),
            all_theorems: false,
            trace_csv: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub solver: Solver,
    pub trace: RunTrace,
    pub constants: ConstantEstimates,
    pub audits: Vec<AuditLine>,
    /// `None` when the trace is too short to fit.
    pub rate_fit: Option<RateFit>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.audits.iter().all(|a| a.verdict != Verdict::Fail)
    }
}

/// Suboptimalities `h_k`.
pub fn suboptimality(trace: &RunTrace, fstar: f64) -> Vec<f64> {
    trace.records.iter().map(|r| r.f_value - fstar).collect()
}

/// Largest effective ratio `(h_{k+1} − slack·h_0) / h_k` over steps accepted
/// by `include`; `0` when there are none.
pub fn worst_step_ratio(trace: &RunTrace, fstar: f64, include: impl Fn(StepType) -> bool) -> f64 {
    let h = suboptimality(trace, fstar);
    let h0 = h[0].max(0.0);
    let mut worst = 0.0f64;
    for (k, r) in trace.records.iter().enumerate() {
        let Some(st) = r.step_type else { continue };
        if !include(st) || k + 1 >= h.len() {
            continue;
        }
        let excess = h[k + 1] - STEP_SLACK * h0;
        if excess <= 0.0 {
            continue;
        }
        worst = worst.max(if h[k] > 0.0 { excess / h[k] } else { f64::INFINITY });
    }
    worst
}

/// `max_k (h_k − g_k)`.
pub fn worst_certificate_excess(trace: &RunTrace, fstar: f64) -> f64 {
    trace
        .records
        .iter()
        .map(|r| r.f_value - fstar - r.fw_gap)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max_k (2 D_k − k − (|S_0| − 1))`; nonpositive when drops never exceed
/// half of the steps (allowing for atoms present at the start).
pub fn worst_drop_excess(trace: &RunTrace) -> i64 {
    let extra = trace.initial_active_size.saturating_sub(1) as i64;
    trace
        .drop_counts()
        .iter()
        .enumerate()
        .map(|(k, &d)| 2 * d as i64 - k as i64 - extra)
        .max()
        .unwrap_or(0)
}

fn rate_audit(name: &str, rho: f64, observed: f64) -> AuditLine {
    let quantity = "worst (h_{k+1} - 1e-12 h_0)/h_k";
    if rho <= VACUOUS_CONSTANT {
        AuditLine::vacuous(name, quantity, observed, 1.0 - rho)
    } else {
        AuditLine::check(name, quantity, observed, 1.0 - rho)
    }
}

/// Certified FW rate `min{ν/2, ν² μ δ² / C_f}`.
pub fn certified_rho_fw(mu: f64, delta: f64, cf: f64, nu: f64) -> f64 {
    if cf <= 0.0 {
        return 0.0;
    }
    (nu / 2.0).min(nu * nu * mu * delta * delta / cf)
}

/// Away-steps rate `μ · width² / (4 C_f^A)`.
pub fn certified_rho_afw(mu: f64, width: f64, cf_away: f64) -> f64 {
    if cf_away <= 0.0 {
        return 0.0;
    }
    mu * width * width / (4.0 * cf_away)
}

/// Estimates constants, runs the solver, writes the trace if requested and
/// audits the run. Audit failures are recorded in the report, not returned
/// as errors.
pub fn run_experiment(spec: &ProblemSpec, cfg: &SolverConfig, solver: Solver, opts: &ExperimentOptions) -> Result<ExperimentReport> {
    let mut est_opts = opts.constants.clone();
    est_opts.nu = cfg.nu;
    if solver == Solver::Fw && !opts.all_theorems {
        // FW audits never use the pyramidal width
        est_opts.pdirw_directions = 0;
    }
    let constants = estimate_quadratic_constants(&spec.objective, &spec.poly, &spec.xstar, &est_opts)?;
    let trace = run_solver(spec, cfg, solver, &constants)?;
    if let Some(path) = &opts.trace_csv {
        write_trace_csv(&trace, spec.fstar, File::create(path)?)?;
    }

    let mut audits = vec![AuditLine::check(
        "duality gap certifies suboptimality",
        "max_k (h_k - g_k)",
        worst_certificate_excess(&trace, spec.fstar),
        CERTIFICATE_SLACK,
    )];
    if cfg.step_rule.is_line_search() {
        audits.push(AuditLine::check(
            "line search never increases f",
            "ascent events",
            trace.violations.len() as f64,
            0.0,
        ));
    }

    let mu = restricted_mu(&spec.objective, &spec.poly);
    let h = suboptimality(&trace, spec.fstar);
    match solver {
        Solver::Fw => {
            if cfg.step_rule != StepRule::FixedSchedule {
                let delta = interior_radius(&spec.xstar, &spec.poly)?;
                let rho = certified_rho_fw(mu, delta, constants.cf, cfg.nu);
                audits.push(rate_audit(
                    "FW per-step linear rate with interior optimum (mu*delta^2)",
                    rho,
                    worst_step_ratio(&trace, spec.fstar, |_| true),
                ));
            }
            if cfg.nu == 1.0 {
                let worst = h
                    .iter()
                    .enumerate()
                    .map(|(k, hk)| hk - 2.0 * constants.cf / (k as f64 + 2.0))
                    .fold(f64::NEG_INFINITY, f64::max);
                audits.push(AuditLine::check(
                    "FW sublinear rate",
                    "max_k (h_k - 2 C_f/(k+2))",
                    worst,
                    1e-12,
                ));
            }
        }
        Solver::Afw => {
            let non_drop = |st: StepType| st != StepType::Drop;
            let observed = worst_step_ratio(&trace, spec.fstar, non_drop);
            let rho_est = certified_rho_afw(mu, constants.pdirw, constants.cf_away);
            audits.push(rate_audit(
                "AFW per-step rate on non-drop steps (estimated pyramidal width)",
                rho_est,
                observed,
            ));
            if *spec.poly.kind() == PolytopeKind::Simplex {
                let conjectured = 2.0 / (spec.poly.num_vertices() as f64).sqrt();
                let rho_conj = certified_rho_afw(mu, conjectured, constants.cf_away);
                audits.push(rate_audit(
                    "AFW per-step rate on non-drop steps (conjectured simplex width 2/sqrt(n))",
                    rho_conj,
                    observed,
                ));
            }
            audits.push(AuditLine::check(
                "AFW drop steps at most half of all steps",
                "max_k (2 D_k - k - (|S_0| - 1))",
                worst_drop_excess(&trace) as f64,
                0.0,
            ));
            let h0 = h[0];
            let worst = h
                .iter()
                .enumerate()
                .map(|(k, hk)| hk - h0 * (-0.5 * rho_est * k as f64).exp())
                .fold(f64::NEG_INFINITY, f64::max);
            let name = "AFW global bound h_k <= h_0 exp(-rho k / 2)";
            let quantity = "max_k (h_k - h_0 exp(-rho k/2))";
            audits.push(if rho_est <= VACUOUS_CONSTANT {
                AuditLine::vacuous(name, quantity, worst, 1e-12)
            } else {
                AuditLine::check(name, quantity, worst, 1e-12)
            });
        }
    }

    if opts.all_theorems {
        let report = bound_checks(&constants, &spec.objective, &spec.poly, &spec.xstar)?;
        for c in report.checks {
            audits.push(AuditLine::check(c.name, "lhs - rhs", c.lhs - c.rhs, c.tolerance));
        }
    }

    let rate_fit = fit_geometric_rate(&trace, spec.fstar).ok();
    Ok(ExperimentReport {
        solver,
        trace,
        constants,
        audits,
        rate_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::problem::{generate_problem, Family};

    fn cfg(rule: StepRule, iters: usize) -> SolverConfig {
        SolverConfig {
            max_iters: iters,
            gap_tolerance: 1e-13,
            ..SolverConfig::with_rule(rule)
        }
    }

    fn verdict(r: &ExperimentReport, prefix: &str) -> Verdict {
        r.audits.iter().find(|a| a.name.starts_with(prefix)).unwrap_or_else(|| panic!("{prefix}")).verdict
    }

    #[test]
    fn interior_fw_rate_passes() {
        let p = generate_problem(Family::SimplexInterior, 3, 0).unwrap();
        let r = run_experiment(&p, &cfg(StepRule::AnalyticCf, 300), Solver::Fw, &ExperimentOptions::default()).unwrap();
        assert_eq!(verdict(&r, "FW per-step"), Verdict::Pass);
        assert!(r.passed(), "{:#?}", r.audits);
    }

    #[test]
    fn face_afw_audits_pass() {
        let p = generate_problem(Family::SimplexFace, 3, 0).unwrap();
        let r = run_experiment(&p, &cfg(StepRule::LineSearchExact, 300), Solver::Afw, &ExperimentOptions::default()).unwrap();
        assert_eq!(verdict(&r, "AFW per-step rate on non-drop steps (est"), Verdict::Pass);
        assert_eq!(verdict(&r, "AFW drop"), Verdict::Pass);
        assert_eq!(verdict(&r, "AFW global"), Verdict::Pass);
        assert!(r.passed(), "{:#?}", r.audits);
    }

    #[test]
    fn face_fw_rate_is_vacuous() {
        let p = generate_problem(Family::SimplexFace, 3, 0).unwrap();
        let r = run_experiment(&p, &cfg(StepRule::LineSearchExact, 400), Solver::Fw, &ExperimentOptions::default()).unwrap();
        assert_eq!(verdict(&r, "FW per-step"), Verdict::Vacuous);
        assert!(r.rate_fit.unwrap().ratio() > 0.9);
    }

    #[test]
    fn all_theorems_adds_constant_checks() {
        let p = generate_problem(Family::SimplexInterior, 3, 0).unwrap();
        let opts = ExperimentOptions {
            all_theorems: true,
            ..ExperimentOptions::default()
        };
        let r = run_experiment(&p, &cfg(StepRule::LineSearchExact, 100), Solver::Fw, &opts).unwrap();
        assert!(r.audits.iter().any(|a| a.name.contains("mu * delta^2")));
        assert!(r.passed(), "{:#?}", r.audits);
    }

    #[test]
    fn solver_names_parse() {
        assert_eq!("afw".parse::<Solver>().unwrap(), Solver::Afw);
        assert!("pfw".parse::<Solver>().is_err());
    }
}
