//! The classical Frank-Wolfe loop: only FW directions, any of the FW step rules,
//! optionally driven by a `ν`-accurate inexact oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::active_set::{active_set_point, apply_fw_update, ActiveSet};
use crate::constants::ConstantEstimates;
use crate::error::{config, Error, Result};
use crate::linesearch::{exact_quadratic, golden_section, rule_fw, GOLDEN_TOLERANCE};
use crate::objective::Objective;
use crate::oracles::{inexact_lmo, inexact_lmo_random, lmo, GAP_FLOOR};
use crate::polytope::VPolytope;
use crate::trace::{InexactMode, IterateRecord, RunTrace, SolverConfig, StepRule, StepType};
use crate::RealVector;

/// Slack on `f(x_{k+1}) ≤ f(x_k)` before a line-search step counts as ascent.
pub const DESCENT_SLACK: f64 = 1e-12;

pub(crate) fn evaluate<O: Objective + ?Sized>(obj: &O, x: &RealVector) -> Result<(f64, RealVector)> {
    let f = obj.value(x);
    let g = obj.gradient(x);
    if !f.is_finite() || g.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric("objective or gradient not finite at iterate".into()));
    }
    Ok((f, g))
}

/// Runs Frank-Wolfe from `x0`. Records one entry per iterate, the last one
/// without a step.
pub fn solve_fw<O: Objective + ?Sized>(
    obj: &O,
    poly: &VPolytope,
    x0: &ActiveSet,
    cfg: &SolverConfig,
    constants: &ConstantEstimates,
) -> Result<RunTrace> {
    cfg.validate()?;
    if obj.dim() != poly.dim() {
        return Err(Error::Structural("objective and polytope dimensions differ".into()));
    }
    match cfg.step_rule {
        StepRule::AnalyticCfa => return config("analytic_cfa is an away-steps rule"),
        StepRule::AnalyticCf if !(constants.cf > 0.0) => {
            return config("analytic_cf needs a positive curvature constant")
        }
        StepRule::LineSearchExact if obj.hessian().is_none() => {
            return config("exact line search needs a quadratic objective")
        }
        _ => {}
    }
    x0.check()?;

    let inexact = cfg.nu < 1.0;
    let mut rng = match cfg.inexact_mode {
        InexactMode::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        InexactMode::Adversarial => None,
    };
    let mut trace = RunTrace {
        solver_id: if inexact { format!("fw-nu{}", cfg.nu) } else { "fw".into() },
        seed: match cfg.inexact_mode {
            InexactMode::Random { seed } => seed,
            InexactMode::Adversarial => 0,
        },
        initial_active_size: x0.len(),
        ..RunTrace::default()
    };

    let mut aset = x0.clone();
    let mut k = 0;
    loop {
        let x = active_set_point(&aset, poly)?;
        let (f, grad) = evaluate(obj, &x)?;
        let (s, gap, true_gap) = if inexact {
            let ans = match rng.as_mut() {
                Some(r) => inexact_lmo_random(poly, &grad, &x, cfg.nu, r)?,
                None => inexact_lmo(poly, &grad, &x, cfg.nu)?,
            };
            (ans.answer, ans.certified_gap, ans.true_gap)
        } else {
            let s = lmo(poly, &grad)?;
            let g = grad.dot(&x) - s.inner_product;
            let g = if (-GAP_FLOOR..0.0).contains(&g) { 0.0 } else { g };
            (s, g, g)
        };
        let mut record = IterateRecord {
            k,
            x: x.clone(),
            f_value: f,
            gap,
            fw_gap: true_gap,
            step_type: None,
            gamma: 0.0,
            gamma_max: 1.0,
            active_size: aset.len(),
            weights: aset.iter().collect(),
            descent: 0.0,
        };
        if gap <= cfg.gap_tolerance || k >= cfg.max_iters {
            trace.records.push(record);
            break;
        }

        let d = &s.vertex - &x;
        let gamma = match cfg.step_rule {
            StepRule::FixedSchedule => 2.0 / (k as f64 + 2.0),
            // with ν < 1 the step is scaled by ν and uses the exact gap,
            // which the adversarial wrapper computes for auditing
            StepRule::AnalyticCf => rule_fw(cfg.nu * true_gap, constants.cf)?,
            StepRule::LineSearchExact => {
                exact_quadratic(obj.hessian().expect("checked above"), &grad, &d, 1.0)
            }
            StepRule::LineSearchGolden => golden_section(obj, &x, &d, 1.0, GOLDEN_TOLERANCE)?,
            StepRule::AnalyticCfa => unreachable!("rejected above"),
        };
        aset = apply_fw_update(&aset, s.atom_index, gamma, cfg.drop_tolerance)?;
        aset.check()?;

        record.step_type = Some(StepType::Fw);
        record.gamma = gamma;
        record.descent = -grad.dot(&d);
        trace.records.push(record);

        if cfg.step_rule.is_line_search() {
            let f_next = obj.value(&active_set_point(&aset, poly)?);
            if f_next > f + DESCENT_SLACK {
                trace
                    .violations
                    .push(format!("ascent at k={k}: {f} -> {f_next}"));
            }
        }
        k += 1;
    }
    Ok(trace)
}
