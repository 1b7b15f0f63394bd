//! Frank-Wolfe with away steps.
//!
//! Each iteration compares the FW direction `s_k − x_k` against the away
//! direction `x_k − v_k` (with `v_k` the worst active atom), takes the one with
//! the steeper descent, and updates the convex-combination weights. An away
//! step at its maximal size `γ_max = α_v / (1 − α_v)` removes `v_k` entirely
//! (a drop step).

use crate::active_set::{active_set_point, apply_away_update, apply_fw_update, ActiveSet};
use crate::constants::ConstantEstimates;
use crate::error::{config, structural, Error, Result};
use crate::fw::{evaluate, DESCENT_SLACK};
use crate::linesearch::{exact_quadratic, golden_section, rule_afw, GOLDEN_TOLERANCE};
use crate::objective::Objective;
use crate::oracles::{away_vertex, lmo, pairwise_gap, tie_band, OracleAnswer, GAP_FLOOR};
use crate::polytope::VPolytope;
use crate::trace::{IterateRecord, RunTrace, SolverConfig, StepRule, StepType};
use crate::RealVector;

/// Below this the away atom's weight is treated as leftover rounding.
const VANISHING_GAMMA_MAX: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Fw,
    Away,
}

/// Chooses between `d^FW = s − x` and `d^A = x − v`; ties (up to rounding)
/// go to the FW branch.
pub fn select_direction(
    grad: &RealVector,
    x: &RealVector,
    s: &OracleAnswer,
    v: &OracleAnswer,
) -> (RealVector, Branch) {
    let gx = grad.dot(x);
    let fw_slope = s.inner_product - gx;
    let away_slope = gx - v.inner_product;
    let band = tie_band(gx.abs().max(s.inner_product.abs()).max(v.inner_product.abs()));
    if fw_slope <= away_slope + band {
        (&s.vertex - x, Branch::Fw)
    } else {
        (x - &v.vertex, Branch::Away)
    }
}

/// `α / (1 − α)`, the largest away step keeping every weight nonnegative.
pub fn gamma_max(alpha_v: f64) -> Result<f64> {
    if !(alpha_v > 0.0) || alpha_v >= 1.0 {
        return structural(format!("away weight {alpha_v} outside (0, 1)"));
    }
    Ok(alpha_v / (1.0 - alpha_v))
}

/// Runs the away-steps algorithm from `x0`.
pub fn solve_afw<O: Objective + ?Sized>(
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
        StepRule::FixedSchedule | StepRule::AnalyticCf => {
            return config(format!("{} is not an away-steps rule", cfg.step_rule))
        }
        StepRule::AnalyticCfa if !(constants.cf_away > 0.0) => {
            return config("analytic_cfa needs a positive away curvature constant")
        }
        StepRule::LineSearchExact if obj.hessian().is_none() => {
            return config("exact line search needs a quadratic objective")
        }
        _ => {}
    }
    if cfg.nu < 1.0 {
        return config("the inexact oracle is only supported by the standard FW solver");
    }
    x0.check()?;

    let mut trace = RunTrace {
        solver_id: "afw".into(),
        initial_active_size: x0.len(),
        ..RunTrace::default()
    };
    let mut aset = x0.clone();
    let mut k = 0;
    let mut retried = false;
    loop {
        let x = active_set_point(&aset, poly)?;
        let (f, grad) = evaluate(obj, &x)?;
        let s = lmo(poly, &grad)?;
        let v = away_vertex(&aset, poly, &grad)?;
        let fw_gap = grad.dot(&x) - s.inner_product;
        let fw_gap = if (-GAP_FLOOR..0.0).contains(&fw_gap) { 0.0 } else { fw_gap };
        let gap = pairwise_gap(&grad, &s, &v);
        let mut record = IterateRecord {
            k,
            x: x.clone(),
            f_value: f,
            gap,
            fw_gap,
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

        let (mut d, mut branch) = select_direction(&grad, &x, &s, &v);
        if branch == Branch::Away && aset.len() == 1 {
            log::debug!("away branch on a singleton active set at k={k}; using FW");
            d = &s.vertex - &x;
            branch = Branch::Fw;
        }
        let gmax = match branch {
            Branch::Fw => 1.0,
            Branch::Away => gamma_max(aset.weight(v.atom_index))?,
        };
        if branch == Branch::Away && gmax < VANISHING_GAMMA_MAX && !retried {
            log::debug!("pruning vanishing atom {} at k={k}", v.atom_index);
            aset.remove(v.atom_index);
            aset.prune(0.0);
            retried = true;
            continue;
        }
        retried = false;

        let gamma = match cfg.step_rule {
            StepRule::LineSearchExact => {
                exact_quadratic(obj.hessian().expect("checked above"), &grad, &d, gmax)
            }
            StepRule::LineSearchGolden => golden_section(obj, &x, &d, gmax, GOLDEN_TOLERANCE)?,
            StepRule::AnalyticCfa => rule_afw(gap, constants.cf_away, gmax)?,
            StepRule::FixedSchedule | StepRule::AnalyticCf => unreachable!("rejected above"),
        };

        let step_type = match branch {
            Branch::Fw => {
                aset = apply_fw_update(&aset, s.atom_index, gamma, cfg.drop_tolerance)?;
                StepType::Fw
            }
            Branch::Away => {
                let (next, dropped) =
                    apply_away_update(&aset, v.atom_index, gamma, gmax, cfg.drop_tolerance)?;
                aset = next;
                if dropped {
                    StepType::Drop
                } else {
                    StepType::Away
                }
            }
        };
        if let Err(e) = aset.check() {
            return Err(Error::Structural(format!("active set broken after step {k}: {e}")));
        }

        record.step_type = Some(step_type);
        record.gamma = gamma;
        record.gamma_max = gmax;
        record.descent = -grad.dot(&d);
        trace.records.push(record);

        if cfg.step_rule.is_line_search() {
            let f_next = obj.value(&active_set_point(&aset, poly)?);
            if f_next > f + DESCENT_SLACK {
                trace.violations.push(format!("ascent at k={k}: {f} -> {f_next}"));
            }
        }
        k += 1;
    }
    Ok(trace)
}
