//! Empirical linear-rate fits from suboptimality traces.

use crate::error::{config, Result};
use crate::trace::{RunTrace, StepType};

/// Suboptimalities below this are dominated by rounding and end the fit.
pub const FIT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// `1 − exp(slope)`: the empirical per-step contraction `h_{k+1} ≈ (1 − ρ) h_k`.
    pub rho_empirical: f64,
    pub r_squared: f64,
    pub steps_used: usize,
    pub excluded_drop_steps: usize,
    /// The trace fell below [`FIT_FLOOR`] and only its prefix was fitted.
    pub truncated: bool,
}

impl RateFit {
    /// `exp(slope) = 1 − ρ`.
    pub fn ratio(&self) -> f64 {
        1.0 - self.rho_empirical
    }
}

/// Least-squares fit of `log h_k` against the count of non-drop steps taken
/// before iterate `k`, over the whole trace.
pub fn fit_geometric_rate(trace: &RunTrace, fstar: f64) -> Result<RateFit> {
    fit_geometric_rate_window(trace, fstar, 0, usize::MAX)
}

/// As [`fit_geometric_rate`], restricted to iterates `start ≤ k ≤ end`.
pub fn fit_geometric_rate_window(trace: &RunTrace, fstar: f64, start: usize, end: usize) -> Result<RateFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut counter = 0usize;
    let mut drops = 0usize;
    let mut truncated = false;
    for r in &trace.records {
        if r.k > end {
            break;
        }
        let h = r.f_value - fstar;
        if r.k >= start {
            if h < FIT_FLOOR {
                truncated = true;
                log::info!("suboptimality below {FIT_FLOOR:e} at k={}; fit truncated", r.k);
                break;
            }
            xs.push(counter as f64);
            ys.push(h.ln());
        }
        match r.step_type {
            Some(StepType::Drop) => {
                if r.k >= start {
                    drops += 1;
                }
            }
            Some(_) => counter += 1,
            None => {}
        }
    }
    if xs.len() < 2 {
        return config(format!("rate fit needs two iterates above {FIT_FLOOR:e}, got {}", xs.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return config("rate fit needs at least one non-drop step in the window");
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(RateFit {
        rho_empirical: 1.0 - slope.exp(),
        r_squared,
        steps_used: xs.len(),
        excluded_drop_steps: drops,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::IterateRecord;
    use nalgebra::DVector;

    fn synthetic(hs: &[f64], steps: &[Option<StepType>]) -> RunTrace {
        RunTrace {
            records: hs
                .iter()
                .zip(steps)
                .enumerate()
                .map(|(k, (&h, &st))| IterateRecord {
                    k,
                    x: DVector::zeros(1),
                    f_value: h,
                    gap: h,
                    fw_gap: h,
                    step_type: st,
                    gamma: 0.0,
                    gamma_max: 1.0,
                    active_size: 1,
                    weights: vec![(0, 1.0)],
                    descent: 0.0,
                })
                .collect(),
            ..RunTrace::default()
        }
    }

    fn fw_steps(n: usize) -> Vec<Option<StepType>> {
        let mut v = vec![Some(StepType::Fw); n];
        v[n - 1] = None;
        v
    }

    #[test]
    fn geometric_trace_is_recovered() {
        let hs: Vec<f64> = (0..50).map(|k| 0.9f64.powi(k)).collect();
        let fit = fit_geometric_rate(&synthetic(&hs, &fw_steps(50)), 0.0).unwrap();
        assert!((fit.rho_empirical - 0.1).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.steps_used, 50);
    }

    #[test]
    fn constant_trace_has_zero_rate() {
        let fit = fit_geometric_rate(&synthetic(&[0.5; 12], &fw_steps(12)), 0.0).unwrap();
        assert_eq!(fit.rho_empirical, 0.0);
    }

    #[test]
    fn drop_steps_do_not_advance_the_counter() {
        // h halves on every FW step; the drop step in the middle also halves
        // but is not counted, so the fit sees a jump rather than a step
        let hs = [1.0, 0.5, 0.25, 0.125, 0.0625];
        let steps = [Some(StepType::Fw), Some(StepType::Fw), Some(StepType::Drop), Some(StepType::Fw), None];
        let fit = fit_geometric_rate(&synthetic(&hs, &steps), 0.0).unwrap();
        assert_eq!(fit.excluded_drop_steps, 1);
        assert!(fit.rho_empirical > 0.5);
    }

    #[test]
    fn floor_truncates() {
        let hs: Vec<f64> = (0..40).map(|k| 0.2f64.powi(k)).collect();
        let fit = fit_geometric_rate(&synthetic(&hs, &fw_steps(40)), 0.0).unwrap();
        assert!(fit.truncated);
        // 0.2^18 ≈ 2.6e-13 is the last value above the floor
        assert_eq!(fit.steps_used, 19);
        assert!(fit_geometric_rate(&synthetic(&[1e-20; 5], &fw_steps(5)), 0.0).is_err());
    }

    #[test]
    fn window_selects_iterates() {
        let hs: Vec<f64> = (0..30).map(|k| if k < 10 { 0.5f64.powi(k) } else { 0.5f64.powi(9) * 0.99f64.powi(k - 9) }).collect();
        let fit = fit_geometric_rate_window(&synthetic(&hs, &fw_steps(30)), 0.0, 10, 29).unwrap();
        assert!((fit.ratio() - 0.99).abs() < 1e-9);
    }
}
