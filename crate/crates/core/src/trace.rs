//! Solver configuration and per-iteration records.

use std::fmt;
use std::str::FromStr;

use crate::active_set::DEFAULT_DROP_TOLERANCE;
use crate::error::{config, Error, Result};
use crate::RealVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepType {
    Fw,
    Away,
    /// An away step taken at its maximal size, removing the away atom.
    Drop,
}

impl StepType {
    pub fn as_str(self) -> &'static str {
        match self {
            StepType::Fw => "fw",
            StepType::Away => "away",
            StepType::Drop => "drop",
        }
    }
}

impl fmt::Display for StepType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// `γ_k = 2 / (k + 2)`.
    FixedSchedule,
    /// `γ_k = min{1, g_k / C_f}` (times `ν` with an inexact oracle).
    AnalyticCf,
    LineSearchExact,
    LineSearchGolden,
    /// `γ_k = min{1, γ_max, g_k / (2 C_f^A)}` with the pairwise gap.
    AnalyticCfa,
}

impl StepRule {
    pub fn as_str(self) -> &'static str {
        match self {
            StepRule::FixedSchedule => "fixed_schedule",
            StepRule::AnalyticCf => "analytic_cf",
            StepRule::LineSearchExact => "line_search_exact",
            StepRule::LineSearchGolden => "line_search_golden",
            StepRule::AnalyticCfa => "analytic_cfa",
        }
    }

    pub fn is_line_search(self) -> bool {
        matches!(self, StepRule::LineSearchExact | StepRule::LineSearchGolden)
    }
}

impl FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fixed_schedule" => StepRule::FixedSchedule,
            "analytic_cf" => StepRule::AnalyticCf,
            "line_search_exact" => StepRule::LineSearchExact,
            "line_search_golden" => StepRule::LineSearchGolden,
            "analytic_cfa" => StepRule::AnalyticCfa,
            other => return config(format!("unknown step rule '{other}'")),
        })
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the inexact oracle chooses among admissible atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InexactMode {
    /// The admissible atom with the least descent.
    Adversarial,
    /// A uniformly random admissible atom, seeded.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub gap_tolerance: f64,
    pub step_rule: StepRule,
    pub drop_tolerance: f64,
    /// Multiplicative oracle accuracy in `(0, 1]`; `1` is the exact oracle.
    pub nu: f64,
    pub inexact_mode: InexactMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            gap_tolerance: 1e-10,
            step_rule: StepRule::LineSearchExact,
            drop_tolerance: DEFAULT_DROP_TOLERANCE,
            nu: 1.0,
            inexact_mode: InexactMode::Adversarial,
        }
    }
}

impl SolverConfig {
    pub fn with_rule(step_rule: StepRule) -> Self {
        Self {
            step_rule,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return config("max_iters must be at least 1");
        }
        if !(self.gap_tolerance >= 0.0) {
            return config("gap tolerance must be nonnegative");
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return config(format!("oracle accuracy nu = {} outside (0, 1]", self.nu));
        }
        if !(self.drop_tolerance >= 0.0 && self.drop_tolerance < 1e-3) {
            return config("drop tolerance must lie in [0, 1e-3)");
        }
        Ok(())
    }
}

/// State at the start of iteration `k` and the step taken from it.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub x: RealVector,
    pub f_value: f64,
    /// The gap the solver steps and stops on: the FW gap, the pairwise gap,
    /// or the certified gap of an inexact oracle.
    pub gap: f64,
    /// The true FW duality gap `max_v ⟨∇f, x − v⟩`.
    pub fw_gap: f64,
    /// `None` on the terminal record.
    pub step_type: Option<StepType>,
    pub gamma: f64,
    pub gamma_max: f64,
    pub active_size: usize,
    /// Active atoms and their weights at `x_k`, by atom index.
    pub weights: Vec<(usize, f64)>,
    /// `⟨−∇f(x_k), d_k⟩` for the chosen direction; zero on the terminal record.
    pub descent: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub records: Vec<IterateRecord>,
    pub problem_id: String,
    pub solver_id: String,
    pub seed: u64,
    /// Invariant breaches observed during the run (e.g. ascent under line search).
    pub violations: Vec<String>,
    /// `|S^(0)|`.
    pub initial_active_size: usize,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterateRecord> {
        self.records.last()
    }

    /// Number of drop steps among the first `k` steps, for every `k`.
    pub fn drop_counts(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.records.len());
        let mut count = 0;
        out.push(0);
        for r in &self.records {
            if r.step_type == Some(StepType::Drop) {
                count += 1;
            }
            if r.step_type.is_some() {
                out.push(count);
            }
        }
        out
    }

    pub fn step_types(&self) -> Vec<StepType> {
        self.records.iter().filter_map(|r| r.step_type).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_rule_round_trips_through_str() {
        for rule in [
            StepRule::FixedSchedule,
            StepRule::AnalyticCf,
            StepRule::LineSearchExact,
            StepRule::LineSearchGolden,
            StepRule::AnalyticCfa,
        ] {
            assert_eq!(rule.as_str().parse::<StepRule>().unwrap(), rule);
        }
        assert!("armijo".parse::<StepRule>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            nu: 0.0,
            ..SolverConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = SolverConfig {
            max_iters: 0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
