//! Convex-combination state `(S, α)` maintained by the solvers.

use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::error::{structural, Error, Result};
use crate::polytope::VPolytope;
use crate::RealVector;

pub const DEFAULT_DROP_TOLERANCE: f64 = 1e-12;
const WEIGHT_SUM_TOLERANCE: f64 = 1e-10;
/// Slack allowed on `γ ≤ γ_max` before an away step counts as overshooting.
pub const DROP_STEP_TOLERANCE: f64 = 1e-12;

/// Atom index → weight. Weights are positive and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSet {
    weights: BTreeMap<usize, f64>,
}

impl ActiveSet {
    /// A single atom with weight one.
    pub fn vertex(index: usize) -> Self {
        Self {
            weights: BTreeMap::from([(index, 1.0)]),
        }
    }

    /// Builds from explicit weights, checking positivity and the unit sum.
    pub fn from_weights(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (i, w) in entries {
            if !w.is_finite() || w <= 0.0 || w > 1.0 + WEIGHT_SUM_TOLERANCE {
                return structural(format!("weight {w} for atom {i} outside (0, 1]"));
            }
            if weights.insert(i, w).is_some() {
                return structural(format!("atom {i} listed twice"));
            }
        }
        let set = Self { weights };
        set.check()?;
        Ok(set)
    }

    /// The uniform combination of `indices`.
    pub fn uniform(indices: &[usize]) -> Result<Self> {
        let w = 1.0 / indices.len() as f64;
        Self::from_weights(indices.iter().map(|&i| (i, w)))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights.get(&index).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.weights.contains_key(&index)
    }

    /// `(index, weight)` in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().map(|(&i, &w)| (i, w))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.keys().copied()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.values().sum()
    }

    /// Verifies the unit-sum and positivity invariants.
    pub fn check(&self) -> Result<()> {
        if self.weights.is_empty() {
            return structural("active set is empty");
        }
        let sum = self.weight_sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return structural(format!("active weights sum to {sum}"));
        }
        if let Some((i, w)) = self.iter().find(|(_, w)| !(*w > 0.0)) {
            return structural(format!("atom {i} has nonpositive weight {w}"));
        }
        Ok(())
    }

    /// Removes weights at or below `tol` and rescales the rest to sum to one.
    pub fn prune(&mut self, tol: f64) {
        self.weights.retain(|_, w| *w > tol);
        let sum = self.weight_sum();
        if sum > 0.0 && sum != 1.0 {
            for w in self.weights.values_mut() {
                *w /= sum;
            }
        }
    }

    pub(crate) fn remove(&mut self, index: usize) {
        self.weights.remove(&index);
    }
}

/// `Σ α_v · v`.
pub fn active_set_point(aset: &ActiveSet, poly: &VPolytope) -> Result<RealVector> {
    let mut x = DVector::zeros(poly.dim());
    for (i, w) in aset.iter() {
        x.axpy(w, poly.vertex(i)?, 1.0);
    }
    Ok(x)
}

/// Frank-Wolfe step toward atom `s_index`: every weight is scaled by `1 − γ`
/// and `γ` is added to `s_index`. A full step collapses to `{s_index}`.
pub fn apply_fw_update(aset: &ActiveSet, s_index: usize, gamma: f64, drop_tol: f64) -> Result<ActiveSet> {
    if !(0.0..=1.0).contains(&gamma) {
        return structural(format!("FW step size {gamma} outside [0, 1]"));
    }
    if gamma == 1.0 {
        return Ok(ActiveSet::vertex(s_index));
    }
    let mut next = aset.clone();
    for w in next.weights.values_mut() {
        *w *= 1.0 - gamma;
    }
    *next.weights.entry(s_index).or_insert(0.0) += gamma;
    next.prune(drop_tol);
    Ok(next)
}

/// Away step from atom `v_index`: every weight is scaled by `1 + γ` and `γ`
/// is subtracted from `v_index`. Returns whether the step dropped the atom.
pub fn apply_away_update(
    aset: &ActiveSet,
    v_index: usize,
    gamma: f64,
    gamma_max: f64,
    drop_tol: f64,
) -> Result<(ActiveSet, bool)> {
    if gamma < 0.0 || gamma > gamma_max + DROP_STEP_TOLERANCE {
        return structural(format!(
            "away step size {gamma} outside [0, γ_max = {gamma_max}]"
        ));
    }
    if !aset.contains(v_index) {
        return Err(Error::Structural(format!("away atom {v_index} is not active")));
    }
    let mut next = aset.clone();
    for w in next.weights.values_mut() {
        *w *= 1.0 + gamma;
    }
    let dropped = gamma >= gamma_max - DROP_STEP_TOLERANCE;
    if dropped {
        next.weights.remove(&v_index);
    } else if let Some(w) = next.weights.get_mut(&v_index) {
        *w -= gamma;
    }
    next.prune(drop_tol);
    Ok((next, dropped))
}
