//! Step-size selection along a segment `x + γ d`, `γ ∈ [0, γ_max]`.

use nalgebra::DMatrix;

use crate::error::{config, Error, Result};
use crate::objective::Objective;
use crate::RealVector;

pub const GOLDEN_MAX_ITERS: usize = 200;
pub const GOLDEN_TOLERANCE: f64 = 1e-10;

/// Exact minimizer of a quadratic along `d`, clamped to `[0, γ_max]`.
/// When `d` lies in the null space of `A` the function is linear along the
/// segment and the minimizer is an endpoint.
pub fn exact_quadratic(a: &DMatrix<f64>, grad: &RealVector, d: &RealVector, gamma_max: f64) -> f64 {
    let slope = grad.dot(d);
    let curvature = d.dot(&(a * d));
    if curvature <= 0.0 {
        return if slope < 0.0 { gamma_max } else { 0.0 };
    }
    (-slope / curvature).clamp(0.0, gamma_max)
}

/// Golden-section search for the minimizer of `γ ↦ f(x + γ d)` on
/// `[0, γ_max]`, assuming convexity along the segment.
pub fn golden_section<O: Objective + ?Sized>(
    obj: &O,
    x: &RealVector,
    d: &RealVector,
    gamma_max: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return config("golden-section tolerance must be positive");
    }
    if !(gamma_max >= 0.0) {
        return config("γ_max must be nonnegative");
    }
    let phi = |g: f64| -> Result<f64> {
        let v = obj.value(&(x + d * g));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("objective not finite at γ = {g}")))
        }
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, gamma_max);
    let mut c = hi - inv_phi * (hi - lo);
    let mut e = lo + inv_phi * (hi - lo);
    let mut fc = phi(c)?;
    let mut fe = phi(e)?;
    for _ in 0..GOLDEN_MAX_ITERS {
        if hi - lo <= tol {
            break;
        }
        if fc <= fe {
            hi = e;
            e = c;
            fe = fc;
            c = hi - inv_phi * (hi - lo);
            fc = phi(c)?;
        } else {
            lo = c;
            c = e;
            fc = fe;
            e = lo + inv_phi * (hi - lo);
            fe = phi(e)?;
        }
    }
    // endpoints are not probed by the bracket; compare them explicitly
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, phi(mid)?);
    for g in [0.0, gamma_max] {
        let v = phi(g)?;
        if v < best.1 {
            best = (g, v);
        }
    }
    Ok(best.0)
}

/// `min{1, gap / C_f}`.
pub fn rule_fw(gap: f64, cf: f64) -> Result<f64> {
    if !(cf > 0.0) {
        return config(format!("curvature constant must be positive, got {cf}"));
    }
    Ok((gap.max(0.0) / cf).min(1.0))
}

/// `min{1, γ_max, gap / (2 C_f^A)}`.
pub fn rule_afw(pair_gap: f64, cf_away: f64, gamma_max: f64) -> Result<f64> {
    if !(cf_away > 0.0) {
        return config(format!("away curvature constant must be positive, got {cf_away}"));
    }
    if !(gamma_max > 0.0) {
        return config("γ_max must be positive");
    }
    Ok((pair_gap.max(0.0) / (2.0 * cf_away)).min(1.0).min(gamma_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::QuadraticObjective;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> RealVector {
        DVector::from_vec(xs.to_vec())
    }

    #[test]
    fn exact_examples() {
        let a = DMatrix::identity(2, 2);
        let grad = v(&[1.0, 0.0]);
        let d = v(&[-1.0, 0.0]);
        assert_eq!(exact_quadratic(&a, &grad, &d, 1.0), 1.0);
        assert_eq!(exact_quadratic(&a, &grad, &d, 0.5), 0.5);
        assert_eq!(exact_quadratic(&a, &grad, &v(&[1.0, 0.0]), 1.0), 0.0);
    }

    #[test]
    fn exact_null_space_branch() {
        let a = DMatrix::zeros(2, 2);
        assert_eq!(exact_quadratic(&a, &v(&[1.0, 0.0]), &v(&[-1.0, 0.0]), 0.7), 0.7);
        assert_eq!(exact_quadratic(&a, &v(&[1.0, 0.0]), &v(&[1.0, 0.0]), 0.7), 0.0);
    }

    #[test]
    fn golden_boundary_minimizers() {
        let q = QuadraticObjective::linear(v(&[1.0, 0.0]), 0.0);
        let x = v(&[0.0, 0.0]);
        let down = golden_section(&q, &x, &v(&[-1.0, 0.0]), 0.8, 1e-8).unwrap();
        assert!((down - 0.8).abs() < 1e-8);
        let up = golden_section(&q, &x, &v(&[1.0, 0.0]), 0.8, 1e-8).unwrap();
        assert!(up.abs() < 1e-8);
    }

    #[test]
    fn golden_rejects_bad_tolerance_and_nan() {
        let q = QuadraticObjective::linear(v(&[1.0]), 0.0);
        assert!(golden_section(&q, &v(&[0.0]), &v(&[1.0]), 1.0, 0.0).is_err());
        struct Nan;
        impl Objective for Nan {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, _: &RealVector) -> f64 {
                f64::NAN
            }
            fn gradient(&self, x: &RealVector) -> RealVector {
                x.clone()
            }
        }
        assert!(matches!(
            golden_section(&Nan, &v(&[0.0]), &v(&[1.0]), 1.0, 1e-8),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn rule_examples() {
        assert_eq!(rule_fw(0.0, 2.0).unwrap(), 0.0);
        assert_eq!(rule_fw(2.0, 2.0).unwrap(), 1.0);
        assert_eq!(rule_fw(1.0, 4.0).unwrap(), 0.25);
        assert!(rule_fw(1.0, 0.0).is_err());
        assert_eq!(rule_afw(4.0, 1.0, 10.0).unwrap(), 1.0);
        assert_eq!(rule_afw(1.0, 1.0, 0.2).unwrap(), 0.2);
        assert_eq!(rule_afw(1.0, 2.0, 1.0).unwrap(), 0.25);
        assert!(rule_afw(1.0, -1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn rules_stay_in_range(gap in 0.0f64..100.0, c in 1e-3f64..100.0, gmax in 1e-6f64..10.0) {
            let a = rule_fw(gap, c).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
            let b = rule_afw(gap, c, gmax).unwrap();
            prop_assert!(b >= 0.0 && b <= gmax.min(1.0));
        }
    }
}
