//! Smooth convex objectives.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::RealVector;

/// A differentiable convex function on `R^n`.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, x: &RealVector) -> f64;

    fn gradient(&self, x: &RealVector) -> RealVector;

    /// The constant Hessian when the objective is quadratic. Exact line
    /// search and the closed-form curvature constants need it.
    fn hessian(&self) -> Option<&DMatrix<f64>> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &RealVector) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &RealVector) -> RealVector {
        (**self).gradient(x)
    }
    fn hessian(&self) -> Option<&DMatrix<f64>> {
        (**self).hessian()
    }
}

/// `f(x) = ½ xᵀAx + bᵀx + c` with `A` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObjective {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
}

const PSD_TOLERANCE: f64 = 1e-10;

impl QuadraticObjective {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n {
            return Err(Error::Structural(format!(
                "quadratic needs square A matching b: A is {}x{}, b has {}",
                a.nrows(),
                a.ncols(),
                b.len()
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) || !c.is_finite() {
            return Err(Error::Numeric("quadratic coefficients must be finite".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if a[(i, j)] != a[(j, i)] {
                    return Err(Error::Structural(format!(
                        "A is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if n > 0 {
            let lmin = a.clone().symmetric_eigenvalues().min();
            if lmin < -PSD_TOLERANCE {
                return Err(Error::Structural(format!(
                    "A is not positive semidefinite (smallest eigenvalue {lmin:e})"
                )));
            }
        }
        Ok(Self { a, b, c })
    }

    /// `½‖x − target‖²`.
    pub fn squared_distance(target: &RealVector) -> Self {
        let n = target.len();
        Self {
            a: DMatrix::identity(n, n),
            b: -target.clone(),
            c: 0.5 * target.norm_squared(),
        }
    }

    /// A linear function `bᵀx + c` (zero Hessian).
    pub fn linear(b: DVector<f64>, c: f64) -> Self {
        let n = b.len();
        Self {
            a: DMatrix::zeros(n, n),
            b,
            c,
        }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `f̂(y) = f(My)`, i.e. `Â = MᵀAM`, `b̂ = Mᵀb`.
    pub fn compose_linear(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != self.a.nrows() {
            return Err(Error::Structural("transform rows must match dimension".into()));
        }
        let mut a = m.transpose() * &self.a * m;
        // symmetrize away rounding so the stored matrix is exactly symmetric
        let at = a.transpose();
        a = (a + at) * 0.5;
        Self::new(a, m.transpose() * &self.b, self.c)
    }

    /// Largest eigenvalue of `A`: the gradient Lipschitz constant in the
    /// Euclidean norm.
    pub fn lipschitz(&self) -> f64 {
        if self.a.nrows() == 0 {
            return 0.0;
        }
        self.a.clone().symmetric_eigenvalues().max().max(0.0)
    }

    /// Smallest eigenvalue of `A` restricted to the subspace spanned by the
    /// columns of `basis` (assumed orthonormal). This is the Euclidean
    /// strong-convexity modulus over a domain whose direction space is that
    /// subspace.
    pub fn restricted_strong_convexity(&self, basis: &DMatrix<f64>) -> f64 {
        if basis.ncols() == 0 {
            return 0.0;
        }
        let r = basis.transpose() * &self.a * basis;
        let r = (&r + r.transpose()) * 0.5;
        r.symmetric_eigenvalues().min().max(0.0)
    }
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &RealVector) -> f64 {
        0.5 * x.dot(&(&self.a * x)) + self.b.dot(x) + self.c
    }

    fn gradient(&self, x: &RealVector) -> RealVector {
        &self.a * x + &self.b
    }

    fn hessian(&self) -> Option<&DMatrix<f64>> {
        Some(&self.a)
    }
}

const FD_STEP: f64 = 1e-6;

/// Max over coordinates of `|analytic − central difference| / (1 + |analytic|)`.
pub fn gradient_check<O: Objective + ?Sized>(obj: &O, x: &RealVector) -> Result<f64> {
    if x.len() != obj.dim() {
        return Err(Error::Structural(format!(
            "point has dimension {}, objective {}",
            x.len(),
            obj.dim()
        )));
    }
    let g = obj.gradient(x);
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("gradient is not finite".into()));
    }
    let mut worst = 0.0f64;
    let mut probe = x.clone();
    for i in 0..x.len() {
        probe[i] = x[i] + FD_STEP;
        let up = obj.value(&probe);
        probe[i] = x[i] - FD_STEP;
        let down = obj.value(&probe);
        probe[i] = x[i];
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::Numeric(format!("objective not finite near coordinate {i}")));
        }
        let fd = (up - down) / (2.0 * FD_STEP);
        worst = worst.max((g[i] - fd).abs() / (1.0 + g[i].abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_quadratic_gradient_is_exact() {
        let q = QuadraticObjective::new(DMatrix::identity(3, 3), DVector::zeros(3), 0.0).unwrap();
        let x = DVector::from_vec(vec![0.25, -1.5, 3.0]);
        assert_eq!(q.gradient(&x), x);
        assert!(gradient_check(&q, &x).unwrap() < 1e-6);
    }

    #[test]
    fn squared_distance_gradient_at_vertex() {
        let c = DVector::from_vec(vec![0.5, 0.3, 0.2]);
        let q = QuadraticObjective::squared_distance(&c);
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let g = q.gradient(&e1);
        assert!((g - (&e1 - &c)).amax() < 1e-15);
        assert!(gradient_check(&q, &e1).unwrap() < 1e-6);
    }

    #[test]
    fn random_psd_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let q = crate::harness::problem::random_psd_quadratic(5, &mut rng);
        let bary = DVector::from_element(5, 0.2);
        assert!(gradient_check(&q, &bary).unwrap() < 1e-6);
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        let mut a = DMatrix::identity(2, 2);
        a[(0, 1)] = 0.5;
        assert!(matches!(
            QuadraticObjective::new(a, DVector::zeros(2), 0.0),
            Err(Error::Structural(_))
        ));
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(QuadraticObjective::new(a, DVector::zeros(2), 0.0).is_err());
    }

    #[test]
    fn non_finite_gradient_is_numeric_error() {
        struct Bad;
        impl Objective for Bad {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, _: &RealVector) -> f64 {
                0.0
            }
            fn gradient(&self, _: &RealVector) -> RealVector {
                DVector::from_element(1, f64::NAN)
            }
        }
        assert!(matches!(
            gradient_check(&Bad, &DVector::zeros(1)),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn gradient_is_ax_plus_b_for_representable_inputs() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![0.5, -0.25]);
        let q = QuadraticObjective::new(a, b, 1.0).unwrap();
        let x = DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(q.gradient(&x), DVector::from_vec(vec![4.5, 6.75]));
    }
}
