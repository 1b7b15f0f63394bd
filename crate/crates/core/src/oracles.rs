//! Linear minimization, away-vertex selection, gap certificates, and the
//! inexact-oracle wrapper. Every argmin/argmax breaks ties toward the lowest
//! atom index.

use rand::Rng;

use crate::active_set::ActiveSet;
use crate::error::{config, structural, Error, Result};
use crate::polytope::{PolytopeKind, VPolytope};
use crate::RealVector;

/// Gaps in `[−GAP_FLOOR, 0)` are rounding noise and are reported as zero.
pub const GAP_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleAnswer {
    pub atom_index: usize,
    pub vertex: RealVector,
    /// `⟨grad, vertex⟩`.
    pub inner_product: f64,
}

impl OracleAnswer {
    fn at(poly: &VPolytope, grad: &RealVector, atom_index: usize) -> Result<Self> {
        let vertex = poly.vertex(atom_index)?.clone();
        let inner_product = grad.dot(&vertex);
        Ok(Self {
            atom_index,
            vertex,
            inner_product,
        })
    }
}

fn check_dim(poly: &VPolytope, v: &RealVector, what: &str) -> Result<()> {
    if v.len() != poly.dim() {
        return structural(format!(
            "{what} has dimension {}, polytope {}",
            v.len(),
            poly.dim()
        ));
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric(format!("{what} is not finite")));
    }
    Ok(())
}

fn clamp_gap(gap: f64, what: &str) -> f64 {
    if (-GAP_FLOOR..0.0).contains(&gap) {
        log::debug!("{what} {gap:e} clamped to zero");
        0.0
    } else {
        gap
    }
}

/// Inner products within `TIE_TOLERANCE · (1 + max |⟨grad, v⟩|)` of the
/// optimum count as ties, so rounding differences between equivalent
/// parameterizations do not change which atom wins.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub(crate) fn tie_band(scale: f64) -> f64 {
    TIE_TOLERANCE * (1.0 + scale)
}

/// Brute-force `argmin_v ⟨grad, v⟩` over the vertex list.
pub fn lmo_enumerate(poly: &VPolytope, grad: &RealVector) -> Result<OracleAnswer> {
    check_dim(poly, grad, "gradient")?;
    let vals: Vec<f64> = poly.vertices().iter().map(|v| grad.dot(v)).collect();
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = min + tie_band(scale);
    let best = vals.iter().position(|&v| v <= cut).expect("polytope has vertices");
    OracleAnswer::at(poly, grad, best)
}

/// Linear minimization oracle with closed forms for the simplex, box, and
/// l1 ball; generic polytopes fall back to enumeration.
pub fn lmo(poly: &VPolytope, grad: &RealVector) -> Result<OracleAnswer> {
    check_dim(poly, grad, "gradient")?;
    let index = match poly.kind() {
        PolytopeKind::Simplex => {
            let min = grad.min();
            let cut = min + tie_band(grad.amax());
            grad.iter().position(|&g| g <= cut).expect("nonempty gradient")
        }
        PolytopeKind::Box { lower, upper } => {
            let (mut lo_sum, mut hi_sum) = (0.0, 0.0);
            for j in 0..grad.len() {
                let (a, b) = (grad[j] * lower[j], grad[j] * upper[j]);
                lo_sum += a.min(b);
                hi_sum += a.max(b);
            }
            let mut budget = tie_band(lo_sum.abs().max(hi_sum.abs()));
            let mut mask = 0usize;
            // clearing high bits first gives the lowest index inside the tie band
            for j in (0..grad.len()).rev() {
                if grad[j] < 0.0 {
                    let penalty = -grad[j] * (upper[j] - lower[j]);
                    if penalty <= budget {
                        budget -= penalty;
                    } else {
                        mask |= 1 << j;
                    }
                }
            }
            mask
        }
        PolytopeKind::L1Ball => {
            let scale = grad.amax();
            let cut = -scale + tie_band(scale);
            (0..2 * grad.len())
                .position(|k| {
                    let g = grad[k / 2];
                    let val = if k % 2 == 0 { g } else { -g };
                    val <= cut
                })
                .expect("nonempty gradient")
        }
        PolytopeKind::Generic => return lmo_enumerate(poly, grad),
    };
    OracleAnswer::at(poly, grad, index)
}

/// `argmax_{v ∈ S} ⟨grad, v⟩` over the active atoms.
pub fn away_vertex(aset: &ActiveSet, poly: &VPolytope, grad: &RealVector) -> Result<OracleAnswer> {
    check_dim(poly, grad, "gradient")?;
    let mut vals = Vec::with_capacity(aset.len());
    for i in aset.indices() {
        vals.push((i, grad.dot(poly.vertex(i)?)));
    }
    if vals.is_empty() {
        return Err(Error::Structural("away vertex of an empty active set".into()));
    }
    let max = vals.iter().fold(f64::NEG_INFINITY, |m, v| m.max(v.1));
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.1.abs()));
    let cut = max - tie_band(scale);
    let index = vals.iter().find(|v| v.1 >= cut).expect("nonempty").0;
    OracleAnswer::at(poly, grad, index)
}

/// FW duality gap `⟨grad, x⟩ − min_v ⟨grad, v⟩`.
pub fn fw_gap(grad: &RealVector, x: &RealVector, poly: &VPolytope) -> Result<f64> {
    check_dim(poly, x, "point")?;
    let s = lmo(poly, grad)?;
    Ok(clamp_gap(grad.dot(x) - s.inner_product, "FW gap"))
}

/// Pairwise gap `⟨−grad, s − v⟩`.
pub fn pairwise_gap(grad: &RealVector, s: &OracleAnswer, v: &OracleAnswer) -> f64 {
    clamp_gap(grad.dot(&v.vertex) - grad.dot(&s.vertex), "pairwise gap")
}

/// Output of the inexact oracle together with the quantities it was judged by.
#[derive(Debug, Clone, PartialEq)]
pub struct InexactAnswer {
    pub answer: OracleAnswer,
    /// `⟨grad, x − s⟩` for the returned atom; at least `ν` times the true gap.
    pub certified_gap: f64,
    /// The exact FW gap at `x`, kept for auditing.
    pub true_gap: f64,
}

fn admissible_atoms(
    poly: &VPolytope,
    grad: &RealVector,
    x: &RealVector,
    nu: f64,
) -> Result<(Vec<(usize, f64)>, OracleAnswer, f64)> {
    if !(nu > 0.0 && nu <= 1.0) {
        return config(format!("oracle accuracy nu = {nu} outside (0, 1]"));
    }
    check_dim(poly, x, "point")?;
    let exact = lmo(poly, grad)?;
    let gx = grad.dot(x);
    let true_gap = clamp_gap(gx - exact.inner_product, "FW gap");
    let threshold = nu * true_gap;
    let mut admissible: Vec<(usize, f64)> = poly
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (i, gx - grad.dot(v)))
        .filter(|&(i, descent)| descent >= threshold || i == exact.atom_index)
        .collect();
    admissible.sort_by_key(|&(i, _)| i);
    Ok((admissible, exact, true_gap))
}

/// Adversarial `ν`-accurate oracle: among atoms with
/// `⟨grad, x − v⟩ ≥ ν · g(x)`, the one with the least descent.
pub fn inexact_lmo(poly: &VPolytope, grad: &RealVector, x: &RealVector, nu: f64) -> Result<InexactAnswer> {
    let (admissible, exact, true_gap) = admissible_atoms(poly, grad, x, nu)?;
    if nu == 1.0 {
        let certified_gap = grad.dot(x) - exact.inner_product;
        return Ok(InexactAnswer {
            answer: exact,
            certified_gap: clamp_gap(certified_gap, "certified gap"),
            true_gap,
        });
    }
    let (index, descent) = admissible
        .iter()
        .copied()
        .fold(None::<(usize, f64)>, |best, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
        .expect("the exact answer is always admissible");
    Ok(InexactAnswer {
        answer: OracleAnswer::at(poly, grad, index)?,
        certified_gap: clamp_gap(descent, "certified gap"),
        true_gap,
    })
}

/// Randomized `ν`-accurate oracle: a uniformly drawn admissible atom.
pub fn inexact_lmo_random<R: Rng + ?Sized>(
    poly: &VPolytope,
    grad: &RealVector,
    x: &RealVector,
    nu: f64,
    rng: &mut R,
) -> Result<InexactAnswer> {
    let (admissible, _, true_gap) = admissible_atoms(poly, grad, x, nu)?;
    let (index, descent) = admissible[rng.random_range(0..admissible.len())];
    Ok(InexactAnswer {
        answer: OracleAnswer::at(poly, grad, index)?,
        certified_gap: clamp_gap(descent, "certified gap"),
        true_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn v(xs: &[f64]) -> RealVector {
        DVector::from_vec(xs.to_vec())
    }

    fn random_grad(rng: &mut ChaCha8Rng, n: usize) -> RealVector {
        DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
    }

    #[test]
    fn lmo_examples() {
        let s3 = VPolytope::simplex(3).unwrap();
        assert_eq!(lmo(&s3, &v(&[3.0, 1.0, 2.0])).unwrap().atom_index, 1);
        assert_eq!(lmo(&s3, &v(&[0.0, 0.0, 0.0])).unwrap().atom_index, 0);
        let b = VPolytope::cube(2, -1.0, 1.0).unwrap();
        assert_eq!(lmo(&b, &v(&[1.0, -2.0])).unwrap().vertex.as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn lmo_dimension_mismatch() {
        let s3 = VPolytope::simplex(3).unwrap();
        assert!(matches!(lmo(&s3, &v(&[1.0, 2.0])), Err(Error::Structural(_))));
    }

    #[test]
    fn closed_forms_agree_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let polys = [
            VPolytope::simplex(6).unwrap(),
            VPolytope::cube(5, -1.0, 2.0).unwrap(),
            VPolytope::l1_ball(6).unwrap(),
        ];
        for p in &polys {
            for _ in 0..1000 {
                let g = random_grad(&mut rng, p.dim());
                assert_eq!(
                    lmo(p, &g).unwrap().atom_index,
                    lmo_enumerate(p, &g).unwrap().atom_index,
                    "{:?}",
                    p.kind()
                );
            }
            let zero = DVector::zeros(p.dim());
            assert_eq!(lmo(p, &zero).unwrap().atom_index, 0);
        }
    }

    #[test]
    fn away_vertex_examples() {
        let s3 = VPolytope::simplex(3).unwrap();
        let a01 = ActiveSet::uniform(&[0, 1]).unwrap();
        assert_eq!(away_vertex(&a01, &s3, &v(&[3.0, 1.0, 2.0])).unwrap().atom_index, 0);
        assert_eq!(
            away_vertex(&ActiveSet::vertex(2), &s3, &v(&[5.0, -1.0, 0.0])).unwrap().atom_index,
            2
        );
        let all = ActiveSet::uniform(&[0, 1, 2]).unwrap();
        assert_eq!(away_vertex(&all, &s3, &v(&[1.0, 1.0, 0.0])).unwrap().atom_index, 0);
    }

    #[test]
    fn gap_examples() {
        let s2 = VPolytope::simplex(2).unwrap();
        let e2 = v(&[0.0, 1.0]);
        // f = ½‖x − e1‖² at e2
        let grad = v(&[-1.0, 1.0]);
        assert!((fw_gap(&grad, &e2, &s2).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(fw_gap(&DVector::zeros(2), &e2, &s2).unwrap(), 0.0);

        let s3 = VPolytope::simplex(3).unwrap();
        let g = v(&[3.0, 1.0, 2.0]);
        let all = ActiveSet::uniform(&[0, 1, 2]).unwrap();
        let s = lmo(&s3, &g).unwrap();
        let a = away_vertex(&all, &s3, &g).unwrap();
        assert_eq!((s.atom_index, a.atom_index), (1, 0));
        assert!((pairwise_gap(&g, &s, &a) - 2.0).abs() < 1e-15);
        assert_eq!(pairwise_gap(&g, &s, &s), 0.0);
    }

    #[test]
    fn gap_at_optimum_is_zero() {
        let s3 = VPolytope::simplex(3).unwrap();
        let c = v(&[0.5, 0.3, 0.2]);
        // ∇(½‖x − c‖²) vanishes at x = c
        let grad = &c - &c;
        assert!(fw_gap(&grad, &c, &s3).unwrap() <= 1e-9);
    }

    #[test]
    fn inexact_examples() {
        let s3 = VPolytope::simplex(3).unwrap();
        let g = v(&[3.0, 1.0, 2.0]);
        let e1 = v(&[1.0, 0.0, 0.0]);
        let ans = inexact_lmo(&s3, &g, &e1, 0.5).unwrap();
        assert_eq!(ans.answer.atom_index, 2);
        assert!((ans.true_gap - 2.0).abs() < 1e-15);
        assert!((ans.certified_gap - 1.0).abs() < 1e-15);

        let exact = inexact_lmo(&s3, &g, &e1, 1.0).unwrap();
        assert_eq!(exact.answer, lmo(&s3, &g).unwrap());

        // zero gap: x is optimal for the linear function, answer is the lmo atom
        let e2 = v(&[0.0, 1.0, 0.0]);
        let ans = inexact_lmo(&s3, &g, &e2, 0.25).unwrap();
        assert_eq!(ans.answer.atom_index, 1);
        assert_eq!(ans.certified_gap, 0.0);

        assert!(matches!(inexact_lmo(&s3, &g, &e1, 0.0), Err(Error::Config(_))));
        assert!(inexact_lmo(&s3, &g, &e1, 1.5).is_err());
    }

    #[test]
    fn inexact_answers_meet_accuracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = VPolytope::cube(3, 0.0, 1.0).unwrap();
        for _ in 0..300 {
            let g = random_grad(&mut rng, 3);
            let x = DVector::from_fn(3, |_, _| rng.random::<f64>());
            for nu in [0.1, 0.25, 0.5, 0.9, 1.0] {
                let adv = inexact_lmo(&p, &g, &x, nu).unwrap();
                let rnd = inexact_lmo_random(&p, &g, &x, nu, &mut rng).unwrap();
                for a in [adv, rnd] {
                    let descent = g.dot(&x) - g.dot(&a.answer.vertex);
                    assert!(descent >= nu * a.true_gap - 1e-12);
                }
            }
        }
    }

    #[test]
    fn lmo_is_affinely_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = VPolytope::cube(3, -1.0, 1.0).unwrap();
        for _ in 0..200 {
            let m = DMatrix::from_fn(3, 3, |_, _| StandardNormal.sample(&mut rng));
            let mapped: Vec<RealVector> = p.vertices().iter().map(|v| &m * v).collect();
            let q = VPolytope::generic(mapped, None).unwrap();
            let g = random_grad(&mut rng, 3);
            let a = lmo(&q, &g).unwrap();
            let b = lmo(&p, &(m.transpose() * &g)).unwrap();
            assert_eq!(a.atom_index, b.atom_index);
            assert!((&m * &b.vertex - &a.vertex).amax() < 1e-12);
        }
    }
}
