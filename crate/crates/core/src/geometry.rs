//! Polytope geometry behind the affine-invariant constants: proper supports,
//! worst-case away vertices, directional and pyramidal widths, ray exits and
//! interior radii. The underlying norm is Euclidean throughout.

use std::collections::BTreeMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{structural, Error, Result};
use crate::oracles::OracleAnswer;
use crate::polytope::{PolytopeKind, VPolytope};
use crate::RealVector;

/// Largest vertex count for which supports are enumerated.
pub const ENUMERATION_CAP: usize = 16;
/// A convex combination is proper when every weight reaches this value.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;
/// Largest affine dimension handled by the pyramidal width search.
pub const PYRAMIDAL_DIM_CAP: usize = 4;
const FACE_TOLERANCE: f64 = 1e-10;
const RECONSTRUCTION_TOLERANCE: f64 = 1e-9;
const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Faces up to this size use every vertex subset barycenter as a base point.
const FULL_BASE_POINT_CAP: usize = 8;

/// Vertex subset expressing a point with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ProperSupport {
    pub atom_indices: Vec<usize>,
    pub weights: BTreeMap<usize, f64>,
}

fn check_cap(poly: &VPolytope) -> Result<()> {
    if poly.num_vertices() > ENUMERATION_CAP {
        return Err(Error::Unsupported(format!(
            "{} vertices exceed the enumeration cap of {ENUMERATION_CAP}",
            poly.num_vertices()
        )));
    }
    Ok(())
}

/// Maximizes the smallest weight over representations of `x` by `subset`.
/// Returns `None` when `x` is outside `conv(subset)`. Coordinates may miss by
/// the face tolerance: points within that distance of a face are treated as
/// lying on it.
fn max_min_weight(poly: &VPolytope, subset: &[usize], x: &RealVector) -> Option<(f64, Vec<f64>)> {
    let slack = FACE_TOLERANCE * (1.0 + x.amax());
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let t = lp.add_var(1.0, (0.0, 1.0));
    let w: Vec<_> = subset.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    for r in 0..x.len() {
        let expr: Vec<_> = subset
            .iter()
            .zip(&w)
            .map(|(&i, &var)| (var, poly.vertices()[i][r]))
            .filter(|(_, c)| *c != 0.0)
            .collect();
        lp.add_constraint(expr.clone(), ComparisonOp::Le, x[r] + slack);
        lp.add_constraint(expr, ComparisonOp::Ge, x[r] - slack);
    }
    lp.add_constraint(w.iter().map(|&var| (var, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    for &var in &w {
        lp.add_constraint([(var, 1.0), (t, -1.0)], ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().ok()?;
    Some((sol[t], w.iter().map(|&var| sol[var]).collect()))
}

/// Newton correction of LP weights so the combination reproduces `x` to
/// working precision.
fn polish(poly: &VPolytope, subset: &[usize], x: &RealVector, weights: &mut [f64]) {
    let n = x.len();
    let m = subset.len();
    let sys = DMatrix::from_fn(n + 1, m, |r, c| {
        if r < n {
            poly.vertices()[subset[c]][r]
        } else {
            1.0
        }
    });
    let w = DVector::from_column_slice(weights);
    let mut target = DVector::zeros(n + 1);
    target.rows_mut(0, n).copy_from(x);
    target[n] = 1.0;
    let residual = target - &sys * &w;
    if let Ok(delta) = sys.svd(true, true).solve(&residual, 1e-12) {
        for (wi, di) in weights.iter_mut().zip(delta.iter()) {
            *wi += di;
        }
    }
}

fn reconstruct(poly: &VPolytope, subset: &[usize], weights: &[f64]) -> RealVector {
    let mut y = DVector::zeros(poly.dim());
    for (&i, &w) in subset.iter().zip(weights) {
        y += &poly.vertices()[i] * w;
    }
    y
}

/// Candidate vertices for supports of `x`: the vertices of its minimal face.
fn support_candidates(poly: &VPolytope, x: &RealVector) -> Vec<usize> {
    poly.minimal_face_vertices(x, FACE_TOLERANCE)
}

/// All proper supports of `x`, sorted lexicographically by index list.
pub fn enumerate_proper_supports(x: &RealVector, poly: &VPolytope) -> Result<Vec<ProperSupport>> {
    check_cap(poly)?;
    if x.len() != poly.dim() {
        return structural("point dimension differs from polytope");
    }
    let cand = support_candidates(poly, x);
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << cand.len()) {
        let subset: Vec<usize> = (0..cand.len())
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| cand[b])
            .collect();
        let Some((t, mut weights)) = max_min_weight(poly, &subset, x) else {
            continue;
        };
        if t < SUPPORT_TOLERANCE {
            continue;
        }
        polish(poly, &subset, x, &mut weights);
        let sum: f64 = weights.iter().sum();
        let err = (reconstruct(poly, &subset, &weights) - x).amax();
        let min_w = weights.iter().cloned().fold(f64::INFINITY, f64::min);
        if err > RECONSTRUCTION_TOLERANCE || (sum - 1.0).abs() > 1e-10 || min_w < SUPPORT_TOLERANCE {
            log::debug!("support {subset:?} rejected after polishing (err {err:e}, min {min_w:e})");
            continue;
        }
        out.push(ProperSupport {
            weights: subset.iter().copied().zip(weights).collect(),
            atom_indices: subset,
        });
    }
    if out.is_empty() {
        return structural("point has no proper support; is it inside the polytope?");
    }
    out.sort_by(|a, b| a.atom_indices.cmp(&b.atom_indices));
    Ok(out)
}

/// Inclusion-minimal proper supports of `x`. Both pyramidal width formulas
/// are monotone under enlarging a support, so the search only needs these.
/// Minimal supports are affinely independent, which bounds their size by the
/// affine dimension plus one.
fn minimal_proper_supports(x: &RealVector, poly: &VPolytope) -> Vec<Vec<usize>> {
    let cand = support_candidates(poly, x);
    let max_size = (poly.affine_dim() + 1).min(cand.len());
    let slack = RECONSTRUCTION_TOLERANCE;
    let mut found: Vec<u32> = Vec::new();
    for size in 1..=max_size {
        for mask in 1u32..(1u32 << cand.len()) {
            if mask.count_ones() as usize != size || found.iter().any(|f| mask & f == *f) {
                continue;
            }
            let subset: Vec<usize> = (0..cand.len())
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| cand[b])
                .collect();
            // bounding-box test before the LP
            let outside = (0..x.len()).any(|r| {
                let (lo, hi) = subset.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let c = poly.vertices()[i][r];
                    (lo.min(c), hi.max(c))
                });
                x[r] < lo - slack || x[r] > hi + slack
            });
            if outside {
                continue;
            }
            if let Some((t, _)) = max_min_weight(poly, &subset, x) {
                if t >= SUPPORT_TOLERANCE {
                    found.push(mask);
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = found
        .iter()
        .map(|&mask| (0..cand.len()).filter(|b| mask & (1 << b) != 0).map(|b| cand[b]).collect())
        .collect();
    out.sort();
    out
}

/// `argmax_{v ∈ S} ⟨grad, v⟩` with the lowest index on ties.
fn support_away(poly: &VPolytope, support: &[usize], grad: &RealVector) -> (usize, f64) {
    let mut best = (support[0], grad.dot(&poly.vertices()[support[0]]));
    for &i in &support[1..] {
        let val = grad.dot(&poly.vertices()[i]);
        if val > best.1 {
            best = (i, val);
        }
    }
    best
}

fn select_worst(poly: &VPolytope, supports: &[ProperSupport], grad: &RealVector) -> (usize, f64) {
    let mut best: Option<(usize, f64)> = None;
    for s in supports {
        let (i, val) = support_away(poly, &s.atom_indices, grad);
        best = match best {
            Some((bi, bv)) if bv < val || (bv == val && bi <= i) => Some((bi, bv)),
            _ => Some((i, val)),
        };
    }
    best.expect("supports are nonempty")
}

/// Over all proper supports `S` of `x`, the away vertex `argmax_{v∈S}⟨grad, v⟩`
/// with the smallest inner product.
pub fn worst_case_away_vertex(grad: &RealVector, x: &RealVector, poly: &VPolytope) -> Result<OracleAnswer> {
    if grad.len() != poly.dim() {
        return structural("gradient dimension differs from polytope");
    }
    let supports = enumerate_proper_supports(x, poly)?;
    let (i, val) = select_worst(poly, &supports, grad);
    Ok(OracleAnswer {
        atom_index: i,
        vertex: poly.vertices()[i].clone(),
        inner_product: val,
    })
}

/// `⟨grad, v_f(x)⟩` without enumerating supports: the smallest threshold `τ`
/// such that `x ∈ conv{v : ⟨grad, v⟩ ≤ τ}`, found by bisection over the sorted
/// candidate values with one LP per probe.
pub fn worst_case_away_value(grad: &RealVector, x: &RealVector, poly: &VPolytope) -> Result<f64> {
    check_cap(poly)?;
    let cand = support_candidates(poly, x);
    let mut vals: Vec<(f64, usize)> = cand.iter().map(|&i| (grad.dot(&poly.vertices()[i]), i)).collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let member = |len: usize| -> bool {
        // extend the prefix over ties so thresholds stay well defined
        let mut end = len;
        while end < vals.len() && vals[end].0 == vals[len - 1].0 {
            end += 1;
        }
        let subset: Vec<usize> = vals[..end].iter().map(|p| p.1).collect();
        max_min_weight(poly, &subset, x).is_some()
    };
    if !member(vals.len()) {
        return structural("point lies outside the polytope");
    }
    let (mut lo, mut hi) = (1, vals.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if member(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(vals[lo - 1].0)
}

/// Extent of `points` along `d / ‖d‖`.
pub fn directional_width(points: &[RealVector], d: &RealVector) -> Result<f64> {
    let norm = d.norm();
    if !(norm > 0.0) {
        return structural("directional width needs a nonzero direction");
    }
    if points.is_empty() {
        return structural("directional width of an empty set");
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let v = d.dot(p) / norm;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(hi - lo)
}

/// `argmax_v ⟨d, v⟩` over all vertices, lowest index on ties.
fn farthest_vertex(poly: &VPolytope, d: &RealVector) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in poly.vertices().iter().enumerate() {
        let val = d.dot(v);
        if val > best_val {
            best = i;
            best_val = val;
        }
    }
    best
}

/// Pyramidal directional width from precomputed supports, evaluated both by
/// definition and via `⟨d̂, s − v(x, d)⟩`; errors if the two disagree.
fn pdirw_with_supports(poly: &VPolytope, supports: &[ProperSupport], d: &RealVector) -> Result<f64> {
    let norm = d.norm();
    if !(norm > 0.0) {
        return structural("pyramidal width needs a nonzero direction");
    }
    let s = farthest_vertex(poly, d);
    let mut by_definition = f64::INFINITY;
    for sup in supports {
        let mut pts: Vec<RealVector> = sup.atom_indices.iter().map(|&i| poly.vertices()[i].clone()).collect();
        pts.push(poly.vertices()[s].clone());
        by_definition = by_definition.min(directional_width(&pts, d)?);
    }
    let neg = -d;
    let (v, _) = select_worst(poly, supports, &neg);
    let by_identity = d.dot(&(&poly.vertices()[s] - &poly.vertices()[v])) / norm;
    if (by_definition - by_identity).abs() > IDENTITY_TOLERANCE * (1.0 + by_definition.abs()) {
        return Err(Error::Numeric(format!(
            "pyramidal width formulas disagree: {by_definition} vs {by_identity}"
        )));
    }
    Ok(by_definition)
}

/// Fast path used inside the width search: same value as
/// [`pdirw_with_supports`] with the identity only.
fn pdirw_identity(vertices: &[RealVector], supports: &[Vec<usize>], d: &RealVector) -> f64 {
    let norm = d.norm();
    let top = vertices.iter().map(|v| d.dot(v)).fold(f64::NEG_INFINITY, f64::max);
    let low = supports
        .iter()
        .map(|s| s.iter().map(|&i| d.dot(&vertices[i])).fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max);
    (top - low) / norm
}

/// `min_{S ∈ S_x} dirW(S ∪ {s(D, d)}, d)`.
pub fn pyramidal_dir_width(poly: &VPolytope, d: &RealVector, x: &RealVector) -> Result<f64> {
    if d.len() != poly.dim() {
        return structural("direction dimension differs from polytope");
    }
    let supports = enumerate_proper_supports(x, poly)?;
    pdirw_with_supports(poly, &supports, d)
}

/// Result of the pyramidal width search; `value` is an upper bound on the
/// true infimum.
#[derive(Debug, Clone, PartialEq)]
pub struct PyramidalWidthEstimate {
    pub value: f64,
    pub faces: usize,
    pub base_points: usize,
    pub directions_evaluated: usize,
    /// Vertex indices of the face, the base point and direction attaining `value`.
    pub argmin_face: Vec<usize>,
    pub argmin_point: RealVector,
    pub argmin_direction: RealVector,
}

/// Base points for one face, with exact duplicates removed (distinct vertex
/// subsets of a box often share a barycenter).
fn base_points(face: &VPolytope) -> Vec<RealVector> {
    let mut pts = candidate_base_points(face);
    let mut seen = std::collections::BTreeSet::new();
    pts.retain(|p| seen.insert(p.iter().map(|c| c.to_bits()).collect::<Vec<u64>>()));
    pts
}

fn candidate_base_points(face: &VPolytope) -> Vec<RealVector> {
    let m = face.num_vertices();
    let vs = face.vertices();
    if m <= FULL_BASE_POINT_CAP {
        (1u32..(1 << m))
            .map(|mask| {
                let idx: Vec<usize> = (0..m).filter(|b| mask & (1 << b) != 0).collect();
                idx.iter().fold(DVector::zeros(face.dim()), |acc, &i| acc + &vs[i]) / idx.len() as f64
            })
            .collect()
    } else {
        let mut pts: Vec<RealVector> = vs.to_vec();
        for i in 0..m {
            for j in (i + 1)..m {
                pts.push((&vs[i] + &vs[j]) * 0.5);
            }
        }
        pts.push(face.barycenter());
        pts
    }
}

struct Search<'a> {
    vertices: &'a [RealVector],
    supports: Vec<Vec<usize>>,
    generators: Vec<RealVector>,
    best: f64,
    best_dir: Option<RealVector>,
    evaluated: usize,
}

impl Search<'_> {
    fn combine(&self, lambda: &[f64]) -> RealVector {
        let mut d = DVector::zeros(self.generators[0].len());
        for (g, l) in self.generators.iter().zip(lambda) {
            if *l != 0.0 {
                d += g * *l;
            }
        }
        d
    }

    fn eval(&mut self, lambda: &[f64]) -> f64 {
        let d = self.combine(lambda);
        if d.norm() <= 1e-12 {
            return f64::INFINITY;
        }
        self.evaluated += 1;
        let w = pdirw_identity(self.vertices, &self.supports, &d);
        if w < self.best {
            self.best = w;
            self.best_dir = Some(d);
        }
        w
    }

    /// Coordinate pattern search on the cone weights.
    fn refine(&mut self, start: Vec<f64>, budget: usize) {
        let mut lambda = start;
        let mut cur = self.eval(&lambda);
        let mut step = 0.5 * lambda.iter().cloned().fold(0.0, f64::max).max(1e-3);
        let mut used = 0;
        while step > 1e-9 && used < budget {
            let mut improved = false;
            for i in 0..lambda.len() {
                for sign in [1.0, -1.0] {
                    let mut trial = lambda.clone();
                    trial[i] = (trial[i] + sign * step).max(0.0);
                    used += 1;
                    let w = self.eval(&trial);
                    if w < cur - 1e-15 {
                        cur = w;
                        lambda = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
}

/// Upper bound on the pyramidal width: minimum pyramidal directional width
/// over every face, a set of base points per face, and directions in the
/// feasible cone at each base point. `directions_per_face` random directions
/// are drawn for each (face, base point) pair, after structured ones, and the
/// best is polished by a local pattern search.
pub fn pyramidal_width_estimate(
    poly: &VPolytope,
    directions_per_face: usize,
    seed: u64,
) -> Result<PyramidalWidthEstimate> {
    check_cap(poly)?;
    if poly.affine_dim() > PYRAMIDAL_DIM_CAP {
        return Err(Error::Unsupported(format!(
            "affine dimension {} exceeds the pyramidal width cap of {PYRAMIDAL_DIM_CAP}",
            poly.affine_dim()
        )));
    }
    if poly.halfspaces().is_none() {
        return Err(Error::Unsupported("pyramidal width needs a halfspace description".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let faces = poly.faces()?;
    let mut out = PyramidalWidthEstimate {
        value: f64::INFINITY,
        faces: 0,
        base_points: 0,
        directions_evaluated: 0,
        argmin_face: Vec::new(),
        argmin_point: DVector::zeros(poly.dim()),
        argmin_direction: DVector::zeros(poly.dim()),
    };
    for face_idx in faces.iter().filter(|f| f.len() >= 2) {
        let face = poly.face(face_idx)?;
        out.faces += 1;
        for x in base_points(&face) {
            out.base_points += 1;
            let minimal = minimal_proper_supports(&x, &face);
            if minimal.is_empty() {
                return structural("base point has no proper support");
            }
            let generators: Vec<RealVector> = face
                .vertices()
                .iter()
                .map(|v| v - &x)
                .filter(|g| g.norm() > 1e-12)
                .collect();
            let k = generators.len();
            let mut search = Search {
                vertices: face.vertices(),
                supports: minimal,
                generators,
                best: f64::INFINITY,
                best_dir: None,
                evaluated: 0,
            };
            let mut best_lambda = vec![1.0; k];
            let mut best_val = f64::INFINITY;
            let mut consider = |search: &mut Search, lambda: Vec<f64>| {
                let w = search.eval(&lambda);
                if w < best_val {
                    best_val = w;
                    best_lambda = lambda;
                }
            };
            if k <= 12 {
                for mask in 1u32..(1 << k) {
                    let lambda = (0..k).map(|b| if mask & (1 << b) != 0 { 1.0 } else { 0.0 }).collect();
                    consider(&mut search, lambda);
                }
            }
            for _ in 0..directions_per_face {
                // a random exponent spreads mass between sparse and dense combinations
                let p: f64 = rng.random_range(0.5..4.0);
                let lambda: Vec<f64> = (0..k).map(|_| rng.random::<f64>().powf(p)).collect();
                consider(&mut search, lambda);
            }
            search.refine(best_lambda, 2000);
            out.directions_evaluated += search.evaluated;
            if search.best < out.value {
                // confirm the winner through the full evaluation, which checks both formulas
                let d = search.best_dir.clone().expect("a direction was evaluated");
                let supports = enumerate_proper_supports(&x, &face)?;
                let full = pdirw_with_supports(&face, &supports, &d)?;
                out.value = full;
                out.argmin_face = face_idx.clone();
                out.argmin_point = x.clone();
                out.argmin_direction = d;
            }
        }
    }
    if !out.value.is_finite() {
        return structural("polytope has no face with two or more vertices");
    }
    Ok(out)
}

/// `x + t*(xstar − x)` for the largest `t* ≥ 1` keeping the point in the polytope.
pub fn ray_boundary_intersection(x: &RealVector, xstar: &RealVector, poly: &VPolytope) -> Result<RealVector> {
    let d = xstar - x;
    if d.norm() <= 1e-14 {
        return structural("ray is degenerate: x equals xstar");
    }
    let mut t = f64::INFINITY;
    let mut tighten = |num: f64, den: f64| {
        if den > 1e-14 {
            t = t.min(num / den);
        }
    };
    match poly.kind() {
        PolytopeKind::Simplex => {
            for i in 0..x.len() {
                tighten(x[i], -d[i]);
            }
        }
        PolytopeKind::Box { lower, upper } => {
            for i in 0..x.len() {
                tighten(upper[i] - x[i], d[i]);
                tighten(x[i] - lower[i], -d[i]);
            }
        }
        _ => {
            let hs = poly.halfspaces().ok_or_else(|| {
                Error::Unsupported("ray intersection needs a halfspace description".into())
            })?;
            for h in hs {
                tighten(h.slack(x), h.normal.dot(&d));
            }
        }
    }
    if !t.is_finite() {
        return Err(Error::Numeric("ray does not leave the polytope".into()));
    }
    Ok(x + d * t.max(1.0))
}

/// Distance from `xstar` to the relative boundary, measured inside the
/// affine hull.
pub fn interior_radius(xstar: &RealVector, poly: &VPolytope) -> Result<f64> {
    let r = match poly.kind() {
        PolytopeKind::Simplex => {
            let n = xstar.len();
            if n == 1 {
                return Ok(0.0);
            }
            xstar.min() / (1.0 - 1.0 / n as f64).sqrt()
        }
        PolytopeKind::Box { lower, upper } => (0..xstar.len())
            .filter(|&i| upper[i] > lower[i])
            .map(|i| (xstar[i] - lower[i]).min(upper[i] - xstar[i]))
            .fold(f64::INFINITY, f64::min),
        _ => {
            let hs = poly.halfspaces().ok_or_else(|| {
                Error::Unsupported("interior radius needs a halfspace description".into())
            })?;
            let basis = poly.direction_basis();
            let mut r = f64::INFINITY;
            for h in hs {
                // halfspaces tight on the whole polytope describe the affine hull
                if poly.vertices().iter().all(|v| h.slack(v).abs() <= FACE_TOLERANCE) {
                    continue;
                }
                let pn = basis.tr_mul(&h.normal).norm();
                if pn > 1e-14 {
                    r = r.min(h.slack(xstar) / pn);
                }
            }
            r
        }
    };
    if !r.is_finite() {
        return structural("polytope has no relative boundary");
    }
    Ok(r.max(0.0))
}

/// `Σ wᵢ vᵢ / Σ wᵢ` for nonnegative, not necessarily normalized weights.
pub(crate) fn convex_combination(poly: &VPolytope, weights: &[f64]) -> RealVector {
    let total: f64 = weights.iter().sum();
    poly.vertices()
        .iter()
        .zip(weights)
        .fold(DVector::zeros(poly.dim()), |acc, (v, w)| acc + v * (*w / total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn v(xs: &[f64]) -> RealVector {
        DVector::from_vec(xs.to_vec())
    }

    fn sets(s: &[ProperSupport]) -> Vec<Vec<usize>> {
        s.iter().map(|p| p.atom_indices.clone()).collect()
    }

    #[test]
    fn supports_of_vertex_and_barycenter() {
        let p = VPolytope::simplex(3).unwrap();
        assert_eq!(sets(&enumerate_proper_supports(&v(&[1.0, 0.0, 0.0]), &p).unwrap()), vec![vec![0]]);
        let s = enumerate_proper_supports(&p.barycenter(), &p).unwrap();
        assert_eq!(sets(&s), vec![vec![0, 1, 2]]);
        for w in s[0].weights.values() {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn box_center_has_three_supports() {
        let p = VPolytope::cube(2, -1.0, 1.0).unwrap();
        let s = enumerate_proper_supports(&v(&[0.0, 0.0]), &p).unwrap();
        assert_eq!(sets(&s), vec![vec![0, 1, 2, 3], vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn supports_respect_cap() {
        let p = VPolytope::cube(5, 0.0, 1.0).unwrap();
        assert!(matches!(
            enumerate_proper_supports(&p.barycenter(), &p),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn worst_case_away_examples() {
        let p = VPolytope::simplex(3).unwrap();
        let a = worst_case_away_vertex(&v(&[0.3, 0.1, 0.2]), &v(&[1.0, 0.0, 0.0]), &p).unwrap();
        assert_eq!(a.atom_index, 0);

        let b = VPolytope::cube(2, -1.0, 1.0).unwrap();
        let a = worst_case_away_vertex(&v(&[1.0, 0.0]), &v(&[0.0, 0.0]), &b).unwrap();
        assert_eq!(a.inner_product, 1.0);
        assert_eq!(a.atom_index, 1);
        let a = worst_case_away_vertex(&v(&[0.0, 0.0]), &v(&[0.0, 0.0]), &b).unwrap();
        assert_eq!(a.atom_index, 0);
    }

    #[test]
    fn threshold_route_matches_enumeration() {
        let b = VPolytope::cube(3, 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let w: Vec<f64> = (0..8).map(|_| if rng.random::<f64>() < 0.5 { rng.random() } else { 0.0 }).collect();
            if w.iter().sum::<f64>() == 0.0 {
                continue;
            }
            let x = convex_combination(&b, &w);
            let g = v(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let slow = worst_case_away_vertex(&g, &x, &b).unwrap().inner_product;
            let fast = worst_case_away_value(&g, &x, &b).unwrap();
            assert!((slow - fast).abs() < 1e-12, "{slow} vs {fast}");
        }
    }

    #[test]
    fn directional_width_examples() {
        assert_eq!(directional_width(&[v(&[0.0, 0.0]), v(&[1.0, 0.0])], &v(&[1.0, 0.0])).unwrap(), 1.0);
        let sq = VPolytope::cube(2, 0.0, 1.0).unwrap();
        let w = directional_width(sq.vertices(), &v(&[1.0, 1.0])).unwrap();
        assert!((w - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(directional_width(&[v(&[3.0, 1.0])], &v(&[1.0, 2.0])).unwrap(), 0.0);
        assert!(directional_width(&[v(&[3.0, 1.0])], &v(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn pyramidal_dir_width_on_segment() {
        let p = VPolytope::simplex(2).unwrap();
        let d = v(&[-1.0, 1.0]);
        let w = pyramidal_dir_width(&p, &d, &v(&[0.5, 0.5])).unwrap();
        assert!((w - 2f64.sqrt()).abs() < 1e-12);
        let w = pyramidal_dir_width(&p, &d, &v(&[1.0, 0.0])).unwrap();
        assert!((w - 2f64.sqrt()).abs() < 1e-12);
        let w = pyramidal_dir_width(&p, &v(&[1.0, 1.0]), &v(&[0.5, 0.5])).unwrap();
        assert!(w.abs() < 1e-12);
    }

    #[test]
    fn pyramidal_width_small_cases() {
        let seg = pyramidal_width_estimate(&VPolytope::simplex(2).unwrap(), 200, 1).unwrap();
        assert!((seg.value - 2f64.sqrt()).abs() < 1e-9);
        let sq = pyramidal_width_estimate(&VPolytope::cube(2, 0.0, 1.0).unwrap(), 200, 1).unwrap();
        assert!(sq.value <= 1.0 + 1e-9);
        let again = pyramidal_width_estimate(&VPolytope::cube(2, 0.0, 1.0).unwrap(), 200, 1).unwrap();
        assert_eq!(sq, again);
    }

    #[test]
    fn ray_examples() {
        let p = VPolytope::simplex(3).unwrap();
        let s = ray_boundary_intersection(&v(&[1.0, 0.0, 0.0]), &p.barycenter(), &p).unwrap();
        assert!((s - v(&[0.0, 0.5, 0.5])).amax() < 1e-15);
        let b = VPolytope::cube(2, 0.0, 1.0).unwrap();
        let s = ray_boundary_intersection(&v(&[0.0, 0.0]), &v(&[0.25, 0.25]), &b).unwrap();
        assert!((s - v(&[1.0, 1.0])).amax() < 1e-15);
        let s = ray_boundary_intersection(&v(&[0.5, 0.5]), &v(&[1.0, 0.5]), &b).unwrap();
        assert_eq!(s, v(&[1.0, 0.5]));
        assert!(ray_boundary_intersection(&v(&[0.5, 0.5]), &v(&[0.5, 0.5]), &b).is_err());
    }

    #[test]
    fn ray_generic_matches_closed_form() {
        let p = VPolytope::simplex(3).unwrap();
        let g = p.face(&[0, 1, 2]).unwrap();
        let x = v(&[0.2, 0.5, 0.3]);
        let xs = v(&[0.3, 0.3, 0.4]);
        let a = ray_boundary_intersection(&x, &xs, &p).unwrap();
        let b = ray_boundary_intersection(&x, &xs, &g).unwrap();
        assert!((a - b).amax() < 1e-14);
        let bare = VPolytope::generic(p.vertices().to_vec(), None).unwrap();
        assert!(matches!(ray_boundary_intersection(&x, &xs, &bare), Err(Error::Unsupported(_))));
    }

    #[test]
    fn interior_radius_examples() {
        let b = VPolytope::cube(2, 0.0, 1.0).unwrap();
        assert_eq!(interior_radius(&v(&[0.5, 0.5]), &b).unwrap(), 0.5);
        assert_eq!(interior_radius(&v(&[1.0, 0.5]), &b).unwrap(), 0.0);
        let p = VPolytope::simplex(3).unwrap();
        let x = v(&[0.5, 0.3, 0.2]);
        let r = interior_radius(&x, &p).unwrap();
        // dense sampling of the boundary edges
        let mut best = f64::INFINITY;
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            for k in 0..=100_000 {
                let t = k as f64 / 100_000.0;
                let s = p.vertices()[i].clone() * t + &p.vertices()[j] * (1.0 - t);
                best = best.min((s - &x).norm());
            }
        }
        assert!((r - best).abs() < 1e-4);
        let g = p.face(&[0, 1, 2]).unwrap();
        assert!((interior_radius(&x, &g).unwrap() - r).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn supports_reconstruct_the_point(w in proptest::collection::vec(0.0f64..1.0, 4)) {
            prop_assume!(w.iter().sum::<f64>() > 1e-3);
            let p = VPolytope::cube(2, 0.0, 1.0).unwrap();
            let x = convex_combination(&p, &w);
            for s in enumerate_proper_supports(&x, &p).unwrap() {
                let total: f64 = s.weights.values().sum();
                prop_assert!((total - 1.0).abs() <= 1e-10);
                let y = s.weights.iter().fold(DVector::zeros(2), |acc, (&i, &wi)| acc + &p.vertices()[i] * wi);
                prop_assert!((y - &x).amax() <= 1e-9);
                prop_assert!(s.weights.values().all(|&wi| wi >= SUPPORT_TOLERANCE));
            }
        }

        #[test]
        fn width_formulas_agree(x0 in 0.0f64..1.0, x1 in 0.0f64..1.0, d0 in -1.0f64..1.0, d1 in -1.0f64..1.0) {
            prop_assume!(d0.abs() + d1.abs() > 1e-3);
            let p = VPolytope::cube(2, 0.0, 1.0).unwrap();
            // pdirw_with_supports errors if the definition and identity disagree
            prop_assert!(pyramidal_dir_width(&p, &v(&[d0, d1]), &v(&[x0, x1])).is_ok());
        }
    }
}
