//! Polytopes given by an explicit vertex (atom) list.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::RealVector;

const DUPLICATE_DISTANCE: f64 = 1e-12;
const HALFSPACE_TOLERANCE: f64 = 1e-10;
const RANK_TOLERANCE: f64 = 1e-10;
/// Beyond this many coordinates the l1-ball facet list (2^n halfspaces) is
/// not materialized.
const L1_HALFSPACE_DIM_CAP: usize = 12;
const BOX_DIM_CAP: usize = 16;

/// `{x : ⟨normal, x⟩ ≤ offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: RealVector,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: RealVector, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// `offset − ⟨normal, x⟩`, nonnegative inside.
    pub fn slack(&self, x: &RealVector) -> f64 {
        self.offset - self.normal.dot(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolytopeKind {
    /// The probability simplex `conv{e_1, …, e_n}`.
    Simplex,
    /// Axis-aligned box; vertex `i` takes `upper[j]` where bit `j` of `i` is set.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Unit l1 ball; vertices ordered `+e_1, −e_1, +e_2, −e_2, …`.
    L1Ball,
    Generic,
}

impl PolytopeKind {
    pub fn tag(&self) -> &'static str {
        match self {
            PolytopeKind::Simplex => "simplex",
            PolytopeKind::Box { .. } => "box",
            PolytopeKind::L1Ball => "l1ball",
            PolytopeKind::Generic => "generic",
        }
    }
}

/// `D = conv(V)` with optional halfspace description.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    vertices: Vec<RealVector>,
    kind: PolytopeKind,
    halfspaces: Option<Vec<Halfspace>>,
}

fn basis_vector(n: usize, i: usize, value: f64) -> RealVector {
    let mut e = DVector::zeros(n);
    e[i] = value;
    e
}

impl VPolytope {
    /// Generic polytope; validates the vertex list and, when given, that every
    /// vertex satisfies every halfspace.
    pub fn generic(vertices: Vec<RealVector>, halfspaces: Option<Vec<Halfspace>>) -> Result<Self> {
        let poly = Self {
            vertices,
            kind: PolytopeKind::Generic,
            halfspaces,
        };
        poly.validate()?;
        Ok(poly)
    }

    pub fn simplex(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("simplex dimension must be positive".into()));
        }
        let vertices = (0..n).map(|i| basis_vector(n, i, 1.0)).collect();
        let mut hs: Vec<Halfspace> = (0..n)
            .map(|i| Halfspace::new(basis_vector(n, i, -1.0), 0.0))
            .collect();
        hs.push(Halfspace::new(DVector::from_element(n, 1.0), 1.0));
        hs.push(Halfspace::new(DVector::from_element(n, -1.0), -1.0));
        Ok(Self {
            vertices,
            kind: PolytopeKind::Simplex,
            halfspaces: Some(hs),
        })
    }

    pub fn cube(n: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::boxed(vec![lower; n], vec![upper; n])
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = lower.len();
        if n == 0 || upper.len() != n {
            return Err(Error::Config("box bounds must be nonempty and of equal length".into()));
        }
        if n > BOX_DIM_CAP {
            return Err(Error::Unsupported(format!(
                "box with {n} coordinates has too many vertices to enumerate"
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::Config("box bounds need lower < upper, finite".into()));
        }
        let vertices = (0..1usize << n)
            .map(|mask| {
                DVector::from_iterator(
                    n,
                    (0..n).map(|j| if mask >> j & 1 == 1 { upper[j] } else { lower[j] }),
                )
            })
            .collect();
        let mut hs = Vec::with_capacity(2 * n);
        for j in 0..n {
            hs.push(Halfspace::new(basis_vector(n, j, 1.0), upper[j]));
            hs.push(Halfspace::new(basis_vector(n, j, -1.0), -lower[j]));
        }
        Ok(Self {
            vertices,
            kind: PolytopeKind::Box { lower, upper },
            halfspaces: Some(hs),
        })
    }

    pub fn l1_ball(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("l1 ball dimension must be positive".into()));
        }
        let vertices = (0..2 * n)
            .map(|i| basis_vector(n, i / 2, if i % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let halfspaces = (n <= L1_HALFSPACE_DIM_CAP).then(|| {
            (0..1usize << n)
                .map(|mask| {
                    let normal = DVector::from_iterator(
                        n,
                        (0..n).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }),
                    );
                    Halfspace::new(normal, 1.0)
                })
                .collect()
        });
        Ok(Self {
            vertices,
            kind: PolytopeKind::L1Ball,
            halfspaces,
        })
    }

    fn validate(&self) -> Result<()> {
        let Some(first) = self.vertices.first() else {
            return Err(Error::Structural("polytope needs at least one vertex".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::Structural("vertices must have positive dimension".into()));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.len() != n {
                return Err(Error::Structural(format!("vertex {i} has dimension {}", v.len())));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::Numeric(format!("vertex {i} is not finite")));
            }
        }
        for i in 0..self.vertices.len() {
            for j in (i + 1)..self.vertices.len() {
                if (&self.vertices[i] - &self.vertices[j]).norm() <= DUPLICATE_DISTANCE {
                    return Err(Error::Structural(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        if let Some(hs) = &self.halfspaces {
            for (h_idx, h) in hs.iter().enumerate() {
                if h.normal.len() != n {
                    return Err(Error::Structural(format!("halfspace {h_idx} has wrong dimension")));
                }
                for (i, v) in self.vertices.iter().enumerate() {
                    if h.slack(v) < -HALFSPACE_TOLERANCE {
                        return Err(Error::Structural(format!(
                            "vertex {i} violates halfspace {h_idx} by {:e}",
                            -h.slack(v)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[RealVector] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Result<&RealVector> {
        self.vertices.get(i).ok_or_else(|| {
            Error::Structural(format!(
                "atom index {i} out of range for {} vertices",
                self.vertices.len()
            ))
        })
    }

    pub fn kind(&self) -> &PolytopeKind {
        &self.kind
    }

    pub fn halfspaces(&self) -> Option<&[Halfspace]> {
        self.halfspaces.as_deref()
    }

    /// Membership through the halfspace description.
    pub fn contains(&self, x: &RealVector, tol: f64) -> Result<bool> {
        let hs = self.halfspaces.as_ref().ok_or_else(|| {
            Error::Unsupported("membership needs a halfspace description".into())
        })?;
        Ok(hs.iter().all(|h| h.slack(x) >= -tol))
    }

    pub fn barycenter(&self) -> RealVector {
        let mut sum = DVector::zeros(self.dim());
        for v in &self.vertices {
            sum += v;
        }
        sum / self.vertices.len() as f64
    }

    /// Largest squared Euclidean distance between two vertices.
    pub fn diameter_squared(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.vertices.len() {
            for j in (i + 1)..self.vertices.len() {
                best = best.max((&self.vertices[i] - &self.vertices[j]).norm_squared());
            }
        }
        best
    }

    /// Orthonormal basis (as columns) of the direction space `span(D − D)`.
    pub fn direction_basis(&self) -> DMatrix<f64> {
        let n = self.dim();
        let m = self.vertices.len();
        if m < 2 {
            return DMatrix::zeros(n, 0);
        }
        let v0 = &self.vertices[0];
        let diffs = DMatrix::from_fn(n, m - 1, |r, c| self.vertices[c + 1][r] - v0[r]);
        let scale = diffs.amax().max(1.0);
        let svd = diffs.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let cols: Vec<usize> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s > RANK_TOLERANCE * scale)
            .map(|(i, _)| i)
            .collect();
        DMatrix::from_fn(n, cols.len(), |r, c| u[(r, cols[c])])
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        self.direction_basis().ncols()
    }

    /// Indices of halfspaces active at `x` (within `tol`).
    pub fn active_halfspaces(&self, x: &RealVector, tol: f64) -> Option<Vec<usize>> {
        self.halfspaces.as_ref().map(|hs| {
            hs.iter()
                .enumerate()
                .filter(|(_, h)| h.slack(x).abs() <= tol)
                .map(|(i, _)| i)
                .collect()
        })
    }

    /// Vertices of the smallest face containing `x`: those active on every
    /// halfspace active at `x`. Without halfspaces, all vertices.
    pub fn minimal_face_vertices(&self, x: &RealVector, tol: f64) -> Vec<usize> {
        match (&self.halfspaces, self.active_halfspaces(x, tol)) {
            (Some(hs), Some(active)) => (0..self.vertices.len())
                .filter(|&i| {
                    active
                        .iter()
                        .all(|&h| hs[h].slack(&self.vertices[i]).abs() <= HALFSPACE_TOLERANCE)
                })
                .collect(),
            _ => (0..self.vertices.len()).collect(),
        }
    }

    /// The face spanned by `indices` as a polytope of its own. The parent's
    /// halfspaces are kept and every halfspace tight on all chosen vertices is
    /// added reversed, so the result describes exactly the face.
    pub fn face(&self, indices: &[usize]) -> Result<Self> {
        let mut vertices = Vec::with_capacity(indices.len());
        for &i in indices {
            vertices.push(self.vertex(i)?.clone());
        }
        let halfspaces = self.halfspaces.as_ref().map(|hs| {
            let mut out = hs.clone();
            for h in hs {
                if vertices.iter().all(|v| h.slack(v).abs() <= HALFSPACE_TOLERANCE) {
                    out.push(Halfspace::new(-h.normal.clone(), -h.offset));
                }
            }
            out
        });
        Self::generic(vertices, halfspaces)
    }

    /// The polytope `M⁻¹·D` with vertex order preserved; `m_inv` must be the
    /// inverse of `m`.
    pub fn linear_preimage(&self, m: &DMatrix<f64>, m_inv: &DMatrix<f64>) -> Result<Self> {
        let vertices = self.vertices.iter().map(|v| m_inv * v).collect();
        let halfspaces = self.halfspaces.as_ref().map(|hs| {
            hs.iter()
                .map(|h| Halfspace::new(m.transpose() * &h.normal, h.offset))
                .collect()
        });
        let poly = Self {
            vertices,
            kind: PolytopeKind::Generic,
            halfspaces,
        };
        // rounding in M⁻¹ can leave vertices 1e-15 outside their own facets
        poly.validate_relaxed()?;
        Ok(poly)
    }

    fn validate_relaxed(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..self.vertices.len() {
            if self.vertices[i].iter().any(|c| !c.is_finite()) || self.vertices[i].len() != n {
                return Err(Error::Numeric(format!("vertex {i} is not finite")));
            }
            for j in (i + 1)..self.vertices.len() {
                if (&self.vertices[i] - &self.vertices[j]).norm() <= DUPLICATE_DISTANCE {
                    return Err(Error::Structural(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    /// Distinct sets of vertices forming the nonempty faces of the polytope
    /// (including the polytope itself), each sorted, found by intersecting
    /// vertex sets tight on each halfspace.
    pub fn faces(&self) -> Result<Vec<Vec<usize>>> {
        let hs = self.halfspaces.as_ref().ok_or_else(|| {
            Error::Unsupported("face enumeration needs a halfspace description".into())
        })?;
        let tight: Vec<Vec<bool>> = hs
            .iter()
            .map(|h| {
                self.vertices
                    .iter()
                    .map(|v| h.slack(v).abs() <= HALFSPACE_TOLERANCE)
                    .collect()
            })
            .collect();
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(all.clone());
        let mut queue = vec![all];
        while let Some(face) = queue.pop() {
            for t in &tight {
                let sub: Vec<usize> = face.iter().copied().filter(|&i| t[i]).collect();
                if !sub.is_empty() && sub.len() < face.len() && seen.insert(sub.clone()) {
                    queue.push(sub);
                }
            }
        }
        let mut faces: Vec<Vec<usize>> = seen.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(faces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_vertices_and_halfspaces() {
        let p = VPolytope::simplex(3).unwrap();
        assert_eq!(p.num_vertices(), 3);
        assert_eq!(p.affine_dim(), 2);
        assert!(p.contains(&p.barycenter(), 1e-12).unwrap());
        assert!(!p.contains(&DVector::from_vec(vec![0.6, 0.6, -0.2]), 1e-12).unwrap());
        assert!((p.diameter_squared() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn box_vertex_order_follows_bits() {
        let p = VPolytope::cube(2, -1.0, 1.0).unwrap();
        assert_eq!(p.vertex(0).unwrap().as_slice(), &[-1.0, -1.0]);
        assert_eq!(p.vertex(1).unwrap().as_slice(), &[1.0, -1.0]);
        assert_eq!(p.vertex(2).unwrap().as_slice(), &[-1.0, 1.0]);
        assert_eq!(p.vertex(3).unwrap().as_slice(), &[1.0, 1.0]);
        assert!(p.vertex(4).is_err());
    }

    #[test]
    fn l1_ball_vertices_alternate_sign() {
        let p = VPolytope::l1_ball(2).unwrap();
        assert_eq!(p.vertex(1).unwrap().as_slice(), &[-1.0, 0.0]);
        assert_eq!(p.halfspaces().unwrap().len(), 4);
    }

    #[test]
    fn rejects_duplicates_and_violations() {
        let v = DVector::from_vec(vec![1.0, 0.0]);
        assert!(VPolytope::generic(vec![v.clone(), v.clone()], None).is_err());
        let hs = vec![Halfspace::new(DVector::from_vec(vec![1.0, 0.0]), 0.5)];
        assert!(VPolytope::generic(vec![v], Some(hs)).is_err());
        assert!(VPolytope::generic(vec![], None).is_err());
    }

    #[test]
    fn face_counts() {
        // triangle: 3 vertices + 3 edges + itself
        assert_eq!(VPolytope::simplex(3).unwrap().faces().unwrap().len(), 7);
        // tetrahedron: 2^4 − 1
        assert_eq!(VPolytope::simplex(4).unwrap().faces().unwrap().len(), 15);
        // cube: 8 + 12 + 6 + 1
        assert_eq!(VPolytope::cube(3, 0.0, 1.0).unwrap().faces().unwrap().len(), 27);
    }

    #[test]
    fn minimal_face_of_edge_point() {
        let p = VPolytope::cube(2, 0.0, 1.0).unwrap();
        let x = DVector::from_vec(vec![0.5, 0.0]);
        assert_eq!(p.minimal_face_vertices(&x, 1e-9), vec![0, 1]);
        let c = DVector::from_vec(vec![0.5, 0.5]);
        assert_eq!(p.minimal_face_vertices(&c, 1e-9), vec![0, 1, 2, 3]);
    }

    #[test]
    fn face_polytope_is_exact() {
        let p = VPolytope::simplex(3).unwrap();
        let edge = p.face(&[0, 1]).unwrap();
        assert_eq!(edge.affine_dim(), 1);
        assert!(!edge.contains(&p.barycenter(), 1e-12).unwrap());
        assert!(edge.contains(&DVector::from_vec(vec![0.5, 0.5, 0.0]), 1e-12).unwrap());
    }
}
