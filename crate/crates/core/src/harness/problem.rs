//! Problem families with known optima, reference solves, and JSON I/O.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::active_set::ActiveSet;
use crate::afw::solve_afw;
use crate::constants::ConstantEstimates;
use crate::error::{config, Error, Result};
use crate::objective::{Objective, QuadraticObjective};
use crate::oracles::fw_gap;
use crate::polytope::{Halfspace, PolytopeKind, VPolytope};
use crate::trace::SolverConfig;
use crate::RealVector;

/// `xstar` must satisfy `fw_gap(xstar) ≤` this.
pub const OPTIMALITY_TOLERANCE: f64 = 1e-9;
/// Box families stay within the vertex budget `2^n ≤ 128`.
pub const BOX_FAMILY_DIM_CAP: usize = 7;
const LOCATION_TOLERANCE: f64 = 1e-9;
const FISTA_MAX_ITERS: usize = 200_000;
const REFERENCE_GAP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimumLocation {
    Interior,
    Face,
    Vertex,
}

impl OptimumLocation {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimumLocation::Interior => "interior",
            OptimumLocation::Face => "face",
            OptimumLocation::Vertex => "vertex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    SimplexInterior,
    SimplexFace,
    SimplexVertex,
    BoxInterior,
    BoxFace,
    RandomPsdSimplex,
    RandomPsdBox,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::SimplexInterior,
        Family::SimplexFace,
        Family::SimplexVertex,
        Family::BoxInterior,
        Family::BoxFace,
        Family::RandomPsdSimplex,
        Family::RandomPsdBox,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::SimplexInterior => "simplex_interior",
            Family::SimplexFace => "simplex_face",
            Family::SimplexVertex => "simplex_vertex",
            Family::BoxInterior => "box_interior",
            Family::BoxFace => "box_face",
            Family::RandomPsdSimplex => "random_psd_simplex",
            Family::RandomPsdBox => "random_psd_box",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown problem family '{s}'")))
    }
}

/// A quadratic over a polytope together with its precomputed optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub poly: VPolytope,
    pub objective: QuadraticObjective,
    pub xstar: RealVector,
    pub fstar: f64,
    pub optimum_location: OptimumLocation,
}

impl ProblemSpec {
    /// Builds a spec, solving for the optimum when `xstar` is not supplied and
    /// verifying it either way.
    pub fn new(
        name: impl Into<String>,
        poly: VPolytope,
        objective: QuadraticObjective,
        xstar: Option<RealVector>,
    ) -> Result<Self> {
        if objective.dim() != poly.dim() {
            return Err(Error::Structural("objective and polytope dimensions differ".into()));
        }
        let xstar = match xstar {
            Some(x) => x,
            None => solve_reference(&objective, &poly)?,
        };
        let gap = fw_gap(&objective.gradient(&xstar), &xstar, &poly)?;
        if gap > OPTIMALITY_TOLERANCE {
            return Err(Error::Numeric(format!("reference optimum has FW gap {gap:e}")));
        }
        let optimum_location = classify(&poly, &xstar);
        Ok(Self {
            name: name.into(),
            fstar: objective.value(&xstar),
            poly,
            objective,
            xstar,
            optimum_location,
        })
    }

    /// Index of the vertex with the largest objective value (lowest index on
    /// ties): the default starting atom.
    pub fn start_vertex(&self) -> usize {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, v) in self.poly.vertices().iter().enumerate() {
            let val = self.objective.value(v);
            if val > best_val {
                best = i;
                best_val = val;
            }
        }
        best
    }

    pub fn start(&self) -> ActiveSet {
        ActiveSet::vertex(self.start_vertex())
    }

    pub fn exact_constants(&self) -> ConstantEstimates {
        let (cf, cfm, cfa) = crate::constants::curvature_quadratic_exact(self.objective.a(), &self.poly);
        ConstantEstimates::from_curvature(cf, cfm, cfa)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: ProblemFile = serde_json::from_str(&text)?;
        file.into_spec()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&ProblemFile::from_spec(self))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn classify(poly: &VPolytope, xstar: &RealVector) -> OptimumLocation {
    if poly.halfspaces().is_none() {
        log::warn!("no halfspace description; optimum location reported as face");
        return OptimumLocation::Face;
    }
    let face = poly.minimal_face_vertices(xstar, LOCATION_TOLERANCE);
    if face.len() == 1 {
        OptimumLocation::Vertex
    } else if face.len() == poly.num_vertices() {
        OptimumLocation::Interior
    } else {
        OptimumLocation::Face
    }
}

/// Parses `family:<name>:<dim>:<seed>`.
pub fn parse_family_spec(s: &str) -> Result<(Family, usize, u64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 || parts[0] != "family" {
        return config(format!("expected family:<name>:<dim>:<seed>, got '{s}'"));
    }
    let family = parts[1].parse()?;
    let dim = parts[2]
        .parse()
        .map_err(|_| Error::Config(format!("bad dimension '{}'", parts[2])))?;
    let seed = parts[3]
        .parse()
        .map_err(|_| Error::Config(format!("bad seed '{}'", parts[3])))?;
    Ok((family, dim, seed))
}

/// A `family:…` descriptor or a path to a problem JSON file.
pub fn load_problem(descriptor: &str) -> Result<ProblemSpec> {
    if descriptor.starts_with("family:") {
        let (family, dim, seed) = parse_family_spec(descriptor)?;
        generate_problem(family, dim, seed)
    } else {
        ProblemSpec::load(Path::new(descriptor))
    }
}

/// `simplex:<d>`, `box:<d>` (unit cube) or `file:<path>`, where the file holds
/// either a problem or a bare polytope description.
pub fn load_polytope(descriptor: &str) -> Result<VPolytope> {
    let (kind, arg) = descriptor
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("expected simplex:d, box:d or file:path, got '{descriptor}'")))?;
    let dim = || -> Result<usize> { arg.parse().map_err(|_| Error::Config(format!("bad dimension '{arg}'"))) };
    match kind {
        "simplex" => VPolytope::simplex(dim()?),
        "box" => VPolytope::cube(dim()?, 0.0, 1.0),
        "file" => {
            let text = std::fs::read_to_string(arg)?;
            if let Ok(problem) = serde_json::from_str::<ProblemFile>(&text) {
                return problem.polytope.build();
            }
            serde_json::from_str::<PolytopeFile>(&text)?.build()
        }
        _ => config(format!("unknown polytope kind '{kind}'")),
    }
}

/// Random symmetric positive definite quadratic: `A = GᵀG/n + 0.1·I` with
/// Gaussian `G`, Gaussian `b`.
pub fn random_psd_quadratic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QuadraticObjective {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let gtg = g.transpose() * &g;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = gtg[(i, j)] / n as f64 + if i == j { 0.1 } else { 0.0 };
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let b = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    QuadraticObjective::new(a, b, 0.0).expect("construction is symmetric positive definite")
}

/// Builds a member of `family` in dimension `n`.
pub fn generate_problem(family: Family, n: usize, seed: u64) -> Result<ProblemSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = format!("{family}-n{n}-s{seed}");
    let is_box = matches!(family, Family::BoxInterior | Family::BoxFace | Family::RandomPsdBox);
    if is_box && n > BOX_FAMILY_DIM_CAP {
        return config(format!("{family} supports n ≤ {BOX_FAMILY_DIM_CAP}, got {n}"));
    }
    let min_dim = match family {
        Family::SimplexFace => 3,
        Family::SimplexInterior | Family::SimplexVertex | Family::RandomPsdSimplex => 2,
        _ => 1,
    };
    if n < min_dim {
        return config(format!("{family} needs n ≥ {min_dim}, got {n}"));
    }
    let (poly, objective, xstar) = match family {
        Family::SimplexInterior => {
            let c = if n == 3 {
                DVector::from_vec(vec![0.5, 0.3, 0.2])
            } else {
                let w = DVector::from_fn(n, |_, _| rng.random_range(1.0..2.0));
                let s = w.sum();
                w / s
            };
            (VPolytope::simplex(n)?, QuadraticObjective::squared_distance(&c), Some(c))
        }
        Family::SimplexFace => {
            let mut c = DVector::from_element(n, -0.2);
            c[0] = 0.6;
            c[1] = 0.6;
            let mut xs = DVector::zeros(n);
            xs[0] = 0.5;
            xs[1] = 0.5;
            (VPolytope::simplex(n)?, QuadraticObjective::squared_distance(&c), Some(xs))
        }
        Family::SimplexVertex => {
            let mut c = DVector::zeros(n);
            c[0] = 2.0;
            let mut xs = DVector::zeros(n);
            xs[0] = 1.0;
            (VPolytope::simplex(n)?, QuadraticObjective::squared_distance(&c), Some(xs))
        }
        Family::BoxInterior => {
            let c = DVector::from_fn(n, |_, _| rng.random_range(0.2..0.8));
            (VPolytope::cube(n, 0.0, 1.0)?, QuadraticObjective::squared_distance(&c), Some(c))
        }
        Family::BoxFace => {
            let mut c = DVector::from_fn(n, |_, _| rng.random_range(0.2..0.8));
            c[0] = 1.5;
            let mut xs = c.clone();
            xs[0] = 1.0;
            (VPolytope::cube(n, 0.0, 1.0)?, QuadraticObjective::squared_distance(&c), Some(xs))
        }
        Family::RandomPsdSimplex => (VPolytope::simplex(n)?, random_psd_quadratic(n, &mut rng), None),
        Family::RandomPsdBox => (VPolytope::cube(n, 0.0, 1.0)?, random_psd_quadratic(n, &mut rng), None),
    };
    ProblemSpec::new(name, poly, objective, xstar)
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(y: &RealVector) -> RealVector {
    let mut u: Vec<f64> = y.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            tau = t;
        }
    }
    y.map(|v| (v - tau).max(0.0))
}

fn project_box(y: &RealVector, lower: &[f64], upper: &[f64]) -> RealVector {
    DVector::from_fn(y.len(), |i, _| y[i].clamp(lower[i], upper[i]))
}

fn project_l1(y: &RealVector) -> RealVector {
    if y.lp_norm(1) <= 1.0 {
        return y.clone();
    }
    let w = project_simplex(&y.abs());
    DVector::from_fn(y.len(), |i, _| w[i] * y[i].signum())
}

fn projection(poly: &VPolytope) -> Option<Box<dyn Fn(&RealVector) -> RealVector + '_>> {
    match poly.kind() {
        PolytopeKind::Simplex => Some(Box::new(project_simplex)),
        PolytopeKind::Box { lower, upper } => Some(Box::new(move |y| project_box(y, lower, upper))),
        PolytopeKind::L1Ball => Some(Box::new(project_l1)),
        PolytopeKind::Generic => None,
    }
}

fn scaled_identity(a: &DMatrix<f64>) -> Option<f64> {
    let alpha = a[(0, 0)];
    let is = (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| a[(i, j)] == if i == j { alpha } else { 0.0 }));
    (is && alpha > 0.0).then_some(alpha)
}

/// Minimizer of a quadratic over the polytope: closed-form projection for
/// `αI` Hessians, accelerated projected gradient for the structured kinds,
/// away-steps FW for generic polytopes, then a KKT polish on the active face.
pub fn solve_reference(quad: &QuadraticObjective, poly: &VPolytope) -> Result<RealVector> {
    let gap_of = |x: &RealVector| fw_gap(&quad.gradient(x), x, poly);
    let x = match projection(poly) {
        Some(proj) => {
            if let Some(alpha) = scaled_identity(quad.a()) {
                proj(&(-quad.b() / alpha))
            } else {
                let l = quad.lipschitz().max(1e-12);
                let mut x = proj(&poly.barycenter());
                let mut y = x.clone();
                let mut t = 1.0f64;
                for it in 0..FISTA_MAX_ITERS {
                    let xn = proj(&(&y - quad.gradient(&y) / l));
                    let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
                    y = &xn + (&xn - &x) * ((t - 1.0) / tn);
                    x = xn;
                    t = tn;
                    if it % 100 == 0 && gap_of(&x)? <= REFERENCE_GAP {
                        break;
                    }
                }
                x
            }
        }
        None => {
            let cfg = SolverConfig {
                max_iters: 100_000,
                gap_tolerance: REFERENCE_GAP,
                ..SolverConfig::default()
            };
            let (cf, cfm, cfa) = crate::constants::curvature_quadratic_exact(quad.a(), poly);
            let k = ConstantEstimates::from_curvature(cf, cfm, cfa);
            let tr = solve_afw(quad, poly, &ActiveSet::vertex(0), &cfg, &k)?;
            tr.last().expect("trace is nonempty").x.clone()
        }
    };
    let polished = kkt_polish(quad, poly, &x);
    match polished {
        Some(p) if gap_of(&p)? <= gap_of(&x)? => Ok(p),
        _ => Ok(x),
    }
}

/// Solves the equality-constrained problem on the halfspaces active at `x`.
fn kkt_polish(quad: &QuadraticObjective, poly: &VPolytope, x: &RealVector) -> Option<RealVector> {
    let hs: &[Halfspace] = poly.halfspaces()?;
    let active: Vec<&Halfspace> = hs.iter().filter(|h| h.slack(x).abs() <= 1e-9).collect();
    let n = x.len();
    let m = active.len();
    let mut k = DMatrix::zeros(n + m, n + m);
    let mut rhs = DVector::zeros(n + m);
    k.view_mut((0, 0), (n, n)).copy_from(quad.a());
    for (r, h) in active.iter().enumerate() {
        for c in 0..n {
            k[(n + r, c)] = h.normal[c];
            k[(c, n + r)] = h.normal[c];
        }
        rhs[n + r] = h.offset;
    }
    rhs.rows_mut(0, n).copy_from(&(-quad.b()));
    let sol = k.svd(true, true).solve(&rhs, 1e-12).ok()?;
    let p = sol.rows(0, n).into_owned();
    hs.iter().all(|h| h.slack(&p) >= -1e-12).then_some(p)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfspaceFile {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolytopeFile {
    Simplex {
        dim: usize,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    L1Ball {
        dim: usize,
    },
    Generic {
        vertices: Vec<Vec<f64>>,
        #[serde(default)]
        halfspaces: Option<Vec<HalfspaceFile>>,
    },
}

impl PolytopeFile {
    pub fn build(&self) -> Result<VPolytope> {
        match self {
            PolytopeFile::Simplex { dim } => VPolytope::simplex(*dim),
            PolytopeFile::Box { lower, upper } => VPolytope::boxed(lower.clone(), upper.clone()),
            PolytopeFile::L1Ball { dim } => VPolytope::l1_ball(*dim),
            PolytopeFile::Generic { vertices, halfspaces } => VPolytope::generic(
                vertices.iter().map(|v| DVector::from_vec(v.clone())).collect(),
                halfspaces.as_ref().map(|hs| {
                    hs.iter()
                        .map(|h| Halfspace::new(DVector::from_vec(h.normal.clone()), h.offset))
                        .collect()
                }),
            ),
        }
    }

    pub fn from_polytope(poly: &VPolytope) -> Self {
        match poly.kind() {
            PolytopeKind::Simplex => PolytopeFile::Simplex { dim: poly.dim() },
            PolytopeKind::Box { lower, upper } => PolytopeFile::Box {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            PolytopeKind::L1Ball => PolytopeFile::L1Ball { dim: poly.dim() },
            PolytopeKind::Generic => PolytopeFile::Generic {
                vertices: poly.vertices().iter().map(|v| v.iter().copied().collect()).collect(),
                halfspaces: poly.halfspaces().map(|hs| {
                    hs.iter()
                        .map(|h| HalfspaceFile {
                            normal: h.normal.iter().copied().collect(),
                            offset: h.offset,
                        })
                        .collect()
                }),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectiveFile {
    /// Row-major Hessian.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub c: f64,
}

/// On-disk problem description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub name: String,
    pub polytope: PolytopeFile,
    pub objective: ObjectiveFile,
    #[serde(default)]
    pub xstar: Option<Vec<f64>>,
}

impl ProblemFile {
    pub fn into_spec(self) -> Result<ProblemSpec> {
        let poly = self.polytope.build()?;
        let n = self.objective.b.len();
        if self.objective.a.len() != n || self.objective.a.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("objective matrix must be n×n with n = len(b)".into()));
        }
        let a = DMatrix::from_fn(n, n, |i, j| self.objective.a[i][j]);
        let quad = QuadraticObjective::new(a, DVector::from_vec(self.objective.b), self.objective.c)?;
        ProblemSpec::new(self.name, poly, quad, self.xstar.map(DVector::from_vec))
    }

    pub fn from_spec(spec: &ProblemSpec) -> Self {
        let a = spec.objective.a();
        Self {
            name: spec.name.clone(),
            polytope: PolytopeFile::from_polytope(&spec.poly),
            objective: ObjectiveFile {
                a: (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect(),
                b: spec.objective.b().iter().copied().collect(),
                c: spec.objective.c(),
            },
            xstar: Some(spec.xstar.iter().copied().collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_examples() {
        let p = generate_problem(Family::SimplexInterior, 3, 0).unwrap();
        assert_eq!(p.xstar.as_slice(), &[0.5, 0.3, 0.2]);
        assert_eq!(p.optimum_location, OptimumLocation::Interior);
        assert_eq!(p.start_vertex(), 2);

        let p = generate_problem(Family::SimplexFace, 3, 0).unwrap();
        assert_eq!(p.xstar.as_slice(), &[0.5, 0.5, 0.0]);
        assert_eq!(p.optimum_location, OptimumLocation::Face);
        assert_eq!(p.xstar.iter().filter(|v| **v > 0.0).count(), 2);
        assert_eq!(p.start_vertex(), 2);

        let p = generate_problem(Family::SimplexVertex, 3, 0).unwrap();
        assert_eq!(p.xstar.as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(p.optimum_location, OptimumLocation::Vertex);
    }

    #[test]
    fn projections_agree_with_stated_optima() {
        for n in [3, 5, 10] {
            let p = generate_problem(Family::SimplexFace, n, 0).unwrap();
            let c = -p.objective.b();
            assert!((project_simplex(&c) - &p.xstar).amax() < 1e-15);
            let p = generate_problem(Family::SimplexInterior, n, 4).unwrap();
            assert!((p.xstar.sum() - 1.0).abs() < 1e-12);
            assert_eq!(p.optimum_location, OptimumLocation::Interior);
        }
        let p = generate_problem(Family::BoxFace, 3, 2).unwrap();
        assert_eq!(p.optimum_location, OptimumLocation::Face);
        assert_eq!(p.xstar[0], 1.0);
    }

    #[test]
    fn random_families_verify_their_optimum() {
        for seed in 0..5 {
            for fam in [Family::RandomPsdSimplex, Family::RandomPsdBox] {
                let p = generate_problem(fam, 3, seed).unwrap();
                let g = fw_gap(&p.objective.gradient(&p.xstar), &p.xstar, &p.poly).unwrap();
                assert!(g <= 1e-11, "{fam} seed {seed}: gap {g:e}");
            }
        }
    }

    #[test]
    fn generic_reference_matches_projection() {
        let s = VPolytope::simplex(4).unwrap();
        let g = s.face(&[0, 1, 2, 3]).unwrap();
        let c = DVector::from_vec(vec![0.9, 0.4, -0.3, 0.1]);
        let q = QuadraticObjective::squared_distance(&c);
        let a = solve_reference(&q, &s).unwrap();
        let b = solve_reference(&q, &g).unwrap();
        assert!((a - b).amax() < 1e-9);
    }

    #[test]
    fn bad_requests_are_config_errors() {
        assert!(matches!(generate_problem(Family::BoxInterior, 9, 0), Err(Error::Config(_))));
        assert!(matches!(generate_problem(Family::SimplexFace, 2, 0), Err(Error::Config(_))));
        assert!("simplex_edge".parse::<Family>().is_err());
        assert!(parse_family_spec("family:simplex_face:x:0").is_err());
        assert_eq!(parse_family_spec("family:box_face:3:7").unwrap(), (Family::BoxFace, 3, 7));
    }

    #[test]
    fn json_round_trip() {
        let dir = std::env::temp_dir().join(format!("awayfw-problem-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("p.json");
        let p = generate_problem(Family::RandomPsdBox, 3, 1).unwrap();
        p.save(&path).unwrap();
        let q = ProblemSpec::load(&path).unwrap();
        assert_eq!(p, q);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn polytope_descriptors() {
        assert_eq!(load_polytope("simplex:4").unwrap().num_vertices(), 4);
        assert_eq!(load_polytope("box:3").unwrap().num_vertices(), 8);
        assert!(load_polytope("cube:3").is_err());
        assert!(load_polytope("simplex:x").is_err());
        let dir = std::env::temp_dir().join(format!("awayfw-poly-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let bare = dir.join("poly.json");
        std::fs::write(&bare, r#"{"kind":"generic","vertices":[[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(load_polytope(&format!("file:{}", bare.display())).unwrap().num_vertices(), 3);
        let prob = dir.join("problem.json");
        generate_problem(Family::SimplexFace, 3, 0).unwrap().save(&prob).unwrap();
        assert_eq!(load_polytope(&format!("file:{}", prob.display())).unwrap().num_vertices(), 3);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
