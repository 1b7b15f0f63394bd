//! Affine-invariant curvature and strong-convexity constants, their sampled
//! estimates, derived rate constants, and the inequalities tying them to
//! Euclidean quantities.
//!
//! Sup-type constants (`C_f`) estimated by sampling are lower bounds on the
//! truth; inf-type constants (`μ_f^FW`, `μ_f^A`, pyramidal width) are upper
//! bounds. Every estimate carries its [`Provenance`].

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{config, Error, Result};
use crate::geometry::{interior_radius, pyramidal_width_estimate, ray_boundary_intersection, worst_case_away_value};
use crate::objective::{Objective, QuadraticObjective};
use crate::oracles::lmo;
use crate::polytope::VPolytope;
use crate::RealVector;

/// Number of step sizes in the log grid `[1e-2, 1]`.
const GAMMA_GRID: usize = 9;
const DIRICHLET_ALPHA: f64 = 0.3;
/// Probability that a sampled base point is a vertex.
const VERTEX_PROBABILITY: f64 = 0.25;
/// Fraction of `μ` samples drawn close to the optimum.
const NEAR_OPTIMUM_PROBABILITY: f64 = 0.25;
/// Tolerance on "`x*` optimal" in the `μ_f^FW` precondition.
const OPTIMALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Not computed.
    Unset,
    Exact,
    /// Sampled sup: the true value is at least this.
    SampledLowerBound { samples: usize },
    /// Sampled inf: the true value is at most this.
    SampledUpperBound { samples: usize },
    /// A proven lower bound on the true value (e.g. `μ·δ²`).
    CertifiedLowerBound,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Unset => f.write_str("unset"),
            Provenance::Exact => f.write_str("exact"),
            Provenance::SampledLowerBound { samples } => write!(f, "sampled_lower(n={samples})"),
            Provenance::SampledUpperBound { samples } => write!(f, "sampled_upper(n={samples})"),
            Provenance::CertifiedLowerBound => f.write_str("certified_lower"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimates {
    pub cf: f64,
    pub cf_minus: f64,
    pub cf_away: f64,
    pub mu_fw: f64,
    pub mu_away: f64,
    pub delta: f64,
    pub pdirw: f64,
    pub rho_fw: f64,
    pub rho_away: f64,
    /// Keyed by the field names above.
    pub provenance: BTreeMap<&'static str, Provenance>,
}

pub const CONSTANT_NAMES: [&str; 9] =
    ["cf", "cf_minus", "cf_away", "mu_fw", "mu_away", "delta", "pdirw", "rho_fw", "rho_away"];

impl ConstantEstimates {
    /// Only curvature known, taken as exact; everything else unset (zero).
    pub fn from_curvature(cf: f64, cf_minus: f64, cf_away: f64) -> Self {
        let mut provenance: BTreeMap<_, _> = CONSTANT_NAMES.iter().map(|&n| (n, Provenance::Unset)).collect();
        for n in ["cf", "cf_minus", "cf_away"] {
            provenance.insert(n, Provenance::Exact);
        }
        Self {
            cf,
            cf_minus,
            cf_away,
            mu_fw: 0.0,
            mu_away: 0.0,
            delta: 0.0,
            pdirw: 0.0,
            rho_fw: 0.0,
            rho_away: 0.0,
            provenance,
        }
    }

    pub fn values(&self) -> [f64; 9] {
        [
            self.cf,
            self.cf_minus,
            self.cf_away,
            self.mu_fw,
            self.mu_away,
            self.delta,
            self.pdirw,
            self.rho_fw,
            self.rho_away,
        ]
    }

    pub fn provenance_of(&self, name: &str) -> Provenance {
        self.provenance.get(name).copied().unwrap_or(Provenance::Unset)
    }

    /// `name=provenance` pairs joined by `;`, in field order.
    pub fn provenance_flags(&self) -> String {
        CONSTANT_NAMES
            .iter()
            .map(|n| format!("{n}={}", self.provenance_of(n)))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Flat `key = value  [provenance]` block.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (n, v) in CONSTANT_NAMES.iter().zip(self.values()) {
            out.push_str(&format!("{n:<9} = {v:.12e}  [{}]\n", self.provenance_of(n)));
        }
        out
    }
}

/// Options for [`estimate_quadratic_constants`].
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub samples: usize,
    pub seed: u64,
    /// Directions per (face, base point) in the pyramidal width search;
    /// `0` skips the search.
    pub pdirw_directions: usize,
    pub nu: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            samples: 2000,
            seed: 0,
            pdirw_directions: 200,
            nu: 1.0,
        }
    }
}

/// Exact curvature constants of `½xᵀAx + bᵀx` over `poly`: the bracket in the
/// definition is `γ²/2 (s−x)ᵀA(s−x)`, maximized over vertex pairs. The
/// negative-step and away variants coincide with `C_f` by sign symmetry.
pub fn curvature_quadratic_exact(a: &DMatrix<f64>, poly: &VPolytope) -> (f64, f64, f64) {
    let vs = poly.vertices();
    let mut cf = 0.0f64;
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            let d = &vs[i] - &vs[j];
            cf = cf.max(d.dot(&(a * &d)));
        }
    }
    (cf, cf, cf)
}

fn log_gamma(k: usize) -> f64 {
    // 1e-2 … 1 evenly in log space
    10f64.powf(-2.0 + 2.0 * k as f64 / (GAMMA_GRID - 1) as f64)
}

/// `f(x + d) − f(x) − ⟨∇f(x), d⟩`. Quadratics use `½ dᵀAd`, which avoids
/// cancellation for short `d`; otherwise `None` when the difference is below
/// rounding noise.
fn remainder<O: Objective + ?Sized>(obj: &O, x: &RealVector, fx: f64, gx: &RealVector, d: &RealVector) -> Result<Option<f64>> {
    if let Some(a) = obj.hessian() {
        return Ok(Some(0.5 * d.dot(&(a * d))));
    }
    let fy = obj.value(&(x + d));
    if !fy.is_finite() {
        return Err(Error::Numeric("objective not finite at a sampled point".into()));
    }
    let lin = gx.dot(d);
    let rem = fy - fx - lin;
    let noise = 8.0 * f64::EPSILON * (fx.abs() + fy.abs() + lin.abs());
    Ok((rem.abs() > noise).then_some(rem))
}

/// `(2/γ²)(f(y) − f(x) − ⟨∇f(x), y − x⟩)` with `y = x + γ d`.
fn bracket<O: Objective + ?Sized>(obj: &O, x: &RealVector, fx: f64, gx: &RealVector, d: &RealVector, gamma: f64) -> Result<Option<f64>> {
    Ok(remainder(obj, x, fx, gx, &(d * gamma))?.map(|r| 2.0 / (gamma * gamma) * r))
}

fn evaluate<O: Objective + ?Sized>(obj: &O, x: &RealVector) -> Result<(f64, RealVector)> {
    let f = obj.value(x);
    let g = obj.gradient(x);
    if !f.is_finite() || g.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric("objective or gradient not finite at a sampled point".into()));
    }
    Ok((f, g))
}

/// Draws points of the polytope: a vertex with probability 1/4, otherwise a
/// Dirichlet(0.3) combination of all vertices.
struct PointSampler {
    rng: ChaCha8Rng,
    gamma: Gamma<f64>,
}

impl PointSampler {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            gamma: Gamma::new(DIRICHLET_ALPHA, 1.0).expect("valid shape"),
        }
    }

    fn point(&mut self, poly: &VPolytope) -> RealVector {
        let m = poly.num_vertices();
        if self.rng.random::<f64>() < VERTEX_PROBABILITY {
            return poly.vertices()[self.rng.random_range(0..m)].clone();
        }
        let mut w: Vec<f64> = (0..m).map(|_| self.gamma.sample(&mut self.rng)).collect();
        let total: f64 = w.iter().sum();
        if !(total > 0.0) {
            // every gamma draw underflowed; fall back to a vertex
            w = vec![0.0; m];
            w[self.rng.random_range(0..m)] = 1.0;
        }
        crate::geometry::convex_combination(poly, &w)
    }

    /// A point on the segment from `center` toward a random point, at a
    /// log-uniform distance fraction in `[1e-6, 1]`.
    fn near(&mut self, poly: &VPolytope, center: &RealVector) -> RealVector {
        let z = self.point(poly);
        let t = 10f64.powf(-6.0 * self.rng.random::<f64>());
        center + (z - center) * t
    }
}

/// Sampled lower bound on `C_f`: maximum bracket over `num_samples` triples
/// `(x, s, γ)` with `s` cycling through the vertices and `γ` through a log
/// grid. Sample sets are nested in `num_samples` for a fixed seed.
pub fn curvature_sampled<O: Objective + ?Sized>(obj: &O, poly: &VPolytope, num_samples: usize, seed: u64) -> Result<f64> {
    if num_samples == 0 {
        return config("curvature sampling needs at least one sample");
    }
    let mut sampler = PointSampler::new(seed);
    let m = poly.num_vertices();
    let mut best = f64::NEG_INFINITY;
    for i in 0..num_samples {
        let x = sampler.point(poly);
        let s = &poly.vertices()[i % m];
        let gamma = log_gamma(sampler.rng.random_range(0..GAMMA_GRID));
        let (fx, gx) = evaluate(obj, &x)?;
        if let Some(b) = bracket(obj, &x, fx, &gx, &(s - &x), gamma)? {
            best = best.max(b);
        }
    }
    Ok(best.max(0.0))
}

/// Sampled upper bound on `μ_f^FW`: minimum bracket along `x → s̄(x, x*)`.
/// A quarter of the base points are drawn near `x*`.
pub fn mu_fw_estimate<O: Objective + ?Sized>(
    obj: &O,
    poly: &VPolytope,
    xstar: &RealVector,
    num_samples: usize,
    seed: u64,
) -> Result<f64> {
    if num_samples == 0 {
        return config("sampling needs at least one sample");
    }
    let (_, g_star) = evaluate(obj, xstar)?;
    let s = lmo(poly, &g_star)?;
    let gap = g_star.dot(xstar) - s.inner_product;
    if gap > OPTIMALITY_TOLERANCE {
        return config(format!("xstar is not optimal: FW gap {gap:e}"));
    }
    let mut sampler = PointSampler::new(seed);
    let mut best = f64::INFINITY;
    let mut skipped = 0usize;
    for _ in 0..num_samples {
        let near = sampler.rng.random::<f64>() < NEAR_OPTIMUM_PROBABILITY;
        let x = if near { sampler.near(poly, xstar) } else { sampler.point(poly) };
        let gamma = log_gamma(sampler.rng.random_range(0..GAMMA_GRID));
        if (xstar - &x).norm() <= 1e-12 {
            skipped += 1;
            continue;
        }
        let sbar = match ray_boundary_intersection(&x, xstar, poly) {
            Ok(p) => p,
            Err(Error::Structural(_)) | Err(Error::Numeric(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let (fx, gx) = evaluate(obj, &x)?;
        if let Some(b) = bracket(obj, &x, fx, &gx, &(sbar - &x), gamma)? {
            best = best.min(b);
        }
    }
    if skipped > 0 {
        log::debug!("mu_fw sampling skipped {skipped} degenerate rays");
    }
    if !best.is_finite() {
        log::warn!("mu_fw sampling produced no valid sample");
        return Ok(0.0);
    }
    Ok(best.max(0.0))
}

/// Value of one `μ_f^A` sample, or `None` when the pair is not admissible.
fn mu_away_sample<O: Objective + ?Sized>(
    obj: &O,
    poly: &VPolytope,
    x: &RealVector,
    xstar: &RealVector,
) -> Result<Option<f64>> {
    let (fx, gx) = evaluate(obj, x)?;
    let slope = gx.dot(&(xstar - x));
    if !(slope < 0.0) {
        return Ok(None);
    }
    let s = lmo(poly, &gx)?;
    let v_val = worst_case_away_value(&gx, x, poly)?;
    let denom = s.inner_product - v_val;
    if denom.abs() <= 1e-14 {
        log::debug!("mu_away sample with zero denominator skipped");
        return Ok(None);
    }
    let gamma_a = slope / denom;
    let rem = remainder(obj, x, fx, &gx, &(xstar - x))?;
    Ok(rem.map(|r| 2.0 / (gamma_a * gamma_a) * r))
}

/// Sampled upper bound on `μ_f^A`. Besides random pairs `(x, x*)`, every
/// vertex `x` is paired with its FW vertex, which keeps the estimate below
/// `C_f`.
pub fn mu_away_estimate<O: Objective + ?Sized>(obj: &O, poly: &VPolytope, num_samples: usize, seed: u64) -> Result<f64> {
    if num_samples == 0 {
        return config("sampling needs at least one sample");
    }
    let mut best = f64::INFINITY;
    for x in poly.vertices() {
        let (_, gx) = evaluate(obj, x)?;
        let s = lmo(poly, &gx)?;
        if let Some(v) = mu_away_sample(obj, poly, x, &s.vertex)? {
            best = best.min(v);
        }
    }
    let mut sampler = PointSampler::new(seed);
    for _ in 0..num_samples {
        let x = sampler.point(poly);
        let near = sampler.rng.random::<f64>() < NEAR_OPTIMUM_PROBABILITY;
        let xstar = if near { sampler.near(poly, &x) } else { sampler.point(poly) };
        if let Some(v) = mu_away_sample(obj, poly, &x, &xstar)? {
            best = best.min(v);
        }
    }
    if !best.is_finite() {
        log::warn!("mu_away sampling produced no admissible pair");
        return Ok(0.0);
    }
    Ok(best.max(0.0))
}

/// `(ρ^FW, ρ^A) = (min{ν/2, ν² μ_f^FW / C_f}, μ_f^A / (4 C_f^A))`.
pub fn rate_constants(est: &ConstantEstimates, nu: f64) -> Result<(f64, f64)> {
    if !(est.cf > 0.0) || !(est.cf_away > 0.0) {
        return config("rate constants need positive curvature constants");
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return config(format!("nu = {nu} outside (0, 1]"));
    }
    let rho_fw = (nu / 2.0).min(nu * nu * est.mu_fw / est.cf);
    let rho_away = est.mu_away / (4.0 * est.cf_away);
    Ok((rho_fw, rho_away))
}

/// `λ_min` of the quadratic restricted to the direction space of `poly`.
pub fn restricted_mu(quad: &QuadraticObjective, poly: &VPolytope) -> f64 {
    let basis = poly.direction_basis();
    if basis.ncols() == 0 {
        return 0.0;
    }
    quad.restricted_strong_convexity(&basis).max(0.0)
}

/// Exact curvature, sampled `μ` estimates, `δ`, pyramidal width (when the
/// polytope is small enough) and rate constants for a quadratic.
pub fn estimate_quadratic_constants(
    quad: &QuadraticObjective,
    poly: &VPolytope,
    xstar: &RealVector,
    opts: &EstimateOptions,
) -> Result<ConstantEstimates> {
    let (cf, cf_minus, cf_away) = curvature_quadratic_exact(quad.a(), poly);
    let mut est = ConstantEstimates::from_curvature(cf, cf_minus, cf_away);
    let sampled = Provenance::SampledUpperBound { samples: opts.samples };
    est.mu_fw = mu_fw_estimate(quad, poly, xstar, opts.samples, opts.seed)?;
    est.provenance.insert("mu_fw", sampled);
    match mu_away_estimate(quad, poly, opts.samples, opts.seed.wrapping_add(1)) {
        Ok(v) => {
            est.mu_away = v;
            est.provenance.insert("mu_away", sampled);
        }
        Err(Error::Unsupported(msg)) => log::info!("mu_away skipped: {msg}"),
        Err(e) => return Err(e),
    }
    match interior_radius(xstar, poly) {
        Ok(d) => {
            est.delta = d;
            est.provenance.insert("delta", Provenance::Exact);
        }
        Err(Error::Unsupported(msg)) => log::info!("delta skipped: {msg}"),
        Err(e) => return Err(e),
    }
    if opts.pdirw_directions > 0 {
        match pyramidal_width_estimate(poly, opts.pdirw_directions, opts.seed) {
            Ok(w) => {
                est.pdirw = w.value;
                est.provenance.insert(
                    "pdirw",
                    Provenance::SampledUpperBound {
                        samples: w.directions_evaluated,
                    },
                );
            }
            Err(Error::Unsupported(msg)) => log::info!("pyramidal width skipped: {msg}"),
            Err(e) => return Err(e),
        }
    }
    if cf > 0.0 {
        let (rho_fw, rho_away) = rate_constants(&est, opts.nu)?;
        est.rho_fw = rho_fw;
        est.rho_away = rho_away;
        let derived = if est.provenance_of("mu_fw") == Provenance::Unset {
            Provenance::Unset
        } else {
            sampled
        };
        est.provenance.insert("rho_fw", derived);
        let derived = if est.provenance_of("mu_away") == Provenance::Unset {
            Provenance::Unset
        } else {
            sampled
        };
        est.provenance.insert("rho_away", derived);
    }
    Ok(est)
}

/// One inequality `lhs ≤ rhs + tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    /// `rhs + tolerance − lhs`; nonnegative when the check passes.
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn le(name: &'static str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs + tolerance - lhs;
        Self {
            name,
            lhs,
            rhs,
            tolerance,
            margin,
            pass: margin >= 0.0,
        }
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {:.6e} <= {:.6e} (margin {:.3e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.lhs,
            self.rhs,
            self.margin
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
    /// `λ_min` on the direction space.
    pub mu: f64,
    pub lipschitz: f64,
    pub diameter_squared: f64,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Evaluates the five inequalities linking the constants:
///
/// * `C_f ≤ diam² · L`
/// * `μ_f^FW ≤ C_f` and `μ_f^A ≤ C_f`
/// * `μ·δ² ≤ μ_f^FW` and `μ·PdirW² ≤ μ_f^A`
///
/// Sampled `μ` values overestimate the infimum, so the lower-bound checks
/// place them on the large side where the comparison stays valid.
pub fn bound_checks(
    est: &ConstantEstimates,
    quad: &QuadraticObjective,
    poly: &VPolytope,
    xstar: &RealVector,
) -> Result<BoundReport> {
    if xstar.len() != poly.dim() {
        return Err(Error::Structural("xstar dimension differs from polytope".into()));
    }
    let mu = restricted_mu(quad, poly);
    let lipschitz = quad.lipschitz();
    let diameter_squared = poly.diameter_squared();
    let checks = vec![
        BoundCheck::le("curvature <= diameter^2 * lipschitz", est.cf, diameter_squared * lipschitz, 1e-9),
        BoundCheck::le("mu_fw <= curvature", est.mu_fw, est.cf, 1e-9),
        BoundCheck::le("mu * delta^2 <= mu_fw", mu * est.delta * est.delta, est.mu_fw, 0.0),
        BoundCheck::le("mu * pdirw^2 <= mu_away", mu * est.pdirw * est.pdirw, est.mu_away, 0.0),
        BoundCheck::le("mu_away <= curvature", est.mu_away, est.cf, 1e-9),
    ];
    Ok(BoundReport {
        checks,
        mu,
        lipschitz,
        diameter_squared,
    })
}
