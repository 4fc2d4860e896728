//! Achronal hypersurfaces as graphs `S_f = { f(x) x : x in Omega }` over
//! hyperbolic domains, with their cone volume, area and distance to the
//! origin.
//!
//! Every representation is reduced to the same discrete data: quadrature
//! weights `w_i` of the hyperbolic measure, graph values `f_i > 0`, and
//! log-gradient norms `s_i = |grad ln f|(x_i)`. The functionals are then
//!
//! ```text
//! V(C(S)) = 1/(n+1) sum_i w_i f_i^{n+1}
//! A(S)    = sum_i w_i f_i^n sqrt(1 - s_i^2)
//! ```
//!
//! Abstract atomic measures use the same data with no mesh points.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::minkowski::{hyperbolic_dist, nu_weight, HyperbolicPoint};
use crate::quadrature::{pairwise_sum, weighted_sum, CompositeRule, DEFAULT_RADIAL_NODES};

/// Largest dimension supported by radial profiles and atomic domains.
pub const MAX_DIM: usize = 6;

/// Nodes with `|grad ln f| > 1 + CLAMP_REPORT_SLACK` are reported by the
/// area routines; below that the integrand is clamped silently.
pub const CLAMP_REPORT_SLACK: f64 = 1e-9;

/// Slack of the discrete Lipschitz test in [`check_achronal_paths`].
pub const PATH_SLACK: f64 = 1e-8;

/// Default radial x angular resolution of geodesic-ball meshes.
pub const DEFAULT_BALL_RADIAL: usize = 256;
pub const DEFAULT_BALL_ANGULAR: usize = 256;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Discrete data of a graph hypersurface over a measured domain.
pub trait GraphData {
    fn dim(&self) -> usize;
    /// Quadrature weights of the hyperbolic measure.
    fn weights(&self) -> &[f64];
    /// Graph values `f > 0`, one per node.
    fn values(&self) -> &[f64];
    /// `|grad ln f|` per node.
    fn log_grad_norms(&self) -> &[f64];
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(invalid(format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

/// `mu(Omega)`, the total mass of the domain.
pub fn measure<S: GraphData + ?Sized>(s: &S) -> f64 {
    pairwise_sum(s.weights())
}

/// `V(C(pi(S))) = mu(Omega) / (n+1)`, the cone volume of the unit
/// hyperboloid piece over the same domain.
pub fn sigma<S: GraphData + ?Sized>(s: &S) -> f64 {
    measure(s) / (s.dim() + 1) as f64
}

/// Cone volume `V(C(S)) = 1/(n+1) int f^{n+1} dmu`. Admissibility is not
/// required.
pub fn cone_volume<S: GraphData + ?Sized>(s: &S) -> Result<f64> {
    let n = s.dim() as i32;
    let f = s.values();
    let v = weighted_sum(s.weights(), |i| f[i].powi(n + 1)) / (n + 1) as f64;
    if !v.is_finite() {
        return Err(Error::Numeric("cone volume integrand overflowed".into()));
    }
    Ok(v)
}

/// Area `A(S) = int f^n sqrt(1 - |grad ln f|^2) dmu`.
///
/// `|grad ln f|` is clamped to `[0, 1]` in the integrand; nodes beyond the
/// clamp are listed by [`check_achronal`].
pub fn area<S: GraphData + ?Sized>(s: &S) -> f64 {
    let n = s.dim() as i32;
    let f = s.values();
    let g = s.log_grad_norms();
    weighted_sum(s.weights(), |i| {
        let slope = g[i].clamp(0.0, 1.0);
        f[i].powi(n) * (1.0 - slope * slope).sqrt()
    })
}

/// `int f^n dmu`, the area with the gradient term dropped.
pub fn flat_area<S: GraphData + ?Sized>(s: &S) -> f64 {
    let n = s.dim() as i32;
    let f = s.values();
    weighted_sum(s.weights(), |i| f[i].powi(n))
}

/// `dist(O, S)` as the minimum of `f` over the nodes.
///
/// On quadrature data this is an upper bound for the true infimum that
/// converges under refinement.
pub fn dist_origin<S: GraphData + ?Sized>(s: &S) -> f64 {
    s.values().iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeViolation {
    pub index: usize,
    /// `|grad ln f|` at the node.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AchronalityReport {
    pub slack: f64,
    pub violations: Vec<NodeViolation>,
}

impl AchronalityReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Discretized gradient bound `|grad ln f| <= 1 + slack` at every node.
pub fn check_achronal<S: GraphData + ?Sized>(s: &S, slack: f64) -> AchronalityReport {
    let violations = s
        .log_grad_norms()
        .iter()
        .enumerate()
        .filter(|(_, g)| !(**g <= 1.0 + slack))
        .map(|(index, g)| NodeViolation { index, value: *g })
        .collect();
    AchronalityReport { slack, violations }
}

/// Rotationally symmetric graph `f(x) = r(d(x0, x))` over a geodesic ball of
/// radius `t_star`, sampled on a composite Gauss–Legendre rule with the
/// radial density folded into the weights.
#[derive(Clone)]
pub struct RadialProfile {
    n: usize,
    t_star: f64,
    r: ScalarFn,
    r_prime: ScalarFn,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
    log_grad: Vec<f64>,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("n", &self.n)
            .field("t_star", &self.t_star)
            .field("quadrature_nodes", &self.nodes.len())
            .finish()
    }
}

impl RadialProfile {
    pub fn new(n: usize, t_star: f64, r: ScalarFn, r_prime: ScalarFn, quadrature_nodes: usize) -> Result<Self> {
        check_dim(n)?;
        if !(t_star > 0.0 && t_star.is_finite()) {
            return Err(invalid(format!("t_star must be positive, got {t_star}")));
        }
        let rule = CompositeRule::with_nodes(quadrature_nodes)?;
        let (nodes, gl_weights) = rule.nodes_weights(0.0, t_star);
        let mut weights = Vec::with_capacity(nodes.len());
        let mut values = Vec::with_capacity(nodes.len());
        let mut log_grad = Vec::with_capacity(nodes.len());
        for (&t, &w) in nodes.iter().zip(&gl_weights) {
            let rv = r(t);
            let dv = r_prime(t);
            if !(rv > 0.0 && rv.is_finite()) {
                return Err(invalid(format!("r({t}) = {rv} is not positive and finite")));
            }
            if !dv.is_finite() {
                return Err(invalid(format!("r'({t}) is not finite")));
            }
            weights.push(w * nu_weight(t, n));
            values.push(rv);
            log_grad.push(dv.abs() / rv);
        }
        Ok(Self {
            n,
            t_star,
            r,
            r_prime,
            nodes,
            weights,
            values,
            log_grad,
        })
    }

    /// Builds a profile from plain closures with the default node count.
    pub fn from_fns(
        n: usize,
        t_star: f64,
        r: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(n, t_star, Arc::new(r), Arc::new(r_prime), DEFAULT_RADIAL_NODES)
    }

    /// The hyperboloid piece `r = t0`.
    pub fn constant(n: usize, t_star: f64, t0: f64, quadrature_nodes: usize) -> Result<Self> {
        Self::new(n, t_star, Arc::new(move |_| t0), Arc::new(|_| 0.0), quadrature_nodes)
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn r(&self, t: f64) -> f64 {
        (self.r)(t)
    }

    pub fn r_prime(&self, t: f64) -> f64 {
        (self.r_prime)(t)
    }

    pub fn r_handle(&self) -> ScalarFn {
        self.r.clone()
    }

    pub fn r_prime_handle(&self) -> ScalarFn {
        self.r_prime.clone()
    }

    /// The same profile over the smaller ball of radius `t` with the same
    /// node count.
    pub fn restrict_radius(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= self.t_star) {
            return Err(invalid(format!("restriction radius {t} outside (0, {}]", self.t_star)));
        }
        Self::new(self.n, t, self.r.clone(), self.r_prime.clone(), self.nodes.len())
    }

    /// Same profile resampled with a different node count.
    pub fn with_nodes(&self, quadrature_nodes: usize) -> Result<Self> {
        Self::new(self.n, self.t_star, self.r.clone(), self.r_prime.clone(), quadrature_nodes)
    }

    /// The sampled data as an atomic-domain graph.
    pub fn to_atomic(&self) -> GraphHypersurface {
        GraphHypersurface {
            mesh: DomainMesh {
                points: Vec::new(),
                weights: self.weights.clone(),
                domain: Domain::Atomic,
            },
            f_values: self.values.clone(),
            log_grad_norms: self.log_grad.clone(),
            n: self.n,
        }
    }
}

impl GraphData for RadialProfile {
    fn dim(&self) -> usize {
        self.n
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
    fn log_grad_norms(&self) -> &[f64] {
        &self.log_grad
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    GeodesicBall { center: HyperbolicPoint, radius: f64 },
    /// An abstract measure made of weighted atoms (no geometry).
    Atomic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainMesh {
    /// Empty for abstract atomic measures.
    pub points: Vec<HyperbolicPoint>,
    pub weights: Vec<f64>,
    pub domain: Domain,
}

impl DomainMesh {
    /// An abstract measure with the given positive atom weights.
    pub fn atomic(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(invalid(format!("atom weight {w} must be positive")));
        }
        Ok(Self {
            points: Vec::new(),
            weights,
            domain: Domain::Atomic,
        })
    }

    /// Geodesic-polar product grid on the ball `B_radius(center)` in `H^2`:
    /// composite Gauss–Legendre in the radius times a uniform angular rule.
    pub fn geodesic_ball(center: &HyperbolicPoint, radius: f64, radial: usize, angular: usize) -> Result<Self> {
        if center.dim() != 2 {
            return Err(Error::UnsupportedDomain(format!(
                "geodesic-ball meshes are implemented for n = 2, got n = {}",
                center.dim()
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) || angular == 0 {
            return Err(invalid("ball radius and angular resolution must be positive"));
        }
        let rule = CompositeRule::with_nodes(radial)?;
        let (ts, tw) = rule.nodes_weights(0.0, radius);
        let dtheta = 2.0 * std::f64::consts::PI / angular as f64;
        let mut points = Vec::with_capacity(ts.len() * angular);
        let mut weights = Vec::with_capacity(ts.len() * angular);
        for (&t, &w) in ts.iter().zip(&tw) {
            for k in 0..angular {
                let theta = (k as f64 + 0.5) * dtheta;
                let p = HyperbolicPoint::from_polar(t, &[theta.cos(), theta.sin()])?;
                points.push(p.boost_from_origin(center)?);
                weights.push(w * t.sinh() * dtheta);
            }
        }
        Ok(Self {
            points,
            weights,
            domain: Domain::GeodesicBall {
                center: center.clone(),
                radius,
            },
        })
    }

    pub fn default_ball(radius: f64) -> Result<Self> {
        Self::geodesic_ball(&HyperbolicPoint::origin(2), radius, DEFAULT_BALL_RADIAL, DEFAULT_BALL_ANGULAR)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    fn subset(&self, idx: &[usize]) -> Self {
        let points = if self.points.is_empty() {
            Vec::new()
        } else {
            idx.iter().map(|&i| self.points[i].clone()).collect()
        };
        Self {
            points,
            weights: idx.iter().map(|&i| self.weights[i]).collect(),
            domain: Domain::Atomic,
        }
    }
}

/// Closed form `mu(B_t)` in `H^2`.
pub fn ball_measure_2d(radius: f64) -> f64 {
    2.0 * std::f64::consts::PI * (radius.cosh() - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphHypersurface {
    pub(crate) mesh: DomainMesh,
    pub(crate) f_values: Vec<f64>,
    pub(crate) log_grad_norms: Vec<f64>,
    pub(crate) n: usize,
}

impl GraphHypersurface {
    /// Checks lengths, positivity and the supported dimension.
    pub fn new(mesh: DomainMesh, f_values: Vec<f64>, log_grad_norms: Vec<f64>, n: usize) -> Result<Self> {
        check_dim(n)?;
        if let Domain::GeodesicBall { .. } = mesh.domain {
            if n != 2 {
                return Err(Error::UnsupportedDomain("meshed graphs support n = 2 only".into()));
            }
        }
        if mesh.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if f_values.len() != mesh.len() || log_grad_norms.len() != mesh.len() {
            return Err(invalid(format!(
                "{} weights but {} values and {} gradients",
                mesh.len(),
                f_values.len(),
                log_grad_norms.len()
            )));
        }
        if !mesh.points.is_empty() && mesh.points.len() != mesh.len() {
            return Err(invalid("mesh points and weights differ in length"));
        }
        if let Some(f) = f_values.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
            return Err(invalid(format!("graph value {f} must be positive and finite")));
        }
        if let Some(g) = log_grad_norms.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(invalid(format!("gradient norm {g} must be nonnegative and finite")));
        }
        Ok(Self {
            mesh,
            f_values,
            log_grad_norms,
            n,
        })
    }

    /// An atomic graph with zero gradients, e.g. `{w = 1, f = 1; w = 1, f = 2}`.
    pub fn atomic(n: usize, weights: Vec<f64>, f_values: Vec<f64>) -> Result<Self> {
        let len = f_values.len();
        Self::new(DomainMesh::atomic(weights)?, f_values, vec![0.0; len], n)
    }

    /// Samples an analytic `f` and its `|grad ln f|` on a meshed domain.
    pub fn from_fn(
        mesh: DomainMesh,
        f: impl Fn(&HyperbolicPoint) -> f64,
        log_grad_norm: impl Fn(&HyperbolicPoint) -> f64,
    ) -> Result<Self> {
        if mesh.points.is_empty() {
            return Err(Error::UnsupportedDomain("analytic sampling needs mesh points".into()));
        }
        let n = mesh.points[0].dim();
        let values = mesh.points.iter().map(&f).collect();
        let grads = mesh.points.iter().map(&log_grad_norm).collect();
        Self::new(mesh, values, grads, n)
    }

    /// The rotationally symmetric graph `f(x) = r(d(center, x))` of a radial
    /// profile (n = 2) on a geodesic-ball mesh of the profile's radius.
    pub fn from_radial(profile: &RadialProfile, radial: usize, angular: usize) -> Result<Self> {
        let center = HyperbolicPoint::origin(profile.dim());
        let mesh = DomainMesh::geodesic_ball(&center, profile.t_star(), radial, angular)?;
        let (r, rp) = (profile.r_handle(), profile.r_prime_handle());
        let dist = |x: &HyperbolicPoint| hyperbolic_dist(&center, x).unwrap_or(0.0);
        Self::from_fn(mesh, |x| r(dist(x)), |x| {
            let t = dist(x);
            rp(t).abs() / r(t)
        })
    }

    pub fn mesh(&self) -> &DomainMesh {
        &self.mesh
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f_values
    }

    pub fn len(&self) -> usize {
        self.f_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_values.is_empty()
    }

    /// The graph scaled by `lambda > 0` (`f -> lambda f`, gradients of `ln f`
    /// unchanged).
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.mesh.clone(),
            self.f_values.iter().map(|f| f * lambda).collect(),
            self.log_grad_norms.clone(),
            self.n,
        )
    }

    /// Sub-hypersurface over the selected nodes. The result lives on an
    /// abstract domain: subsets of a ball need not be convex.
    pub fn restrict(&self, node_subset: &[usize]) -> Result<Self> {
        if node_subset.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if let Some(&i) = node_subset.iter().find(|&&i| i >= self.len()) {
            return Err(invalid(format!("node index {i} out of range")));
        }
        Ok(Self {
            mesh: self.mesh.subset(node_subset),
            f_values: node_subset.iter().map(|&i| self.f_values[i]).collect(),
            log_grad_norms: node_subset.iter().map(|&i| self.log_grad_norms[i]).collect(),
            n: self.n,
        })
    }
}

impl GraphData for GraphHypersurface {
    fn dim(&self) -> usize {
        self.n
    }
    fn weights(&self) -> &[f64] {
        &self.mesh.weights
    }
    fn values(&self) -> &[f64] {
        &self.f_values
    }
    fn log_grad_norms(&self) -> &[f64] {
        &self.log_grad_norms
    }
}

/// Copies the selected nodes of any graph into an atomic graph.
pub fn restrict<S: GraphData + ?Sized>(s: &S, node_subset: &[usize]) -> Result<GraphHypersurface> {
    if node_subset.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let len = s.weights().len();
    if let Some(&i) = node_subset.iter().find(|&&i| i >= len) {
        return Err(invalid(format!("node index {i} out of range")));
    }
    let pick = |xs: &[f64]| node_subset.iter().map(|&i| xs[i]).collect::<Vec<_>>();
    Ok(GraphHypersurface {
        mesh: DomainMesh {
            points: Vec::new(),
            weights: pick(s.weights()),
            domain: Domain::Atomic,
        },
        f_values: pick(s.values()),
        log_grad_norms: pick(s.log_grad_norms()),
        n: s.dim(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub i: usize,
    pub j: usize,
    /// `|ln f(x_i) - ln f(x_j)|`
    pub log_gap: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub pairs_tested: usize,
    pub violations: Vec<PairViolation>,
}

impl PathReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tests `|ln f(x) - ln f(y)| <= d_H(x, y) + PATH_SLACK` on random node
/// pairs. On a geodesic ball the intrinsic metric is `d_H`, so this is the
/// 1-Lipschitz characterization of achronality.
pub fn check_achronal_paths(s: &GraphHypersurface, num_pairs: usize, seed: u64) -> Result<PathReport> {
    if !matches!(s.mesh.domain, Domain::GeodesicBall { .. }) {
        return Err(Error::UnsupportedDomain(
            "path test needs a convex geodesic-ball domain".into(),
        ));
    }
    let len = s.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for _ in 0..num_pairs {
        let i = rng.gen_range(0..len);
        let j = rng.gen_range(0..len);
        let distance = hyperbolic_dist(&s.mesh.points[i], &s.mesh.points[j])?;
        let log_gap = (s.f_values[i].ln() - s.f_values[j].ln()).abs();
        if log_gap > distance + PATH_SLACK {
            violations.push(PairViolation { i, j, log_gap, distance });
        }
    }
    Ok(PathReport {
        pairs_tested: num_pairs,
        violations,
    })
}

/// A discrete path in `H` together with endpoint radii `r0, r1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    points: Vec<HyperbolicPoint>,
    r0: f64,
    r1: f64,
}

impl CurveSample {
    pub fn new(points: Vec<HyperbolicPoint>, r0: f64, r1: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a curve sample needs at least two points"));
        }
        if !(r0 > 0.0 && r1 > 0.0) {
            return Err(invalid("endpoint radii must be positive"));
        }
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(invalid("consecutive curve points must be distinct"));
            }
        }
        Ok(Self { points, r0, r1 })
    }

    /// Sum of hyperbolic distances between consecutive points.
    pub fn length(&self) -> Result<f64> {
        let mut segs = Vec::with_capacity(self.points.len() - 1);
        for w in self.points.windows(2) {
            segs.push(hyperbolic_dist(&w[0], &w[1])?);
        }
        Ok(pairwise_sum(&segs))
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.r0, self.r1)
    }
}

/// Relative margin by which `ln(r1/r0)` must exceed the path length for a
/// timelike connection; equality is the lightlike boundary.
pub const CONNECT_TOL: f64 = 1e-12;

/// Whether a future-directed timelike curve from `r0 x(0)` to `r1 x(b)`
/// projects onto the sampled path: `L_H(x) < ln(r1 / r0)` strictly.
pub fn timelike_connectable(c: &CurveSample) -> Result<bool> {
    let len = c.length()?;
    let budget = (c.r1 / c.r0).ln();
    Ok(budget - len > CONNECT_TOL * len.abs().max(1.0))
}

/// Restrictions of `p` to `[0, t_star * k / k_steps]`, `k = 1..=k_steps`.
pub fn exhaustion_sequence(p: &RadialProfile, k_steps: usize) -> Result<Vec<RadialProfile>> {
    if k_steps == 0 {
        return Err(invalid("exhaustion needs at least one step"));
    }
    if k_steps == 1 {
        return Ok(vec![p.clone()]);
    }
    (1..=k_steps)
        .map(|k| {
            if k == k_steps {
                Ok(p.clone())
            } else {
                p.restrict_radius(p.t_star() * k as f64 / k_steps as f64)
            }
        })
        .collect()
}
