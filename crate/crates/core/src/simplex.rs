//! Spacelike simplices in the chronological future of the origin: area,
//! cone volume, Lorentzian height, and the cone/containment relations that
//! give the geometric proof of the Bahn–Ehrlich inequality.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::hypersurface::{check_dim, DomainMesh, GraphHypersurface};
use crate::minkowski::{classify, hyperbolic_dist, radial_project, raw_inner, CausalTag, MinkowskiVector};
use crate::quadrature::pairwise_sum;

/// Relative threshold on `det G / prod |e_i|^2` below which a simplex is
/// treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Default Monte Carlo sample count for projected measures with `n >= 2`.
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacelikeSimplex {
    vertices: Vec<MinkowskiVector>,
    n: usize,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl SpacelikeSimplex {
    /// Validates `n + 1` future-timelike vertices with a positive definite
    /// edge Gram matrix.
    pub fn new(vertices: Vec<MinkowskiVector>) -> Result<Self> {
        let n = vertices.len().checked_sub(1).ok_or_else(|| invalid("no vertices"))?;
        check_dim(n)?;
        if let Some(v) = vertices.iter().find(|v| v.dim() != n) {
            return Err(invalid(format!(
                "{} vertices need to live in dimension {}, got {}",
                n + 1,
                n,
                v.dim()
            )));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !classify(v).is_future_timelike() {
                return Err(domain(format!("vertex {i} is not future timelike")));
            }
        }
        let s = Self { vertices, n };
        for i in 1..=n {
            for j in 0..i {
                let e = s.vertices[i].sub(&s.vertices[j])?;
                if classify(&e).tag != CausalTag::Spacelike {
                    return Err(domain(format!("edge {j}-{i} is not spacelike")));
                }
            }
        }
        if !(s.shape_quality() > DEGENERACY_TOL) {
            return Err(Error::Degenerate("edge Gram matrix is singular".into()));
        }
        Ok(s)
    }

    pub fn from_coords(vertices: &[&[f64]]) -> Result<Self> {
        Self::new(vertices.iter().map(|c| MinkowskiVector::from_slice(c)).collect::<Result<_>>()?)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[MinkowskiVector] {
        &self.vertices
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(invalid("scale factor must be positive"));
        }
        Self::new(self.vertices.iter().map(|v| v.scale(lambda)).collect())
    }

    fn edges(&self) -> Vec<Vec<f64>> {
        let v0 = self.vertices[0].coords();
        self.vertices[1..]
            .iter()
            .map(|v| v.coords().iter().zip(v0).map(|(a, b)| a - b).collect())
            .collect()
    }

    fn edge_gram(&self) -> DMatrix<f64> {
        let e = self.edges();
        DMatrix::from_fn(self.n, self.n, |i, j| raw_inner(&e[i], &e[j]))
    }

    fn vertex_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n + 1, self.n + 1, |i, j| self.vertices[i].coords()[j])
    }

    /// `[v_0, v_1 - v_0, ..., v_n - v_0]`, same determinant as the vertex
    /// matrix with less cancellation.
    fn apex_edge_matrix(&self) -> DMatrix<f64> {
        let e = self.edges();
        DMatrix::from_fn(self.n + 1, self.n + 1, |i, j| {
            if i == 0 {
                self.vertices[0].coords()[j]
            } else {
                e[i - 1][j]
            }
        })
    }

    /// `det G / prod_i G_ii` in `(0, 1]`; small values mean a sliver.
    pub fn shape_quality(&self) -> f64 {
        let g = self.edge_gram();
        let scale: f64 = (0..self.n).map(|i| g[(i, i)]).product();
        g.determinant() / scale
    }

    /// Covector `w` with `w · v_i = 1` for every vertex; `N' = (-w0, w1..)`
    /// satisfies `<v_i, N'> = 1`.
    fn unit_level_covector(&self) -> Result<DVector<f64>> {
        let m = self.vertex_matrix();
        m.lu()
            .solve(&DVector::from_element(self.n + 1, 1.0))
            .ok_or_else(|| Error::Degenerate("vertices are linearly dependent".into()))
    }

    /// Future unit timelike normal of the supporting hyperplane.
    pub fn unit_normal(&self) -> Result<MinkowskiVector> {
        let w = self.unit_level_covector()?;
        let mut n = w.as_slice().to_vec();
        n[0] = -n[0];
        let sq = raw_inner(&n, &n);
        if !(sq < 0.0) {
            return Err(domain("supporting hyperplane is not spacelike"));
        }
        let norm = (-sq).sqrt();
        let sign = if n[0] > 0.0 { 1.0 } else { -1.0 };
        MinkowskiVector::new(n.iter().map(|x| sign * x / norm).collect())
    }
}

/// `A(P) = sqrt(det G) / n!`, `G` the Minkowski Gram matrix of the edges.
pub fn simplex_area(p: &SpacelikeSimplex) -> Result<f64> {
    let det = p.edge_gram().determinant();
    if !(det > 0.0) {
        return Err(Error::Degenerate(format!("edge Gram determinant {det}")));
    }
    Ok(det.sqrt() / factorial(p.n))
}

/// `h = |<v_1, N>|`, the Lorentzian distance from `O` to the supporting
/// hyperplane.
pub fn lorentzian_height(p: &SpacelikeSimplex) -> Result<f64> {
    let normal = p.unit_normal()?;
    Ok(raw_inner(p.vertices[0].coords(), normal.coords()).abs())
}

/// Lebesgue volume `|det[v_1, ..., v_{n+1}]| / (n+1)!` of the cone `C(P)`.
pub fn cone_volume_simplex(p: &SpacelikeSimplex) -> Result<f64> {
    let det = p.apex_edge_matrix().determinant();
    if det == 0.0 {
        return Err(Error::Degenerate("vertex determinant vanishes".into()));
    }
    Ok(det.abs() / factorial(p.n + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeFormula {
    pub volume: f64,
    pub height: f64,
    pub area: f64,
    /// `V - h A / (n+1)`.
    pub residual: f64,
    pub relative_residual: f64,
}

pub fn cone_formula_check(p: &SpacelikeSimplex) -> Result<ConeFormula> {
    let volume = cone_volume_simplex(p)?;
    let height = lorentzian_height(p)?;
    let area = simplex_area(p)?;
    let residual = volume - height * area / (p.n + 1) as f64;
    Ok(ConeFormula {
        volume,
        height,
        area,
        residual,
        relative_residual: residual.abs() / volume,
    })
}

/// Uniform barycentric coordinates.
fn barycentric(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn point_at(p: &SpacelikeSimplex, lambda: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; p.n + 1];
    for (v, l) in p.vertices.iter().zip(lambda) {
        for (yi, vi) in y.iter_mut().zip(v.coords()) {
            *yi += l * vi;
        }
    }
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectedMeasure {
    pub value: f64,
    /// Monte Carlo standard error; zero for the closed form.
    pub std_error: f64,
    pub samples: usize,
}

/// `mu(pi(P)) = int_P h / |y|^{n+1} dA(y)`. Closed form (hyperbolic arc
/// length) for `n = 1`, Monte Carlo otherwise.
pub fn projected_measure(p: &SpacelikeSimplex, samples: usize, seed: u64) -> Result<ProjectedMeasure> {
    if p.n == 1 {
        let a = radial_project(&p.vertices[0])?;
        let b = radial_project(&p.vertices[1])?;
        return Ok(ProjectedMeasure {
            value: hyperbolic_dist(&a, &b)?,
            std_error: 0.0,
            samples: 0,
        });
    }
    if samples < 2 {
        return Err(invalid("Monte Carlo needs at least two samples"));
    }
    let area = simplex_area(p)?;
    let h = lorentzian_height(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = p.n as i32 + 1;
    let terms: Vec<f64> = (0..samples)
        .map(|_| {
            let y = point_at(p, &barycentric(&mut rng, p.n + 1));
            h / (-raw_inner(&y, &y)).sqrt().powi(k)
        })
        .collect();
    let mean = pairwise_sum(&terms) / samples as f64;
    let var = pairwise_sum(&terms.iter().map(|t| (t - mean).powi(2)).collect::<Vec<_>>()) / (samples - 1) as f64;
    Ok(ProjectedMeasure {
        value: area * mean,
        std_error: area * (var / samples as f64).sqrt(),
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    pub measure: ProjectedMeasure,
    /// `h^{n+1} mu(pi(P)) / (n+1) - V(C(P))`.
    pub gap: f64,
    pub gap_std_error: f64,
}

/// `C(P) ⊂ B_h(M)` in volume form.
pub fn containment_check(p: &SpacelikeSimplex, samples: usize, seed: u64) -> Result<Containment> {
    let m = projected_measure(p, samples, seed)?;
    let h = lorentzian_height(p)?;
    let k = (p.n + 1) as f64;
    let scale = h.powf(k) / k;
    Ok(Containment {
        measure: m,
        gap: scale * m.value - cone_volume_simplex(p)?,
        gap_std_error: scale * m.std_error,
    })
}

/// The simplex as a graph over Monte Carlo nodes of `pi(P)`: weight
/// `A/N h/|y|^{n+1}`, value `|y|`, `|grad ln f| = sqrt(1 - (|y|/h)^2)`.
/// Cone volume and area of the result equal `V(C(P))` and `A(P)` exactly;
/// only the projected measure is sampled.
pub fn sampled_graph(p: &SpacelikeSimplex, samples: usize, seed: u64) -> Result<GraphHypersurface> {
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let area = simplex_area(p)?;
    let h = lorentzian_height(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = p.n as i32 + 1;
    let mut weights = Vec::with_capacity(samples);
    let mut f = Vec::with_capacity(samples);
    let mut grad = Vec::with_capacity(samples);
    for _ in 0..samples {
        let y = point_at(p, &barycentric(&mut rng, p.n + 1));
        let r = (-raw_inner(&y, &y)).sqrt();
        weights.push(area / samples as f64 * h / r.powi(k));
        f.push(r);
        grad.push((1.0 - (r / h).powi(2)).max(0.0).sqrt());
    }
    GraphHypersurface::new(DomainMesh::atomic(weights)?, f, grad, p.n)
}

/// `((s1+s2)(v1+v2)^n)^{1/(n+1)} - (s1 v1^n)^{1/(n+1)} - (s2 v2^n)^{1/(n+1)}`.
pub fn induction_step_check(v1: f64, s1: f64, v2: f64, s2: f64, n: usize) -> Result<f64> {
    if !(v1 > 0.0 && s1 > 0.0 && v2 > 0.0 && s2 > 0.0) {
        return Err(domain("induction step needs positive volumes and measures"));
    }
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let q = 1.0 / (n + 1) as f64;
    let ni = n as i32;
    Ok(((s1 + s2) * (v1 + v2).powi(ni)).powf(q) - (s1 * v1.powi(ni)).powf(q) - (s2 * v2.powi(ni)).powf(q))
}

fn random_unit(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = x.iter().map(|a| a * a).sum();
        if r2 > 1e-4 && r2 <= 1.0 {
            let r = r2.sqrt();
            return x.into_iter().map(|a| a / r).collect();
        }
    }
}

fn future_point(t: f64, rapidity: f64, dir: &[f64]) -> Vec<f64> {
    let mut v = vec![t * rapidity.cosh()];
    v.extend(dir.iter().map(|d| t * rapidity.sinh() * d));
    v
}

/// Maximum number of rejected draws before [`random_simplex`] gives up.
const MAX_REJECTIONS: usize = 10_000;
/// Slivers below this [`SpacelikeSimplex::shape_quality`] are redrawn.
const MIN_RANDOM_QUALITY: f64 = 1e-3;

/// Random spacelike simplex: a future timelike center, a spacelike
/// hyperplane through it with a random timelike unit normal, and `n + 1`
/// points of that hyperplane in a bounded patch, rejecting draws that leave
/// the future cone or come out degenerate.
pub fn random_simplex(n: usize, rng: &mut impl Rng) -> Result<SpacelikeSimplex> {
    check_dim(n)?;
    for _ in 0..MAX_REJECTIONS {
        let t = rng.gen_range(1.0..3.0);
        let center = future_point(t, rng.gen_range(0.0..1.0), &random_unit(rng, n));
        let normal = future_point(1.0, rng.gen_range(0.0..0.8), &random_unit(rng, n));
        // Minkowski-orthonormal basis of normal^⊥ from the spatial axes
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 1..=n {
            let mut u = vec![0.0; n + 1];
            u[i] = 1.0;
            let c = raw_inner(&u, &normal);
            for (ui, ni) in u.iter_mut().zip(&normal) {
                *ui += c * ni;
            }
            for b in &basis {
                let c = raw_inner(&u, b);
                for (ui, bi) in u.iter_mut().zip(b) {
                    *ui -= c * bi;
                }
            }
            let norm = raw_inner(&u, &u).sqrt();
            basis.push(u.into_iter().map(|x| x / norm).collect());
        }
        let patch = rng.gen_range(0.3..1.2) * t;
        let vertices: Vec<MinkowskiVector> = (0..=n)
            .map(|_| {
                let mut v = center.clone();
                for b in &basis {
                    let a = rng.gen_range(-1.0..1.0) * patch;
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += a * bi;
                    }
                }
                MinkowskiVector::new(v)
            })
            .collect::<Result<_>>()?;
        match SpacelikeSimplex::new(vertices) {
            Ok(s) if s.shape_quality() >= MIN_RANDOM_QUALITY => return Ok(s),
            Ok(_) => continue,
            Err(Error::Domain(_)) | Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Numeric("random simplex generation kept failing".into()))
}

/// Per-instance generator so that instance `i` is reproducible on its own.
pub fn instance_rng(seed: u64, instance: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance);
    rng
}
