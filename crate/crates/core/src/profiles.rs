//! Named radial profile families, sampled-table functions, and random
//! admissible profiles and atomic graphs for property runs.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypersurface::{GraphHypersurface, RadialProfile};

/// A function given by samples, interpolated by cubic Hermite pieces with
/// three-point slopes. Outside the table it is extended by its end values
/// and zero slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    t: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledFunction {
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() < 3 || t.len() != y.len() {
            return Err(invalid("a sampled table needs at least 3 (t, y) pairs"));
        }
        if t.iter().chain(&y).any(|x| !x.is_finite()) {
            return Err(invalid("sampled table has non-finite entries"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("sample abscissae must be strictly increasing"));
        }
        let m = t.len();
        let mut slopes = vec![0.0; m];
        for i in 1..m - 1 {
            let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
            let (d0, d1) = ((y[i] - y[i - 1]) / h0, (y[i + 1] - y[i]) / h1);
            slopes[i] = (h1 * d0 + h0 * d1) / (h0 + h1);
        }
        let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
        let (d0, d1) = ((y[1] - y[0]) / h0, (y[2] - y[1]) / h1);
        slopes[0] = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        let (h0, h1) = (t[m - 2] - t[m - 3], t[m - 1] - t[m - 2]);
        let (d0, d1) = ((y[m - 2] - y[m - 3]) / h0, (y[m - 1] - y[m - 2]) / h1);
        slopes[m - 1] = ((2.0 * h1 + h0) * d1 - h1 * d0) / (h0 + h1);
        Ok(Self { t, y, slopes })
    }

    fn locate(&self, x: f64) -> Option<usize> {
        if x < self.t[0] || x > *self.t.last().unwrap() {
            return None;
        }
        Some(match self.t.partition_point(|ti| *ti <= x) {
            0 => 0,
            k => (k - 1).min(self.t.len() - 2),
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        let Some(i) = self.locate(x) else {
            return if x < self.t[0] { self.y[0] } else { *self.y.last().unwrap() };
        };
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.y[i]
            + (s3 - 2.0 * s2 + s) * h * self.slopes[i]
            + (-2.0 * s3 + 3.0 * s2) * self.y[i + 1]
            + (s3 - s2) * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let Some(i) = self.locate(x) else { return 0.0 };
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let s2 = s * s;
        ((6.0 * s2 - 6.0 * s) * self.y[i] + (-6.0 * s2 + 6.0 * s) * self.y[i + 1]) / h
            + (3.0 * s2 - 4.0 * s + 1.0) * self.slopes[i]
            + (3.0 * s2 - 2.0 * s) * self.slopes[i + 1]
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.t
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.y
    }
}

/// Named radial families `r(t)` on `[0, t*]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `r = t0`
    Constant { t0: f64 },
    /// `r = a + b t`
    Linear { a: f64, b: f64 },
    /// `r = scale * exp(sum_k c_k sin(k pi t / t*))`
    LogFourier { scale: f64, coeffs: Vec<f64> },
    /// `r` interpolated from a table.
    Sampled { t: Vec<f64>, r: Vec<f64> },
}

impl ProfileSpec {
    pub fn build(&self, n: usize, t_star: f64, nodes: usize) -> Result<RadialProfile> {
        match self.clone() {
            Self::Constant { t0 } => RadialProfile::constant(n, t_star, t0, nodes),
            Self::Linear { a, b } => {
                RadialProfile::new(n, t_star, Arc::new(move |t| a + b * t), Arc::new(move |_| b), nodes)
            }
            Self::LogFourier { scale, coeffs } => {
                let c2 = coeffs.clone();
                let w = PI / t_star;
                let log_r = move |t: f64| -> f64 {
                    c2.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * w * t).sin()).sum()
                };
                let dlog = move |t: f64| -> f64 {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| c * (k + 1) as f64 * w * ((k + 1) as f64 * w * t).cos())
                        .sum()
                };
                let lr = log_r.clone();
                RadialProfile::new(
                    n,
                    t_star,
                    Arc::new(move |t| scale * log_r(t).exp()),
                    Arc::new(move |t| scale * lr(t).exp() * dlog(t)),
                    nodes,
                )
            }
            Self::Sampled { t, r } => {
                let f = Arc::new(SampledFunction::new(t, r)?);
                let g = f.clone();
                RadialProfile::new(n, t_star, Arc::new(move |x| f.value(x)), Arc::new(move |x| g.derivative(x)), nodes)
            }
        }
    }
}

/// Largest `|r'/r|` allowed for random log-Fourier profiles.
pub const RANDOM_SLOPE_CAP: f64 = 0.9;

/// A random smooth profile with `|r'| <= 0.9 r`: `scale ∈ [0.5, 3]` and up
/// to six sine modes of `ln r`.
pub fn random_profile_spec(rng: &mut impl Rng, t_star: f64) -> ProfileSpec {
    let modes = rng.gen_range(1..=6);
    let raw: Vec<f64> = (0..modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w = PI / t_star;
    let slope: f64 = raw.iter().enumerate().map(|(k, c)| c.abs() * (k + 1) as f64 * w).sum();
    let target = rng.gen_range(0.0..RANDOM_SLOPE_CAP);
    let coeffs = raw.iter().map(|c| c * target / slope).collect();
    ProfileSpec::LogFourier {
        scale: rng.gen_range(0.5..3.0),
        coeffs,
    }
}

pub fn random_profile(rng: &mut impl Rng, n: usize, nodes: usize) -> Result<RadialProfile> {
    let t_star = rng.gen_range(0.3..2.0);
    random_profile_spec(rng, t_star).build(n, t_star, nodes)
}

/// Random atomic graph: 2 to 40 atoms, masses in `[0.05, 2]`, values in
/// `[0.3, 3]`, gradient norms in `[0, 0.95]`.
pub fn random_atomic(rng: &mut impl Rng, n: usize) -> Result<GraphHypersurface> {
    let k = rng.gen_range(2..=40);
    let weights = (0..k).map(|_| rng.gen_range(0.05..2.0)).collect();
    let f = (0..k).map(|_| rng.gen_range(0.3..3.0)).collect();
    let grad = (0..k).map(|_| rng.gen_range(0.0..0.95)).collect();
    GraphHypersurface::new(crate::hypersurface::DomainMesh::atomic(weights)?, f, grad, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::{check_achronal, GraphData};
    use crate::simplex::instance_rng;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_reproduces_quadratics() {
        let t: Vec<f64> = (0..12).map(|i| 0.1 * i as f64 * (1.0 + 0.03 * i as f64)).collect();
        let y: Vec<f64> = t.iter().map(|x| 2.0 - x + 0.5 * x * x).collect();
        let f = SampledFunction::new(t.clone(), y).unwrap();
        for x in [0.0, 0.05, 0.37, 0.9, *t.last().unwrap()] {
            assert_relative_eq!(f.value(x), 2.0 - x + 0.5 * x * x, epsilon = 1e-13);
            assert_relative_eq!(f.derivative(x), -1.0 + x, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampled_table_validation() {
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0, 0.5], vec![1.0; 3]).is_err());
        let f = SampledFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0, 1.0]).unwrap();
        assert_eq!(f.value(-1.0), 1.0);
        assert_eq!(f.derivative(2.0), 0.0);
    }

    #[test]
    fn named_families() {
        let p = ProfileSpec::Linear { a: 2.0, b: 0.5 }.build(2, 1.0, 64).unwrap();
        assert_eq!(p.r(0.5), 2.25);
        assert_eq!(p.r_prime(0.1), 0.5);
        let spec: ProfileSpec = serde_json::from_str(r#"{"family":"constant","t0":1.5}"#).unwrap();
        assert_eq!(spec, ProfileSpec::Constant { t0: 1.5 });
        assert!(serde_json::from_str::<ProfileSpec>(r#"{"family":"constant","t0":1.5,"x":1}"#).is_err());
        let p = ProfileSpec::LogFourier { scale: 1.2, coeffs: vec![0.1, -0.05] }.build(3, 1.5, 64).unwrap();
        let h = 1e-6;
        for t in [0.2, 0.8, 1.3] {
            assert_relative_eq!(p.r_prime(t), (p.r(t + h) - p.r(t - h)) / (2.0 * h), epsilon = 1e-8);
        }
    }

    #[test]
    fn random_profiles_are_admissible() {
        for n in 1..=3 {
            for i in 0..200 {
                let p = random_profile(&mut instance_rng(5, i), n, 64).unwrap();
                assert!(p.log_grad_norms().iter().all(|g| *g <= RANDOM_SLOPE_CAP + 1e-12));
                assert!(check_achronal(&p, 0.0).is_admissible());
            }
        }
    }
}
