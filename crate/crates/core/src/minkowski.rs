//! Minkowski linear algebra in signature `- + ... +` and the hyperboloid
//! model of hyperbolic space.
//!
//! Index 0 of every coordinate vector is the time coordinate. The time
//! orientation is fixed by `v0 = (1, 0, ..., 0)`: a non-spacelike vector `v`
//! is future-directed iff `<v, v0> < 0`, i.e. iff its time coordinate is
//! positive.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};

/// Relative width of the lightlike band used by [`classify`].
pub const LIGHTLIKE_TOL: f64 = 1e-12;

/// Tolerance on `-<x, y> >= 1` before [`hyperbolic_dist`] reports drift off
/// the sheet.
pub const SHEET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiVector {
    coords: Vec<f64>,
}

impl MinkowskiVector {
    /// Builds a vector in `L^{n+1}` from its `n + 1` coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(invalid(format!(
                "a Minkowski vector needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(invalid(format!("non-finite coordinate {bad}")));
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    /// The time orientation `v0 = (1, 0, ..., 0)` in dimension `n`.
    pub fn time_unit(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        Self { coords }
    }

    /// Spatial dimension `n` (the vector has `n + 1` entries).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn time(&self) -> f64 {
        self.coords[0]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        })
    }

    /// `<v, v>` without the dimension check.
    pub fn square(&self) -> f64 {
        raw_inner(&self.coords, &self.coords)
    }

    pub fn euclidean_norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }
}

fn check_dims(u: &MinkowskiVector, v: &MinkowskiVector) -> Result<()> {
    if u.coords.len() != v.coords.len() {
        return Err(invalid(format!(
            "dimension mismatch: {} vs {}",
            u.dim(),
            v.dim()
        )));
    }
    Ok(())
}

pub(crate) fn raw_inner(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let spatial: f64 = u[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
    spatial - u[0] * v[0]
}

/// Minkowski inner product `-u0 v0 + sum_{i>=1} ui vi`.
pub fn mink_inner(u: &MinkowskiVector, v: &MinkowskiVector) -> Result<f64> {
    check_dims(u, v)?;
    Ok(raw_inner(&u.coords, &v.coords))
}

/// Lorentzian norm `sqrt(|<v, v>|)`.
pub fn lorentz_norm(v: &MinkowskiVector) -> f64 {
    v.square().abs().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalTag {
    Spacelike,
    Timelike,
    Lightlike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalClass {
    pub tag: CausalTag,
    /// `None` for spacelike vectors.
    pub future_directed: Option<bool>,
}

impl CausalClass {
    pub fn is_future_timelike(&self) -> bool {
        self.tag == CausalTag::Timelike && self.future_directed == Some(true)
    }
}

/// Sign class of `<v, v>` with a lightlike band of half-width
/// [`LIGHTLIKE_TOL`]` * |v|^2_Eucl`.
pub fn classify(v: &MinkowskiVector) -> CausalClass {
    let q = v.square();
    let band = LIGHTLIKE_TOL * v.euclidean_norm_sq();
    let tag = if q < -band {
        CausalTag::Timelike
    } else if q > band {
        CausalTag::Spacelike
    } else {
        CausalTag::Lightlike
    };
    let future_directed = match tag {
        CausalTag::Spacelike => None,
        // <v, v0> = -v_0
        _ => Some(-v.time() < 0.0),
    };
    CausalClass { tag, future_directed }
}

/// A point on the future sheet of the unit hyperboloid `<x, x> = -1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicPoint {
    vector: MinkowskiVector,
}

impl HyperbolicPoint {
    /// Radially projects a future-directed timelike vector onto the sheet.
    pub fn new(v: MinkowskiVector) -> Result<Self> {
        radial_project(&v)
    }

    /// The base point `v0 = (1, 0, ..., 0)`.
    pub fn origin(n: usize) -> Self {
        Self {
            vector: MinkowskiVector::time_unit(n),
        }
    }

    /// The point at hyperbolic distance `t` from the origin in the spatial
    /// direction `dir` (normalized internally, must be nonzero).
    pub fn from_polar(t: f64, dir: &[f64]) -> Result<Self> {
        let len = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        if !(len > 0.0) || !t.is_finite() {
            return Err(invalid("polar direction must be nonzero and t finite"));
        }
        let (sh, ch) = (t.sinh(), t.cosh());
        let mut coords = Vec::with_capacity(dir.len() + 1);
        coords.push(ch);
        coords.extend(dir.iter().map(|d| sh * d / len));
        Ok(Self {
            vector: MinkowskiVector::new(coords)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn vector(&self) -> &MinkowskiVector {
        &self.vector
    }

    pub fn coords(&self) -> &[f64] {
        self.vector.coords()
    }

    /// Applies the Lorentz boost that maps the origin to `center`.
    ///
    /// For `c = (c0, c')` the boost is
    /// `[[c0, c'^T], [c', I + c' c'^T / (1 + c0)]]`.
    pub fn boost_from_origin(&self, center: &HyperbolicPoint) -> Result<Self> {
        if self.dim() != center.dim() {
            return Err(invalid("boost dimension mismatch"));
        }
        let c = center.coords();
        let x = self.coords();
        let spatial_dot: f64 = c[1..].iter().zip(&x[1..]).map(|(a, b)| a * b).sum();
        let mut out = Vec::with_capacity(x.len());
        out.push(c[0] * x[0] + spatial_dot);
        let k = x[0] + spatial_dot / (1.0 + c[0]);
        for i in 1..x.len() {
            out.push(c[i] * k + x[i]);
        }
        Ok(Self {
            vector: MinkowskiVector::new(out)?,
        })
    }
}

/// `v / |v|` for a future-directed timelike `v`.
pub fn radial_project(v: &MinkowskiVector) -> Result<HyperbolicPoint> {
    let class = classify(v);
    if !class.is_future_timelike() {
        return Err(domain(format!(
            "radial projection needs a future-directed timelike vector, got {:?}",
            class
        )));
    }
    let norm = lorentz_norm(v);
    Ok(HyperbolicPoint {
        vector: v.scale(1.0 / norm),
    })
}

/// Hyperbolic distance `arccosh(-<x, y>)`.
///
/// Evaluated as `2 asinh(|x - y| / 2)` with `|x - y|^2 = <x-y, x-y>`, which
/// is the same quantity but does not lose digits for nearby points.
pub fn hyperbolic_dist(x: &HyperbolicPoint, y: &HyperbolicPoint) -> Result<f64> {
    let c = -mink_inner(&x.vector, &y.vector)?;
    if c < 1.0 - SHEET_TOL {
        return Err(domain(format!("-<x, y> = {c} < 1: points are off the sheet")));
    }
    let diff: Vec<f64> = x.coords().iter().zip(y.coords()).map(|(a, b)| a - b).collect();
    let chord_sq = raw_inner(&diff, &diff).max(0.0);
    Ok(2.0 * (0.5 * chord_sq.sqrt()).asinh())
}

/// Volume of the Euclidean unit ball in `R^n`, `pi^{n/2} / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    std::f64::consts::PI.powf(h) / libm::tgamma(h + 1.0)
}

/// Radial density of the hyperbolic measure: `n V(B_1) sinh^{n-1}(t)`.
pub fn nu_weight(t: f64, n: usize) -> f64 {
    n as f64 * unit_ball_volume(n) * t.sinh().powi(n as i32 - 1)
}

/// `|u + v| - |u| - |v|`; nonnegative for future-directed timelike pairs.
pub fn reverse_triangle_check(u: &MinkowskiVector, v: &MinkowskiVector) -> Result<f64> {
    for w in [u, v] {
        if !classify(w).is_future_timelike() {
            return Err(domain("reverse triangle check needs future timelike vectors"));
        }
    }
    let sum = u.add(v)?;
    Ok(lorentz_norm(&sum) - lorentz_norm(u) - lorentz_norm(v))
}
