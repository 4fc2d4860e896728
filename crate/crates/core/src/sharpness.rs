//! Perturbations `r_eps = 1 + eps phi` of a geodesic ball, their asymptotic
//! expansions, and the fitted scaling of deficits against the Fraenkel
//! asymmetry.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functionals::{deficits, stability_check, DeficitReport};
use crate::hypersurface::{area, check_achronal, cone_volume, GraphData, RadialProfile, ScalarFn};
use crate::profiles::SampledFunction;
use crate::quadrature::{weighted_sum, DEFAULT_RADIAL_NODES};

/// Relative size of `|int phi dnu|` accepted as mean zero.
pub const MEAN_ZERO_TOL: f64 = 1e-10;

/// Grid used for sup norms and infima of bump functions.
const SUP_GRID: usize = 10_000;

/// `exp(-1/x)` for `x > 0`, else 0, with its derivative.
fn flat_exp(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        (0.0, 0.0)
    } else {
        let e = (-1.0 / x).exp();
        (e, e / (x * x))
    }
}

/// Smooth step from 0 (`x <= 0`) to 1 (`x >= 1`), flat at both ends.
fn smooth_step(x: f64) -> (f64, f64) {
    let (a, da) = flat_exp(x);
    let (b, db) = flat_exp(1.0 - x);
    let s = a + b;
    (a / s, (da * b + a * db) / (s * s))
}

#[derive(Clone)]
pub struct BumpFunction {
    phi: ScalarFn,
    dphi: ScalarFn,
    support: (f64, f64),
}

impl std::fmt::Debug for BumpFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BumpFunction").field("support", &self.support).finish()
    }
}

impl BumpFunction {
    /// `phi` and `phi'` vanish outside `support`, a closed subinterval of
    /// `(0, inf)`.
    pub fn new(phi: ScalarFn, dphi: ScalarFn, support: (f64, f64)) -> Result<Self> {
        let (a, b) = support;
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(invalid(format!("bump support [{a}, {b}] must lie in (0, inf)")));
        }
        let bump = Self { phi, dphi, support };
        if bump.grid().iter().all(|&t| bump.value(t) == 0.0) {
            return Err(invalid("bump function vanishes identically"));
        }
        Ok(bump)
    }

    /// `exp(-1/(s(1-s)))`, `s = (t-a)/(b-a)`, on `[a, b]`.
    pub fn standard(a: f64, b: f64) -> Result<Self> {
        let w = b - a;
        let phi = move |t: f64| {
            let s = (t - a) / w;
            if s <= 0.0 || s >= 1.0 {
                0.0
            } else {
                (-1.0 / (s * (1.0 - s))).exp()
            }
        };
        let dphi = move |t: f64| {
            let s = (t - a) / w;
            if s <= 0.0 || s >= 1.0 {
                0.0
            } else {
                let q = s * (1.0 - s);
                (-1.0 / q).exp() * (1.0 - 2.0 * s) / (q * q) / w
            }
        };
        Self::new(Arc::new(phi), Arc::new(dphi), (a, b))
    }

    /// Smooth plateau: 1 on `[a + w, b - w]`, 0 outside `[a, b]`.
    pub fn plateau(a: f64, b: f64, w: f64) -> Result<Self> {
        if !(w > 0.0 && 2.0 * w <= b - a) {
            return Err(invalid("plateau ramps must fit inside the support"));
        }
        let phi = move |t: f64| smooth_step((t - a) / w).0 * smooth_step((b - t) / w).0;
        let dphi = move |t: f64| {
            let (u, du) = smooth_step((t - a) / w);
            let (v, dv) = smooth_step((b - t) / w);
            (du * v - u * dv) / w
        };
        Self::new(Arc::new(phi), Arc::new(dphi), (a, b))
    }

    /// A bump from a sampled table; the support is the table range.
    pub fn from_table(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let f = Arc::new(SampledFunction::new(t, values)?);
        let (a, b) = (f.abscissae()[0], *f.abscissae().last().unwrap());
        let (g, h) = (f.clone(), f);
        Self::new(
            Arc::new(move |x| if (a..=b).contains(&x) { g.value(x) } else { 0.0 }),
            Arc::new(move |x| if (a..=b).contains(&x) { h.derivative(x) } else { 0.0 }),
            (a, b),
        )
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.phi)(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        (self.dphi)(t)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    fn grid(&self) -> Vec<f64> {
        let (a, b) = self.support;
        (0..=SUP_GRID).map(|i| a + (b - a) * i as f64 / SUP_GRID as f64).collect()
    }

    /// `(sup |phi|, sup |phi'|)` on a fine grid of the support.
    pub fn sup_norms(&self) -> (f64, f64) {
        self.grid().iter().fold((0.0, 0.0), |(p, d), &t| {
            (f64::max(p, self.value(t).abs()), f64::max(d, self.derivative(t).abs()))
        })
    }

    /// `phi - c chi`.
    fn minus(&self, c: f64, chi: &BumpFunction) -> Result<Self> {
        let (p, q) = (self.clone(), chi.clone());
        let (dp, dq) = (self.clone(), chi.clone());
        let support = (self.support.0.min(chi.support.0), self.support.1.max(chi.support.1));
        Self::new(
            Arc::new(move |t| p.value(t) - c * q.value(t)),
            Arc::new(move |t| dp.derivative(t) - c * dq.derivative(t)),
            support,
        )
    }
}

/// Nodes and `nu`-weights of the radial rule on `[0, t*]`.
fn radial_rule(n: usize, t_star: f64, nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let base = RadialProfile::constant(n, t_star, 1.0, nodes)?;
    Ok((base.nodes().to_vec(), base.weights().to_vec()))
}

/// `int phi dnu` and `int dnu` on `[0, t*]`.
pub fn nu_integral(phi: &BumpFunction, n: usize, t_star: f64, nodes: usize) -> Result<(f64, f64)> {
    let (t, w) = radial_rule(n, t_star, nodes)?;
    Ok((weighted_sum(&w, |i| phi.value(t[i])), w.iter().sum()))
}

/// Plateau used for mean-zero projection: support `[0.1 t*, 0.9 t*]`,
/// ramps of width `0.1 t*`.
pub fn projection_plateau(t_star: f64) -> Result<BumpFunction> {
    BumpFunction::plateau(0.1 * t_star, 0.9 * t_star, 0.1 * t_star)
}

/// `phi - (int phi dnu / int chi dnu) chi` for the fixed plateau `chi`.
pub fn mean_zero_projection(phi: &BumpFunction, n: usize, t_star: f64, nodes: usize) -> Result<BumpFunction> {
    if phi.support.1 > t_star {
        return Err(invalid(format!("bump support ends at {} > t* = {t_star}", phi.support.1)));
    }
    let chi = projection_plateau(t_star)?;
    let (int_phi, _) = nu_integral(phi, n, t_star, nodes)?;
    let (int_chi, _) = nu_integral(&chi, n, t_star, nodes)?;
    phi.minus(int_phi / int_chi, &chi)
}

/// The default perturbation: the standard bump on `[0.3, 0.7]`, projected
/// to `nu`-mean zero.
pub fn default_bump(n: usize, t_star: f64, nodes: usize) -> Result<BumpFunction> {
    mean_zero_projection(&BumpFunction::standard(0.3, 0.7)?, n, t_star, nodes)
}

/// Sufficient bound `1 / (sup|phi'| + sup|phi|)` for admissibility.
pub fn max_safe_eps(phi: &BumpFunction) -> f64 {
    let (p, d) = phi.sup_norms();
    1.0 / (p + d)
}

/// `r = 1 + eps phi`, `r' = eps phi'`, checked for `|r'| < r` at every node.
pub fn build_perturbation(phi: &BumpFunction, eps: f64, n: usize, t_star: f64, nodes: usize) -> Result<RadialProfile> {
    if !eps.is_finite() {
        return Err(invalid("eps must be finite"));
    }
    let (t, _) = radial_rule(n, t_star, nodes)?;
    for (i, &ti) in t.iter().enumerate() {
        let r = 1.0 + eps * phi.value(ti);
        let dr = eps * phi.derivative(ti);
        if !(r > 0.0 && dr.abs() < r) {
            return Err(Error::Inadmissible {
                index: i,
                value: if r > 0.0 { dr.abs() / r } else { f64::INFINITY },
            });
        }
    }
    if eps.abs() >= max_safe_eps(phi) {
        return Err(Error::Precondition(format!(
            "|eps| = {eps} is not below the sufficient bound {}",
            max_safe_eps(phi)
        )));
    }
    let (p, q) = (phi.clone(), phi.clone());
    RadialProfile::new(
        n,
        t_star,
        Arc::new(move |x| 1.0 + eps * p.value(x)),
        Arc::new(move |x| eps * q.derivative(x)),
        nodes,
    )
}

/// Taylor coefficients in `eps` of the perturbed functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients {
    pub n: usize,
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub dist1: f64,
    /// `(n+1)/2 mean|phi|`
    pub af_lower_coeff: f64,
    /// `(n+1) mean|phi|`, the leading coefficient of `A_F` itself.
    pub af_leading: f64,
    pub dcm1: f64,
    /// `int (2n phi^2 + phi'^2) dnu / (2 A0) + (inf phi)^2`.
    pub dcm2: f64,
    /// `mean(2n phi^2 + phi'^2) / (2 A0)` as printed with the refined
    /// deficit `delta_CM + eps inf phi`.
    pub dcm_star2_stated: f64,
    /// Second-order coefficient of `delta_CM - E`:
    /// `mean(n phi^2 + phi'^2) / 2 + (n+2)/2 (inf phi)^2`.
    pub dcm_star2: f64,
}

pub fn analytic_expansion(phi: &BumpFunction, n: usize, t_star: f64, nodes: usize) -> Result<ExpansionCoefficients> {
    let (t, w) = radial_rule(n, t_star, nodes)?;
    let nu: f64 = w.iter().sum();
    let p: Vec<f64> = t.iter().map(|&x| phi.value(x)).collect();
    let dp: Vec<f64> = t.iter().map(|&x| phi.derivative(x)).collect();
    let int_phi = weighted_sum(&w, |i| p[i]);
    if int_phi.abs() > MEAN_ZERO_TOL * nu {
        return Err(Error::Precondition(format!("phi has nu-mean {} != 0", int_phi / nu)));
    }
    let nf = n as f64;
    let int_sq = weighted_sum(&w, |i| p[i] * p[i]);
    let int_dsq = weighted_sum(&w, |i| dp[i] * dp[i]);
    let int_abs = weighted_sum(&w, |i| p[i].abs());
    let inf = p.iter().copied().fold(f64::INFINITY, f64::min);
    let a0 = nu;
    Ok(ExpansionCoefficients {
        n,
        v0: nu / (nf + 1.0),
        v1: int_phi,
        v2: 0.5 * nf * int_sq,
        a0,
        a1: nf * int_phi,
        a2: 0.5 * (nf * (nf - 1.0) * int_sq - int_dsq),
        dist1: inf,
        af_lower_coeff: 0.5 * (nf + 1.0) * int_abs / nu,
        af_leading: (nf + 1.0) * int_abs / nu,
        dcm1: -inf,
        dcm2: (2.0 * nf * int_sq + int_dsq) / (2.0 * a0) + inf * inf,
        dcm_star2_stated: (2.0 * nf * int_sq + int_dsq) / nu / (2.0 * a0),
        dcm_star2: 0.5 * (nf * int_sq + int_dsq) / nu + 0.5 * (nf + 2.0) * inf * inf,
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub delta_be: f64,
    pub delta_cm: f64,
    pub delta_cm_star: f64,
}

impl Exponents {
    fn fit(x: &[f64], reports: &[&DeficitReport]) -> Self {
        let ln = |f: fn(&DeficitReport) -> f64| reports.iter().map(|r| f(r).ln()).collect::<Vec<_>>();
        Self {
            delta_be: fit_slope(x, &ln(|r| r.delta_be)),
            delta_cm: fit_slope(x, &ln(|r| r.delta_cm)),
            delta_cm_star: fit_slope(x, &ln(|r| r.delta_cm_star)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessLadder {
    pub n: usize,
    pub t_star: f64,
    pub epsilons: Vec<f64>,
    pub reports: Vec<DeficitReport>,
    /// Slopes of `ln delta` against `ln A_F` over the three smallest `eps`.
    pub fitted_exponents: Exponents,
    /// Same slopes over the whole ladder.
    pub diagnostic_exponents: Exponents,
    /// Slopes of `ln delta` against `ln eps` over the whole ladder.
    pub eps_exponents: Exponents,
    pub analytic: ExpansionCoefficients,
    pub af_over_eps: Vec<f64>,
    /// Smallest `C >= 0` with `A_F >= eps c (1 - C eps)` on the ladder,
    /// `c` the lower-bound coefficient.
    pub fitted_c: f64,
    /// `delta*_CM / A_F^2` per point.
    pub cm_star_ratio: Vec<f64>,
    /// `|V - (V0 + V2 eps^2)| / eps^3` per point.
    pub volume_k: Vec<f64>,
    /// `|A - (A0 + A2 eps^2)| / eps^3` per point.
    pub area_k: Vec<f64>,
    /// Failed invariants, `"eps=...: message"`.
    pub invariant_failures: Vec<String>,
}

/// Deficits of `r_eps = 1 + eps phi` for a strictly decreasing ladder.
pub fn run_ladder(
    phi: &BumpFunction,
    n: usize,
    t_star: f64,
    epsilons: &[f64],
    nodes: usize,
    tol: f64,
) -> Result<SharpnessLadder> {
    if epsilons.len() < 3 {
        return Err(invalid("a ladder needs at least three eps values"));
    }
    if epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(invalid("ladder eps values must be positive"));
    }
    if epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("ladder eps values must be strictly decreasing"));
    }
    let analytic = analytic_expansion(phi, n, t_star, nodes)?;
    let points: Vec<(DeficitReport, Vec<String>)> = epsilons
        .par_iter()
        .map(|&eps| {
            let s = build_perturbation(phi, eps, n, t_star, nodes)?;
            let mut fails = Vec::new();
            if !check_achronal(&s, 0.0).is_admissible() {
                fails.push("spacelike condition violated".to_string());
            }
            let r = deficits(&s)?;
            fails.extend(r.invariant_violations(tol));
            let g = stability_check(&r)?;
            if g.min() < -tol {
                fails.push(format!("stability gap {}", g.min()));
            }
            Ok((r, fails.into_iter().map(|m| format!("eps={eps:e}: {m}")).collect()))
        })
        .collect::<Result<_>>()?;
    let (reports, fails): (Vec<_>, Vec<_>) = points.into_iter().unzip();
    let invariant_failures = fails.into_iter().flatten().collect();

    let all: Vec<&DeficitReport> = reports.iter().collect();
    let ln_af: Vec<f64> = reports.iter().map(|r| r.asymmetry.ln()).collect();
    let ln_eps: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let k = reports.len();
    let tail = &all[k - 3..];
    let af_over_eps: Vec<f64> = reports.iter().zip(epsilons).map(|(r, e)| r.asymmetry / e).collect();
    let fitted_c = af_over_eps
        .iter()
        .zip(epsilons)
        .map(|(ratio, e)| ((1.0 - ratio / analytic.af_lower_coeff) / e).max(0.0))
        .fold(0.0, f64::max);
    let a = &analytic;
    Ok(SharpnessLadder {
        n,
        t_star,
        epsilons: epsilons.to_vec(),
        fitted_exponents: Exponents::fit(&ln_af[k - 3..], tail),
        diagnostic_exponents: Exponents::fit(&ln_af, &all),
        eps_exponents: Exponents::fit(&ln_eps, &all),
        af_over_eps,
        fitted_c,
        cm_star_ratio: reports.iter().map(|r| r.delta_cm_star / r.asymmetry.powi(2)).collect(),
        volume_k: reports
            .iter()
            .zip(epsilons)
            .map(|(r, e)| (r.volume - a.v0 - a.v2 * e * e).abs() / e.powi(3))
            .collect(),
        area_k: reports
            .iter()
            .zip(epsilons)
            .map(|(r, e)| (r.area - a.a0 - a.a2 * e * e).abs() / e.powi(3))
            .collect(),
        reports,
        analytic,
        invariant_failures,
    })
}

/// `count` log-spaced values from `10^hi_exp` down to `10^lo_exp`.
pub fn log_ladder(hi_exp: f64, lo_exp: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 10f64.powf(hi_exp + (lo_exp - hi_exp) * i as f64 / (count - 1) as f64))
        .collect()
}

/// The default ladder: 8 points from `10^{-1.5}` to `10^{-3}`.
pub fn default_ladder() -> Vec<f64> {
    log_ladder(-1.5, -3.0, 8)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteDifferenceCheck {
    pub v1: f64,
    pub v2: f64,
    pub a1: f64,
    pub a2: f64,
}

/// First and second `eps`-derivatives of `V` and `A` at 0 from central
/// differences with Richardson extrapolation over steps `h` and `h/2`,
/// returned as Taylor coefficients.
pub fn finite_difference_coefficients(
    phi: &BumpFunction,
    n: usize,
    t_star: f64,
    h: f64,
    nodes: usize,
) -> Result<FiniteDifferenceCheck> {
    let eval = |e: f64| -> Result<(f64, f64)> {
        let s = build_perturbation(phi, e, n, t_star, nodes)?;
        Ok((cone_volume(&s)?, area(&s)))
    };
    let (v0, a0) = eval(0.0)?;
    let d = |step: f64| -> Result<[f64; 4]> {
        let (vp, ap) = eval(step)?;
        let (vm, am) = eval(-step)?;
        Ok([
            (vp - vm) / (2.0 * step),
            (vp - 2.0 * v0 + vm) / (step * step),
            (ap - am) / (2.0 * step),
            (ap - 2.0 * a0 + am) / (step * step),
        ])
    };
    let (coarse, fine) = (d(h)?, d(0.5 * h)?);
    let r: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    Ok(FiniteDifferenceCheck {
        v1: r[0],
        v2: 0.5 * r[1],
        a1: r[2],
        a2: 0.5 * r[3],
    })
}

/// Default node count for ladder runs.
pub const LADDER_NODES: usize = DEFAULT_RADIAL_NODES;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bump() -> BumpFunction {
        default_bump(2, 1.0, LADDER_NODES).unwrap()
    }

    #[test]
    fn projection_examples() {
        let phi = bump();
        let (int, nu) = nu_integral(&phi, 2, 1.0, LADDER_NODES).unwrap();
        assert!(int.abs() <= 1e-10 * nu);
        // constant-sign input changes sign after projection
        assert!(phi.value(0.5) > 0.0 && phi.value(0.15) < 0.0);
        let again = mean_zero_projection(&phi, 2, 1.0, LADDER_NODES).unwrap();
        for t in [0.12, 0.35, 0.5, 0.77] {
            assert!((again.value(t) - phi.value(t)).abs() <= 1e-12);
        }
        assert!(BumpFunction::standard(0.0, 0.5).is_err());
        assert!(mean_zero_projection(&BumpFunction::standard(0.3, 1.5).unwrap(), 2, 1.0, 64).is_err());
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let phi = bump();
        let h = 1e-6;
        for t in [0.12, 0.2, 0.33, 0.5, 0.68, 0.85] {
            let fd = (phi.value(t + h) - phi.value(t - h)) / (2.0 * h);
            assert_relative_eq!(phi.derivative(t), fd, epsilon = 1e-7);
        }
        assert_eq!(phi.value(0.05), 0.0);
        assert_eq!(phi.derivative(0.0), 0.0);
    }

    #[test]
    fn perturbation_examples() {
        let phi = bump();
        let s = build_perturbation(&phi, 0.0, 2, 1.0, 256).unwrap();
        let r = deficits(&s).unwrap();
        assert!(r.delta_be.abs() <= 1e-14 && r.delta_cm.abs() <= 1e-14 && r.asymmetry.abs() <= 1e-14);
        assert!(build_perturbation(&phi, 1e-2, 2, 1.0, 256).is_ok());
        assert!(matches!(
            build_perturbation(&phi, 10.0, 2, 1.0, 256),
            Err(Error::Inadmissible { .. }) | Err(Error::Precondition(_))
        ));
        let big = BumpFunction::standard(0.3, 0.7).unwrap();
        assert!(matches!(
            build_perturbation(&big, 2000.0, 2, 1.0, 256),
            Err(Error::Inadmissible { .. })
        ));
    }

    #[test]
    fn expansion_requires_mean_zero() {
        let raw = BumpFunction::standard(0.3, 0.7).unwrap();
        assert!(matches!(analytic_expansion(&raw, 2, 1.0, 256), Err(Error::Precondition(_))));
        let c = analytic_expansion(&bump(), 2, 1.0, LADDER_NODES).unwrap();
        assert!(c.v1.abs() <= 1e-10 && c.a1.abs() <= 1e-10);
        assert!(c.dcm_star2 > 0.0 && c.dcm_star2_stated > 0.0);
        assert_relative_eq!(c.a0, 2.0 * std::f64::consts::PI * (1f64.cosh() - 1.0), max_relative = 1e-12);
    }

    #[test]
    fn expansion_matches_finite_differences() {
        let phi = bump();
        let c = analytic_expansion(&phi, 2, 1.0, LADDER_NODES).unwrap();
        let fd = finite_difference_coefficients(&phi, 2, 1.0, 1e-3, LADDER_NODES).unwrap();
        assert_relative_eq!(fd.v2, c.v2, max_relative = 1e-4);
        assert_relative_eq!(fd.a2, c.a2, max_relative = 1e-4);
        assert!(fd.v1.abs() <= 1e-4 * c.v2.abs() && fd.a1.abs() <= 1e-4 * c.a2.abs());
    }

    #[test]
    fn refined_deficit_second_order() {
        let phi = bump();
        let c = analytic_expansion(&phi, 2, 1.0, LADDER_NODES).unwrap();
        let eps = 1e-3;
        let r = deficits(&build_perturbation(&phi, eps, 2, 1.0, LADDER_NODES).unwrap()).unwrap();
        assert_relative_eq!(r.delta_cm_star / (eps * eps), c.dcm_star2, max_relative = 1e-2);
        assert_relative_eq!((r.delta_cm - c.dcm1 * eps) / (eps * eps), c.dcm2, max_relative = 1e-2);
    }

    #[test]
    fn ladder_rejections() {
        let phi = bump();
        assert!(run_ladder(&phi, 2, 1.0, &[0.0], 64, 1e-6).is_err());
        assert!(run_ladder(&phi, 2, 1.0, &[1e-2], 64, 1e-6).is_err());
        assert!(run_ladder(&phi, 2, 1.0, &[1e-3, 1e-2, 1e-1], 64, 1e-6).is_err());
    }

    #[test]
    fn default_ladder_scaling() {
        let phi = bump();
        let l = run_ladder(&phi, 2, 1.0, &default_ladder(), LADDER_NODES, 1e-6).unwrap();
        assert!(l.invariant_failures.is_empty(), "{:?}", l.invariant_failures);
        assert!((l.fitted_exponents.delta_be - 2.0).abs() <= 0.1);
        assert!((l.fitted_exponents.delta_cm - 1.0).abs() <= 0.1);
        assert!((l.fitted_exponents.delta_cm_star - 2.0).abs() <= 0.1);
        assert!((l.eps_exponents.delta_cm - 1.0).abs() <= 0.05);
        assert!((l.eps_exponents.delta_cm_star - 2.0).abs() <= 0.05);
        let last = *l.af_over_eps.last().unwrap();
        assert!(last >= 0.99 * l.analytic.af_lower_coeff);
        assert_relative_eq!(last, l.analytic.af_leading, max_relative = 1e-2);
        // O(eps^3) remainder of the quadratic models, above the roundoff floor
        for ks in [&l.volume_k, &l.area_k] {
            let big = 1.5 * ks[..3].iter().copied().fold(0.0, f64::max);
            for (k, e) in ks.iter().zip(&l.epsilons) {
                assert!(k * e.powi(3) <= big * e.powi(3) + 1e-14);
            }
        }
    }

    #[test]
    fn sampled_bump_behaves_like_analytic() {
        let raw = BumpFunction::standard(0.3, 0.7).unwrap();
        let t: Vec<f64> = (0..=400).map(|i| 0.3 + 0.4 * i as f64 / 400.0).collect();
        let y: Vec<f64> = t.iter().map(|&x| raw.value(x)).collect();
        let table = BumpFunction::from_table(t, y).unwrap();
        for x in [0.35, 0.5, 0.61] {
            assert_relative_eq!(table.value(x), raw.value(x), epsilon = 1e-8);
        }
        let phi = mean_zero_projection(&table, 2, 1.0, LADDER_NODES).unwrap();
        let l = run_ladder(&phi, 2, 1.0, &default_ladder(), LADDER_NODES, 1e-6).unwrap();
        assert!((l.fitted_exponents.delta_be - 2.0).abs() <= 0.1);
        assert!((l.fitted_exponents.delta_cm - 1.0).abs() <= 0.1);
    }

    #[test]
    fn slope_fit() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert_relative_eq!(fit_slope(&x, &y), 2.0, epsilon = 1e-15);
    }
}
