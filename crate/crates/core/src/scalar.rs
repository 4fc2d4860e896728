//! Scalar lemmas behind the stability proofs, appendix distances, and the
//! auxiliary functions of the improved refined-CM constant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::functionals::deficits;
use crate::hypersurface::{measure, GraphData};
use crate::median::{golden_section, l1_deviation, lp_deviation, weighted_median};
use crate::quadrature::weighted_sum;

/// Default constant and smallness cap of the Bernoulli L² check.
pub const BERNOULLI_C_TILDE: f64 = 1.0 / 16.0;
pub const BERNOULLI_LAMBDA: f64 = 1.0 / 100.0;

const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBound {
    pub gap: f64,
    pub bound: f64,
}

impl GapBound {
    pub fn slack(&self) -> f64 {
        self.gap - self.bound
    }
}

/// `((a+1)/2)^p - (a^p+1)/2` against `p(1-p)/8 (1-a)^2`.
pub fn jensen_gap(a: f64, p: f64) -> Result<GapBound> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(domain(format!("a = {a} outside (0, 1]")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("p = {p} outside (0, 1)")));
    }
    Ok(GapBound {
        gap: (0.5 * (a + 1.0)).powf(p) - 0.5 * (a.powf(p) + 1.0),
        bound: p * (1.0 - p) / 8.0 * (1.0 - a).powi(2),
    })
}

/// Generalized binomial coefficient `C(p, i)`.
pub fn binomial(p: f64, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, k| acc * (p - k as f64) / (k as f64 + 1.0))
}

/// Coefficients `c_0..=c_{i_max}` of the expansion of the Jensen gap in
/// `b = a - 1`: `c_i = C(p, i) (1 - 2^{i-1}) / 2^i`, `c_0 = 0`.
pub fn jensen_series_coefficients(p: f64, i_max: usize) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("p = {p} outside (0, 1)")));
    }
    if i_max < 3 {
        return Err(invalid("need at least the cubic coefficient"));
    }
    Ok((0..=i_max)
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                binomial(p, i) * (1.0 - 2f64.powi(i as i32 - 1)) / 2f64.powi(i as i32)
            }
        })
        .collect())
}

/// `(2(a+b)^n)^{1/(n+1)} - (a^{n/(n+1)} + b^{n/(n+1)})` against
/// `n/(4(n+1)^2) max(a,b)^{-(n+2)/(n+1)} |b-a|^2`.
pub fn minkowski_gap(a: f64, b: f64, n: usize) -> Result<GapBound> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain(format!("minkowski_gap needs a, b > 0, got {a}, {b}")));
    }
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let nf = n as f64;
    let n1 = nf + 1.0;
    let q = nf / n1;
    Ok(GapBound {
        gap: (2.0 * (a + b).powi(n as i32)).powf(1.0 / n1) - (a.powf(q) + b.powf(q)),
        bound: nf / (4.0 * n1 * n1) * a.max(b).powf(-(nf + 2.0) / n1) * (b - a).powi(2),
    })
}

/// `L(a) = (1+a)^{-1/(n+1)} + a/(n+1) - 1`.
pub fn l_function(a: f64, n: usize) -> Result<f64> {
    if !(a > -1.0) {
        return Err(domain(format!("L needs a > -1, got {a}")));
    }
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let n1 = (n + 1) as f64;
    Ok((1.0 + a).powf(-1.0 / n1) + a / n1 - 1.0)
}

/// `L̃(a) = (L(a) - L(1) a^2) (1+a)^{1/(n+1)}` on `[0, 1]`.
pub fn l_tilde(a: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(domain(format!("L̃ needs a in [0, 1], got {a}")));
    }
    let n1 = (n + 1) as f64;
    Ok((l_function(a, n)? - l_function(1.0, n)? * a * a) * (1.0 + a).powf(1.0 / n1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprovedConstant {
    pub n: usize,
    pub c_app_b: f64,
    pub c_thm11: f64,
    /// `(c_app_b / (n+1), c_thm11 / (n+1))`.
    pub normalized: (f64, f64),
    /// Relative difference between `4/L(1)` and its closed form.
    pub identity_residual: f64,
}

/// Asymptotic value of `c_app_b / (n+1)`.
pub fn improved_constant_limit() -> f64 {
    4.0 / (1.0 - std::f64::consts::LN_2)
}

pub fn improved_constant(n: usize) -> Result<ImprovedConstant> {
    let l1 = l_function(1.0, n)?;
    let nf = n as f64;
    let n1 = nf + 1.0;
    let c_app_b = 4.0 / l1;
    let closed = 1.0 / (2f64.powf(-(2.0 + 1.0 / n1)) - nf / (4.0 * n1));
    let c_thm11 = 16.0 * n1 * n1 / nf;
    Ok(ImprovedConstant {
        n,
        c_app_b,
        c_thm11,
        normalized: (c_app_b / n1, c_thm11 / n1),
        identity_residual: ((c_app_b - closed) / closed).abs(),
    })
}

/// The three Hölder exponents with a known quantitative inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolderExponent {
    /// `p = (n+1)/n`
    Conjugate,
    /// `p = n+1`
    Dual,
    /// `p = 2`
    Two,
}

impl HolderExponent {
    pub fn value(self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Self::Conjugate => (nf + 1.0) / nf,
            Self::Dual => nf + 1.0,
            Self::Two => 2.0,
        }
    }

    pub fn beta(self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Self::Conjugate => 4.0 * nf,
            Self::Dual => (nf + 1.0) * 2f64.powi(n as i32),
            Self::Two => nf + 1.0,
        }
    }

    /// Parses a numeric exponent; `n = 1` makes all three coincide and
    /// resolves to [`HolderExponent::Two`].
    pub fn from_value(p: f64, n: usize) -> Result<Self> {
        let close = |x: f64| (p - x).abs() <= 1e-12 * x;
        [Self::Two, Self::Conjugate, Self::Dual]
            .into_iter()
            .find(|e| close(e.value(n)))
            .ok_or_else(|| Error::UnsupportedDomain(format!("no quantitative Hölder inequality for p = {p}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderDistance {
    pub p: f64,
    /// `inf_c ||(g/gbar)^{1/p} - c||_{L^p}^{max(p,2)}` w.r.t. the
    /// normalized measure `mu / mu(Omega)`.
    pub distance: f64,
    pub minimizer: f64,
    pub beta: f64,
}

/// Hölder-type distance of atomic data `g` with masses `weights`.
pub fn holder_stability_distance(
    g: &[f64],
    weights: &[f64],
    exponent: HolderExponent,
    n: usize,
) -> Result<HolderDistance> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if g.is_empty() || g.len() != weights.len() {
        return Err(invalid("g and weights must be nonempty and of equal length"));
    }
    if g.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(invalid("g must be positive and finite"));
    }
    let mass = weights.iter().sum::<f64>();
    if !(mass > 0.0) {
        return Err(invalid("total mass must be positive"));
    }
    let p = exponent.value(n);
    let nw: Vec<f64> = weights.iter().map(|w| w / mass).collect();
    let gbar = weighted_sum(&nw, |i| g[i]);
    let h: Vec<f64> = g.iter().map(|x| (x / gbar).powf(1.0 / p)).collect();
    let power = p.max(2.0);
    let (minimizer, norm_p) = if exponent == HolderExponent::Two || p == 2.0 {
        let c = weighted_sum(&nw, |i| h[i]);
        (c, lp_deviation(&h, &nw, c, 2.0))
    } else {
        let lo = h.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        golden_section(lo, hi, GOLDEN_TOL, |c| lp_deviation(&h, &nw, c, p))
    };
    // norm_p is ||.||_p^p
    let distance = norm_p.powf(power / p);
    Ok(HolderDistance {
        p,
        distance,
        minimizer,
        beta: exponent.beta(n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderCheck {
    pub distance: HolderDistance,
    /// `delta_BE / (1 + delta_BE)`.
    pub rhs: f64,
    /// `rhs - distance / beta`.
    pub gap: f64,
}

/// Evaluates the Hölder route stability bound on `g = f^{n+1}`.
pub fn holder_bound_check<S: GraphData + ?Sized>(s: &S, exponent: HolderExponent) -> Result<HolderCheck> {
    let r = deficits(s)?;
    let n1 = s.dim() as i32 + 1;
    let g: Vec<f64> = s.values().iter().map(|f| f.powi(n1)).collect();
    let d = holder_stability_distance(&g, s.weights(), exponent, s.dim())?;
    let rhs = r.delta_be / (1.0 + r.delta_be);
    Ok(HolderCheck {
        distance: d,
        rhs,
        gap: rhs - d.distance / d.beta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepFunctionPair {
    pub j: u32,
    pub values: (f64, f64),
    pub masses: (f64, f64),
}

impl StepFunctionPair {
    pub fn new(j: u32) -> Result<Self> {
        if j < 1 {
            return Err(domain("j must be at least 1"));
        }
        let jf = j as f64;
        let s = (2.0 * jf).sqrt();
        Ok(Self {
            j,
            values: ((jf + 1.0) / s, (jf - 1.0 / jf) / s),
            masses: (1.0, jf),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleDistances {
    pub l2_distance: f64,
    pub l1_sq_distance: f64,
}

/// `inf_c ||f_j - c||_{L^2}` and `inf_c ||f_j^2 - c||_{L^1}` for the
/// two-level step family, by weighted mean and weighted median.
pub fn counterexample_family(j: u32) -> Result<CounterexampleDistances> {
    let pair = StepFunctionPair::new(j)?;
    let f = [pair.values.0, pair.values.1];
    let w = [pair.masses.0, pair.masses.1];
    let mean = (w[0] * f[0] + w[1] * f[1]) / (w[0] + w[1]);
    let l2 = lp_deviation(&f, &w, mean, 2.0).sqrt();
    let sq = [f[0] * f[0], f[1] * f[1]];
    let med = weighted_median(&sq, &w)?;
    Ok(CounterexampleDistances {
        l2_distance: l2,
        l1_sq_distance: l1_deviation(&sq, &w, med),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliReport {
    pub c_tilde: f64,
    pub lambda: f64,
    /// `sup |g - gbar| / gbar`.
    pub perturbation: f64,
    /// `c̃ / sigma * inf_c ||g/gbar - c||_{L^2}^2`.
    pub lhs: f64,
    /// `delta_BE / (1 + delta_BE)`.
    pub rhs: f64,
    pub gap: f64,
}

/// Second-order (Bernoulli) stability bound under the pointwise smallness
/// assumption `|g - gbar| <= lambda gbar`.
pub fn bernoulli_l2_check<S: GraphData + ?Sized>(s: &S, lambda: f64, c_tilde: f64) -> Result<BernoulliReport> {
    if !(lambda > 0.0) || !(c_tilde > 0.0 && c_tilde < 0.125) {
        return Err(invalid("need lambda > 0 and c̃ in (0, 1/8)"));
    }
    let r = deficits(s)?;
    let n1 = s.dim() as i32 + 1;
    let gbar = r.volume / r.sigma;
    let g: Vec<f64> = s.values().iter().map(|f| f.powi(n1)).collect();
    let perturbation = g.iter().map(|x| (x / gbar - 1.0).abs()).fold(0.0, f64::max);
    if perturbation > lambda {
        return Err(Error::Precondition(format!(
            "sup |g - gbar| / gbar = {perturbation:.3e} exceeds the cap {lambda:.3e}"
        )));
    }
    let mu = measure(s);
    let ratio: Vec<f64> = g.iter().map(|x| x / gbar).collect();
    let c = weighted_sum(s.weights(), |i| ratio[i]) / mu;
    let lhs = c_tilde / r.sigma * lp_deviation(&ratio, s.weights(), c, 2.0);
    let rhs = r.delta_be / (1.0 + r.delta_be);
    Ok(BernoulliReport {
        c_tilde,
        lambda,
        perturbation,
        lhs,
        rhs,
        gap: rhs - lhs,
    })
}

/// Grids for the scalar sweeps. `a` and `b` use right-endpoint samples
/// (`a = 1` is included, `a = 0` avoided); `p` uses half-step offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarSweepGrid {
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub n_values: Vec<usize>,
}

/// `k` points `lo + (i+1) (hi - lo)/k`.
pub fn right_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let h = (hi - lo) / k as f64;
    (0..k).map(|i| lo + (i + 1) as f64 * h).collect()
}

/// `k` points `lo + (i + 1/2) (hi - lo)/k`.
pub fn half_step_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let h = (hi - lo) / k as f64;
    (0..k).map(|i| lo + (i as f64 + 0.5) * h).collect()
}

impl ScalarSweepGrid {
    pub fn new(a_values: Vec<f64>, b_values: Vec<f64>, p_values: Vec<f64>, n_values: Vec<usize>) -> Result<Self> {
        let g = Self {
            a_values,
            b_values,
            p_values,
            n_values,
        };
        g.validate()?;
        Ok(g)
    }

    /// 200 × 200 grids on `(0,1] × (0,1)` and `(0,10]^2`, `n ∈ {1,2,3}`.
    pub fn standard(k: usize) -> Self {
        Self {
            a_values: right_grid(0.0, 1.0, k),
            b_values: right_grid(0.0, 10.0, k),
            p_values: half_step_grid(0.0, 1.0, k),
            n_values: vec![1, 2, 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.a_values.iter().chain(&self.b_values).chain(&self.p_values);
        if all.clone().any(|x| !x.is_finite()) {
            return Err(invalid("grid values must be finite"));
        }
        if self.a_values.iter().any(|a| !(*a > 0.0)) || self.b_values.iter().any(|b| !(*b > 0.0)) {
            return Err(domain("a and b grids must be positive"));
        }
        if self.p_values.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return Err(domain("p grid must lie in (0, 1)"));
        }
        if self.n_values.contains(&0) {
            return Err(domain("n values must be positive"));
        }
        Ok(())
    }
}

/// One CSV row `(a, b_or_p, n, gap, bound, slack)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub b_or_p: f64,
    pub n: Option<usize>,
    pub gap: f64,
    pub bound: f64,
    pub slack: f64,
}

impl SweepRow {
    fn from_gap(a: f64, b_or_p: f64, n: Option<usize>, g: GapBound) -> Self {
        Self {
            a,
            b_or_p,
            n,
            gap: g.gap,
            bound: g.bound,
            slack: g.slack(),
        }
    }
}

/// Jensen lemma over `a_values × p_values` (only `a <= 1` is used).
pub fn jensen_sweep(grid: &ScalarSweepGrid) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let pairs: Vec<(f64, f64)> = grid
        .a_values
        .iter()
        .filter(|a| **a <= 1.0)
        .flat_map(|&a| grid.p_values.iter().map(move |&p| (a, p)))
        .collect();
    pairs
        .par_iter()
        .map(|&(a, p)| Ok(SweepRow::from_gap(a, p, None, jensen_gap(a, p)?)))
        .collect()
}

/// Minkowski lemma over `n_values × b_values × b_values`.
pub fn minkowski_sweep(grid: &ScalarSweepGrid) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let triples: Vec<(usize, f64, f64)> = grid
        .n_values
        .iter()
        .flat_map(|&n| {
            grid.b_values
                .iter()
                .flat_map(move |&a| grid.b_values.iter().map(move |&b| (n, a, b)))
        })
        .collect();
    triples
        .par_iter()
        .map(|&(n, a, b)| Ok(SweepRow::from_gap(a, b, Some(n), minkowski_gap(a, b, n)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::GraphHypersurface;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn jensen_examples() {
        for p in [0.1, 0.5, 0.9] {
            let g = jensen_gap(1.0, p).unwrap();
            assert_eq!((g.gap, g.bound), (0.0, 0.0));
        }
        let g = jensen_gap(0.25, 0.5).unwrap();
        assert_relative_eq!(g.gap, 0.625f64.sqrt() - 0.75, epsilon = 1e-15);
        assert_relative_eq!(g.gap, 0.040569, epsilon = 1e-6);
        assert_relative_eq!(g.bound, 0.5625 / 32.0, epsilon = 1e-16);
        let g = jensen_gap(0.5, 2.0 / 3.0).unwrap();
        assert_relative_eq!(g.bound, 2.0 / 9.0 / 8.0 * 0.25, epsilon = 1e-16);
        assert!(g.gap >= g.bound);
        assert!(jensen_gap(0.0, 0.5).is_err());
        assert!(jensen_gap(1.5, 0.5).is_err());
        assert!(jensen_gap(0.5, 1.0).is_err());
    }

    #[test]
    fn jensen_coefficients() {
        let c = jensen_series_coefficients(0.5, 6).unwrap();
        assert_eq!((c[0], c[1]), (0.0, 0.0));
        assert_relative_eq!(c[2], 1.0 / 32.0, epsilon = 1e-16);
        let c = jensen_series_coefficients(2.0 / 3.0, 3).unwrap();
        assert!(c[3] * (-0.5f64).powi(3) >= 0.0);
        assert!(jensen_series_coefficients(0.5, 2).is_err());
    }

    #[test]
    fn jensen_series_sums_to_gap() {
        let p = 0.37;
        let c = jensen_series_coefficients(p, 200).unwrap();
        for b in [-0.6f64, -0.3, -0.05] {
            let sum: f64 = c.iter().enumerate().map(|(i, ci)| ci * b.powi(i as i32)).sum();
            assert_relative_eq!(sum, jensen_gap(1.0 + b, p).unwrap().gap, epsilon = 1e-13);
        }
    }

    #[test]
    fn minkowski_examples() {
        let g = minkowski_gap(1.7, 1.7, 3).unwrap();
        assert!(g.gap.abs() <= 1e-15 && g.bound == 0.0);
        let g = minkowski_gap(1.0, 2.0, 2).unwrap();
        assert_relative_eq!(g.gap, 18f64.cbrt() - 1.0 - 4f64.cbrt(), epsilon = 1e-14);
        assert_relative_eq!(g.gap, 0.033340, epsilon = 1e-6);
        assert_relative_eq!(g.bound, 2.0 / 36.0 * 2f64.powf(-4.0 / 3.0), epsilon = 1e-16);
        assert_relative_eq!(g.bound, 0.022047, epsilon = 1e-6);
        assert!(minkowski_gap(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn l_function_examples() {
        assert_eq!(l_function(0.0, 3).unwrap(), 0.0);
        let l1 = l_function(1.0, 2).unwrap();
        assert_relative_eq!(l1, 2f64.powf(-1.0 / 3.0) - 2.0 / 3.0, epsilon = 1e-16);
        assert_relative_eq!(l1, 0.127034, epsilon = 1e-6);
        assert!(l_function(-0.5, 2).unwrap() >= l_function(0.5, 2).unwrap());
        assert!(l_function(-1.0, 2).is_err());
        assert_eq!(l_tilde(0.0, 2).unwrap(), 0.0);
        assert!(l_tilde(1.0, 2).unwrap().abs() <= 1e-16);
        assert!(l_tilde(0.5, 2).unwrap() > 0.0);
        assert!(l_tilde(1.1, 2).is_err());
    }

    #[test]
    fn l_shape_on_grids() {
        for n in 1..=6 {
            let pos: Vec<f64> = right_grid(0.0, 5.0, 500).iter().map(|a| l_function(*a, n).unwrap()).collect();
            assert!(pos.windows(2).all(|w| w[0] < w[1]));
            let neg: Vec<f64> = right_grid(-1.0, 0.0, 500)
                .iter()
                .map(|a| l_function(a - 0.001, n).unwrap())
                .collect();
            assert!(neg.windows(2).all(|w| w[0] > w[1]));
            for a in half_step_grid(0.0, 1.0, 200) {
                assert!(l_function(-a, n).unwrap() >= l_function(a, n).unwrap());
                assert!(l_tilde(a, n).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn improved_constant_values() {
        let c = improved_constant(2).unwrap();
        assert_relative_eq!(c.c_app_b, 31.487, epsilon = 1e-3);
        assert_eq!(c.c_thm11, 72.0);
        for n in 1..=100 {
            let c = improved_constant(n).unwrap();
            assert!(c.identity_residual <= 1e-10, "n={n}");
            assert!(c.c_app_b <= c.c_thm11);
        }
        assert_relative_eq!(improved_constant_limit(), 13.03557, epsilon = 1e-5);
        let c = improved_constant(100).unwrap();
        assert!((c.normalized.0 / 13.06 - 1.0).abs() <= 0.05);
        let far = improved_constant(100_000).unwrap();
        assert!((far.normalized.0 - improved_constant_limit()).abs() < 1e-3);
        assert!((far.normalized.1 - 16.0).abs() < 1e-3);
    }

    #[test]
    fn holder_beta_table() {
        assert_eq!(HolderExponent::Conjugate.beta(2), 8.0);
        assert_eq!(HolderExponent::Dual.beta(2), 12.0);
        assert_eq!(HolderExponent::Dual.beta(3), 32.0);
        assert_eq!(HolderExponent::Two.beta(2), 3.0);
        assert_eq!(HolderExponent::from_value(1.5, 2).unwrap(), HolderExponent::Conjugate);
        assert_eq!(HolderExponent::from_value(2.0, 1).unwrap(), HolderExponent::Two);
        assert!(HolderExponent::from_value(1.7, 2).is_err());
    }

    #[test]
    fn holder_constant_is_zero() {
        for e in [HolderExponent::Conjugate, HolderExponent::Dual, HolderExponent::Two] {
            let d = holder_stability_distance(&[3.0, 3.0, 3.0], &[0.2, 1.0, 0.5], e, 2).unwrap();
            assert!(d.distance <= 1e-18);
        }
    }

    #[test]
    fn holder_two_level() {
        let s = GraphHypersurface::atomic(2, vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        let c = holder_bound_check(&s, HolderExponent::Two).unwrap();
        // g = (1, 8), gbar = 4.5, two equal atoms: variance = (half the spread)^2
        let spread = (8.0f64 / 4.5).sqrt() - (1.0f64 / 4.5).sqrt();
        assert_relative_eq!(c.distance.distance, 0.25 * spread * spread, epsilon = 1e-15);
        assert!(c.gap >= 0.0);
        for e in [HolderExponent::Conjugate, HolderExponent::Dual] {
            assert!(holder_bound_check(&s, e).unwrap().gap >= 0.0);
        }
    }

    #[test]
    fn golden_section_matches_two_point_oracle() {
        // two equal atoms: ||h - c||_p^p is minimized at the midpoint for p > 1
        let d = holder_stability_distance(&[1.0, 8.0], &[1.0, 1.0], HolderExponent::Dual, 2).unwrap();
        let h = [(1.0f64 / 4.5).cbrt(), (8.0f64 / 4.5).cbrt()];
        let half = 0.5 * (h[1] - h[0]);
        assert_relative_eq!(d.minimizer, 0.5 * (h[0] + h[1]), epsilon = 1e-7);
        assert_relative_eq!(d.distance, half.powi(3), epsilon = 1e-12);
    }

    #[test]
    fn counterexample_examples() {
        let c = counterexample_family(1).unwrap();
        assert_relative_eq!(c.l2_distance, 1.0, epsilon = 1e-15);
        assert_relative_eq!(c.l1_sq_distance, 2.0, epsilon = 1e-15);
        let c = counterexample_family(100).unwrap();
        let j = 100.0f64;
        assert_relative_eq!(c.l2_distance, (j / (1.0 + j)).sqrt() * (1.0 + 1.0 / j) / (2.0 * j).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(c.l2_distance, 0.0711, epsilon = 1e-4);
        assert_relative_eq!(c.l1_sq_distance, 1.0 + 1.5 / j - 0.5 / j.powi(3), epsilon = 1e-13);
        assert!(counterexample_family(0).is_err());
    }

    #[test]
    fn counterexample_trends() {
        let mut prev = f64::INFINITY;
        for j in 2..=2000 {
            let c = counterexample_family(j).unwrap();
            assert!(c.l2_distance < prev);
            prev = c.l2_distance;
            assert!((1.0..=2.0).contains(&c.l1_sq_distance));
        }
        assert!((counterexample_family(1_000_000).unwrap().l1_sq_distance - 1.0).abs() < 1e-5);
    }

    #[test]
    fn bernoulli_constant_and_cap() {
        let s = GraphHypersurface::atomic(2, vec![1.0, 2.0], vec![1.5, 1.5]).unwrap();
        let r = bernoulli_l2_check(&s, BERNOULLI_LAMBDA, BERNOULLI_C_TILDE).unwrap();
        assert!(r.lhs.abs() <= 1e-15 && r.rhs.abs() <= 1e-15);
        let s = GraphHypersurface::atomic(2, vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            bernoulli_l2_check(&s, BERNOULLI_LAMBDA, BERNOULLI_C_TILDE),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sweeps_hold_on_standard_grid() {
        let grid = ScalarSweepGrid::standard(200);
        let rows = jensen_sweep(&grid).unwrap();
        assert_eq!(rows.len(), 200 * 200);
        for r in &rows {
            if r.a == 1.0 {
                assert!(r.slack.abs() <= 1e-12);
            } else {
                assert!(r.slack > 0.0, "{r:?}");
            }
        }
        let rows = minkowski_sweep(&grid).unwrap();
        assert_eq!(rows.len(), 3 * 200 * 200);
        assert!(rows.iter().all(|r| r.slack >= -1e-12), "minkowski lemma violated");
        assert!(ScalarSweepGrid::new(vec![0.0], vec![1.0], vec![0.5], vec![1]).is_err());
    }

    proptest! {
        #[test]
        fn jensen_bound_holds(a in 1e-6f64..=1.0, p in 1e-3f64..0.999) {
            let g = jensen_gap(a, p).unwrap();
            prop_assert!(g.slack() >= -1e-14);
        }

        #[test]
        fn minkowski_bound_holds(a in 1e-3f64..50.0, b in 1e-3f64..50.0, n in 1usize..8) {
            let g = minkowski_gap(a, b, n).unwrap();
            prop_assert!(g.slack() >= -1e-12 * (1.0 + a + b));
        }
    }
}
