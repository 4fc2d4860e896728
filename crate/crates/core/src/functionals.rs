//! Isoperimetric deficits, Fraenkel-type asymmetries, the relative volume
//! excess, and the inequality chains that relate them.
//!
//! With `V = V(C(S))`, `A = A(S)`, `d = dist(O, S)` and
//! `sigma = V(C(pi(S))) = mu(Omega) / (n+1)`:
//!
//! ```text
//! delta_BE  = (n+1) sigma^{1/(n+1)} V^{n/(n+1)} / A - 1
//! delta_CM  = (n+1) V / (A d) - 1
//! E         = (V - d^{n+1} sigma) / ((n+1) V)
//! delta*_CM = delta_CM - E
//! A_F       = V(C(S) Δ B_{t_F}) / V,   t_F^{n+1} sigma = V
//! Ã_F       = inf_t V(C(S) Δ B_t) / V
//! ```
//!
//! `V(C(S) Δ B_t) = 1/(n+1) int |f^{n+1} - t^{n+1}| dmu`, so the optimal `t`
//! in `Ã_F` is the `mu`-weighted median of `f^{n+1}`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypersurface::{
    area, cone_volume, dist_origin, exhaustion_sequence, measure, restrict, sigma, GraphData,
    GraphHypersurface, RadialProfile,
};
use crate::median::{ascending_order, weighted_median};
use crate::quadrature::weighted_sum;
use crate::scalar::l_function;

/// Tolerance for exact (atomic) data.
pub const TOL_ATOMIC: f64 = 1e-9;
/// Tolerance for quadrature-backed data at default resolution.
pub const TOL_QUADRATURE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub atomic: f64,
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            atomic: TOL_ATOMIC,
            quadrature: TOL_QUADRATURE,
        }
    }
}

/// Every functional of one hypersurface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub n: usize,
    #[serde(rename = "V")]
    pub volume: f64,
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "dist")]
    pub dist: f64,
    pub sigma: f64,
    #[serde(rename = "t_F")]
    pub t_fraenkel: f64,
    pub t_tilde: f64,
    #[serde(rename = "delta_BE")]
    pub delta_be: f64,
    #[serde(rename = "delta_CM")]
    pub delta_cm: f64,
    #[serde(rename = "delta_CM_star")]
    pub delta_cm_star: f64,
    #[serde(rename = "E")]
    pub excess: f64,
    #[serde(rename = "A_F")]
    pub asymmetry: f64,
    #[serde(rename = "A_F_tilde")]
    pub asymmetry_tilde: f64,
}

impl DeficitReport {
    /// Invariants that fail beyond `tol`, as human-readable messages.
    pub fn invariant_violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let n1 = (self.n + 1) as f64;
        let mut need = |ok: bool, what: &str| {
            if !ok {
                out.push(what.to_string());
            }
        };
        need(self.delta_be >= -tol, "delta_BE < 0");
        need(self.delta_cm >= -tol, "delta_CM < 0");
        need(self.delta_cm_star >= -tol, "delta*_CM < 0");
        need(self.delta_cm_star >= self.delta_be - tol, "delta*_CM < delta_BE");
        need(self.excess >= -tol && self.excess <= 1.0 / n1 + tol, "E outside [0, 1/(n+1)]");
        need(self.asymmetry_tilde <= self.asymmetry + tol, "Ã_F > A_F");
        need(self.asymmetry <= 2.0 * self.asymmetry_tilde + tol, "A_F > 2 Ã_F");
        need(self.asymmetry_tilde <= 1.0 + tol, "Ã_F > 1");
        out
    }
}

fn checked_volume_measure<S: GraphData + ?Sized>(s: &S) -> Result<(f64, f64)> {
    let v = cone_volume(s)?;
    let mu = measure(s);
    if !(mu > 0.0) {
        return Err(Error::Domain("domain has zero measure".into()));
    }
    if !(v > 0.0) {
        return Err(Error::Domain("cone volume is zero".into()));
    }
    Ok((v, mu))
}

/// `t_F = ((n+1) V / mu(Omega))^{1/(n+1)}`, the radius with `V(B_t) = V(C(S))`.
pub fn fraenkel_radius<S: GraphData + ?Sized>(s: &S) -> Result<f64> {
    let (v, mu) = checked_volume_measure(s)?;
    let n1 = (s.dim() + 1) as f64;
    Ok((n1 * v / mu).powf(1.0 / n1))
}

/// `V(C(S) Δ B_t) = 1/(n+1) int |f^{n+1} - t^{n+1}| dmu`.
pub fn sym_diff_volume<S: GraphData + ?Sized>(s: &S, t: f64) -> f64 {
    let n1 = s.dim() as i32 + 1;
    let level = t.powi(n1);
    let f = s.values();
    weighted_sum(s.weights(), |i| (f[i].powi(n1) - level).abs()) / n1 as f64
}

/// `(V(C(S) \ B_t), V(B_t \ C(S)))`.
pub fn one_sided_volumes<S: GraphData + ?Sized>(s: &S, t: f64) -> (f64, f64) {
    let n1 = s.dim() as i32 + 1;
    let level = t.powi(n1);
    let f = s.values();
    let above = weighted_sum(s.weights(), |i| (f[i].powi(n1) - level).max(0.0));
    let below = weighted_sum(s.weights(), |i| (level - f[i].powi(n1)).max(0.0));
    (above / n1 as f64, below / n1 as f64)
}

/// Fraenkel asymmetry `A_F = V(C(S) Δ B_{t_F}) / V(C(S))`.
pub fn fraenkel_asymmetry<S: GraphData + ?Sized>(s: &S) -> Result<f64> {
    let t = fraenkel_radius(s)?;
    let v = cone_volume(s)?;
    Ok(sym_diff_volume(s, t) / v)
}

/// `(t̃, Ã_F)`: the L¹-optimal radius and the minimal normalized
/// symmetric-difference volume. `t̃^{n+1}` is the lowest weighted median of
/// `f^{n+1}`.
pub fn tilde_asymmetry<S: GraphData + ?Sized>(s: &S) -> Result<(f64, f64)> {
    let (v, _) = checked_volume_measure(s)?;
    let n1 = s.dim() as i32 + 1;
    let g: Vec<f64> = s.values().iter().map(|f| f.powi(n1)).collect();
    let m = weighted_median(&g, s.weights())?;
    let t = m.powf(1.0 / n1 as f64);
    let dev = weighted_sum(s.weights(), |i| (g[i] - m).abs()) / n1 as f64;
    Ok((t, dev / v))
}

/// All functionals of `s`. Values are reported unclamped; use
/// [`DeficitReport::invariant_violations`] to flag them.
pub fn deficits<S: GraphData + ?Sized>(s: &S) -> Result<DeficitReport> {
    let n = s.dim();
    let n1 = (n + 1) as f64;
    let (v, mu) = checked_volume_measure(s)?;
    let a = area(s);
    if !(a > 0.0) {
        return Err(Error::Degenerate(format!("area is {a}; the graph is lightlike")));
    }
    let d = dist_origin(s);
    let sig = mu / n1;
    let t_f = (v / sig).powf(1.0 / n1);
    let delta_be = n1 * sig.powf(1.0 / n1) * v.powf(n as f64 / n1) / a - 1.0;
    let delta_cm = n1 * v / (a * d) - 1.0;
    let excess = (v - d.powf(n1) * sig) / (n1 * v);
    let asymmetry = sym_diff_volume(s, t_f) / v;
    let (t_tilde, asymmetry_tilde) = tilde_asymmetry(s)?;
    Ok(DeficitReport {
        n,
        volume: v,
        area: a,
        dist: d,
        sigma: sig,
        t_fraenkel: t_f,
        t_tilde,
        delta_be,
        delta_cm,
        delta_cm_star: delta_cm - excess,
        excess,
        asymmetry,
        asymmetry_tilde,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeficitRelation {
    /// `delta_CM - [(1 + delta_BE) (1 - (n+1) E)^{-1/(n+1)} - 1]`, exact zero
    /// algebraically.
    pub identity_residual: f64,
    /// `delta_CM - E - (1 + E) delta_BE`, nonnegative.
    pub inequality_gap: f64,
}

/// Exact identity and Bernoulli lower bound linking `delta_CM` and
/// `delta_BE` through the relative volume excess.
pub fn deficit_relation_check(r: &DeficitReport) -> Result<DeficitRelation> {
    let n1 = (r.n + 1) as f64;
    let base = 1.0 - n1 * r.excess;
    if !(base > 0.0) {
        return Err(Error::Domain(format!("E = {} >= 1/(n+1)", r.excess)));
    }
    let predicted = (1.0 + r.delta_be) / base.powf(1.0 / n1) - 1.0;
    Ok(DeficitRelation {
        identity_residual: r.delta_cm - predicted,
        inequality_gap: r.delta_cm - r.excess - (1.0 + r.excess) * r.delta_be,
    })
}

/// `2 (n+1) E - A_F`, nonnegative.
pub fn excess_asymmetry_check(r: &DeficitReport) -> f64 {
    2.0 * (r.n + 1) as f64 * r.excess - r.asymmetry
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeSubsetGap {
    /// `(n+1) V(C(pi(B)))^{1/(n+1)} V(C(B))^{n/(n+1)} - A(B)`.
    pub gap: f64,
    /// The common right-hand side of both proof routes.
    pub bound: f64,
    /// `int_B g^{n/(n+1)} dmu - A(B) >= 0` (dropping the gradient term).
    pub gradient_drop: f64,
    /// Hölder route: `bound - int_B g^{n/(n+1)} dmu >= 0`.
    pub holder_step: f64,
    /// Bernoulli route: smallest pointwise gap
    /// `gbar^p (1 + p psi) - gbar^p (1 + psi)^p`, `psi = g / gbar - 1`.
    pub bernoulli_min_pointwise: f64,
    /// `|gbar^p mu(B) - bound|`, the two routes' right-hand sides agree.
    pub route_mismatch: f64,
}

/// Bahn–Ehrlich inequality on the sub-hypersurface over `node_subset`.
pub fn be_subset_check<S: GraphData + ?Sized>(s: &S, node_subset: &[usize]) -> Result<BeSubsetGap> {
    let b = restrict(s, node_subset)?;
    be_check(&b)
}

pub(crate) fn be_check<S: GraphData + ?Sized>(b: &S) -> Result<BeSubsetGap> {
    let n = b.dim();
    let n1 = (n + 1) as f64;
    let p = n as f64 / n1;
    let v = cone_volume(b)?;
    let mu = measure(b);
    let sig = mu / n1;
    let a = area(b);
    let bound = n1 * sig.powf(1.0 / n1) * v.powf(p);
    let g: Vec<f64> = b.values().iter().map(|f| f.powi(n as i32 + 1)).collect();
    let flat = weighted_sum(b.weights(), |i| g[i].powf(p));
    let gbar = v / sig;
    let gbar_p = gbar.powf(p);
    let bernoulli_min_pointwise = g
        .iter()
        .map(|gi| {
            let psi = gi / gbar - 1.0;
            gbar_p * (1.0 + p * psi) - gbar_p * (1.0 + psi).powf(p)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(BeSubsetGap {
        gap: bound - a,
        bound,
        gradient_drop: flat - a,
        holder_step: bound - flat,
        bernoulli_min_pointwise,
        route_mismatch: (gbar_p * mu - bound).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianChain {
    pub t0: f64,
    /// `V(C(B_1))`, the part with `f >= t0`.
    pub v_high: f64,
    /// `V(C(B_2))`, the part with `f <= t0`.
    pub v_low: f64,
    /// (a) `(n+1)[(sigma/2 V1^n)^{1/(n+1)} + (sigma/2 V2^n)^{1/(n+1)}] - A(S)`.
    pub halves_gap: f64,
    /// Minkowski's inequality on the two halves:
    /// `(n+1)(sigma V^n)^{1/(n+1)} - (n+1) sum_i (sigma/2 V_i^n)^{1/(n+1)}`.
    pub minkowski_step_gap: f64,
    /// (b) `(n+1)(sigma V^n)^{1/(n+1)} - A(S)` minus
    /// `sigma^{1/(n+1)} n/(4(n+1)) V^{-(n+2)/(n+1)} |V1 - V2|^2`.
    pub quantitative_gap: f64,
    /// (c) `4 (n+1)^2/n delta_BE V^2 - V(C(S) Δ B_{t0})^2`.
    pub final_gap: f64,
    /// `V(C(S) Δ B_{t0}) - (V1 - V2)`.
    pub split_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MedianSplit {
    pub high: GraphHypersurface,
    pub low: GraphHypersurface,
    pub chain: MedianChain,
}

/// Splits the domain at the weighted median `t0` of `f` into two halves of
/// equal mass, cutting one boundary atom fractionally if needed, and
/// evaluates the inequality chain of the stability argument.
pub fn median_split<S: GraphData + ?Sized>(s: &S) -> Result<MedianSplit> {
    let n = s.dim();
    let n1 = (n + 1) as f64;
    let w = s.weights();
    let f = s.values();
    let grad = s.log_grad_norms();
    let order = ascending_order(f);
    let total: f64 = order.iter().map(|&i| w[i]).sum();
    if !(total > 0.0) {
        return Err(Error::Domain("total mass is zero".into()));
    }
    let half = 0.5 * total;

    let mut low = (Vec::new(), Vec::new(), Vec::new());
    let mut high = (Vec::new(), Vec::new(), Vec::new());
    let mut cum = 0.0;
    let mut t0 = None;
    for &i in &order {
        if t0.is_some() {
            high.0.push(w[i]);
            high.1.push(f[i]);
            high.2.push(grad[i]);
            continue;
        }
        let before = cum;
        cum += w[i];
        if cum >= half {
            t0 = Some(f[i]);
            let to_low = (half - before).min(w[i]);
            let to_high = w[i] - to_low;
            if to_low > 0.0 {
                low.0.push(to_low);
                low.1.push(f[i]);
                low.2.push(grad[i]);
            }
            if to_high > 0.0 {
                high.0.push(to_high);
                high.1.push(f[i]);
                high.2.push(grad[i]);
            }
        } else {
            low.0.push(w[i]);
            low.1.push(f[i]);
            low.2.push(grad[i]);
        }
    }
    let t0 = t0.ok_or_else(|| invalid("median not found"))?;
    let build = |(ws, fs, gs): (Vec<f64>, Vec<f64>, Vec<f64>)| -> Result<GraphHypersurface> {
        if ws.is_empty() {
            // single atom carrying all the mass goes entirely to one side
            return Err(Error::EmptyDomain);
        }
        GraphHypersurface::new(crate::hypersurface::DomainMesh::atomic(ws)?, fs, gs, n)
    };
    let low = build(low)?;
    let high = build(high)?;

    let v = cone_volume(s)?;
    let a = area(s);
    let sig = sigma(s);
    let v1 = cone_volume(&high)?;
    let v2 = cone_volume(&low)?;
    let whole = n1 * (sig * v.powi(n as i32)).powf(1.0 / n1);
    let halves = n1
        * ((0.5 * sig * v1.powi(n as i32)).powf(1.0 / n1) + (0.5 * sig * v2.powi(n as i32)).powf(1.0 / n1));
    let quantitative = sig.powf(1.0 / n1) * n as f64 / (4.0 * n1) * v.powf(-(n as f64 + 2.0) / n1) * (v1 - v2).powi(2);
    let delta_be = whole / a - 1.0;
    let sym = sym_diff_volume(s, t0);
    let chain = MedianChain {
        t0,
        v_high: v1,
        v_low: v2,
        halves_gap: halves - a,
        minkowski_step_gap: whole - halves,
        quantitative_gap: (whole - a) - quantitative,
        final_gap: 4.0 * n1 * n1 / n as f64 * delta_be * v * v - sym * sym,
        split_residual: sym - (v1 - v2),
    };
    Ok(MedianSplit { high, low, chain })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityGaps {
    /// `16 (n+1)^2/n delta_BE - A_F^2`
    pub thm11: f64,
    /// `2 (n+1) delta_CM - A_F`
    pub cor13: f64,
    /// `16 (n+1)^2/n delta*_CM - A_F^2`
    pub cor14: f64,
    /// `delta*_CM - L(1)/4 A_F^2`
    pub app_b: f64,
}

impl StabilityGaps {
    pub fn min(&self) -> f64 {
        self.thm11.min(self.cor13).min(self.cor14).min(self.app_b)
    }
}

pub fn stability_check(r: &DeficitReport) -> Result<StabilityGaps> {
    let n = r.n as f64;
    let c = 16.0 * (n + 1.0).powi(2) / n;
    let af2 = r.asymmetry * r.asymmetry;
    let l1 = l_function(1.0, r.n)?;
    Ok(StabilityGaps {
        thm11: c * r.delta_be - af2,
        cor13: 2.0 * (n + 1.0) * r.delta_cm - r.asymmetry,
        cor14: c * r.delta_cm_star - af2,
        app_b: r.delta_cm_star - 0.25 * l1 * af2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionRow {
    pub t_star: f64,
    pub volume: f64,
    pub delta_be: f64,
    pub asymmetry: f64,
    pub t_fraenkel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ExhaustionRow>,
    pub full: ExhaustionRow,
    /// `max(|delta_BE_K - delta_BE|, |A_F,K - A_F|)` at the last step.
    pub last_step_deviation: f64,
    /// The same deviation one step earlier.
    pub penultimate_deviation: f64,
    pub volume_monotone: bool,
}

/// Functionals along the compact exhaustion `[0, t* k / K]` of a profile.
pub fn exhaustion_convergence_check(p: &RadialProfile, k_steps: usize) -> Result<ConvergenceTable> {
    let row = |q: &RadialProfile| -> Result<ExhaustionRow> {
        let r = deficits(q)?;
        Ok(ExhaustionRow {
            t_star: q.t_star(),
            volume: r.volume,
            delta_be: r.delta_be,
            asymmetry: r.asymmetry,
            t_fraenkel: r.t_fraenkel,
        })
    };
    let rows = exhaustion_sequence(p, k_steps)?
        .iter()
        .map(row)
        .collect::<Result<Vec<_>>>()?;
    let full = row(p)?;
    let deviation =
        |r: &ExhaustionRow| (r.delta_be - full.delta_be).abs().max((r.asymmetry - full.asymmetry).abs());
    let last_step_deviation = deviation(rows.last().expect("at least one step"));
    let penultimate_deviation = rows.len().checked_sub(2).map_or(last_step_deviation, |i| deviation(&rows[i]));
    let volume_monotone = rows.windows(2).all(|w| w[0].volume <= w[1].volume);
    Ok(ConvergenceTable {
        rows,
        full,
        last_step_deviation,
        penultimate_deviation,
        volume_monotone,
    })
}
