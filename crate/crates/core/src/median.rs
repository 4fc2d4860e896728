//! Weighted medians and one-dimensional L¹/Lᵖ fitting.

use crate::error::{invalid, Result};
use crate::quadrature::weighted_sum;

/// Index order of `values`, ascending, ties by index.
pub(crate) fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

/// Lowest weighted median: the smallest value `m` with
/// `mass{x <= m} >= total / 2`. Every point of the median interval
/// minimizes `c -> sum_i w_i |x_i - c|`; the infimum of the interval is
/// returned.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(invalid("weighted median needs matching nonempty inputs"));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(invalid("weights must be nonnegative"));
    }
    let order = ascending_order(values);
    let total: f64 = order.iter().map(|&i| weights[i]).sum();
    if !(total > 0.0) {
        return Err(invalid("total weight must be positive"));
    }
    let half = 0.5 * total;
    let mut cum = 0.0;
    for &i in &order {
        cum += weights[i];
        if cum >= half {
            return Ok(values[i]);
        }
    }
    Ok(values[*order.last().unwrap()])
}

/// `sum_i w_i |x_i - c|`.
pub fn l1_deviation(values: &[f64], weights: &[f64], c: f64) -> f64 {
    weighted_sum(weights, |i| (values[i] - c).abs())
}

/// `sum_i w_i |x_i - c|^p`.
pub fn lp_deviation(values: &[f64], weights: &[f64], c: f64, p: f64) -> f64 {
    weighted_sum(weights, |i| (values[i] - c).abs().powf(p))
}

/// Golden-section minimization of a unimodal function on `[lo, hi]` to
/// absolute tolerance `tol` in the argument.
pub fn golden_section(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}
