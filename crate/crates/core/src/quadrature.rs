//! Composite Gauss–Legendre rules and deterministic pairwise summation.

use crate::error::{invalid, Result};

/// Points per Gauss–Legendre panel in the default composite rules.
pub const PANEL_ORDER: usize = 8;

/// Default node count for radial integrals.
pub const DEFAULT_RADIAL_NODES: usize = 2048;

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on `P_m` from Chebyshev initial guesses.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A composite rule with `panels` equal panels of `order`-point
/// Gauss–Legendre each.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    order: usize,
    panels: usize,
    ref_nodes: Vec<f64>,
    ref_weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(order: usize, panels: usize) -> Result<Self> {
        if order == 0 || panels == 0 {
            return Err(invalid("composite rule needs positive order and panel count"));
        }
        let (ref_nodes, ref_weights) = gauss_legendre(order);
        Ok(Self {
            order,
            panels,
            ref_nodes,
            ref_weights,
        })
    }

    /// A rule with `total` nodes split into [`PANEL_ORDER`]-point panels.
    /// Totals below one panel use a single panel of that many points.
    pub fn with_nodes(total: usize) -> Result<Self> {
        if total == 0 {
            return Err(invalid("quadrature needs at least one node"));
        }
        if total < PANEL_ORDER {
            return Self::new(total, 1);
        }
        if total % PANEL_ORDER != 0 {
            return Err(invalid(format!(
                "node count {total} is not a multiple of the panel order {PANEL_ORDER}"
            )));
        }
        Self::new(PANEL_ORDER, total / PANEL_ORDER)
    }

    pub fn len(&self) -> usize {
        self.order * self.panels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes and weights mapped onto `[a, b]`, in increasing node order.
    pub fn nodes_weights(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let h = (b - a) / self.panels as f64;
        let mut xs = Vec::with_capacity(self.len());
        let mut ws = Vec::with_capacity(self.len());
        for p in 0..self.panels {
            let left = a + h * p as f64;
            for (x, w) in self.ref_nodes.iter().zip(&self.ref_weights) {
                xs.push(left + 0.5 * h * (x + 1.0));
                ws.push(0.5 * h * w);
            }
        }
        (xs, ws)
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (xs, ws) = self.nodes_weights(a, b);
        let terms: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| w * f(*x)).collect();
        pairwise_sum(&terms)
    }
}

/// Pairwise (cascade) summation; the result depends only on the slice
/// contents and order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 16;
    if xs.len() <= BASE {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `sum_i w_i * g(i)` by pairwise summation.
pub fn weighted_sum(weights: &[f64], mut g: impl FnMut(usize) -> f64) -> f64 {
    let terms: Vec<f64> = weights.iter().enumerate().map(|(i, w)| w * g(i)).collect();
    pairwise_sum(&terms)
}
