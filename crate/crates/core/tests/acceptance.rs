//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are pinned here and nowhere else.

use std::time::{Duration, Instant};

use lorentz_iso::functionals::{
    be_subset_check, deficit_relation_check, deficits, excess_asymmetry_check, exhaustion_convergence_check,
    median_split, stability_check, sym_diff_volume, tilde_asymmetry, DeficitReport,
};
use lorentz_iso::hypersurface::{
    area, cone_volume, GraphData, GraphHypersurface, RadialProfile, DEFAULT_BALL_ANGULAR, DEFAULT_BALL_RADIAL,
};
use lorentz_iso::profiles::{random_atomic, random_profile, ProfileSpec};
use lorentz_iso::quadrature::DEFAULT_RADIAL_NODES;
use lorentz_iso::scalar::{
    counterexample_family, improved_constant, jensen_sweep, minkowski_sweep, HolderExponent, ScalarSweepGrid,
};
use lorentz_iso::sharpness::{
    analytic_expansion, default_bump, default_ladder, finite_difference_coefficients, run_ladder, LADDER_NODES,
};
use lorentz_iso::simplex::{
    cone_formula_check, containment_check, induction_step_check, instance_rng, random_simplex, SpacelikeSimplex,
};
use rand::Rng;

const TOL_ATOMIC: f64 = 1e-9;
const TOL_QUAD: f64 = 1e-6;
const RELATION_TOL: f64 = 1e-10;
const NONNEG_TOL: f64 = 1e-8;
const SLOPE_WINDOW: f64 = 0.1;
const AF_LIMIT_SLACK: f64 = 0.01;
const FD_TOL: f64 = 1e-4;
const CONE_TOL: f64 = 1e-10;
const CONSTANT_TOL: f64 = 1e-10;
const ASYMPTOTE_TARGET: f64 = 13.06;
const ASYMPTOTE_WINDOW: f64 = 0.05;
const L2_J100: f64 = 0.0711;
const L2_TOL: f64 = 1e-4;
const L1_TAIL_TOL: f64 = 2e-4;
const MIN_ORDER: f64 = 4.0;
const EXHAUSTION_TOL: f64 = 1e-3;

const SUITE: u64 = 1000;
const GRID: usize = 200;
const MC_SAMPLES: usize = 20_000;
const CONTAINMENT_PER_DIM: usize = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn criterion(id: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = limit.map_or(true, |l| elapsed <= l);
    let pass = o.pass && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" / limit {:.0} s", l.as_secs_f64()));
    println!(
        "{} [{id:>2}] {title}: {} ({:.2} s{budget})",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64()
    );
    pass
}

/// Running minimum of a named family of gaps.
#[derive(Default)]
struct Worst(Vec<(&'static str, f64)>);

impl Worst {
    fn push(&mut self, name: &'static str, v: f64) {
        match self.0.iter_mut().find(|(k, _)| *k == name) {
            Some((_, w)) => *w = w.min(v),
            None => self.0.push((name, v)),
        }
    }

    fn min(&self) -> (&'static str, f64) {
        self.0
            .iter()
            .copied()
            .fold(("none", f64::INFINITY), |a, b| if b.1 < a.1 || b.1.is_nan() { b } else { a })
    }
}

/// Gaps collected once over the random suites and shared by criteria 3-5.
#[derive(Default)]
struct Suites {
    nonneg: Worst,
    stability: Worst,
    sandwich: Worst,
    radial_reports: usize,
    atomic_reports: usize,
}

fn atomic_two_level() -> GraphHypersurface {
    GraphHypersurface::atomic(2, vec![1.0, 1.0], vec![1.0, 2.0]).unwrap()
}

fn rel_identity(r: &DeficitReport) -> f64 {
    deficit_relation_check(r).unwrap().identity_residual.abs() / (1.0 + r.delta_cm)
}

fn equality_cases() -> Outcome {
    let mut worst_atomic = 0.0f64;
    let mut worst_quad = 0.0f64;
    let mut count = 0;
    let size = |r: &DeficitReport| {
        [r.delta_be, r.delta_cm, r.delta_cm_star, r.excess, r.asymmetry, r.asymmetry_tilde]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    };
    for t0 in [0.5, 1.0, 2.0] {
        for n in 1..=3 {
            let p = RadialProfile::constant(n, 1.3, t0, DEFAULT_RADIAL_NODES).unwrap();
            worst_quad = worst_quad.max(size(&deficits(&p).unwrap()));
            let a = GraphHypersurface::atomic(n, vec![0.3, 1.1, 0.7], vec![t0; 3]).unwrap();
            worst_atomic = worst_atomic.max(size(&deficits(&a).unwrap()));
            count += 2;
        }
        let p = RadialProfile::constant(2, 0.8, t0, 64).unwrap();
        let ball = GraphHypersurface::from_radial(&p, DEFAULT_BALL_RADIAL, DEFAULT_BALL_ANGULAR).unwrap();
        worst_quad = worst_quad.max(size(&deficits(&ball).unwrap()));
        count += 1;
    }
    outcome(
        worst_atomic <= TOL_ATOMIC && worst_quad <= TOL_QUAD,
        format!("{count} constant graphs, max deficit/asymmetry {worst_atomic:.2e} atomic, {worst_quad:.2e} quadrature"),
    )
}

fn relation_identity() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for i in 0..SUITE {
            let p = random_profile(&mut instance_rng(42, (n as u64) << 32 | i), n, DEFAULT_RADIAL_NODES).unwrap();
            worst = worst.max(rel_identity(&deficits(&p).unwrap()));
        }
    }
    let r = deficits(&atomic_two_level()).unwrap();
    let exact = (r.volume - 3.0).abs().max((r.area - 5.0).abs()).max((r.delta_cm - 0.8).abs());
    let two = rel_identity(&r);
    outcome(
        worst <= RELATION_TOL && two <= RELATION_TOL && exact <= 1e-12,
        format!(
            "max relative residual {worst:.2e} over {} profiles, {two:.2e} on the two-level graph (V, A, delta_CM off by {exact:.1e})",
            3 * SUITE
        ),
    )
}

fn observe_graph<S: GraphData + ?Sized>(s: &S, suites: &mut Suites, rng: &mut impl Rng) {
    let r = deficits(s).unwrap();
    let w = &mut suites.nonneg;
    w.push("delta_BE", r.delta_be);
    w.push("delta_CM", r.delta_cm);
    w.push("delta_CM_star", r.delta_cm_star);
    w.push("E", r.excess);
    let len = s.weights().len();
    let mut subset: Vec<usize> = (0..len).filter(|_| rng.gen_bool(0.5)).collect();
    if subset.is_empty() {
        subset.push(0);
    }
    let be = be_subset_check(s, &subset).unwrap();
    w.push("be_subset", be.gap);
    w.push("be_gradient_drop", be.gradient_drop);
    w.push("be_holder_step", be.holder_step);
    w.push("be_bernoulli_pointwise", be.bernoulli_min_pointwise);
    let m = median_split(s).unwrap().chain;
    w.push("median_halves", m.halves_gap);
    w.push("median_minkowski_step", m.minkowski_step_gap);
    w.push("median_quantitative", m.quantitative_gap);
    w.push("median_final", m.final_gap);

    let g = stability_check(&r).unwrap();
    let st = &mut suites.stability;
    st.push("thm11", g.thm11);
    st.push("cor13", g.cor13);
    st.push("cor14", g.cor14);
    st.push("app_b", g.app_b);

    let sw = &mut suites.sandwich;
    sw.push("tilde_le_af", r.asymmetry - r.asymmetry_tilde);
    sw.push("af_le_2tilde", 2.0 * r.asymmetry_tilde - r.asymmetry);
    sw.push("af_le_excess", excess_asymmetry_check(&r));
}

fn nonnegativity(suites: &mut Suites) -> Outcome {
    for n in 1..=3 {
        for i in 0..SUITE {
            let mut rng = instance_rng(42, (n as u64) << 32 | i);
            let p = random_profile(&mut rng, n, DEFAULT_RADIAL_NODES).unwrap();
            observe_graph(&p, suites, &mut rng);
            suites.radial_reports += 1;
            let a = random_atomic(&mut rng, n).unwrap();
            observe_graph(&a, suites, &mut rng);
            suites.atomic_reports += 1;
        }
    }
    let grid = ScalarSweepGrid::standard(GRID);
    let jensen = jensen_sweep(&grid).unwrap();
    let mink = minkowski_sweep(&grid).unwrap();
    let w = &mut suites.nonneg;
    w.push("jensen_slack", jensen.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min));
    w.push("minkowski_slack", mink.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min));
    for n in 1..=3 {
        for i in 0..SUITE {
            let mut rng = instance_rng(43, (n as u64) << 32 | i);
            let mut d = || 10f64.powf(rng.gen_range(-2.0..2.0));
            let (v1, s1, v2, s2) = (d(), d(), d(), d());
            w.push("induction_step", induction_step_check(v1, s1, v2, s2, n).unwrap());
        }
        for i in 0..CONTAINMENT_PER_DIM as u64 {
            let mut rng = instance_rng(44, (n as u64) << 32 | i);
            let seed = rng.gen();
            let p = random_simplex(n, &mut rng).unwrap();
            w.push("containment", containment_check(&p, MC_SAMPLES, seed).unwrap().gap);
        }
    }
    let (name, v) = w.min();
    outcome(
        v >= -NONNEG_TOL,
        format!(
            "{} gap families over {} radial + {} atomic graphs, {GRID}x{GRID} grids; worst {v:.2e} ({name})",
            w.0.len(),
            suites.radial_reports,
            suites.atomic_reports
        ),
    )
}

fn stability(suites: &Suites) -> Outcome {
    let (name, v) = suites.stability.min();
    let r = deficits(&atomic_two_level()).unwrap();
    let g = stability_check(&r).unwrap();
    // independent closed forms: V = 3, A = 5, d = 1, sigma = 2/3, t_F^3 = 9/2
    let dbe = 3.0 * 6f64.cbrt() / 5.0 - 1.0;
    let af = 7.0 / 9.0;
    let e = (3.0 - 2.0 / 3.0) / 9.0;
    let l1 = 2f64.powf(-1.0 / 3.0) + 1.0 / 3.0 - 1.0;
    let oracle = [
        72.0 * dbe - af * af,
        4.8 - af,
        72.0 * (0.8 - e) - af * af,
        (0.8 - e) - l1 / 4.0 * af * af,
    ];
    let got = [g.thm11, g.cor13, g.cor14, g.app_b];
    let off = got.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    outcome(
        v >= -NONNEG_TOL && off <= 1e-6 && (g.thm11 - 5.895).abs() <= 5e-4,
        format!(
            "worst gap {v:.2e} ({name}); two-level gaps thm11 {:.6} cor13 {:.6} cor14 {:.4} app_b {:.6}, max deviation {off:.1e}",
            g.thm11, g.cor13, g.cor14, g.app_b
        ),
    )
}

fn sandwich(suites: &Suites) -> Outcome {
    let (name, v) = suites.sandwich.min();
    const POINTS: usize = 10_000;
    let mut worst_excess = 0.0f64;
    let mut below = 0;
    for i in 0..100u64 {
        let mut rng = instance_rng(45, i);
        let n = rng.gen_range(1..=3);
        let s = random_atomic(&mut rng, n).unwrap();
        let (_, tilde) = tilde_asymmetry(&s).unwrap();
        let n1 = (n + 1) as i32;
        let g: Vec<f64> = s.values().iter().map(|f| f.powi(n1)).collect();
        let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let h = (hi - lo) / (POINTS - 1) as f64;
        let v = cone_volume(&s).unwrap();
        let brute = (0..POINTS)
            .map(|k| sym_diff_volume(&s, (lo + k as f64 * h).powf(1.0 / n1 as f64)) / v)
            .fold(f64::INFINITY, f64::min);
        // int |g - c| dmu is mu-Lipschitz in the level c
        let resolution = s.weights().iter().sum::<f64>() * h / (2.0 * n1 as f64 * v);
        if brute < tilde - 1e-12 {
            below += 1;
        }
        worst_excess = worst_excess.max((brute - tilde) / resolution);
    }
    outcome(
        v >= -NONNEG_TOL && below == 0 && worst_excess <= 1.0,
        format!(
            "worst sandwich/excess gap {v:.2e} ({name}); grid minimum within {worst_excess:.3} resolutions of the median on 100 graphs"
        ),
    )
}

fn sharpness() -> Outcome {
    let (n, t_star) = (2, 1.0);
    let phi = default_bump(n, t_star, LADDER_NODES).unwrap();
    let l = run_ladder(&phi, n, t_star, &default_ladder(), LADDER_NODES, TOL_QUAD).unwrap();
    let f = l.fitted_exponents;
    let limit = *l.af_over_eps.last().unwrap();
    let bound = l.analytic.af_lower_coeff;
    let pass = (f.delta_be - 2.0).abs() <= SLOPE_WINDOW
        && (f.delta_cm - 1.0).abs() <= SLOPE_WINDOW
        && (f.delta_cm_star - 2.0).abs() <= SLOPE_WINDOW
        && limit >= bound * (1.0 - AF_LIMIT_SLACK)
        && l.invariant_failures.is_empty();
    outcome(
        pass,
        format!(
            "slopes vs A_F {:.4} / {:.4} / {:.4}; A_F/eps {limit:.5} >= {bound:.5}; {} invariant failures",
            f.delta_be,
            f.delta_cm,
            f.delta_cm_star,
            l.invariant_failures.len()
        ),
    )
}

fn expansion() -> Outcome {
    let (n, t_star) = (2, 1.0);
    let phi = default_bump(n, t_star, LADDER_NODES).unwrap();
    let a = analytic_expansion(&phi, n, t_star, LADDER_NODES).unwrap();
    let fd = finite_difference_coefficients(&phi, n, t_star, 1e-3, LADDER_NODES).unwrap();
    // first-order coefficients vanish; measure them against the second-order scale
    let errs = [
        (fd.v1 - a.v1).abs() / a.v2.abs(),
        (fd.v2 - a.v2).abs() / a.v2.abs(),
        (fd.a1 - a.a1).abs() / a.a2.abs(),
        (fd.a2 - a.a2).abs() / a.a2.abs(),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    outcome(
        worst <= FD_TOL,
        format!(
            "V2 {:.8e} vs {:.8e}, A2 {:.8e} vs {:.8e}; max relative error {worst:.2e}",
            a.v2, fd.v2, a.a2, fd.a2
        ),
    )
}

fn simplices() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for i in 0..SUITE {
            let p = random_simplex(n, &mut instance_rng(46, (n as u64) << 32 | i)).unwrap();
            worst = worst.max(cone_formula_check(&p).unwrap().relative_residual);
        }
    }
    let c = cone_formula_check(&SpacelikeSimplex::from_coords(&[&[2.0, -1.0], &[2.0, 1.0]]).unwrap()).unwrap();
    let exact = c.volume == 2.0 && c.area == 2.0 && c.height == 2.0 && c.residual == 0.0;
    outcome(
        worst <= CONE_TOL && exact,
        format!(
            "max relative residual {worst:.2e} over {} simplices; canonical segment V={} A={} h={}",
            3 * SUITE,
            c.volume,
            c.area,
            c.height
        ),
    )
}

fn constants() -> Outcome {
    let n = 2;
    let table = [
        HolderExponent::Conjugate.beta(n),
        HolderExponent::Dual.beta(n),
        HolderExponent::Two.beta(n),
    ];
    // closed forms 4n, (n+1) 2^n, n+1
    let beta_ok = table == [8.0, 12.0, 3.0];
    let all: Vec<_> = (1..=100).map(|k| improved_constant(k).unwrap()).collect();
    let residual = all.iter().map(|c| c.identity_residual).fold(0.0, f64::max);
    let ordered = all.iter().all(|c| c.c_app_b <= c.c_thm11);
    let asym = all[99].normalized.0;
    let asym_ok = (asym / ASYMPTOTE_TARGET - 1.0).abs() <= ASYMPTOTE_WINDOW;
    let two = &all[1];
    let two_ok = (two.c_app_b - 31.487).abs() <= 1e-3 && two.c_thm11 == 72.0;
    outcome(
        beta_ok && residual <= CONSTANT_TOL && ordered && asym_ok && two_ok,
        format!(
            "beta(n=2) = {table:?} (listed 24 for p = n+1 disagrees with (n+1)2^n = 12); residual {residual:.1e}; \
             c/(n+1) at n=100 {asym:.4}; n=2: {:.3} <= {}",
            two.c_app_b, two.c_thm11
        ),
    )
}

fn counterexample() -> Outcome {
    let l2 = counterexample_family(100).unwrap().l2_distance;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut last = 0.0;
    for j in 1..=10_000 {
        let d = counterexample_family(j).unwrap().l1_sq_distance;
        lo = lo.min(d);
        hi = hi.max(d);
        last = d;
    }
    outcome(
        (l2 - L2_J100).abs() <= L2_TOL && lo >= 1.0 - 1e-12 && hi <= 2.0 + 1e-12 && (last - 1.0).abs() <= L1_TAIL_TOL,
        format!("l2(100) = {l2:.6}; squared-L1 range [{lo:.6}, {hi:.6}], value at 10^4 {last:.6}"),
    )
}

fn convergence() -> Outcome {
    let spec = ProfileSpec::LogFourier {
        scale: 1.3,
        coeffs: vec![0.1, -0.05, 0.02],
    };
    let p = spec.build(2, 1.2, 4096).unwrap();
    let (v_ref, a_ref) = (cone_volume(&p).unwrap(), area(&p));
    let errors: Vec<(usize, f64)> = [8, 16, 32, 64, 128]
        .iter()
        .map(|&k| {
            let q = p.with_nodes(k).unwrap();
            let e = ((cone_volume(&q).unwrap() - v_ref) / v_ref).abs().max(((area(&q) - a_ref) / a_ref).abs());
            (k, e)
        })
        .collect();
    // orders from consecutive pairs still above roundoff
    let orders: Vec<f64> = errors
        .windows(2)
        .filter(|w| w[1].1 > 1e-13)
        .map(|w| (w[0].1 / w[1].1).log2())
        .collect();
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let documented = ProfileSpec::LogFourier {
        scale: 1.0,
        coeffs: vec![0.2, -0.1],
    }
    .build(2, 1.5, DEFAULT_RADIAL_NODES)
    .unwrap();
    let table = exhaustion_convergence_check(&documented, 16).unwrap();
    outcome(
        !orders.is_empty()
            && min_order >= MIN_ORDER
            && table.last_step_deviation <= EXHAUSTION_TOL
            && table.volume_monotone,
        format!(
            "errors {}; min observed order {min_order:.1}; exhaustion deviation {:.1e} at the last step ({:.1e} one step earlier)",
            errors.iter().map(|(k, e)| format!("{k}:{e:.1e}")).collect::<Vec<_>>().join(" "),
            table.last_step_deviation,
            table.penultimate_deviation
        ),
    )
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let mut suites = Suites::default();
    let results = [
        criterion(1, "equality and rigidity", secs(1), equality_cases),
        criterion(2, "deficit identity", secs(30), relation_identity),
        criterion(3, "nonnegativity", secs(120), || nonnegativity(&mut suites)),
        criterion(4, "stability bounds", None, || stability(&suites)),
        criterion(5, "asymmetry sandwich and median", None, || sandwich(&suites)),
        criterion(6, "sharpness exponents", secs(60), sharpness),
        criterion(7, "expansion versus finite differences", None, expansion),
        criterion(8, "simplex identities", None, simplices),
        criterion(9, "appendix constants", None, constants),
        criterion(10, "step-function family", None, counterexample),
        criterion(11, "quadrature convergence and exhaustion", None, convergence),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed} of {} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
