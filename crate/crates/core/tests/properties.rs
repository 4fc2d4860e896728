use lorentz_iso::functionals::{
    be_subset_check, deficit_relation_check, deficits, excess_asymmetry_check, fraenkel_radius, median_split,
    one_sided_volumes, stability_check, sym_diff_volume, tilde_asymmetry, TOL_ATOMIC, TOL_QUADRATURE,
};
use lorentz_iso::hypersurface::{area, cone_volume, DomainMesh, GraphData, GraphHypersurface};
use lorentz_iso::median::{l1_deviation, weighted_median};
use lorentz_iso::profiles::{random_atomic, random_profile, ProfileSpec};
use lorentz_iso::simplex::{cone_formula_check, induction_step_check, instance_rng, random_simplex};
use proptest::prelude::*;
use rand::Rng;

const SUITE: u64 = 1000;

fn atomic_strategy() -> impl Strategy<Value = GraphHypersurface> {
    (1usize..=3, 2usize..=25).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(0.05f64..2.0, k),
            prop::collection::vec(0.3f64..3.0, k),
            prop::collection::vec(0.0f64..0.99, k),
        )
            .prop_map(move |(w, f, g)| GraphHypersurface::new(DomainMesh::atomic(w).unwrap(), f, g, n).unwrap())
    })
}

fn assert_report_sound<S: GraphData + ?Sized>(s: &S, tol: f64) {
    let r = deficits(s).unwrap();
    assert!(r.invariant_violations(tol).is_empty(), "{:?}", r.invariant_violations(tol));
    let rel = deficit_relation_check(&r).unwrap();
    assert!(rel.identity_residual.abs() <= 1e-10 * (1.0 + r.delta_cm), "{rel:?}");
    assert!(rel.inequality_gap >= -tol);
    assert!(excess_asymmetry_check(&r) >= -tol);
    assert!(stability_check(&r).unwrap().min() >= -tol);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn atomic_functionals_are_consistent(s in atomic_strategy()) {
        assert_report_sound(&s, TOL_ATOMIC);
    }

    #[test]
    fn deficits_are_scale_invariant(s in atomic_strategy(), lambda in 0.1f64..10.0) {
        let a = deficits(&s).unwrap();
        let b = deficits(&s.scaled(lambda).unwrap()).unwrap();
        let n1 = (s.dim() + 1) as i32;
        prop_assert!((b.volume / a.volume - lambda.powi(n1)).abs() <= 1e-12 * lambda.powi(n1));
        for (x, y) in [
            (a.delta_be, b.delta_be),
            (a.delta_cm, b.delta_cm),
            (a.delta_cm_star, b.delta_cm_star),
            (a.excess, b.excess),
            (a.asymmetry, b.asymmetry),
            (a.asymmetry_tilde, b.asymmetry_tilde),
        ] {
            prop_assert!((x - y).abs() <= 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn fraenkel_radius_balances_one_sided_volumes(s in atomic_strategy()) {
        let t = fraenkel_radius(&s).unwrap();
        let (above, below) = one_sided_volumes(&s, t);
        let v = cone_volume(&s).unwrap();
        prop_assert!((above - below).abs() <= 1e-12 * v);
        prop_assert!((above + below - sym_diff_volume(&s, t)).abs() <= 1e-12 * v);
    }

    #[test]
    fn weighted_median_minimizes_l1(
        pairs in prop::collection::vec((-5.0f64..5.0, 0.01f64..3.0), 1..30)
    ) {
        let (x, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let m = weighted_median(&x, &w).unwrap();
        let best = l1_deviation(&x, &w, m);
        for &c in &x {
            prop_assert!(best <= l1_deviation(&x, &w, c) + 1e-12);
        }
        prop_assert!(x.contains(&m));
    }

    #[test]
    fn subset_inequality_holds(s in atomic_strategy(), mask in prop::collection::vec(any::<bool>(), 25)) {
        let mut subset: Vec<usize> = (0..s.len()).filter(|&i| mask[i]).collect();
        if subset.is_empty() {
            subset.push(0);
        }
        let be = be_subset_check(&s, &subset).unwrap();
        for g in [be.gap, be.gradient_drop, be.holder_step, be.bernoulli_min_pointwise] {
            prop_assert!(g >= -TOL_ATOMIC, "{be:?}");
        }
        prop_assert!(be.route_mismatch <= 1e-12 * be.bound);
    }

    #[test]
    fn median_chain_holds(s in atomic_strategy()) {
        let m = median_split(&s).unwrap().chain;
        for g in [m.halves_gap, m.minkowski_step_gap, m.quantitative_gap, m.final_gap] {
            prop_assert!(g >= -TOL_ATOMIC, "{m:?}");
        }
        prop_assert!(m.split_residual.abs() <= 1e-12 * cone_volume(&s).unwrap());
        prop_assert!((m.v_high + m.v_low - cone_volume(&s).unwrap()).abs() <= 1e-12 * cone_volume(&s).unwrap());
    }

    #[test]
    fn simplex_scaling(seed in any::<u64>(), n in 1usize..=3, lambda in 0.2f64..5.0) {
        let p = random_simplex(n, &mut instance_rng(seed, 0)).unwrap();
        let a = cone_formula_check(&p).unwrap();
        let b = cone_formula_check(&p.scaled(lambda).unwrap()).unwrap();
        let k = n as i32;
        prop_assert!((b.volume / a.volume / lambda.powi(k + 1) - 1.0).abs() <= 1e-10);
        prop_assert!((b.area / a.area / lambda.powi(k) - 1.0).abs() <= 1e-10);
        prop_assert!((b.height / a.height / lambda - 1.0).abs() <= 1e-10);
        prop_assert!(b.relative_residual <= 1e-10);
    }

    #[test]
    fn induction_step_is_nonnegative(
        v1 in 0.01f64..100.0, s1 in 0.01f64..100.0, v2 in 0.01f64..100.0, s2 in 0.01f64..100.0, n in 1usize..=4
    ) {
        let g = induction_step_check(v1, s1, v2, s2, n).unwrap();
        let scale = ((s1 + s2) * (v1 + v2).powi(n as i32)).powf(1.0 / (n + 1) as f64);
        prop_assert!(g >= -1e-12 * scale);
    }
}

#[test]
fn random_radial_suite() {
    for n in 1..=3 {
        for i in 0..SUITE {
            let p = random_profile(&mut instance_rng(7, (n as u64) << 32 | i), n, 512).unwrap();
            assert_report_sound(&p, TOL_QUADRATURE);
        }
    }
}

#[test]
fn random_atomic_suite() {
    for n in 1..=3 {
        for i in 0..SUITE {
            let mut rng = instance_rng(11, (n as u64) << 32 | i);
            let s = random_atomic(&mut rng, n).unwrap();
            assert_report_sound(&s, TOL_ATOMIC);
            let subset: Vec<usize> = (0..s.len()).filter(|_| rng.gen_bool(0.5)).collect();
            if !subset.is_empty() {
                assert!(be_subset_check(&s, &subset).unwrap().gap >= -TOL_ATOMIC);
            }
        }
    }
}

/// `Ã_F` against direct minimization over a grid of levels `c = t^{n+1}`;
/// `int |g - c| dmu` is `mu`-Lipschitz in `c`, which bounds the grid error.
#[test]
fn tilde_asymmetry_matches_grid_search() {
    const GRID: usize = 10_000;
    for i in 0..100u64 {
        let mut rng = instance_rng(3, i);
        let n = rng.gen_range(1..=3);
        let s = random_atomic(&mut rng, n).unwrap();
        let (_, tilde) = tilde_asymmetry(&s).unwrap();
        let n1 = (n + 1) as i32;
        let g: Vec<f64> = s.values().iter().map(|f| f.powi(n1)).collect();
        let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let h = (hi - lo) / GRID as f64;
        let v = cone_volume(&s).unwrap();
        let brute = (0..=GRID)
            .map(|k| sym_diff_volume(&s, (lo + k as f64 * h).powf(1.0 / n1 as f64)) / v)
            .fold(f64::INFINITY, f64::min);
        let mu: f64 = s.weights().iter().sum();
        let resolution = mu * h / (2.0 * n1 as f64 * v);
        assert!(brute >= tilde - 1e-12, "instance {i}: grid {brute} below median {tilde}");
        assert!(brute - tilde <= resolution + 1e-12, "instance {i}");
    }
}

#[test]
fn radial_functionals_converge_under_node_doubling() {
    let p = ProfileSpec::LogFourier {
        scale: 1.3,
        coeffs: vec![0.1, -0.05, 0.02],
    }
    .build(2, 1.2, 4096)
    .unwrap();
    let exact = deficits(&p).unwrap();
    let mut prev = f64::INFINITY;
    for nodes in [16, 32, 64, 128] {
        let r = deficits(&p.with_nodes(nodes).unwrap()).unwrap();
        let err = (r.volume - exact.volume).abs() + (area(&p.with_nodes(nodes).unwrap()) - exact.area).abs();
        assert!(err <= prev.max(1e-13), "{nodes}: {err} after {prev}");
        prev = err;
    }
    assert!(prev <= 1e-12);
}
