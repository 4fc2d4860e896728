use lorentz_iso::simplex::{
    cone_formula_check, containment_check, induction_step_check, instance_rng, random_simplex, SpacelikeSimplex,
};
use rand::Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::suite::{Aggregator, CheckDef, Kind, Observation, SuiteResult};

/// Relative tolerance of the cone formula `V = h A / (n+1)`.
pub const CONE_TOL: f64 = 1e-10;
/// Monte Carlo gaps are accepted down to this many standard errors.
pub const MC_SIGMAS: f64 = 5.0;

const fn gap(name: &'static str, reference: &'static str) -> CheckDef {
    CheckDef {
        name,
        reference,
        kind: Kind::Gap,
    }
}

const fn residual(name: &'static str, reference: &'static str) -> CheckDef {
    CheckDef {
        name,
        reference,
        kind: Kind::Residual,
    }
}

pub const CHECKS: &[CheckDef] = &[
    residual("canonical_volume", "segment (2,-1),(2,1): V(C(P)) = 2"),
    residual("canonical_area", "segment (2,-1),(2,1): A(P) = 2"),
    residual("canonical_height", "segment (2,-1),(2,1): h = 2"),
    residual("canonical_cone_formula", "segment (2,-1),(2,1): V = h A / 2 exactly"),
    residual("random_generation", "random spacelike simplices are generated"),
    residual("cone_formula", "V(C(P)) = h A(P) / (n+1), relative"),
    gap("containment", "h^{n+1} mu(pi(P)) / (n+1) >= V(C(P)), up to Monte Carlo error"),
    gap("induction_step", "((s1+s2)(v1+v2)^n)^{1/(n+1)} >= (s1 v1^n)^{1/(n+1)} + (s2 v2^n)^{1/(n+1)}"),
    gap("degenerate_rejected", "a degenerate simplex is rejected with an error"),
];

fn stream(tag: u64, n: usize, i: usize) -> u64 {
    (tag << 48) | ((n as u64) << 32) | i as u64
}

fn canonical(agg: &mut Aggregator) -> Result<(), CliError> {
    let p = SpacelikeSimplex::from_coords(&[&[2.0, -1.0], &[2.0, 1.0]])?;
    let c = cone_formula_check(&p)?;
    agg.observe("n1/canonical", Observation::new("canonical_volume", c.volume - 2.0, 0.0));
    agg.observe("n1/canonical", Observation::new("canonical_area", c.area - 2.0, 0.0));
    agg.observe("n1/canonical", Observation::new("canonical_height", c.height - 2.0, 0.0));
    agg.observe("n1/canonical", Observation::new("canonical_cone_formula", c.residual, 0.0));
    Ok(())
}

fn cone_job(seed: u64, n: usize, i: usize) -> Vec<Observation> {
    let mut rng = instance_rng(seed, stream(1, n, i));
    match random_simplex(n, &mut rng).and_then(|p| cone_formula_check(&p)) {
        Ok(c) => vec![
            Observation::new("random_generation", 0.0, 0.0),
            Observation::new("cone_formula", c.relative_residual, CONE_TOL),
        ],
        Err(e) => vec![Observation::new("random_generation", f64::NAN, 0.0).with_message(e.to_string())],
    }
}

fn containment_job(cfg: &RunConfig, n: usize, i: usize) -> Vec<Observation> {
    let mut rng = instance_rng(cfg.seed, stream(2, n, i));
    let sample_seed = rng.gen();
    let res = random_simplex(n, &mut rng).and_then(|p| containment_check(&p, cfg.simplex.mc_samples, sample_seed));
    match res {
        Ok(c) => {
            let tol = MC_SIGMAS * c.gap_std_error + cfg.tolerances.atomic;
            vec![Observation::new("containment", c.gap, tol)]
        }
        Err(e) => vec![Observation::new("random_generation", f64::NAN, 0.0).with_message(e.to_string())],
    }
}

fn induction_job(cfg: &RunConfig, n: usize, i: usize) -> Vec<Observation> {
    let mut rng = instance_rng(cfg.seed, stream(3, n, i));
    let mut draw = || 10f64.powf(rng.gen_range(-2.0..2.0));
    let (v1, s1, v2, s2) = (draw(), draw(), draw(), draw());
    match induction_step_check(v1, s1, v2, s2, n) {
        Ok(g) => {
            let scale = ((s1 + s2) * (v1 + v2).powi(n as i32)).powf(1.0 / (n + 1) as f64);
            vec![Observation::new("induction_step", g / scale, cfg.tolerances.atomic)]
        }
        Err(e) => vec![Observation::new("induction_step", f64::NAN, 0.0).with_message(e.to_string())],
    }
}

fn degenerate(agg: &mut Aggregator) {
    let cases: [&[&[f64]]; 3] = [
        &[&[2.0, 1.0, 0.0], &[2.0, 0.0, 0.0], &[2.0, -1.0, 0.0]],
        &[&[2.0, 0.0], &[2.0, 0.0]],
        &[&[2.0, 0.0], &[4.0, 0.5]],
    ];
    for (i, c) in cases.iter().enumerate() {
        let o = match SpacelikeSimplex::from_coords(c) {
            Err(_) => Observation::new("degenerate_rejected", 0.0, 0.0),
            Ok(_) => Observation::new("degenerate_rejected", -1.0, 0.0).with_message("accepted"),
        };
        agg.observe(&format!("degenerate/{i}"), o);
    }
}

pub fn run(cfg: &RunConfig) -> Result<SuiteResult, CliError> {
    let mut agg = Aggregator::new("simplex", cfg.seed, CHECKS);
    canonical(&mut agg)?;

    let ids = |count: usize| -> Vec<(usize, usize)> {
        cfg.dimensions.iter().flat_map(|&n| (0..count).map(move |i| (n, i))).collect()
    };
    let cone_ids = ids(cfg.instances);
    let cone: Vec<_> = cone_ids.par_iter().map(|&(n, i)| cone_job(cfg.seed, n, i)).collect();
    for ((n, i), obs) in cone_ids.iter().zip(cone) {
        agg.observe_all(&format!("n{n}/{i}"), obs);
    }
    let cont_ids = ids(cfg.simplex.containment_instances);
    let cont: Vec<_> = cont_ids.par_iter().map(|&(n, i)| containment_job(cfg, n, i)).collect();
    for ((n, i), obs) in cont_ids.iter().zip(cont) {
        agg.observe_all(&format!("containment/n{n}/{i}"), obs);
    }
    let ind_ids = ids(cfg.simplex.induction_pairs);
    let ind: Vec<_> = ind_ids.par_iter().map(|&(n, i)| induction_job(cfg, n, i)).collect();
    for ((n, i), obs) in ind_ids.iter().zip(ind) {
        agg.observe_all(&format!("induction/n{n}/{i}"), obs);
    }
    if cfg.simplex.inject_degenerate {
        degenerate(&mut agg);
    }
    agg.info("mc_samples", cfg.simplex.mc_samples);
    Ok(agg.finish())
}
