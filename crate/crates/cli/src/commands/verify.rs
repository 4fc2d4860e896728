use lorentz_iso::functionals::{
    be_subset_check, deficit_relation_check, deficits, excess_asymmetry_check, exhaustion_convergence_check,
    median_split, stability_check,
};
use lorentz_iso::hypersurface::{check_achronal, DomainMesh, GraphData, GraphHypersurface, RadialProfile};
use lorentz_iso::profiles::{random_atomic, random_profile, random_profile_spec};
use lorentz_iso::scalar::{bernoulli_l2_check, holder_bound_check, HolderExponent, BERNOULLI_C_TILDE, BERNOULLI_LAMBDA};
use lorentz_iso::simplex::instance_rng;
use rand::Rng;
use rayon::prelude::*;

use crate::config::{DomainSpec, RunConfig};
use crate::error::CliError;
use crate::suite::{Aggregator, CheckDef, Kind, Observation, SuiteResult};

/// Relative tolerance of the exact deficit identity.
pub const RELATION_TOL: f64 = 1e-10;

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
    residual("evaluation", "every functional evaluates without error"),
    gap("admissibility", "|grad ln f| <= 1 at every node"),
    gap("delta_BE", "delta_BE >= 0 (Bahn-Ehrlich inequality)"),
    gap("delta_CM", "delta_CM >= 0 (cone-mean inequality)"),
    gap("delta_CM_star", "delta*_CM = delta_CM - E >= 0 (refined inequality)"),
    gap("deficit_order", "delta*_CM >= delta_BE"),
    gap("excess_range", "0 <= E <= 1/(n+1)"),
    gap("sandwich_lower", "Ã_F <= A_F"),
    gap("sandwich_upper", "A_F <= 2 Ã_F"),
    residual("relation_identity", "delta_CM = (1+delta_BE)(1-(n+1)E)^{-1/(n+1)} - 1, relative to 1+delta_CM"),
    gap("relation_inequality", "delta_CM >= E + (1+E) delta_BE"),
    gap("excess_asymmetry", "A_F <= 2(n+1) E"),
    gap("be_subset", "(n+1) sigma(B)^{1/(n+1)} V(B)^{n/(n+1)} >= A(B) on node subsets"),
    gap("be_gradient_drop", "int_B g^{n/(n+1)} dmu >= A(B)"),
    gap("be_holder_step", "Hölder step of the subset inequality"),
    gap("be_bernoulli_pointwise", "pointwise Bernoulli step of the subset inequality"),
    residual("be_route_mismatch", "both proof routes share one right-hand side, relative"),
    gap("holder_conjugate", "Hölder distance / beta <= delta_BE/(1+delta_BE), p = (n+1)/n"),
    gap("holder_dual", "Hölder distance / beta <= delta_BE/(1+delta_BE), p = n+1"),
    gap("holder_two", "Hölder distance / beta <= delta_BE/(1+delta_BE), p = 2"),
    gap("bernoulli_l2", "quantitative L2 bound under |g - gbar| <= lambda gbar (when applicable)"),
    gap("median_halves", "halves inequality of the median split"),
    gap("median_minkowski_step", "Minkowski step of the median split"),
    gap("median_quantitative", "quantitative Bahn-Ehrlich bound of the median split"),
    gap("median_final", "4(n+1)^2/n delta_BE V^2 >= V(C(S) Δ B_t0)^2"),
    residual("median_split_residual", "V(C(S) Δ B_t0) = V1 - V2, relative to V"),
    gap("stability_thm11", "A_F^2 <= 16(n+1)^2/n delta_BE"),
    gap("stability_cor13", "A_F <= 2(n+1) delta_CM"),
    gap("stability_cor14", "A_F^2 <= 16(n+1)^2/n delta*_CM"),
    gap("stability_app_b", "delta*_CM >= L(1)/4 A_F^2"),
    residual("exhaustion_last_step", "compact exhaustion reaches the full functionals"),
    gap("exhaustion_monotone", "cone volume is monotone along the exhaustion"),
];

enum Instance {
    Radial(RadialProfile),
    Atomic(GraphHypersurface),
}

struct Job {
    label: String,
    n: usize,
    stream: u64,
}

fn stream_id(n: usize, i: usize) -> u64 {
    ((n as u64) << 32) | i as u64
}

fn build(cfg: &RunConfig, job: &Job, rng: &mut impl Rng) -> Result<Instance, CliError> {
    let nodes = cfg.quadrature_nodes;
    Ok(match (&cfg.domain, &cfg.profile) {
        (DomainSpec::Ball { radius: Some(t) }, Some(p)) => Instance::Radial(p.build(job.n, *t, nodes)?),
        (DomainSpec::Ball { radius: Some(t) }, None) => {
            Instance::Radial(random_profile_spec(rng, *t).build(job.n, *t, nodes)?)
        }
        (DomainSpec::Ball { radius: None }, _) => Instance::Radial(random_profile(rng, job.n, nodes)?),
        (DomainSpec::Atomic { weights, values, grad }, _) => Instance::Atomic(GraphHypersurface::new(
            DomainMesh::atomic(weights.clone())?,
            values.clone(),
            grad.clone().unwrap_or_else(|| vec![0.0; weights.len()]),
            job.n,
        )?),
        (DomainSpec::RandomAtomic, _) => Instance::Atomic(random_atomic(rng, job.n)?),
    })
}

fn random_subset(rng: &mut impl Rng, len: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..len).filter(|_| rng.gen_bool(0.5)).collect();
    if s.is_empty() {
        s.push(rng.gen_range(0..len));
    }
    s
}

fn evaluate<S: GraphData + ?Sized>(
    s: &S,
    radial: Option<&RadialProfile>,
    cfg: &RunConfig,
    tol: f64,
    rng: &mut impl Rng,
) -> lorentz_iso::Result<Vec<Observation>> {
    let mut out = Vec::new();
    let mut push = |name: &'static str, v: f64, t: f64| out.push(Observation::new(name, v, t));
    let max_grad = s.log_grad_norms().iter().copied().fold(0.0, f64::max);
    push("admissibility", 1.0 - max_grad, 0.0);
    if !check_achronal(s, 0.0).is_admissible() {
        return Ok(out);
    }

    let r = deficits(s)?;
    let n1 = (r.n + 1) as f64;
    push("delta_BE", r.delta_be, tol);
    push("delta_CM", r.delta_cm, tol);
    push("delta_CM_star", r.delta_cm_star, tol);
    push("deficit_order", r.delta_cm_star - r.delta_be, tol);
    push("excess_range", r.excess.min(1.0 / n1 - r.excess), tol);
    push("sandwich_lower", r.asymmetry - r.asymmetry_tilde, tol);
    push("sandwich_upper", 2.0 * r.asymmetry_tilde - r.asymmetry, tol);

    let rel = deficit_relation_check(&r)?;
    push("relation_identity", rel.identity_residual / (1.0 + r.delta_cm), RELATION_TOL);
    push("relation_inequality", rel.inequality_gap, tol);
    push("excess_asymmetry", excess_asymmetry_check(&r), tol);

    let len = s.weights().len();
    for _ in 0..cfg.subsets {
        let be = be_subset_check(s, &random_subset(rng, len))?;
        push("be_subset", be.gap, tol);
        push("be_gradient_drop", be.gradient_drop, tol);
        push("be_holder_step", be.holder_step, tol);
        push("be_bernoulli_pointwise", be.bernoulli_min_pointwise, tol);
        push("be_route_mismatch", be.route_mismatch / be.bound, tol);
    }

    for (name, e) in [
        ("holder_conjugate", HolderExponent::Conjugate),
        ("holder_dual", HolderExponent::Dual),
        ("holder_two", HolderExponent::Two),
    ] {
        push(name, holder_bound_check(s, e)?.gap, tol);
    }
    match bernoulli_l2_check(s, BERNOULLI_LAMBDA, BERNOULLI_C_TILDE) {
        Ok(b) => push("bernoulli_l2", b.gap, tol),
        Err(lorentz_iso::Error::Precondition(_)) => {}
        Err(e) => return Err(e),
    }

    match median_split(s) {
        Ok(m) => {
            let c = m.chain;
            push("median_halves", c.halves_gap, tol);
            push("median_minkowski_step", c.minkowski_step_gap, tol);
            push("median_quantitative", c.quantitative_gap, tol);
            push("median_final", c.final_gap, tol);
            push("median_split_residual", c.split_residual / r.volume, tol);
        }
        // a single atom cannot be split
        Err(lorentz_iso::Error::EmptyDomain) => {}
        Err(e) => return Err(e),
    }

    let g = stability_check(&r)?;
    push("stability_thm11", g.thm11, tol);
    push("stability_cor13", g.cor13, tol);
    push("stability_cor14", g.cor14, tol);
    push("stability_app_b", g.app_b, tol);

    if let Some(p) = radial {
        let table = exhaustion_convergence_check(p, cfg.exhaustion_steps)?;
        push("exhaustion_last_step", table.last_step_deviation, cfg.tolerances.quadrature);
        push("exhaustion_monotone", if table.volume_monotone { 0.0 } else { -1.0 }, 0.0);
    }
    Ok(out)
}

fn run_job(cfg: &RunConfig, job: &Job) -> Vec<Observation> {
    let mut rng = instance_rng(cfg.seed, job.stream);
    let result = build(cfg, job, &mut rng).and_then(|inst| {
        let obs = match &inst {
            Instance::Radial(p) => evaluate(p, Some(p), cfg, cfg.tolerances.quadrature, &mut rng),
            Instance::Atomic(a) => evaluate(a, None, cfg, cfg.tolerances.atomic, &mut rng),
        };
        obs.map_err(CliError::from)
    });
    match result {
        Ok(mut obs) => {
            obs.insert(0, Observation::new("evaluation", 0.0, 0.0));
            obs
        }
        Err(e) => vec![Observation::new("evaluation", f64::NAN, 0.0).with_message(e.to_string())],
    }
}

pub fn run(cfg: &RunConfig) -> Result<SuiteResult, CliError> {
    let single = !matches!(
        (&cfg.domain, &cfg.profile),
        (DomainSpec::Ball { radius: None }, _) | (DomainSpec::Ball { .. }, None) | (DomainSpec::RandomAtomic, _)
    );
    let per_dim = if single { 1 } else { cfg.instances };
    let jobs: Vec<Job> = cfg
        .dimensions
        .iter()
        .flat_map(|&n| {
            (0..per_dim).map(move |i| Job {
                label: format!("n{n}/{i}"),
                n,
                stream: stream_id(n, i),
            })
        })
        .collect();
    let results: Vec<Vec<Observation>> = jobs.par_iter().map(|j| run_job(cfg, j)).collect();

    let mut agg = Aggregator::new("verify", cfg.seed, CHECKS);
    for (job, obs) in jobs.iter().zip(results) {
        agg.observe_all(&job.label, obs);
    }
    agg.info("instances_per_dimension", per_dim);
    agg.info("dimensions", &cfg.dimensions);
    agg.info("quadrature_nodes", cfg.quadrature_nodes);
    Ok(agg.finish())
}
