use lorentz_iso::sharpness::{
    default_bump, default_ladder, mean_zero_projection, run_ladder, BumpFunction, SharpnessLadder,
};

use crate::config::{BumpSpec, RunConfig};
use crate::error::CliError;
use crate::output::{num, write_csv, write_json};
use crate::suite::{Aggregator, CheckDef, Kind, Observation, SuiteResult};

pub const LADDER_COLUMNS: [&str; 11] = [
    "eps",
    "V",
    "A",
    "dist",
    "t_F",
    "delta_BE",
    "delta_CM",
    "delta_CM_star",
    "E",
    "A_F",
    "A_F_tilde",
];

const fn gap(name: &'static str, reference: &'static str) -> CheckDef {
    CheckDef {
        name,
        reference,
        kind: Kind::Gap,
    }
}

pub const CHECKS: &[CheckDef] = &[
    gap("slope_delta_BE_vs_A_F", "ln delta_BE against ln A_F has slope 2 (window margin)"),
    gap("slope_delta_CM_vs_A_F", "ln delta_CM against ln A_F has slope 1 (window margin)"),
    gap("slope_delta_CM_star_vs_A_F", "ln delta*_CM against ln A_F has slope 2 (window margin)"),
    gap("slope_delta_CM_vs_eps", "ln delta_CM against ln eps has slope 1 (window margin)"),
    gap("slope_delta_CM_star_vs_eps", "ln delta*_CM against ln eps has slope 2 (window margin)"),
    gap("af_over_eps_limit", "A_F/eps at the smallest eps >= (n+1)/2 mean|phi| (1 - slack)"),
    gap("ladder_invariants", "deficits, sandwich and stability bounds at every ladder point"),
];

pub fn bump(cfg: &RunConfig) -> Result<BumpFunction, CliError> {
    let s = &cfg.sharpness;
    let nodes = cfg.quadrature_nodes;
    let project = |b: BumpFunction| mean_zero_projection(&b, s.n, s.t_star, nodes);
    let b = match &s.bump {
        BumpSpec::Default => default_bump(s.n, s.t_star, nodes)?,
        BumpSpec::Standard { a, b } => project(BumpFunction::standard(*a, *b)?)?,
        BumpSpec::Table { t, values } => project(BumpFunction::from_table(t.clone(), values.clone())?)?,
    };
    let (lo, hi) = b.support();
    if hi >= s.t_star || lo <= 0.0 {
        return Err(CliError::Config(format!(
            "bump support [{lo}, {hi}] must lie inside (0, t_star = {})",
            s.t_star
        )));
    }
    Ok(b)
}

pub fn ladder_rows(l: &SharpnessLadder) -> Vec<Vec<String>> {
    l.epsilons
        .iter()
        .zip(&l.reports)
        .map(|(e, r)| {
            [
                *e,
                r.volume,
                r.area,
                r.dist,
                r.t_fraenkel,
                r.delta_be,
                r.delta_cm,
                r.delta_cm_star,
                r.excess,
                r.asymmetry,
                r.asymmetry_tilde,
            ]
            .iter()
            .map(|x| num(*x))
            .collect()
        })
        .collect()
}

pub fn run(cfg: &RunConfig) -> Result<SuiteResult, CliError> {
    let s = &cfg.sharpness;
    let phi = bump(cfg)?;
    let eps = s.epsilons.clone().unwrap_or_else(default_ladder);
    let ladder = run_ladder(&phi, s.n, s.t_star, &eps, cfg.quadrature_nodes, cfg.tolerances.quadrature)?;

    write_csv(&cfg.out_dir, "ladder.csv", &LADDER_COLUMNS, &ladder_rows(&ladder))?;
    let summary = serde_json::json!({
        "n": ladder.n,
        "t_star": ladder.t_star,
        "epsilons": ladder.epsilons,
        "fitted_exponents": ladder.fitted_exponents,
        "diagnostic_exponents": ladder.diagnostic_exponents,
        "eps_exponents": ladder.eps_exponents,
        "analytic": ladder.analytic,
        "af_over_eps": ladder.af_over_eps,
        "fitted_c": ladder.fitted_c,
        "cm_star_ratio": ladder.cm_star_ratio,
        "volume_k": ladder.volume_k,
        "area_k": ladder.area_k,
    });
    write_json(&cfg.out_dir, "sharpness_summary.json", &summary)?;

    let mut agg = Aggregator::new("sharpness", cfg.seed, CHECKS);
    let f = ladder.fitted_exponents;
    let e = ladder.eps_exponents;
    let (w, we) = (s.slope_window, s.eps_slope_window);
    let obs = [
        ("slope_delta_BE_vs_A_F", w - (f.delta_be - 2.0).abs()),
        ("slope_delta_CM_vs_A_F", w - (f.delta_cm - 1.0).abs()),
        ("slope_delta_CM_star_vs_A_F", w - (f.delta_cm_star - 2.0).abs()),
        ("slope_delta_CM_vs_eps", we - (e.delta_cm - 1.0).abs()),
        ("slope_delta_CM_star_vs_eps", we - (e.delta_cm_star - 2.0).abs()),
        (
            "af_over_eps_limit",
            ladder.af_over_eps.last().copied().unwrap_or(f64::NAN)
                - (1.0 - s.af_limit_slack) * ladder.analytic.af_lower_coeff,
        ),
    ];
    for (name, v) in obs {
        agg.observe("ladder", Observation::new(name, v, 0.0));
    }
    let fails = &ladder.invariant_failures;
    let inv = Observation::new("ladder_invariants", 0.0 - fails.len() as f64, 0.0);
    agg.observe(
        "ladder",
        if fails.is_empty() { inv } else { inv.with_message(fails.join("; ")) },
    );
    agg.info("fitted_exponents", f);
    agg.info("eps_exponents", e);
    agg.info("fitted_c", ladder.fitted_c);
    agg.info("af_lower_coeff", ladder.analytic.af_lower_coeff);
    Ok(agg.finish())
}
