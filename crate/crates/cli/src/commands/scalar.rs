use lorentz_iso::scalar::{
    counterexample_family, improved_constant, improved_constant_limit, jensen_sweep, l_tilde, minkowski_sweep,
    right_grid, ScalarSweepGrid, SweepRow, HolderExponent,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, write_csv};
use crate::suite::{Aggregator, CheckDef, Kind, Observation, SuiteResult};

/// Relative tolerance of the closed form of the improved constant.
pub const CONSTANT_IDENTITY_TOL: f64 = 1e-10;
/// Accepted relative distance of `c_app_b/(n+1)` at the largest `n` from
/// its limit `4/(1 - ln 2)`.
pub const ASYMPTOTE_WINDOW: f64 = 0.05;
/// Distance to 1 of the squared-L1 distance at `j = 10^4`.
pub const COUNTEREXAMPLE_TAIL_TOL: f64 = 2e-4;

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
    gap("jensen_slack", "((a+1)/2)^p - (a^p+1)/2 >= p(1-p)/8 (1-a)^2"),
    gap("minkowski_slack", "(2(a+b)^n)^{1/(n+1)} - a^{n/(n+1)} - b^{n/(n+1)} >= quadratic lower bound"),
    gap("l_tilde_nonnegative", "L̃(a) >= 0 on (0, 1]"),
    residual("constant_identity", "4/L(1) equals its closed form, relative"),
    gap("constant_ordering", "4/L(1) <= 16(n+1)^2/n"),
    gap("constant_monotone", "normalized constants are monotone in n"),
    gap("constant_asymptote", "c_app_b/(n+1) at the largest n is within 5% of 4/(1 - ln 2)"),
    gap("counterexample_range", "squared-L1 distance of the step family lies in [1, 2]"),
    residual("counterexample_tail", "squared-L1 distance at j = 10^4 is within 2e-4 of 1"),
];

const SWEEP_COLUMNS: [&str; 7] = ["a", "b_or_p", "n", "gap", "bound", "slack", "exact"];

fn sweep_rows(rows: &[SweepRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                num(r.a),
                num(r.b_or_p),
                r.n.map_or(String::new(), |n| n.to_string()),
                num(r.gap),
                num(r.bound),
                num(r.slack),
                is_exact(r).to_string(),
            ]
        })
        .collect()
}

/// Equality rows: gap and bound both vanish.
fn is_exact(r: &SweepRow) -> bool {
    r.gap == 0.0 && r.bound == 0.0
}

pub fn grid(cfg: &RunConfig) -> Result<ScalarSweepGrid, CliError> {
    let s = &cfg.scalar;
    let std = ScalarSweepGrid::standard(s.grid_points);
    let g = ScalarSweepGrid {
        a_values: s.a_values.clone().unwrap_or(std.a_values),
        b_values: s.b_values.clone().unwrap_or(std.b_values),
        p_values: s.p_values.clone().unwrap_or(std.p_values),
        n_values: s.n_values.clone(),
    };
    g.validate()?;
    if g.a_values.iter().any(|a| *a > 1.0) {
        return Err(CliError::Config("scalar.a_values must lie in (0, 1]".into()));
    }
    Ok(g)
}

pub fn run(cfg: &RunConfig) -> Result<SuiteResult, CliError> {
    let g = grid(cfg)?;
    let tol = cfg.tolerances.atomic;
    let mut agg = Aggregator::new("scalar", cfg.seed, CHECKS);

    let jensen = jensen_sweep(&g)?;
    let mink = minkowski_sweep(&g)?;
    write_csv(&cfg.out_dir, "jensen.csv", &SWEEP_COLUMNS, &sweep_rows(&jensen))?;
    write_csv(&cfg.out_dir, "minkowski.csv", &SWEEP_COLUMNS, &sweep_rows(&mink))?;
    for (check, rows) in [("jensen_slack", &jensen), ("minkowski_slack", &mink)] {
        for (i, r) in rows.iter().enumerate() {
            agg.observe(&format!("{check}/{i}"), Observation::new(check, r.slack, tol));
        }
        agg.info(&format!("{check}_exact_rows"), rows.iter().filter(|r| is_exact(r)).count());
    }

    let a_fine = right_grid(0.0, 1.0, g.a_values.len().max(1000));
    for &n in &g.n_values {
        for &a in &a_fine {
            agg.observe(&format!("n{n}/a={a}"), Observation::new("l_tilde_nonnegative", l_tilde(a, n)?, tol));
        }
    }

    let n_max = cfg.scalar.constants_n_max;
    let constants = (1..=n_max).map(improved_constant).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> = constants
        .iter()
        .map(|c| {
            vec![
                c.n.to_string(),
                num(c.c_app_b),
                num(c.c_thm11),
                num(c.normalized.0),
                num(c.normalized.1),
                num(c.identity_residual),
            ]
        })
        .collect();
    write_csv(
        &cfg.out_dir,
        "constants.csv",
        &["n", "c_app_b", "c_thm11", "normalized_app_b", "normalized_thm11", "identity_residual"],
        &rows,
    )?;
    for c in &constants {
        let id = format!("n{}", c.n);
        agg.observe(&id, Observation::new("constant_identity", c.identity_residual, CONSTANT_IDENTITY_TOL));
        agg.observe(&id, Observation::new("constant_ordering", c.c_thm11 - c.c_app_b, 0.0));
    }
    for w in constants.windows(2) {
        // c_app_b/(n+1) increases, 16(n+1)/n decreases
        let step = (w[1].normalized.0 - w[0].normalized.0).min(w[0].normalized.1 - w[1].normalized.1);
        agg.observe(&format!("n{}", w[1].n), Observation::new("constant_monotone", step, 0.0));
    }
    let limit = improved_constant_limit();
    let last = constants.last().expect("n_max >= 1");
    agg.observe(
        &format!("n{}", last.n),
        Observation::new(
            "constant_asymptote",
            ASYMPTOTE_WINDOW - (last.normalized.0 / limit - 1.0).abs(),
            0.0,
        ),
    );
    agg.info("constant_limit", limit);
    agg.info("normalized_at_n_max", last.normalized);

    let j_max = cfg.scalar.counterexample_j_max;
    let family = (1..=j_max)
        .into_par_iter()
        .map(counterexample_family)
        .collect::<Result<Vec<_>, _>>()?;
    for (j, d) in (1..=j_max).zip(&family) {
        let v = (d.l1_sq_distance - 1.0).min(2.0 - d.l1_sq_distance);
        agg.observe(&format!("j{j}"), Observation::new("counterexample_range", v, tol));
    }
    if j_max >= 10_000 {
        let d = family[9_999];
        agg.observe(
            "j10000",
            Observation::new("counterexample_tail", d.l1_sq_distance - 1.0, COUNTEREXAMPLE_TAIL_TOL),
        );
    }
    if j_max >= 100 {
        agg.info("counterexample_l2_j100", family[99].l2_distance);
    }

    let betas: Vec<serde_json::Value> = g
        .n_values
        .iter()
        .map(|&n| {
            serde_json::json!({
                "n": n,
                "conjugate": HolderExponent::Conjugate.beta(n),
                "dual": HolderExponent::Dual.beta(n),
                "two": HolderExponent::Two.beta(n),
            })
        })
        .collect();
    agg.info("holder_beta", betas);
    Ok(agg.finish())
}
