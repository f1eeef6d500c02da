use rayon::prelude::*;
use serde::Serialize;

use sharpsob::model::{verify_volume_chain, ChainCheck, ModelManifold, ModelSpec};
use sharpsob::numerics::{unit_ball_volume, unit_sphere_area, QuadratureConfig};
use sharpsob::rigidity::{
    assemble_escape, escape_row, verify_theorem, CmSource, Mode, TheoremInputs, Verdict,
};
use sharpsob::sobolev::{
    estimate_radial_constant, quotients, verify_decay_conditions, EstimatorOptions, RadialFunction,
};
use sharpsob::talenti::{
    lambda_spread, normalize_beta, sharp_constant_at, SobolevParams, TalentiFamily,
};
use sharpsob::Error;

use crate::config::{CmChoice, Command, GammaChoice, OutputFormat, RunConfig};
use crate::format::{fmt_num, to_json, Csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Head threshold of the mass-escape experiment.
pub const ESCAPE_EPSILON: f64 = 0.01;

/// Scales at which `constants` measures invariance.
pub const INVARIANCE_LAMBDAS: [f64; 4] = [0.5, 1.0, 5.0, 20.0];

/// Result of one command: exit code, report body and stderr lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn failure(err: &Error) -> Self {
        Self {
            code: exit_code(err),
            report: String::new(),
            diagnostics: vec![format!("error: {err}")],
        }
    }
}

/// Numerical failures count as failed checks; everything else is bad input.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonConvergence { .. }
        | Error::NonFinite { .. }
        | Error::TailBound { .. }
        | Error::Invariance { .. }
        | Error::Degenerate(_)
        | Error::SobolevUnsupported { .. }
        | Error::OptimizerNonConvergence { .. } => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

fn quadrature(cfg: &RunConfig) -> Result<QuadratureConfig, Error> {
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::Domain(format!(
            "--tol must be positive, got {}",
            cfg.tol
        )));
    }
    QuadratureConfig::new(1e-15, cfg.tol / 100.0, 50, 1.0)
}

pub fn execute(cfg: &RunConfig) -> Outcome {
    let result = match cfg.command {
        Command::Constants => constants(cfg),
        Command::Model => model(cfg),
        Command::Verify => verify(cfg),
        Command::Rigidity => rigidity(cfg),
        Command::Limits => limits(cfg),
    };
    result.unwrap_or_else(|e| Outcome::failure(&e))
}

/// One inequality row shared by `model` and `verify`.
#[derive(Debug, Clone, Serialize)]
struct CheckRow {
    check_name: String,
    t: f64,
    lhs: f64,
    rhs: f64,
    slack: f64,
    pass: bool,
}

impl CheckRow {
    fn le(name: String, t: f64, lhs: f64, rhs: f64) -> Self {
        Self::with_pass(name, t, lhs, rhs, lhs <= rhs)
    }

    fn with_pass(check_name: String, t: f64, lhs: f64, rhs: f64, pass: bool) -> Self {
        Self {
            check_name,
            t,
            lhs,
            rhs,
            slack: rhs - lhs,
            pass,
        }
    }
}

impl From<ChainCheck> for CheckRow {
    fn from(c: ChainCheck) -> Self {
        Self::with_pass(c.check_name, c.t, c.lhs, c.rhs, c.pass)
    }
}

#[derive(Serialize)]
struct CheckReport<'a> {
    command: &'static str,
    params: SobolevParams,
    g: &'a str,
    b: f64,
    checks: &'a [CheckRow],
}

fn emit_checks(cfg: &RunConfig, params: SobolevParams, b: f64, rows: &[CheckRow]) -> Outcome {
    let report = match cfg.output {
        OutputFormat::Json => to_json(&CheckReport {
            command: cfg.command.name(),
            params,
            g: &cfg.g_spec,
            b,
            checks: rows,
        }),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&["check_name", "t", "lhs", "rhs", "slack", "pass"]);
            for r in rows {
                csv.row(&[
                    r.check_name.clone(),
                    fmt_num(r.t),
                    fmt_num(r.lhs),
                    fmt_num(r.rhs),
                    fmt_num(r.slack),
                    r.pass.to_string(),
                ]);
            }
            csv.finish()
        }
    };
    let failed = rows.iter().find(|r| !r.pass);
    let diagnostics = match failed {
        Some(r) => vec![format!(
            "check failed: {} at t = {} ({} > {})",
            r.check_name,
            fmt_num(r.t),
            fmt_num(r.lhs),
            fmt_num(r.rhs)
        )],
        None => vec![format!("all {} checks passed", rows.len())],
    };
    Outcome {
        code: if failed.is_some() {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        },
        report,
        diagnostics,
    }
}

#[derive(Serialize)]
struct ConstantsReport {
    params: SobolevParams,
    beta: f64,
    #[serde(rename = "K")]
    k: f64,
    beta_spread: f64,
    #[serde(rename = "K_spread")]
    k_spread: f64,
    omega_m: f64,
    omega_sphere: f64,
    tol: f64,
}

fn constants(cfg: &RunConfig) -> Result<Outcome, Error> {
    let params = SobolevParams::new(cfg.m, cfg.p)?;
    let q = quadrature(cfg)?;
    let beta = normalize_beta(&params, &q)?;
    let k = sharp_constant_at(&params, beta, 1.0, &q)?;
    let (beta_spread, k_spread) = lambda_spread(&params, &INVARIANCE_LAMBDAS, &q)?;
    let r = ConstantsReport {
        params,
        beta,
        k,
        beta_spread,
        k_spread,
        omega_m: unit_ball_volume(cfg.m),
        omega_sphere: unit_sphere_area(cfg.m),
        tol: cfg.tol,
    };
    let report = match cfg.output {
        OutputFormat::Json => to_json(&r),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&["quantity", "value"]);
            for (name, v) in [
                ("beta", r.beta),
                ("K", r.k),
                ("beta_spread", r.beta_spread),
                ("K_spread", r.k_spread),
                ("omega_m", r.omega_m),
                ("omega_sphere", r.omega_sphere),
            ] {
                csv.row(&[name.to_string(), fmt_num(v)]);
            }
            csv.finish()
        }
    };
    let spread = beta_spread.max(k_spread);
    let ok = spread <= cfg.tol;
    Ok(Outcome {
        code: if ok { EXIT_OK } else { EXIT_CHECK_FAILED },
        report,
        diagnostics: vec![if ok {
            format!(
                "scale spread {} within tol {}",
                fmt_num(spread),
                fmt_num(cfg.tol)
            )
        } else {
            format!(
                "scale spread {} exceeds tol {}",
                fmt_num(spread),
                fmt_num(cfg.tol)
            )
        }],
    })
}

/// Radii at which chains and Laplacian bounds are reported.
fn chain_grid(t_max: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = [
        0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0,
    ]
    .into_iter()
    .filter(|t| *t < t_max)
    .collect();
    grid.push(t_max);
    grid
}

fn build(cfg: &RunConfig) -> Result<(ModelSpec, ModelManifold), Error> {
    let spec = ModelSpec::parse(&cfg.g_spec)?;
    let model = spec.build(cfg.m, cfg.t_max, cfg.step)?;
    Ok((spec, model))
}

fn model(cfg: &RunConfig) -> Result<Outcome, Error> {
    let params = SobolevParams::new(cfg.m, cfg.p)?;
    let (spec, model) = build(cfg)?;
    let grid = chain_grid(cfg.t_max);
    // A cone plays the manifold compared against flat space.
    let chain = match spec {
        ModelSpec::Conical(_) => {
            let flat = ModelManifold::euclidean(cfg.m, cfg.t_max, cfg.step)?;
            verify_volume_chain(&flat, Some(&model), &grid)?
        }
        ModelSpec::Profile(_) => verify_volume_chain(&model, None, &grid)?,
    };
    let mut rows: Vec<CheckRow> = chain.checks.into_iter().map(CheckRow::from).collect();
    let b = model.b();
    let m1 = (cfg.m - 1) as f64;
    for &t in &grid {
        let lap = model.laplacian_radial(t)?;
        let bound = m1 * b.exp() / t;
        rows.push(CheckRow::with_pass(
            "laplacian_le_comparison".into(),
            t,
            lap,
            bound,
            b.is_finite() && lap <= bound * (1.0 + 1e-10),
        ));
    }
    Ok(emit_checks(cfg, params, b, &rows))
}

fn ricci_nonnegative(model: &ModelManifold, grid: &[f64]) -> Result<bool, Error> {
    if model.b() != 0.0 {
        return Ok(false);
    }
    for &t in grid {
        if model.radial_ricci(t)? < -1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn verify_lambda(
    lambda: f64,
    family: &TalentiFamily,
    model: &ModelManifold,
    flat: bool,
    ric_nonneg: bool,
    q: &QuadratureConfig,
) -> Result<Vec<CheckRow>, Error> {
    let p = family.params.p();
    let ps = family.params.p_star();
    let k_pow = family.k_pow();
    let b = model.b();
    let m1 = (model.m() - 1) as f64;
    let tag = |name: &str| format!("lambda={}/{name}", fmt_num(lambda));
    let inf = f64::INFINITY;

    let u = RadialFunction::talenti(family.profile(lambda)?);
    let qs = quotients(&u, p, ps, model, q)?;
    let mut rows = Vec::new();
    let mass_bound = if ric_nonneg { 1.0 } else { (b * m1).exp() };
    rows.push(CheckRow::with_pass(
        tag("mass_le_bound"),
        inf,
        qs.mass,
        mass_bound,
        qs.mass <= mass_bound * (1.0 + 1e-8),
    ));
    if flat {
        rows.push(CheckRow::le(
            tag("mass_minus_one"),
            inf,
            (qs.mass - 1.0).abs(),
            1e-8,
        ));
        rows.push(CheckRow::le(
            tag("energy_rel_error"),
            inf,
            (qs.energy / k_pow - 1.0).abs(),
            1e-6,
        ));
        rows.push(CheckRow::le(
            tag("k_pow_le_quotient_sobolev"),
            inf,
            k_pow * (1.0 - 1e-6),
            qs.sobolev,
        ));
    }
    if ric_nonneg {
        rows.push(CheckRow::le(
            tag("quotient_plain_le_k_pow"),
            inf,
            qs.plain,
            k_pow * (1.0 + 1e-6),
        ));
    }
    let doubled = quotients(&u.scaled(2.0)?, p, ps, model, q)?;
    rows.push(CheckRow::le(
        tag("quotient_sobolev_homogeneity"),
        inf,
        (doubled.sobolev / qs.sobolev - 1.0).abs(),
        1e-10,
    ));

    let reach = u.scale().max(1.0);
    let mut radii: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|r| r * reach)
        .filter(|r| *r < model.t_max())
        .collect();
    radii.push(model.t_max());
    let decay = verify_decay_conditions(&u, p, model, &radii, q)?;
    rows.push(CheckRow::with_pass(
        tag("weighted_flux_l1_finite"),
        inf,
        decay.weighted_l1.unwrap_or(inf),
        inf,
        decay.weighted_l1.is_some_and(f64::is_finite),
    ));
    for w in decay.averages.windows(2) {
        rows.push(CheckRow::with_pass(
            tag("flux_average_decreasing"),
            w[1].0,
            w[1].1,
            w[0].1,
            w[1].1 < w[0].1,
        ));
    }
    Ok(rows)
}

fn verify(cfg: &RunConfig) -> Result<Outcome, Error> {
    let params = SobolevParams::new(cfg.m, cfg.p)?;
    let q = quadrature(cfg)?;
    let (_, model) = build(cfg)?;
    let family = TalentiFamily::new(params, &q)?;
    let flat = model.is_euclidean();
    let ric_nonneg = ricci_nonnegative(&model, &chain_grid(cfg.t_max))?;
    let per_lambda: Vec<Result<Vec<CheckRow>, Error>> = cfg
        .lambda_list
        .par_iter()
        .map(|&lambda| verify_lambda(lambda, &family, &model, flat, ric_nonneg, &q))
        .collect();
    let mut rows = Vec::new();
    for r in per_lambda {
        rows.extend(r?);
    }
    Ok(emit_checks(cfg, params, model.b(), &rows))
}

fn rigidity(cfg: &RunConfig) -> Result<Outcome, Error> {
    let params = SobolevParams::new(cfg.m, cfg.p)?;
    let q = quadrature(cfg)?;
    let (_, model) = build(cfg)?;
    let family = TalentiFamily::new(params, &q)?;
    let grid: Vec<f64> = (1..=100).map(|i| cfg.t_max * i as f64 / 100.0).collect();
    let mut diagnostics = Vec::new();
    let (c_m, c_m_source) = match cfg.c_m_source {
        CmChoice::Value(v) => (v, CmSource::Value),
        CmChoice::Estimate => {
            let est = estimate_radial_constant(&model, &family, &q, &EstimatorOptions::default())?;
            diagnostics.push(format!(
                "C_est = {} (C_est <= C_M, witnessed at lambda = {}, {} evaluations)",
                fmt_num(est.c_est),
                fmt_num(est.best_lambda),
                est.evaluations
            ));
            (est.c_est, CmSource::Estimate)
        }
    };
    let mode = if ricci_nonnegative(&model, &grid)? {
        Mode::Theorem1
    } else {
        Mode::Theorem2
    };
    let inputs = TheoremInputs {
        mode,
        c_m,
        c_m_source,
        gamma: match cfg.gamma_source {
            GammaChoice::Value(g) => Some(g),
            GammaChoice::Empirical => None,
        },
    };
    let report = verify_theorem(&model, &family, &inputs, &grid, &q)?;
    let body = match cfg.output {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&["t", "ratio", "lower", "upper", "pass", "v"]);
            for (row, v) in report.ratio_table.iter().zip(&report.v_profile) {
                csv.row(&[
                    fmt_num(row.t),
                    fmt_num(row.ratio),
                    fmt_num(row.lower),
                    fmt_num(row.upper),
                    row.pass.to_string(),
                    fmt_num(v.v),
                ]);
            }
            csv.finish()
        }
    };
    let code = match &report.verdict {
        Verdict::Consistent => {
            diagnostics.push(format!(
                "verdict: consistent (C_hat = {})",
                fmt_num(report.c_hat)
            ));
            EXIT_OK
        }
        Verdict::Violated(v) => {
            diagnostics.push(format!(
                "verdict: violated {} at t = {} ({} vs {})",
                v.check,
                fmt_num(v.t),
                fmt_num(v.lhs),
                fmt_num(v.rhs)
            ));
            EXIT_CHECK_FAILED
        }
    };
    Ok(Outcome {
        code,
        report: body,
        diagnostics,
    })
}

fn limits(cfg: &RunConfig) -> Result<Outcome, Error> {
    let params = SobolevParams::new(cfg.m, cfg.p)?;
    let q = quadrature(cfg)?;
    let family = TalentiFamily::new(params, &q)?;
    let rows = cfg
        .lambda_list
        .par_iter()
        .map(|&lambda| escape_row(&family, lambda, cfg.t_split, &q))
        .collect::<Result<Vec<_>, Error>>()?;
    let report = assemble_escape(
        &family,
        cfg.t_split,
        &cfg.lambda_list,
        ESCAPE_EPSILON,
        rows,
        &q,
    )?;
    let body = match cfg.output {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&["lambda", "head", "tail", "sum"]);
            for r in &report.rows {
                csv.row(&[
                    fmt_num(r.lambda),
                    fmt_num(r.head),
                    fmt_num(r.tail),
                    fmt_num(r.sum),
                ]);
            }
            csv.finish()
        }
    };
    let mut diagnostics = vec![match report.lambda_0 {
        Some(l0) => format!(
            "lambda_0 = {} (head <= {})",
            fmt_num(l0),
            fmt_num(ESCAPE_EPSILON)
        ),
        None => format!(
            "no lambda in the grid brings the head below {}",
            fmt_num(ESCAPE_EPSILON)
        ),
    }];
    if !report.sums_ok {
        diagnostics.push("head + tail deviates from 1".into());
    }
    if !report.head_nonincreasing {
        diagnostics.push("head increases along the lambda grid".into());
    }
    Ok(Outcome {
        code: if report.holds() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        },
        report: body,
        diagnostics,
    })
}
