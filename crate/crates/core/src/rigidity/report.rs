use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelManifold;
use crate::numerics::QuadratureConfig;
use crate::talenti::{SobolevParams, TalentiFamily};

use super::constants::{c1, c2, c3, c_hat, gamma_lower_bound};
use super::{from_points, VPoint};

/// Relative slack on both sides of the volume-ratio sandwich.
pub const RATIO_SLACK: f64 = 1e-8;

/// `v` at the end of the window may dip this far below zero.
pub const LIMIT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Non-negative Ricci curvature: `V_flat >= V >= (K/C_M)^m V_flat`.
    Theorem1,
    /// Finite curvature moment: `e^(mb) V_flat >= V >= C_hat V_flat`.
    Theorem2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmSource {
    Value,
    /// Radial estimate, a quotient witness with `C_est <= C_M`.
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSource {
    Value,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremInputs {
    pub mode: Mode,
    pub c_m: f64,
    pub c_m_source: CmSource,
    /// User value of `gamma`; `None` takes the window infimum of the volume ratio.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub t: f64,
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Name of the violated inequality `lhs <= rhs`.
    pub check: String,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violated(Violation),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub mode: Mode,
    pub params: SobolevParams,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "C_M")]
    pub c_m: f64,
    #[serde(rename = "C_M_source")]
    pub c_m_source: CmSource,
    pub b: f64,
    pub gamma: f64,
    pub gamma_source: GammaSource,
    /// `C1` at `lambda = 1`, cross-checked against `C2`.
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    #[serde(rename = "C_hat")]
    pub c_hat: f64,
    pub ratio_table: Vec<RatioRow>,
    pub v_profile: Vec<VPoint>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl RigidityReport {
    pub fn is_consistent(&self) -> bool {
        self.verdict == Verdict::Consistent
    }
}

fn check_hypotheses(model: &ModelManifold, mode: Mode, t_grid: &[f64]) -> Result<()> {
    let b = model.b();
    match mode {
        Mode::Theorem1 => {
            if b != 0.0 {
                return Err(Error::Hypothesis(format!(
                    "theorem1 mode needs Ric >= 0, but the curvature profile has b = {b}"
                )));
            }
            for &t in t_grid {
                let ric = model.radial_ricci(t)?;
                if ric < -1e-12 {
                    return Err(Error::Hypothesis(format!(
                        "theorem1 mode needs Ric >= 0, radial Ricci is {ric:e} at t = {t}"
                    )));
                }
            }
        }
        Mode::Theorem2 => {
            if !b.is_finite() {
                return Err(Error::Hypothesis(
                    "theorem2 mode needs a finite curvature moment b".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Evaluates the volume sandwich and the monotone profile of either theorem
/// on `model` along `t_grid` (all `t > 0`, inside the window).
pub fn verify_theorem(
    model: &ModelManifold,
    family: &TalentiFamily,
    inputs: &TheoremInputs,
    t_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<RigidityReport> {
    check_hypotheses(model, inputs.mode, t_grid)?;
    let params = family.params;
    let m = params.dim();
    let k = family.k;
    let b = model.b();
    let (gamma, gamma_source) = match inputs.gamma {
        Some(g) => (g, GammaSource::Value),
        None => (gamma_lower_bound(model, t_grid)?, GammaSource::Empirical),
    };
    let c1v = c1(&params, family.beta, 1.0, b, model, cfg)?;
    let c2v = c2(&params, family.beta, b, gamma)?;
    let c3v = c3(&params, inputs.c_m, k, c2v)?;
    let c_hat_v = c_hat(&params, c3v, b);
    let upper = (m * b).exp();

    let mut ratio_table = Vec::with_capacity(t_grid.len());
    let mut points = Vec::with_capacity(t_grid.len());
    // In theorem2 mode the model is its own comparison, so the profile is constant.
    let v_scale = match inputs.mode {
        Mode::Theorem1 => c3v,
        Mode::Theorem2 => c3v * (b * (m - 1.0)).exp(),
    };
    for &t in t_grid {
        let ratio = model.volume_ratio(t)?;
        let pass = c_hat_v * (1.0 - RATIO_SLACK) <= ratio && ratio <= upper * (1.0 + RATIO_SLACK);
        ratio_table.push(RatioRow {
            t,
            ratio,
            lower: c_hat_v,
            upper,
            pass,
        });
        let v = match inputs.mode {
            Mode::Theorem1 => v_scale * ratio - 1.0,
            Mode::Theorem2 => v_scale * model.volume(t)? / model.volume(t)? - 1.0,
        };
        points.push(VPoint { t, v });
    }
    let profile = from_points(points);

    let verdict = judge(&ratio_table, &profile, c1v, c2v);
    let mut notes = vec![
        "diffeomorphism threshold for C_M near K(m,p): not computable here".to_string(),
        format!(
            "limit of v approximated by its value at t = {}",
            t_grid.last().copied().unwrap_or(0.0)
        ),
    ];
    if inputs.c_m_source == CmSource::Estimate {
        notes.push(
            "C_M is C_est <= C_M: the lower volume bound is aggressive, the upper chain unaffected"
                .to_string(),
        );
    }
    if gamma_source == GammaSource::Empirical {
        notes.push("gamma is the window infimum of V(t)/V_flat(t)".to_string());
    }
    Ok(RigidityReport {
        mode: inputs.mode,
        params,
        k,
        c_m: inputs.c_m,
        c_m_source: inputs.c_m_source,
        b,
        gamma,
        gamma_source,
        c1: c1v,
        c2: c2v,
        c3: c3v,
        c_hat: c_hat_v,
        ratio_table,
        v_profile: profile.points,
        verdict,
        notes,
    })
}

fn judge(rows: &[RatioRow], profile: &super::VProfile, c1v: f64, c2v: f64) -> Verdict {
    for row in rows {
        if row.ratio < row.lower * (1.0 - RATIO_SLACK) {
            return Verdict::Violated(Violation {
                check: "C_hat V_flat(t) <= V(t)".into(),
                t: row.t,
                lhs: row.lower,
                rhs: row.ratio,
            });
        }
        if row.ratio > row.upper * (1.0 + RATIO_SLACK) {
            return Verdict::Violated(Violation {
                check: "V(t) <= e^(mb) V_flat(t)".into(),
                t: row.t,
                lhs: row.ratio,
                rhs: row.upper,
            });
        }
    }
    if let Some(w) = profile
        .points
        .windows(2)
        .find(|w| w[1].v > w[0].v + super::MONOTONE_SLACK)
    {
        return Verdict::Violated(Violation {
            check: "v(t) <= v(s) for s < t".into(),
            t: w[1].t,
            lhs: w[1].v,
            rhs: w[0].v,
        });
    }
    if let Some(last) = profile.points.last() {
        if last.v < -LIMIT_TOL {
            return Verdict::Violated(Violation {
                check: "lim v >= 0 (at the window end)".into(),
                t: last.t,
                lhs: -LIMIT_TOL,
                rhs: last.v,
            });
        }
    }
    if c1v > c2v * (1.0 + 1e-6) {
        return Verdict::Violated(Violation {
            check: "C1 <= C2".into(),
            t: f64::NAN,
            lhs: c1v,
            rhs: c2v,
        });
    }
    Verdict::Consistent
}
