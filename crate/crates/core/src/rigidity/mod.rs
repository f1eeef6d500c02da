//! Rigidity constants, the monotone volume profile, the mass-escape
//! experiment and the volume-comparison verdicts built from them.

mod constants;
mod escape;
mod report;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::ModelManifold;

pub use constants::{
    c1, c2, c3, c_hat, euclidean_integrals, gamma_lower_bound, model_integrals, C_M_SLACK,
};
pub use escape::{
    assemble as assemble_escape, escape_row, mass_escape_experiment, EscapeReport, EscapeRow,
    MIN_LAMBDA, SUM_TOL,
};
pub use report::{
    verify_theorem, CmSource, GammaSource, Mode, RatioRow, RigidityReport, TheoremInputs, Verdict,
    Violation, LIMIT_TOL, RATIO_SLACK,
};

/// Per-step allowance when checking that `v` does not increase.
pub const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VPoint {
    pub t: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VProfile {
    pub points: Vec<VPoint>,
    /// First radius at which `v` rose by more than [`MONOTONE_SLACK`].
    pub first_increase: Option<f64>,
}

impl VProfile {
    pub fn nonincreasing(&self) -> bool {
        self.first_increase.is_none()
    }

    pub fn last(&self) -> Option<f64> {
        self.points.last().map(|p| p.v)
    }
}

/// `v(t) = scale V_model(t) / V_comparison(t) - 1` along `t_grid`.
pub fn v_profile(
    model: &ModelManifold,
    comparison: &ModelManifold,
    scale: f64,
    t_grid: &[f64],
) -> Result<VProfile> {
    let points = t_grid
        .iter()
        .map(|&t| {
            Ok(VPoint {
                t,
                v: scale * model.volume(t)? / comparison.volume(t)? - 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(from_points(points))
}

pub(crate) fn from_points(points: Vec<VPoint>) -> VProfile {
    let first_increase = points
        .windows(2)
        .find(|w| w[1].v > w[0].v + MONOTONE_SLACK)
        .map(|w| w[1].t);
    VProfile {
        points,
        first_increase,
    }
}
