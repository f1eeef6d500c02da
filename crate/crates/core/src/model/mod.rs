//! Rotationally symmetric model manifolds, their curvature profiles and the
//! volume-comparison chains between them.

mod chain;
mod manifold;
mod profile;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chain::{
    verify_volume_chain, verify_volume_chain_against, ChainCheck, ChainReport, CHAIN_SLACK,
};
pub use manifold::{build_model, ModelManifold, Warping, DEFAULT_TAIL_REL_TOL};
pub use profile::{curvature_moment, CurvatureProfile, ProfileKind, MIN_TAIL_POWER};

/// A parsed model specification: a curvature profile, or the closed-form
/// cone `cone:<c>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    Profile(CurvatureProfile),
    Conical(f64),
}

impl ModelSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        match spec.trim().strip_prefix("cone:") {
            Some(c) => c
                .trim()
                .parse::<f64>()
                .map(ModelSpec::Conical)
                .map_err(|_| Error::Profile(format!("cannot parse cone parameter in '{spec}'"))),
            None => CurvatureProfile::parse(spec).map(ModelSpec::Profile),
        }
    }

    pub fn build(&self, m: u32, t_max: f64, step: f64) -> Result<ModelManifold> {
        match self {
            ModelSpec::Profile(profile) => build_model(m, profile.clone(), t_max, step),
            ModelSpec::Conical(c) => ModelManifold::conical(m, *c, t_max, step),
        }
    }
}
