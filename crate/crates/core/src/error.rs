use thiserror::Error;

/// Errors raised by the numerical kernels and the geometric layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid exponents (m = {m}, p = {p}): requires m > p > 1{extra}")]
    InvalidExponents { m: u32, p: f64, extra: &'static str },

    #[error("quadrature did not converge: estimate {value:e}, error {error:e} exceeds tolerance {tolerance:e}")]
    NonConvergence {
        value: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("non-finite integrand value at t = {t:e}")]
    NonFinite { t: f64 },

    #[error("ODE solution became non-finite at t = {t:e}")]
    OdeBlowUp { t: f64 },

    #[error("warping function is not positive at t = {t:e} (h = {h:e}); the window exceeds the model's validity")]
    Positivity { t: f64, h: f64 },

    #[error("t = {t:e} lies outside the working window [0, {t_max:e}]")]
    OutOfWindow { t: f64, t_max: f64 },

    #[error("tail beyond the window is not controlled: uncertainty {uncertainty:e} exceeds {tolerance:e}")]
    TailBound { uncertainty: f64, tolerance: f64 },

    #[error("scaling invariance violated: {what} spread {spread:e} exceeds {tolerance:e}")]
    Invariance {
        what: &'static str,
        spread: f64,
        tolerance: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(
        "Sobolev inequality unsupported: volume ratio {ratio:e} at t = {t:e} falls below {floor:e}"
    )]
    SobolevUnsupported { t: f64, ratio: f64, floor: f64 },

    #[error("optimizer did not converge within {iterations} iterations (best value {best:e})")]
    OptimizerNonConvergence { iterations: usize, best: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("curvature profile: {0}")]
    Profile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
