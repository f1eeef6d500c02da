//! Euclidean extremal theory: the Bliss-Aubin-Talenti bubbles
//!
//! ```text
//! phi_lambda(t) = beta * lambda^((m-p)/p^2) / (lambda + t^(p/(p-1)))^(m/p - 1)
//! ```
//!
//! their normalization `beta(m, p)`, the sharp constant `K(m, p)`, the radial
//! Yamabe residual and the concentration density used in the `lambda -> inf`
//! argument. All derivatives are closed-form; nothing here differentiates
//! numerically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_semi_infinite_with, unit_ball_volume, unit_sphere_area, EndpointHints,
    QuadratureConfig,
};

/// Scales at which the normalization is cross-checked.
pub const BETA_CHECK_LAMBDAS: [f64; 2] = [1.0, 10.0];
/// Relative agreement required between the `BETA_CHECK_LAMBDAS` evaluations.
pub const BETA_INVARIANCE_TOL: f64 = 1e-8;
/// Scales at which `K` is cross-checked against the `lambda = 1` value.
pub const K_CHECK_LAMBDAS: [f64; 3] = [0.5, 5.0, 20.0];
pub const K_INVARIANCE_TOL: f64 = 1e-6;

/// Exponent data `(m, p, p*)`, with `p* = m p / (m - p)` always recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SobolevParams {
    m: u32,
    p: f64,
    p_star: f64,
}

#[derive(Deserialize)]
struct RawParams {
    m: u32,
    p: f64,
}

impl TryFrom<RawParams> for SobolevParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        SobolevParams::new(raw.m, raw.p)
    }
}

impl SobolevParams {
    pub fn new(m: u32, p: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidExponents {
                m,
                p,
                extra: " and m >= 2",
            });
        }
        if !(p > 1.0) || !(p < m as f64) {
            return Err(Error::InvalidExponents { m, p, extra: "" });
        }
        Ok(Self {
            m,
            p,
            p_star: m as f64 * p / (m as f64 - p),
        })
    }

    /// Curved-model workflows need `m >= 3`.
    pub fn require_curved(&self) -> Result<()> {
        if self.m < 3 {
            return Err(Error::InvalidExponents {
                m: self.m,
                p: self.p,
                extra: " and m >= 3 for curved models",
            });
        }
        Ok(())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> f64 {
        self.m as f64
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    /// Hölder conjugate `p / (p - 1)`, the power of `t` inside the bubble.
    pub fn conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `m/p - 1`, the outer exponent of the bubble.
    fn outer(&self) -> f64 {
        self.dim() / self.p - 1.0
    }

    /// Exponent `d` with `phi(t) ~ t^-d` at infinity: `(m - p) / (p - 1)`.
    pub fn profile_decay(&self) -> f64 {
        (self.dim() - self.p) / (self.p - 1.0)
    }
}

/// Natural split point for bubble integrals: the scale `lambda^((p-1)/p)`.
pub fn bubble_split(params: &SobolevParams, lambda: f64) -> f64 {
    lambda.powf(1.0 / params.conjugate()).max(1.0)
}

/// `ln(lambda + t^q)` without overflow for large `t`.
fn ln_base(ln_lambda: f64, q: f64, t: f64) -> f64 {
    let lq = q * t.ln();
    let hi = lq.max(ln_lambda);
    let lo = lq.min(ln_lambda);
    hi + (lo - hi).exp().ln_1p()
}

/// One member `phi_lambda` of the extremal family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TalentiProfile {
    pub params: SobolevParams,
    pub lambda: f64,
    pub beta: f64,
    pub omega_m: f64,
    pub omega_sphere: f64,
}

impl TalentiProfile {
    /// Normalized profile at scale `lambda`; `beta` comes from [`normalize_beta`].
    pub fn new(params: SobolevParams, lambda: f64, cfg: &QuadratureConfig) -> Result<Self> {
        let beta = normalize_beta(&params, cfg)?;
        Self::with_beta(params, lambda, beta)
    }

    pub fn with_beta(params: SobolevParams, lambda: f64, beta: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "lambda must be positive, got {lambda:e}"
            )));
        }
        if !(beta > 0.0) {
            return Err(Error::Domain(format!(
                "beta must be positive, got {beta:e}"
            )));
        }
        Ok(Self {
            params,
            lambda,
            beta,
            omega_m: unit_ball_volume(params.m),
            omega_sphere: unit_sphere_area(params.m),
        })
    }

    fn ln_prefactor(&self) -> f64 {
        let a = self.params.outer();
        self.beta.ln() + a / self.params.p * self.lambda.ln()
    }

    fn ln_base(&self, t: f64) -> f64 {
        ln_base(self.lambda.ln(), self.params.conjugate(), t)
    }

    pub fn phi(&self, t: f64) -> f64 {
        if t < 0.0 {
            return f64::NAN;
        }
        (self.ln_prefactor() - self.params.outer() * self.ln_base(t)).exp()
    }

    pub fn phi_prime(&self, t: f64) -> f64 {
        if t < 0.0 {
            return f64::NAN;
        }
        if t == 0.0 {
            return 0.0;
        }
        let a = self.params.outer();
        let q = self.params.conjugate();
        -a * q * (self.ln_prefactor() + (q - 1.0) * t.ln() - (a + 1.0) * self.ln_base(t)).exp()
    }

    /// Second derivative; NaN at `t <= 0`, where it may be singular (`p > 2`).
    pub fn phi_second(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return f64::NAN;
        }
        let a = self.params.outer();
        let q = self.params.conjugate();
        let lb = self.ln_base(t);
        let weight = (q * t.ln() - lb).exp(); // t^q / (lambda + t^q)
        let scale = (self.ln_prefactor() + (q - 2.0) * t.ln() - (a + 1.0) * lb).exp();
        a * q * scale * ((a + 1.0) * q * weight - (q - 1.0))
    }

    /// Relative residual of the radial Yamabe equation
    /// `|phi'|^(p-2) ((p-1) phi'' + (m-1)/t phi') = -K^-p phi^(p*-1)`,
    /// i.e. the left-minus-right difference divided by `K^-p phi^(p*-1)`.
    pub fn yamabe_residual(&self, k: f64, t: f64) -> f64 {
        if !(t > 0.0) {
            return f64::NAN;
        }
        let p = self.params.p;
        let m = self.params.dim();
        let d1 = self.phi_prime(t);
        let d2 = self.phi_second(t);
        let lhs = d1.abs().powf(p - 2.0) * ((p - 1.0) * d2 + (m - 1.0) / t * d1);
        let source = k.powf(-p) * self.phi(t).powf(self.params.p_star - 1.0);
        (lhs + source) / source
    }

    /// Concentration density `V(B_t) d/dt(-phi^p*)`
    /// `= omega_m (m p/(p-1)) beta^p* lambda^(m/p) t^(1/(p-1)+m) / (lambda + t^(p/(p-1)))^(m+1)`.
    pub fn density(&self, t: f64) -> f64 {
        if t < 0.0 {
            return f64::NAN;
        }
        if t == 0.0 {
            return 0.0;
        }
        let m = self.params.dim();
        let p = self.params.p;
        let q = self.params.conjugate();
        let ln =
            self.params.p_star * self.beta.ln() + m / p * self.lambda.ln() + (q - 1.0 + m) * t.ln()
                - (m + 1.0) * self.ln_base(t);
        self.omega_m * m * q * ln.exp()
    }

    /// Endpoint asymptotics of [`Self::density`].
    pub fn density_hints(&self) -> EndpointHints {
        let m = self.params.dim();
        let q = self.params.conjugate();
        EndpointHints::new(q - 1.0 + m, 1.0 + m * (q - 1.0))
    }

    /// `int_{R^m} phi^p*`, which is 1 for a normalized profile.
    pub fn euclidean_mass(&self, cfg: &QuadratureConfig) -> Result<f64> {
        let m = self.params.dim();
        let ps = self.params.p_star;
        let f = |t: f64| self.omega_sphere * t.powf(m - 1.0) * self.phi(t).powf(ps);
        integrate_semi_infinite_with(
            f,
            mass_hints(&self.params),
            &split_cfg(cfg, &self.params, self.lambda),
        )
    }

    /// `int_{R^m} |phi'|^p`, which is `K^-p`.
    pub fn euclidean_energy(&self, cfg: &QuadratureConfig) -> Result<f64> {
        let m = self.params.dim();
        let p = self.params.p;
        let f = |t: f64| self.omega_sphere * t.powf(m - 1.0) * self.phi_prime(t).abs().powf(p);
        integrate_semi_infinite_with(
            f,
            energy_hints(&self.params),
            &split_cfg(cfg, &self.params, self.lambda),
        )
    }
}

fn split_cfg(cfg: &QuadratureConfig, params: &SobolevParams, lambda: f64) -> QuadratureConfig {
    cfg.with_tail_split(bubble_split(params, lambda))
}

/// Asymptotics of `t^(m-1) phi^p*`.
pub(crate) fn mass_hints(params: &SobolevParams) -> EndpointHints {
    let m = params.dim();
    EndpointHints::new(m - 1.0, params.p_star * params.profile_decay() - (m - 1.0))
}

/// Asymptotics of `t^(m-1) |phi'|^p`.
pub(crate) fn energy_hints(params: &SobolevParams) -> EndpointHints {
    let m = params.dim();
    let q = params.conjugate();
    EndpointHints::new(m - 1.0 + q, (m - 1.0) * (q - 1.0))
}

/// `beta` making `int phi_lambda^p* = 1`, evaluated at a single scale.
pub fn beta_at(params: &SobolevParams, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let unit = TalentiProfile::with_beta(*params, lambda, 1.0)?;
    let mass = unit.euclidean_mass(cfg)?;
    Ok(mass.powf(-1.0 / params.p_star))
}

/// Normalization `beta(m, p)` computed at `lambda = 1` and cross-checked at
/// `lambda = 10`.
pub fn normalize_beta(params: &SobolevParams, cfg: &QuadratureConfig) -> Result<f64> {
    let beta = beta_at(params, BETA_CHECK_LAMBDAS[0], cfg)?;
    let check = beta_at(params, BETA_CHECK_LAMBDAS[1], cfg)?;
    let spread = ((check - beta) / beta).abs();
    if spread > BETA_INVARIANCE_TOL {
        return Err(Error::Invariance {
            what: "beta",
            spread,
            tolerance: BETA_INVARIANCE_TOL,
        });
    }
    Ok(beta)
}

/// `K(m, p) = (int |phi'_lambda|^p)^(-1/p)` at a single scale.
pub fn sharp_constant_at(
    params: &SobolevParams,
    beta: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let profile = TalentiProfile::with_beta(*params, lambda, beta)?;
    Ok(profile.euclidean_energy(cfg)?.powf(-1.0 / params.p))
}

/// Sharp Euclidean Sobolev constant, at `lambda = 1`, after checking that the
/// scales in [`K_CHECK_LAMBDAS`] agree to [`K_INVARIANCE_TOL`].
pub fn sharp_constant(params: &SobolevParams, cfg: &QuadratureConfig) -> Result<f64> {
    let beta = normalize_beta(params, cfg)?;
    let k = sharp_constant_at(params, beta, 1.0, cfg)?;
    for &lambda in &K_CHECK_LAMBDAS {
        let other = sharp_constant_at(params, beta, lambda, cfg)?;
        let spread = ((other - k) / k).abs();
        if spread > K_INVARIANCE_TOL {
            return Err(Error::Invariance {
                what: "K",
                spread,
                tolerance: K_INVARIANCE_TOL,
            });
        }
    }
    Ok(k)
}

/// `beta` and `K` for one exponent pair, computed once and shared by every
/// profile of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TalentiFamily {
    pub params: SobolevParams,
    pub beta: f64,
    pub k: f64,
}

impl TalentiFamily {
    pub fn new(params: SobolevParams, cfg: &QuadratureConfig) -> Result<Self> {
        let beta = normalize_beta(&params, cfg)?;
        let k = sharp_constant_at(&params, beta, 1.0, cfg)?;
        for &lambda in &K_CHECK_LAMBDAS {
            let other = sharp_constant_at(&params, beta, lambda, cfg)?;
            let spread = ((other - k) / k).abs();
            if spread > K_INVARIANCE_TOL {
                return Err(Error::Invariance {
                    what: "K",
                    spread,
                    tolerance: K_INVARIANCE_TOL,
                });
            }
        }
        Ok(Self { params, beta, k })
    }

    pub fn profile(&self, lambda: f64) -> Result<TalentiProfile> {
        TalentiProfile::with_beta(self.params, lambda, self.beta)
    }

    /// `K^-p`, the Euclidean energy of a normalized bubble.
    pub fn k_pow(&self) -> f64 {
        self.k.powf(-self.params.p)
    }
}

/// Maximum relative deviation of `beta` and `K` across `lambdas` from their
/// values at the first scale.
pub fn lambda_spread(
    params: &SobolevParams,
    lambdas: &[f64],
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let Some(&first) = lambdas.first() else {
        return Ok((0.0, 0.0));
    };
    let beta0 = beta_at(params, first, cfg)?;
    let k0 = sharp_constant_at(params, beta0, first, cfg)?;
    let mut spread = (0.0f64, 0.0f64);
    for &lambda in &lambdas[1..] {
        let beta = beta_at(params, lambda, cfg)?;
        let k = sharp_constant_at(params, beta0, lambda, cfg)?;
        spread.0 = spread.0.max(((beta - beta0) / beta0).abs());
        spread.1 = spread.1.max(((k - k0) / k0).abs());
    }
    Ok(spread)
}
