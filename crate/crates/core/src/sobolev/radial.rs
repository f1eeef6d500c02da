use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::talenti::TalentiProfile;

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Multiplicative bump `1 + a exp(-(ln t - mu)^2 / sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub a: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl Bump {
    fn gauss(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let z = (t.ln() - self.mu) / self.sigma;
        (-z * z).exp()
    }

    pub fn value(&self, t: f64) -> f64 {
        1.0 + self.a * self.gauss(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let z = (t.ln() - self.mu) / self.sigma;
        -2.0 * self.a * self.gauss(t) * z / (self.sigma * t)
    }
}

/// Family a radial function belongs to.
#[derive(Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialKind {
    Talenti {
        profile: TalentiProfile,
    },
    PerturbedTalenti {
        profile: TalentiProfile,
        bump: Bump,
    },
    Custom {
        name: String,
        #[serde(skip)]
        eval: Scalar,
        #[serde(skip)]
        deriv: Scalar,
    },
}

impl fmt::Debug for RadialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialKind::Talenti { profile } => {
                f.debug_struct("Talenti").field("profile", profile).finish()
            }
            RadialKind::PerturbedTalenti { profile, bump } => f
                .debug_struct("PerturbedTalenti")
                .field("profile", profile)
                .field("bump", bump)
                .finish(),
            RadialKind::Custom { name, .. } => {
                f.debug_struct("Custom").field("name", name).finish()
            }
        }
    }
}

/// Positive radial test function `u(r(x))` with its derivative.
#[derive(Debug, Clone, Serialize)]
pub struct RadialFunction {
    kind: RadialKind,
    /// Constant multiple applied to the base function.
    factor: f64,
    /// Exponent `d` with `u(t) ~ t^-d` at infinity.
    decay_order: f64,
    /// Radius around which `u` changes character; used to cut quadrature.
    scale: f64,
    /// Power of `|u'|` at the origin (`u' ~ t^k`).
    slope_power: f64,
}

/// Relative agreement required between `deriv` and a central difference.
pub const DERIVATIVE_CHECK_TOL: f64 = 1e-6;

impl RadialFunction {
    pub fn talenti(profile: TalentiProfile) -> Self {
        let params = profile.params;
        Self {
            kind: RadialKind::Talenti { profile },
            factor: 1.0,
            decay_order: params.profile_decay(),
            scale: profile.lambda.powf(1.0 / params.conjugate()),
            slope_power: params.conjugate() - 1.0,
        }
    }

    pub fn perturbed(profile: TalentiProfile, bump: Bump) -> Result<Self> {
        if !(bump.a > -1.0) || !(bump.sigma > 0.0) || !bump.mu.is_finite() {
            return Err(Error::Domain(format!(
                "bump needs a > -1 and sigma > 0 to keep u positive, got {bump:?}"
            )));
        }
        let mut u = Self::talenti(profile);
        u.kind = RadialKind::PerturbedTalenti { profile, bump };
        Ok(u)
    }

    /// Arbitrary positive `u`. `slope_power` is the power of `|u'|` at the
    /// origin (0 when `u'(0) != 0`).
    pub fn custom<E, D>(
        name: &str,
        eval: E,
        deriv: D,
        decay_order: f64,
        scale: f64,
        slope_power: f64,
    ) -> Result<Self>
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(decay_order > 0.0) || !(scale > 0.0) || !(slope_power >= 0.0) {
            return Err(Error::Domain(format!(
                "custom radial function '{name}' needs decay_order > 0, scale > 0, slope_power >= 0"
            )));
        }
        Ok(Self {
            kind: RadialKind::Custom {
                name: name.to_string(),
                eval: Arc::new(eval),
                deriv: Arc::new(deriv),
            },
            factor: 1.0,
            decay_order,
            scale,
            slope_power,
        })
    }

    /// `c u` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!(
                "scaling factor must be positive, got {c}"
            )));
        }
        let mut u = self.clone();
        u.factor *= c;
        Ok(u)
    }

    pub fn kind(&self) -> &RadialKind {
        &self.kind
    }

    pub fn decay_order(&self) -> f64 {
        self.decay_order
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn slope_power(&self) -> f64 {
        self.slope_power
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.factor
            * match &self.kind {
                RadialKind::Talenti { profile } => profile.phi(t),
                RadialKind::PerturbedTalenti { profile, bump } => profile.phi(t) * bump.value(t),
                RadialKind::Custom { eval, .. } => eval(t),
            }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.factor
            * match &self.kind {
                RadialKind::Talenti { profile } => profile.phi_prime(t),
                RadialKind::PerturbedTalenti { profile, bump } => {
                    profile.phi_prime(t) * bump.value(t) + profile.phi(t) * bump.derivative(t)
                }
                RadialKind::Custom { deriv, .. } => deriv(t),
            }
    }

    /// Checks positivity and compares `deriv` with a central difference at each
    /// point of `grid` (all `t > 0`).
    pub fn validate(&self, grid: &[f64]) -> Result<()> {
        for &t in grid {
            let u = self.eval(t);
            if !(u > 0.0) || !u.is_finite() {
                return Err(Error::Degenerate(format!(
                    "u({t:e}) = {u:e} is not positive"
                )));
            }
            let h = 1e-5 * t;
            let fd = (self.eval(t + h) - self.eval(t - h)) / (2.0 * h);
            let d = self.deriv(t);
            let tol = DERIVATIVE_CHECK_TOL * d.abs() + 1e-10 * u / t;
            if !((fd - d).abs() <= tol) {
                return Err(Error::Degenerate(format!(
                    "derivative mismatch at t = {t:e}: analytic {d:e}, finite difference {fd:e}"
                )));
            }
        }
        Ok(())
    }
}
