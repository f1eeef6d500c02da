//! Radial Sobolev functionals on model manifolds and a deterministic search
//! for the best radial constant.

mod estimate;
mod radial;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelManifold;
use crate::numerics::{EndpointHints, QuadratureConfig};

pub use estimate::{estimate_radial_constant, EstimatorOptions, RadialEstimate, VOLUME_FLOOR};
pub use radial::{Bump, RadialFunction, RadialKind, DERIVATIVE_CHECK_TOL};

fn tail_exponent(what: &str, decay: f64) -> Result<f64> {
    if decay > 1.0 {
        Ok(decay)
    } else {
        Err(Error::Degenerate(format!(
            "{what} integrand decays like t^-{decay}, so its tail diverges"
        )))
    }
}

/// `int_M |grad u|^p = int_0^inf |u'|^p A dt`.
pub fn gradient_energy(
    u: &RadialFunction,
    p: f64,
    model: &ModelManifold,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let m = model.m() as f64;
    let decay = tail_exponent("energy", p * (u.decay_order() + 1.0) - (m - 1.0))?;
    let hints = EndpointHints::new(p * u.slope_power() + m - 1.0, decay);
    model.integrate_against_area(|t| u.deriv(t).abs().powf(p), hints, u.scale(), cfg)
}

/// `int_M u^p* = int_0^inf u^p* A dt`.
pub fn mass_pstar(
    u: &RadialFunction,
    p_star: f64,
    model: &ModelManifold,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let m = model.m() as f64;
    let decay = tail_exponent("mass", p_star * u.decay_order() - (m - 1.0))?;
    let hints = EndpointHints::new(m - 1.0, decay);
    model.integrate_against_area(|t| u.eval(t).powf(p_star), hints, u.scale(), cfg)
}

/// Energy and mass of one competitor, with both quotients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quotients {
    pub energy: f64,
    pub mass: f64,
    /// `energy / mass`.
    pub plain: f64,
    /// `energy / mass^(p/p*)`.
    pub sobolev: f64,
}

pub fn quotients(
    u: &RadialFunction,
    p: f64,
    p_star: f64,
    model: &ModelManifold,
    cfg: &QuadratureConfig,
) -> Result<Quotients> {
    let energy = gradient_energy(u, p, model, cfg)?;
    let mass = mass_pstar(u, p_star, model, cfg)?;
    if !(mass > 0.0) {
        return Err(Error::Degenerate(format!("mass {mass:e} is not positive")));
    }
    Ok(Quotients {
        energy,
        mass,
        plain: energy / mass,
        sobolev: energy / mass.powf(p / p_star),
    })
}

/// `int |grad u|^p / int u^p*`.
pub fn quotient_plain(
    u: &RadialFunction,
    p: f64,
    p_star: f64,
    model: &ModelManifold,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    quotients(u, p, p_star, model, cfg).map(|q| q.plain)
}

/// `int |grad u|^p / (int u^p*)^(p/p*)`.
pub fn quotient_sobolev(
    u: &RadialFunction,
    p: f64,
    p_star: f64,
    model: &ModelManifold,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    quotients(u, p, p_star, model, cfg).map(|q| q.sobolev)
}

/// Integrability and growth findings for `t^-1 u |u'|^(p-1)` and `u |u'|^(p-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `int_0^inf t^-1 u |u'|^(p-1) A dt`, or `None` when it could not be bounded.
    pub weighted_l1: Option<f64>,
    /// `(R, R^-1 int_0^R u |u'|^(p-1) A dt)` for each radius.
    pub averages: Vec<(f64, f64)>,
    /// `true` when the averages strictly decrease along the radii.
    pub decreasing: bool,
}

impl DecayReport {
    pub fn holds(&self) -> bool {
        self.weighted_l1.is_some_and(f64::is_finite) && self.decreasing
    }
}

/// Evaluates the decay conditions that justify integrating by parts against
/// `u`. Radii must be increasing and inside the window.
pub fn verify_decay_conditions(
    u: &RadialFunction,
    p: f64,
    model: &ModelManifold,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<DecayReport> {
    if radii.windows(2).any(|w| !(w[1] > w[0])) || radii.first().is_some_and(|r| !(*r > 0.0)) {
        return Err(Error::Domain(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    let m = model.m() as f64;
    let k = u.slope_power() * (p - 1.0);
    let d = u.decay_order();
    let flux = |t: f64| u.eval(t) * u.deriv(t).abs().powf(p - 1.0);

    let weighted_decay = 1.0 + d + (p - 1.0) * (d + 1.0) - (m - 1.0);
    let weighted_l1 = if weighted_decay > 1.0 && m - 2.0 + k > -1.0 {
        model
            .integrate_against_area(
                |t| flux(t) / t,
                EndpointHints::new(m - 2.0 + k, weighted_decay),
                u.scale(),
                cfg,
            )
            .ok()
    } else {
        None
    };

    let mut averages = Vec::with_capacity(radii.len());
    for &r in radii {
        let integral = model.integrate_window(&flux, Some(m - 1.0 + k), u.scale(), r, cfg)?;
        averages.push((r, integral / r));
    }
    let decreasing = averages.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(DecayReport {
        weighted_l1,
        averages,
        decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, CurvatureProfile};
    use crate::talenti::{SobolevParams, TalentiFamily};

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn family() -> TalentiFamily {
        TalentiFamily::new(SobolevParams::new(4, 2.0).unwrap(), &cfg()).unwrap()
    }

    #[test]
    fn euclidean_bubble_quotients() {
        let fam = family();
        let flat = ModelManifold::euclidean(4, 50.0, 1e-3).unwrap();
        for &lambda in &[0.5, 1.0, 5.0] {
            let u = RadialFunction::talenti(fam.profile(lambda).unwrap());
            let q = quotients(&u, 2.0, 4.0, &flat, &cfg()).unwrap();
            assert!((q.mass - 1.0).abs() < 1e-8, "{q:?}");
            assert!((q.energy / fam.k_pow() - 1.0).abs() < 1e-6, "{q:?}");
            assert!((q.plain / q.sobolev - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn homogeneity() {
        let fam = family();
        let model = build_model(
            4,
            CurvatureProfile::rational_decay(0.1).unwrap(),
            50.0,
            1e-3,
        )
        .unwrap();
        let u = RadialFunction::talenti(fam.profile(1.0).unwrap());
        let base = quotients(&u, 2.0, 4.0, &model, &cfg()).unwrap();
        for &c in &[0.5, 2.0, 10.0] {
            let q = quotients(&u.scaled(c).unwrap(), 2.0, 4.0, &model, &cfg()).unwrap();
            assert!((q.sobolev / base.sobolev - 1.0).abs() < 1e-10);
            let expect = base.plain * c.powf(2.0 - 4.0);
            assert!((q.plain / expect - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn flat_plateau_has_no_energy() {
        // u = 1 on [0, 1], then (1 + (t-1)^2)^-2: only [1, inf) carries energy.
        let u = RadialFunction::custom(
            "plateau",
            |t: f64| {
                if t <= 1.0 {
                    1.0
                } else {
                    (1.0 + (t - 1.0).powi(2)).powi(-2)
                }
            },
            |t: f64| {
                if t <= 1.0 {
                    0.0
                } else {
                    -4.0 * (t - 1.0) * (1.0 + (t - 1.0).powi(2)).powi(-3)
                }
            },
            4.0,
            1.0,
            0.0,
        )
        .unwrap();
        let flat = ModelManifold::euclidean(4, 30.0, 1e-3).unwrap();
        let energy = gradient_energy(&u, 2.0, &flat, &cfg()).unwrap();
        let omega = flat.omega_sphere();
        let beyond = crate::numerics::integrate_beyond(
            |t| omega * t.powi(3) * u.deriv(t).powi(2),
            1.0,
            Some(7.0),
            &cfg(),
        )
        .unwrap();
        assert!((energy / beyond - 1.0).abs() < 1e-8, "{energy} vs {beyond}");
    }

    #[test]
    fn slow_decay_is_refused() {
        let u = RadialFunction::custom(
            "slow",
            |t| 1.0 / (1.0 + t),
            |t| -1.0 / (1.0 + t).powi(2),
            1.0,
            1.0,
            0.0,
        )
        .unwrap();
        let flat = ModelManifold::euclidean(4, 10.0, 1e-2).unwrap();
        assert!(matches!(
            gradient_energy(&u, 2.0, &flat, &cfg()),
            Err(Error::Degenerate(_))
        ));
        assert!(mass_pstar(&u, 4.0, &flat, &cfg()).is_err());
    }

    #[test]
    fn decay_conditions_on_flat_space() {
        let fam = family();
        let flat = ModelManifold::euclidean(4, 1000.0, 1e-2).unwrap();
        let u = RadialFunction::talenti(fam.profile(1.0).unwrap());
        let report =
            verify_decay_conditions(&u, 2.0, &flat, &[10.0, 100.0, 1000.0], &cfg()).unwrap();
        assert!(report.holds(), "{report:?}");
        assert!(verify_decay_conditions(&u, 2.0, &flat, &[10.0, 5.0], &cfg()).is_err());
    }
}
