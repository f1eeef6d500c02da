use crate::error::{Error, Result};
use crate::model::ModelManifold;
use crate::numerics::{gamma, unit_sphere_area, EndpointHints, QuadratureConfig};
use crate::talenti::SobolevParams;

/// Relative shortfall of `C_M` below `K` tolerated as quadrature noise.
pub const C_M_SLACK: f64 = 1e-6;

/// `inf_t V(t) / V_flat(t)` over `t_grid`.
pub fn gamma_lower_bound(model: &ModelManifold, t_grid: &[f64]) -> Result<f64> {
    let mut inf = f64::INFINITY;
    for &t in t_grid {
        inf = inf.min(model.volume_ratio(t)?);
    }
    Ok(inf)
}

/// `(m-1) ((m-p)/(p-1))^(p-1) beta^(-p^2/(m-p))`, shared by `C1` and `C2`.
fn prefactor(params: &SobolevParams, beta: f64) -> f64 {
    let m = params.dim();
    let p = params.p();
    (m - 1.0) * params.profile_decay().powf(p - 1.0) * beta.powf(-p * p / (m - p))
}

/// `int_M (lambda + r^q)^(-(m-1))` and `int_M (lambda + r^q)^(-m)` on `model`.
pub fn model_integrals(
    params: &SobolevParams,
    lambda: f64,
    model: &ModelManifold,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let m = params.dim();
    let q = params.conjugate();
    let scale = lambda.powf(1.0 / q);
    let base = |t: f64| lambda + t.powf(q);
    let lower = model.integrate_against_area(
        |t| base(t).powf(-(m - 1.0)),
        EndpointHints::new(m - 1.0, (m - 1.0) * (q - 1.0)),
        scale,
        cfg,
    )?;
    let upper = model.integrate_against_area(
        |t| base(t).powf(-m),
        EndpointHints::new(m - 1.0, q * m - (m - 1.0)),
        scale,
        cfg,
    )?;
    Ok((lower, upper))
}

/// Closed forms of [`model_integrals`] on flat space:
/// `omega lambda^(-(m-p)/p) G(m-m/p) G(m/p-1) / (q G(m-1))` and
/// `omega lambda^(-m/p) G(m-m/p) G(m/p) / (q G(m))`.
pub fn euclidean_integrals(params: &SobolevParams, lambda: f64) -> Result<(f64, f64)> {
    let m = params.dim();
    let p = params.p();
    let q = params.conjugate();
    let omega = unit_sphere_area(params.m());
    let common = gamma(m - m / p)? / q;
    let lower = omega * lambda.powf(-(m - p) / p) * common * gamma(m / p - 1.0)? / gamma(m - 1.0)?;
    let upper = omega * lambda.powf(-m / p) * common * gamma(m / p)? / gamma(m)?;
    Ok((lower, upper))
}

fn check_b(b: f64) -> Result<()> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::Hypothesis(format!(
            "curvature moment must be finite and >= 0, got {b}"
        )));
    }
    Ok(())
}

/// `C1 = prefactor (e^b - 1) I_(m-1) / (lambda I_m)` with both integrals on `model`.
pub fn c1(
    params: &SobolevParams,
    beta: f64,
    lambda: f64,
    b: f64,
    model: &ModelManifold,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_b(b)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    let (lower, upper) = model_integrals(params, lambda, model, cfg)?;
    Ok(prefactor(params, beta) * b.exp_m1() * lower / (lambda * upper))
}

/// `C2 = ((m-1) p/(m-p)) prefactor (e^b - 1) e^(b(m-1)) / gamma`.
pub fn c2(params: &SobolevParams, beta: f64, b: f64, gamma: f64) -> Result<f64> {
    check_b(b)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    let m = params.dim();
    let p = params.p();
    let lead = (m - 1.0) * p / (m - p);
    Ok(lead * prefactor(params, beta) * b.exp_m1() * (b * (m - 1.0)).exp() / gamma)
}

/// `C3 = ((C_M/K)^p + C_M^p C2)^(m/p)`; refuses `C_M < K` beyond [`C_M_SLACK`].
pub fn c3(params: &SobolevParams, c_m: f64, k: f64, c2: f64) -> Result<f64> {
    if !(c_m >= k * (1.0 - C_M_SLACK)) {
        return Err(Error::Hypothesis(format!(
            "C_M = {c_m:e} is below K(m,p) = {k:e}, violating C_M >= K(m,p)"
        )));
    }
    if !(c2 >= 0.0) {
        return Err(Error::Domain(format!("C2 must be >= 0, got {c2}")));
    }
    let p = params.p();
    Ok(((c_m / k).powf(p) + c_m.powf(p) * c2).powf(params.dim() / p))
}

/// `C_hat = C3^-1 e^(-b(m-1))`.
pub fn c_hat(params: &SobolevParams, c3: f64, b: f64) -> f64 {
    (-b * (params.dim() - 1.0)).exp() / c3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, CurvatureProfile};
    use std::f64::consts::PI;

    fn params() -> SobolevParams {
        SobolevParams::new(4, 2.0).unwrap()
    }

    fn beta() -> f64 {
        (6.0 / (PI * PI)).powf(0.25)
    }

    #[test]
    fn c2_closed_form() {
        // 9 * 2 * (pi / sqrt 6) * (e^0.1 - 1) * e^0.3, evaluated independently.
        let expect = 18.0 * PI / 6f64.sqrt() * (0.1f64.exp() - 1.0) * 0.3f64.exp();
        let got = c2(&params(), beta(), 0.1, 1.0).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-14);
        assert!((got - 3.277_409_907_455_754).abs() < 1e-12);
        assert_eq!(c2(&params(), beta(), 0.0, 0.3).unwrap(), 0.0);
        assert!(c2(&params(), beta(), 0.2, 1.0).unwrap() > got);
        assert!(c2(&params(), beta(), 0.1, 0.0).is_err());
    }

    #[test]
    fn c3_and_c_hat() {
        let sp = params();
        let k = 0.3;
        assert_eq!(c3(&sp, k, k, 0.0).unwrap(), 1.0);
        assert_eq!(c_hat(&sp, 1.0, 0.0), 1.0);
        let c = c3(&sp, 1.1 * k, k, 0.0).unwrap();
        assert!((c_hat(&sp, c, 0.0) - 1.1f64.powi(-4)).abs() < 1e-14);
        assert!((1.1f64.powi(-4) - 0.68301).abs() < 1e-5);
        assert!(c3(&sp, 0.9 * k, k, 0.0).is_err());
        assert!(c3(&sp, 1.1 * k, k, 0.5).unwrap() > c);
    }

    #[test]
    fn reduced_gamma_ratios() {
        // G(2)G(1)/G(3) = 1/2 and G(2)G(2)/G(4) = 1/6; omega_3 = 2 pi^2, q = 2.
        let (lower, upper) = euclidean_integrals(&params(), 1.0).unwrap();
        assert!((lower / (2.0 * PI * PI) - 0.5 / 2.0).abs() < 1e-14);
        assert!((upper / (2.0 * PI * PI) - 1.0 / 6.0 / 2.0).abs() < 1e-14);
    }

    #[test]
    fn c1_vanishes_without_curvature_and_stays_below_c2() {
        let cfg = QuadratureConfig::default();
        let flat = build_model(4, CurvatureProfile::zero(), 50.0, 1e-3).unwrap();
        assert_eq!(c1(&params(), beta(), 1.0, 0.0, &flat, &cfg).unwrap(), 0.0);
        // lambda = 100 puts the bubble at radius 10; the window must reach well past it.
        let model = build_model(
            4,
            CurvatureProfile::rational_decay(0.1).unwrap(),
            200.0,
            1e-2,
        )
        .unwrap();
        let bound = c2(&params(), beta(), 0.1, 1.0).unwrap();
        for &lambda in &[1.0, 10.0, 100.0] {
            let v = c1(&params(), beta(), lambda, 0.1, &model, &cfg).unwrap();
            assert!(v > 0.0 && v <= bound, "lambda {lambda}: {v} vs {bound}");
        }
    }
}
