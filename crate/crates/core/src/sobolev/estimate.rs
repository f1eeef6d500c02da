use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelManifold;
use crate::numerics::{nelder_mead, QuadratureConfig, SimplexOptions};
use crate::talenti::TalentiFamily;

use super::quotients;
use super::radial::{Bump, RadialFunction};

/// Volume ratio below which the Sobolev inequality is considered unsupported.
pub const VOLUME_FLOOR: f64 = 1e-6;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    /// Bounds of the coarse scan over `ln lambda`.
    pub ln_lambda_range: (f64, f64),
    pub scan_points: usize,
    /// Width at which the golden-section refinement stops.
    pub golden_tol: f64,
    pub max_iterations: usize,
    pub x_tol: f64,
    pub f_tol_rel: f64,
    pub volume_floor: f64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            ln_lambda_range: (-12.0, 12.0),
            scan_points: 25,
            golden_tol: 1e-4,
            max_iterations: 500,
            x_tol: 1e-6,
            f_tol_rel: 1e-9,
            volume_floor: VOLUME_FLOOR,
        }
    }
}

/// Outcome of the radial search. `c_est` is witnessed by an actual competitor,
/// so `c_est <= C_M`; it is never claimed to equal `C_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialEstimate {
    pub c_est: f64,
    /// Smallest Sobolev quotient among all evaluated competitors.
    pub min_quotient: f64,
    /// Best bubble scale from the one-dimensional search.
    pub talenti_lambda: f64,
    pub talenti_quotient: f64,
    /// Parameters of the overall best competitor.
    pub best_lambda: f64,
    pub best_bump: Option<Bump>,
    pub evaluations: usize,
    pub iterations: usize,
}

fn check_volume_growth(model: &ModelManifold, floor: f64) -> Result<()> {
    let t_max = model.t_max();
    for i in 0..=64 {
        let t = t_max * 1e-3f64.powf(1.0 - i as f64 / 64.0);
        let ratio = model.volume_ratio(t)?;
        if ratio < floor {
            return Err(Error::SobolevUnsupported { t, ratio, floor });
        }
    }
    Ok(())
}

struct Search<'a> {
    family: &'a TalentiFamily,
    model: &'a ModelManifold,
    cfg: &'a QuadratureConfig,
    evaluations: usize,
    best: (f64, f64, Option<Bump>),
}

impl Search<'_> {
    fn quotient(&mut self, ln_lambda: f64, bump: Option<Bump>) -> f64 {
        self.evaluations += 1;
        let value = (|| {
            let profile = self.family.profile(ln_lambda.exp())?;
            let u = match bump {
                None => RadialFunction::talenti(profile),
                Some(b) => RadialFunction::perturbed(profile, b)?,
            };
            let p = self.family.params.p();
            quotients(&u, p, self.family.params.p_star(), self.model, self.cfg).map(|q| q.sobolev)
        })()
        .unwrap_or(f64::INFINITY);
        if value < self.best.0 {
            self.best = (value, ln_lambda, bump);
        }
        value
    }
}

/// Minimizes the radial Sobolev quotient over bubbles and bumped bubbles and
/// returns `C_est = (min quotient)^(-1/p)`.
pub fn estimate_radial_constant(
    model: &ModelManifold,
    family: &TalentiFamily,
    cfg: &QuadratureConfig,
    opts: &EstimatorOptions,
) -> Result<RadialEstimate> {
    check_volume_growth(model, opts.volume_floor)?;
    let mut search = Search {
        family,
        model,
        cfg,
        evaluations: 0,
        best: (f64::INFINITY, 0.0, None),
    };

    // Coarse scan, then golden section around the best node.
    let (lo, hi) = opts.ln_lambda_range;
    let n = opts.scan_points.max(2);
    let width = (hi - lo) / (n - 1) as f64;
    let mut scan = Vec::with_capacity(n);
    for i in 0..n {
        let x = lo + width * i as f64;
        scan.push((x, search.quotient(x, None)));
    }
    let best_i = scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    if !scan[best_i].1.is_finite() {
        return Err(Error::Degenerate(
            "no bubble scale gives a finite quotient".into(),
        ));
    }
    let (mut a, mut b) = (
        scan[best_i.saturating_sub(1)].0,
        scan[(best_i + 1).min(n - 1)].0,
    );
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (search.quotient(c, None), search.quotient(d, None));
    while b - a > opts.golden_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = search.quotient(c, None);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = search.quotient(d, None);
        }
    }
    let (talenti_quotient, talenti_ln_lambda, _) = search.best;

    // Bumped bubbles: x = (ln lambda, ln(1 + a), mu, ln sigma).
    let q = family.params.conjugate();
    let x0 = [talenti_ln_lambda, 0.0, talenti_ln_lambda / q, 0.0];
    let simplex = SimplexOptions {
        max_iterations: opts.max_iterations,
        x_tol: opts.x_tol,
        f_tol_rel: opts.f_tol_rel,
    };
    let result = nelder_mead(
        |x| {
            let inside = x[0].abs() <= 20.0
                && x[1].abs() <= 3.0
                && x[2].abs() <= 20.0
                && (0.1f64.ln()..=10f64.ln()).contains(&x[3]);
            if !inside {
                return f64::INFINITY;
            }
            let bump = Bump {
                a: x[1].exp_m1(),
                mu: x[2],
                sigma: x[3].exp(),
            };
            search.quotient(x[0], Some(bump))
        },
        &x0,
        &[0.5, 0.3, 0.5, 0.3],
        &simplex,
    );
    let (min_quotient, best_ln_lambda, best_bump) = search.best;
    if !result.converged {
        return Err(Error::OptimizerNonConvergence {
            iterations: result.iterations,
            best: min_quotient,
        });
    }
    Ok(RadialEstimate {
        c_est: min_quotient.powf(-1.0 / family.params.p()),
        min_quotient,
        talenti_lambda: talenti_ln_lambda.exp(),
        talenti_quotient,
        best_lambda: best_ln_lambda.exp(),
        best_bump,
        evaluations: search.evaluations,
        iterations: result.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::talenti::SobolevParams;

    #[test]
    fn bounded_warping_is_refused() {
        let cfg = QuadratureConfig::default();
        let family = TalentiFamily::new(SobolevParams::new(4, 2.0).unwrap(), &cfg).unwrap();
        let cigar = ModelManifold::conical(4, 0.0, 200.0, 1e-2).unwrap();
        let err = estimate_radial_constant(&cigar, &family, &cfg, &EstimatorOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::SobolevUnsupported { .. }), "{err}");
        assert!(err.to_string().contains("Sobolev inequality unsupported"));
    }
}
