use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_beyond, integrate_from_origin, QuadratureConfig};
use crate::talenti::{bubble_split, TalentiFamily, TalentiProfile};

/// Allowed deviation of `head + tail` from 1.
pub const SUM_TOL: f64 = 1e-6;

/// Smallest scale accepted by the experiment (the large-`lambda` regime).
pub const MIN_LAMBDA: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeRow {
    pub lambda: f64,
    /// Density mass on `[0, T]`.
    pub head: f64,
    /// Density mass on `[T, inf)`.
    pub tail: f64,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    /// Split point `T`.
    pub t_split: f64,
    /// Threshold `epsilon` for the head.
    pub epsilon: f64,
    pub rows: Vec<EscapeRow>,
    pub sums_ok: bool,
    pub head_nonincreasing: bool,
    /// Smallest `lambda` with `head(lambda) <= epsilon`, located by bisection.
    pub lambda_0: Option<f64>,
}

impl EscapeReport {
    pub fn holds(&self) -> bool {
        self.sums_ok
            && self.head_nonincreasing
            && self.rows.last().is_some_and(|r| r.head <= self.epsilon)
    }
}

fn validate(t_split: f64, lambda_grid: &[f64]) -> Result<()> {
    if !(t_split > 0.0) {
        return Err(Error::Domain(format!(
            "split point T must be positive, got {t_split}"
        )));
    }
    if lambda_grid.is_empty()
        || lambda_grid[0] < MIN_LAMBDA
        || lambda_grid.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(Error::Domain(format!(
            "lambda grid must be increasing with every value >= {MIN_LAMBDA}"
        )));
    }
    Ok(())
}

fn split(profile: &TalentiProfile, t_split: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let hints = profile.density_hints();
    let head = integrate_from_origin(|t| profile.density(t), t_split, hints.origin_power, cfg)?;
    let reach = bubble_split(&profile.params, profile.lambda).max(t_split);
    let tail = integrate_beyond(
        |t| profile.density(t),
        t_split,
        hints.tail_decay,
        &cfg.with_tail_split(reach),
    )?;
    Ok((head, tail))
}

/// Mass of the concentration density on either side of `T` for each scale.
pub fn escape_row(
    family: &TalentiFamily,
    lambda: f64,
    t_split: f64,
    cfg: &QuadratureConfig,
) -> Result<EscapeRow> {
    let (head, tail) = split(&family.profile(lambda)?, t_split, cfg)?;
    Ok(EscapeRow {
        lambda,
        head,
        tail,
        sum: head + tail,
    })
}

/// Runs the experiment over an increasing `lambda_grid` (all `>= 10`) and
/// bisects for the threshold scale `lambda_0`.
pub fn mass_escape_experiment(
    family: &TalentiFamily,
    t_split: f64,
    lambda_grid: &[f64],
    epsilon: f64,
    cfg: &QuadratureConfig,
) -> Result<EscapeReport> {
    validate(t_split, lambda_grid)?;
    let rows = lambda_grid
        .iter()
        .map(|&lambda| escape_row(family, lambda, t_split, cfg))
        .collect::<Result<Vec<_>>>()?;
    assemble(family, t_split, lambda_grid, epsilon, rows, cfg)
}

/// Builds the report from rows computed elsewhere (possibly in parallel).
pub fn assemble(
    family: &TalentiFamily,
    t_split: f64,
    lambda_grid: &[f64],
    epsilon: f64,
    rows: Vec<EscapeRow>,
    cfg: &QuadratureConfig,
) -> Result<EscapeReport> {
    validate(t_split, lambda_grid)?;
    let sums_ok = rows.iter().all(|r| (r.sum - 1.0).abs() <= SUM_TOL);
    let head_nonincreasing = rows.windows(2).all(|w| w[1].head <= w[0].head);
    let lambda_0 = match rows.iter().position(|r| r.head <= epsilon) {
        None => None,
        Some(i) => Some(bisect(
            family,
            t_split,
            epsilon,
            rows[..i].last().map(|r| r.lambda),
            rows[i].lambda,
            cfg,
        )?),
    };
    Ok(EscapeReport {
        t_split,
        epsilon,
        rows,
        sums_ok,
        head_nonincreasing,
        lambda_0,
    })
}

fn bisect(
    family: &TalentiFamily,
    t_split: f64,
    epsilon: f64,
    below: Option<f64>,
    above: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let head =
        |lambda: f64| -> Result<f64> { Ok(split(&family.profile(lambda)?, t_split, cfg)?.0) };
    let mut lo = match below {
        Some(l) => l,
        None => {
            // Walk down from the first grid value until the head exceeds epsilon.
            let mut l = above;
            for _ in 0..60 {
                l *= 0.5;
                if head(l)? > epsilon {
                    break;
                }
            }
            l
        }
    };
    let mut hi = above;
    while hi / lo - 1.0 > 1e-6 {
        let mid = (lo * hi).sqrt();
        if head(mid)? <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
