//! Fixed-step RK4 for the warping equation `h'' = G(t) h`, `h(0) = 0`, `h'(0) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid solution of the warping IVP with cubic Hermite dense output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IvpSolution {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    /// `h''(t_i) = G(t_i) h(t_i)`, the exact second derivative at each node.
    pub seconds: Vec<f64>,
    pub step: f64,
    pub t_max: f64,
    /// Richardson estimate `max |h_step - h_step/2| / 15` over the shared nodes.
    pub error_estimate: f64,
}

/// Grid, h, h' and h'' columns.
type Trajectory = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

fn rk4<G: Fn(f64) -> f64>(g: &G, t_max: f64, n: usize) -> Result<Trajectory> {
    let dt = t_max / n as f64;
    let mut grid = Vec::with_capacity(n + 1);
    let mut h = Vec::with_capacity(n + 1);
    let mut dh = Vec::with_capacity(n + 1);
    let mut ddh = Vec::with_capacity(n + 1);
    let (mut y, mut v) = (0.0f64, 1.0f64);
    grid.push(0.0);
    h.push(y);
    dh.push(v);
    ddh.push(g(0.0) * y);
    for i in 0..n {
        let t = dt * i as f64;
        let g0 = g(t);
        let gm = g(t + 0.5 * dt);
        let t1 = if i + 1 == n {
            t_max
        } else {
            dt * (i + 1) as f64
        };
        let g1 = g(t1);

        let (k1y, k1v) = (v, g0 * y);
        let (k2y, k2v) = (v + 0.5 * dt * k1v, gm * (y + 0.5 * dt * k1y));
        let (k3y, k3v) = (v + 0.5 * dt * k2v, gm * (y + 0.5 * dt * k2y));
        let (k4y, k4v) = (v + dt * k3v, g1 * (y + dt * k3y));
        y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(y.is_finite() && v.is_finite()) {
            return Err(Error::OdeBlowUp { t: t1 });
        }
        grid.push(t1);
        h.push(y);
        dh.push(v);
        ddh.push(g1 * y);
    }
    Ok((grid, h, dh, ddh))
}

/// Solves `h'' - G h = 0` with `h(0) = 0`, `h'(0) = 1` on `[0, t_max]`.
///
/// The step is adjusted down so that `t_max` is a node. A second pass at half
/// the step provides the reported error estimate.
pub fn solve_h_ivp<G: Fn(f64) -> f64>(g: G, t_max: f64, step: f64) -> Result<IvpSolution> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!(
            "t_max must be positive and finite, got {t_max:e}"
        )));
    }
    if !(step > 0.0) || step > t_max {
        return Err(Error::Domain(format!(
            "step must satisfy 0 < step <= t_max, got {step:e}"
        )));
    }
    let n = ((t_max / step).round() as usize).max(1);
    let (grid, values, derivs, seconds) = rk4(&g, t_max, n)?;
    let (_, fine, _, _) = rk4(&g, t_max, 2 * n)?;
    let error_estimate = values
        .iter()
        .enumerate()
        .map(|(i, h)| (h - fine[2 * i]).abs() / 15.0)
        .fold(0.0, f64::max);
    Ok(IvpSolution {
        grid,
        values,
        derivs,
        seconds,
        step: t_max / n as f64,
        t_max,
        error_estimate,
    })
}

fn hermite(s: f64, width: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * width * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * width * d1
}

impl IvpSolution {
    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        if !(0.0..=self.t_max).contains(&t) {
            return None;
        }
        let last = self.grid.len() - 2;
        let i = ((t / self.step) as usize).min(last);
        let width = self.grid[i + 1] - self.grid[i];
        Some((i, ((t - self.grid[i]) / width).clamp(0.0, 1.0)))
    }

    /// `h(t)` by cubic Hermite interpolation on `(h, h')`.
    pub fn h(&self, t: f64) -> Option<f64> {
        let (i, s) = self.locate(t)?;
        let w = self.grid[i + 1] - self.grid[i];
        Some(hermite(
            s,
            w,
            self.values[i],
            self.values[i + 1],
            self.derivs[i],
            self.derivs[i + 1],
        ))
    }

    /// `h'(t)` by cubic Hermite interpolation on `(h', h'')`.
    pub fn h_prime(&self, t: f64) -> Option<f64> {
        let (i, s) = self.locate(t)?;
        let w = self.grid[i + 1] - self.grid[i];
        Some(hermite(
            s,
            w,
            self.derivs[i],
            self.derivs[i + 1],
            self.seconds[i],
            self.seconds[i + 1],
        ))
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_profile_is_identity() {
        let sol = solve_h_ivp(|_| 0.0, 10.0, 1e-3).unwrap();
        assert_eq!(sol.values[0], 0.0);
        assert_eq!(sol.derivs[0], 1.0);
        for (t, h) in sol.grid.iter().zip(&sol.values).skip(1) {
            assert!(((h - t) / t).abs() < 1e-12);
        }
        assert!(sol.derivs.iter().all(|d| (d - 1.0).abs() < 1e-12));
    }

    #[test]
    fn unit_profile_is_sinh() {
        let sol = solve_h_ivp(|_| 1.0, 2.0, 1e-3).unwrap();
        let h1 = sol.h(1.0).unwrap();
        assert!((h1 - 1.0f64.sinh()).abs() < 1e-12, "{h1}");
        assert!((h1 - 1.175_201_193_6).abs() < 1e-10);
        // between nodes
        let t = 1.234_567_8;
        assert!((sol.h(t).unwrap() - t.sinh()).abs() < 1e-11);
        assert!((sol.h_prime(t).unwrap() - t.cosh()).abs() < 1e-11);
        assert!(sol.error_estimate < 1e-12);
    }

    #[test]
    fn grid_is_strictly_increasing_and_ends_at_t_max() {
        let sol = solve_h_ivp(|t| 1.0 / (1.0 + t), 3.3, 0.7).unwrap();
        assert!(sol.grid.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*sol.grid.last().unwrap(), 3.3);
        assert_eq!(sol.grid[0], 0.0);
    }

    #[test]
    fn bad_arguments() {
        assert!(solve_h_ivp(|_| 0.0, 0.0, 1e-3).is_err());
        assert!(solve_h_ivp(|_| 0.0, 1.0, 0.0).is_err());
        assert!(solve_h_ivp(|_| 0.0, 1.0, 2.0).is_err());
        assert!(matches!(
            solve_h_ivp(|_| 1e300, 10.0, 0.1),
            Err(Error::OdeBlowUp { .. })
        ));
    }

    #[test]
    fn out_of_window_is_none() {
        let sol = solve_h_ivp(|_| 0.0, 1.0, 0.1).unwrap();
        assert!(sol.h(1.5).is_none());
        assert!(sol.h(-0.1).is_none());
        assert!(sol.h(1.0).is_some());
    }
}
