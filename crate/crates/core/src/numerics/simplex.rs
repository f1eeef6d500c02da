//! Deterministic Nelder-Mead simplex minimization.

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Converged once every vertex lies within this max-norm distance of the best.
    pub x_tol: f64,
    /// Also converged once the spread of vertex values is below
    /// `f_tol_rel * max(|f_best|, 1e-300)`.
    pub f_tol_rel: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            x_tol: 1e-6,
            f_tol_rel: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn axpy(base: &[f64], dir_from: &[f64], dir_to: &[f64], scale: f64) -> Vec<f64> {
    base.iter()
        .zip(dir_from.iter().zip(dir_to))
        .map(|(b, (from, to))| b + scale * (to - from))
        .collect()
}

/// Minimizes `f` starting from the simplex `{x0} ∪ {x0 + steps[i] e_i}`.
///
/// Non-finite objective values are treated as `+inf` so that infeasible
/// vertices are always replaced.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], steps: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x0.len(), steps.len(), "one initial step per coordinate");
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&best.0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let spread = simplex[n].1 - best.1;
        if diameter < opts.x_tol
            || (spread.is_finite() && spread <= opts.f_tol_rel * best.1.abs().max(1e-300))
        {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let second_worst = simplex[n - 1].1;

        let xr = axpy(&centroid, &worst.0, &centroid, REFLECT);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = axpy(&centroid, &centroid, &xr, EXPAND);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = axpy(&centroid, &centroid, &xr, CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = axpy(&centroid, &centroid, &worst.0, CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = axpy(&anchor, &anchor, &vertex.0, SHRINK);
            let v = eval(&x);
            *vertex = (x, v);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexResult {
        x,
        value,
        iterations,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = SimplexOptions {
            max_iterations: 5000,
            x_tol: 1e-9,
            f_tol_rel: 0.0,
        };
        let r = nelder_mead(f, &[-1.2, 1.0], &[0.5, 0.5], &opts);
        assert!(r.converged);
        assert!(
            (r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6,
            "{:?}",
            r.x
        );
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] + 2.0).powi(4) + x[2].abs();
        let opts = SimplexOptions::default();
        let a = nelder_mead(f, &[1.0, 1.0, 1.0], &[0.5, 0.5, 0.5], &opts);
        let b = nelder_mead(f, &[1.0, 1.0, 1.0], &[0.5, 0.5, 0.5], &opts);
        assert_eq!(a, b);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let opts = SimplexOptions {
            max_iterations: 3,
            x_tol: 1e-12,
            f_tol_rel: 0.0,
        };
        let r = nelder_mead(f, &[5.0, 5.0], &[1.0, 1.0], &opts);
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }

    #[test]
    fn infeasible_vertices_are_replaced() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 1.0).powi(2)
            }
        };
        let r = nelder_mead(f, &[0.5], &[-1.0], &SimplexOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-5);
    }
}
