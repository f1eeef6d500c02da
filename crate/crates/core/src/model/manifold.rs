use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_beyond, integrate_finite, integrate_from_origin, solve_h_ivp, unit_sphere_area,
    EndpointHints, IvpSolution, QuadratureConfig,
};

use super::profile::CurvatureProfile;

/// Default bound on `tail uncertainty / |value|` for integrals over the whole model.
pub const DEFAULT_TAIL_REL_TOL: f64 = 1e-6;

/// Warping function of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warping {
    /// `h'' = G h`, `h(0) = 0`, `h'(0) = 1`, solved numerically.
    Solved {
        profile: CurvatureProfile,
        ivp: IvpSolution,
    },
    /// `h = c t + (1 - c)(1 - e^-t)` in closed form. Concave, so the model has
    /// non-negative Ricci curvature and asymptotic volume ratio `c^(m-1)`.
    Conical { c: f64 },
}

/// Rotationally symmetric model `ds^2 + h(s)^2 dtheta^2` on the window `[0, t_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifold {
    m: u32,
    warping: Warping,
    t_max: f64,
    omega_sphere: f64,
    nodes: Vec<f64>,
    /// Cumulative `V(t_i)` on `nodes`.
    volumes: Vec<f64>,
    tail_rel_tol: f64,
}

// Five-point Gauss-Legendre on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Solves the warping equation for `profile` and caches volumes.
pub fn build_model(
    m: u32,
    profile: CurvatureProfile,
    t_max: f64,
    step: f64,
) -> Result<ModelManifold> {
    check_dimension(m)?;
    let ivp = solve_h_ivp(|t| profile.g(t), t_max, step)?;
    for (t, h) in ivp.grid.iter().zip(&ivp.values).skip(1) {
        if !(*h > 0.0) {
            return Err(Error::Positivity { t: *t, h: *h });
        }
    }
    let nodes = ivp.grid.clone();
    ModelManifold::assemble(m, Warping::Solved { profile, ivp }, t_max, nodes)
}

fn check_dimension(m: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::Domain(format!(
            "model dimension must be >= 2, got {m}"
        )));
    }
    Ok(())
}

impl ModelManifold {
    /// Flat `R^m`, built through the same solver as every other profile.
    pub fn euclidean(m: u32, t_max: f64, step: f64) -> Result<Self> {
        build_model(m, CurvatureProfile::zero(), t_max, step)
    }

    /// Closed-form conical model; `c = 0` gives bounded `h`.
    pub fn conical(m: u32, c: f64, t_max: f64, step: f64) -> Result<Self> {
        check_dimension(m)?;
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Domain(format!(
                "cone parameter must lie in [0, 1], got {c}"
            )));
        }
        if !(t_max > 0.0) || !t_max.is_finite() || !(step > 0.0) || step > t_max {
            return Err(Error::Domain(format!(
                "need 0 < step <= t_max < inf (step = {step:e}, t_max = {t_max:e})"
            )));
        }
        let n = ((t_max / step).round() as usize).max(1);
        let dt = t_max / n as f64;
        let nodes = (0..=n)
            .map(|i| if i == n { t_max } else { dt * i as f64 })
            .collect();
        Self::assemble(m, Warping::Conical { c }, t_max, nodes)
    }

    fn assemble(m: u32, warping: Warping, t_max: f64, nodes: Vec<f64>) -> Result<Self> {
        let mut model = Self {
            m,
            warping,
            t_max,
            omega_sphere: unit_sphere_area(m),
            nodes,
            volumes: Vec::new(),
            tail_rel_tol: DEFAULT_TAIL_REL_TOL,
        };
        let mut volumes = Vec::with_capacity(model.nodes.len());
        let mut acc = 0.0;
        volumes.push(0.0);
        for w in model.nodes.windows(2) {
            acc += model.cell_volume(w[0], w[1]);
            volumes.push(acc);
        }
        model.volumes = volumes;
        Ok(model)
    }

    pub fn with_tail_rel_tol(mut self, tol: f64) -> Self {
        self.tail_rel_tol = tol;
        self
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn omega_sphere(&self) -> f64 {
        self.omega_sphere
    }

    pub fn warping(&self) -> &Warping {
        &self.warping
    }

    pub fn profile(&self) -> Option<&CurvatureProfile> {
        match &self.warping {
            Warping::Solved { profile, .. } => Some(profile),
            Warping::Conical { .. } => None,
        }
    }

    /// Curvature moment `b`. Conical models have `Ric >= 0`, so `b = 0`.
    pub fn b(&self) -> f64 {
        self.profile().map_or(0.0, CurvatureProfile::b)
    }

    pub fn grid(&self) -> &[f64] {
        &self.nodes
    }

    /// `true` for the flat model.
    pub fn is_euclidean(&self) -> bool {
        match &self.warping {
            Warping::Solved { profile, .. } => *profile == CurvatureProfile::zero(),
            Warping::Conical { c } => *c == 1.0,
        }
    }

    fn check_window(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_max).contains(&t) {
            return Err(Error::OutOfWindow {
                t,
                t_max: self.t_max,
            });
        }
        Ok(())
    }

    fn h_unchecked(&self, t: f64) -> f64 {
        match &self.warping {
            Warping::Solved { ivp, .. } => ivp.h(t).unwrap_or(f64::NAN),
            Warping::Conical { c } => c * t - (1.0 - c) * (-t).exp_m1(),
        }
    }

    pub fn h(&self, t: f64) -> Result<f64> {
        self.check_window(t)?;
        Ok(self.h_unchecked(t))
    }

    pub fn h_prime(&self, t: f64) -> Result<f64> {
        self.check_window(t)?;
        Ok(match &self.warping {
            Warping::Solved { ivp, .. } => ivp.h_prime(t).unwrap_or(f64::NAN),
            Warping::Conical { c } => c + (1.0 - c) * (-t).exp(),
        })
    }

    /// `h''` from the equation itself (`G h`), never by differentiation.
    pub fn h_second(&self, t: f64) -> Result<f64> {
        self.check_window(t)?;
        Ok(match &self.warping {
            Warping::Solved { profile, ivp } => profile.g(t) * ivp.h(t).unwrap_or(f64::NAN),
            Warping::Conical { c } => -(1.0 - c) * (-t).exp(),
        })
    }

    fn area_unchecked(&self, t: f64) -> f64 {
        self.omega_sphere * self.h_unchecked(t).powi(self.m as i32 - 1)
    }

    /// `A(t) = omega_{m-1} h(t)^(m-1)`.
    pub fn area(&self, t: f64) -> Result<f64> {
        self.check_window(t)?;
        Ok(self.area_unchecked(t))
    }

    fn gl5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GL5_NODES
            .iter()
            .zip(GL5_WEIGHTS)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// `int_a^b A`. The cell at the origin is integrated in `u = s^m`, where
    /// the integrand `omega (h/s)^(m-1) / m` is constant on flat space.
    fn cell_volume(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        if a > 0.0 {
            return Self::gl5(|s| self.area_unchecked(s), a, b);
        }
        let m = self.m as f64;
        let k = self.m as i32 - 1;
        let reduced = |u: f64| {
            let s = u.powf(1.0 / m);
            self.omega_sphere * (self.h_unchecked(s) / s).powi(k) / m
        };
        Self::gl5(reduced, 0.0, b.powi(self.m as i32))
    }

    /// `V(t) = int_0^t A` from the cached node volumes.
    pub fn volume(&self, t: f64) -> Result<f64> {
        self.check_window(t)?;
        let last = self.nodes.len() - 2;
        let i = self
            .nodes
            .partition_point(|x| *x <= t)
            .saturating_sub(1)
            .min(last);
        Ok(self.volumes[i] + self.cell_volume(self.nodes[i], t))
    }

    /// `omega_{m-1} t^(m-1)`.
    pub fn euclidean_area(&self, t: f64) -> f64 {
        self.omega_sphere * t.powi(self.m as i32 - 1)
    }

    /// `omega_m t^m`.
    pub fn euclidean_volume(&self, t: f64) -> f64 {
        self.omega_sphere / self.m as f64 * t.powi(self.m as i32)
    }

    /// `V(t) / (omega_m t^m)` for `t > 0`.
    pub fn volume_ratio(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("volume ratio needs t > 0, got {t}")));
        }
        Ok(self.volume(t)? / self.euclidean_volume(t))
    }

    /// `-(m-1) h''/h`.
    pub fn radial_ricci(&self, t: f64) -> Result<f64> {
        positive(t)?;
        let m1 = (self.m - 1) as f64;
        Ok(-m1 * self.h_second(t)? / self.h(t)?)
    }

    /// `Delta r = (m-1) h'/h`.
    pub fn laplacian_radial(&self, t: f64) -> Result<f64> {
        positive(t)?;
        let m1 = (self.m - 1) as f64;
        Ok(m1 * self.h_prime(t)? / self.h(t)?)
    }

    /// Lower and upper bounds on `A(t)` for any `t >= 0`; they coincide except
    /// beyond the window of a solved model.
    ///
    /// Past `T = t_max`, convexity gives `h >= h(T) + h'(T)(t - T)`, and
    /// `h <= t h'` gives `h' <= h'(T) exp(int_T^inf s G)`.
    pub fn area_bracket(&self, t: f64) -> (f64, f64) {
        match &self.warping {
            Warping::Solved { profile, ivp } if t > self.t_max => {
                let tm = self.t_max;
                let h0 = *ivp.values.last().expect("non-empty grid");
                let d0 = *ivp.derivs.last().expect("non-empty grid");
                let growth = profile.moment_beyond(tm).exp();
                let k = self.m as i32 - 1;
                let lo = h0 + d0 * (t - tm);
                let hi = h0 + d0 * growth * (t - tm);
                (
                    self.omega_sphere * lo.powi(k),
                    self.omega_sphere * hi.powi(k),
                )
            }
            _ => {
                let a = self.area_unchecked(t);
                (a, a)
            }
        }
    }

    /// `int_0^inf w(t) A(t) dt` over the whole model.
    ///
    /// `hints` describe `w A` at both ends and `scale` is where `w` changes
    /// character; the window is cut geometrically from there. Beyond the window
    /// of a solved model the area is bracketed, the midpoint is integrated and
    /// the half-width is the reported uncertainty, which must stay below
    /// `tail_rel_tol` times the value.
    pub fn integrate_against_area<W: Fn(f64) -> f64>(
        &self,
        w: W,
        hints: EndpointHints,
        scale: f64,
        cfg: &QuadratureConfig,
    ) -> Result<f64> {
        let window = self.integrate_window(&w, hints.origin_power, scale, self.t_max, cfg)?;
        let (tail, uncertainty) = self.tail(&w, hints.tail_decay, scale, cfg)?;
        let value = window + tail;
        let tolerance = (self.tail_rel_tol * value.abs()).max(cfg.abs_tol);
        if !(uncertainty <= tolerance) {
            return Err(Error::TailBound {
                uncertainty,
                tolerance,
            });
        }
        Ok(value)
    }

    /// `int_0^upper w(t) A(t) dt` within the window, with the same geometric cuts.
    pub fn integrate_window<W: Fn(f64) -> f64>(
        &self,
        w: &W,
        origin_power: Option<f64>,
        scale: f64,
        upper: f64,
        cfg: &QuadratureConfig,
    ) -> Result<f64> {
        self.check_window(upper)?;
        let f = |t: f64| w(t) * self.area_unchecked(t);
        let first = if scale > 0.0 { scale.min(upper) } else { upper };
        let mut total = integrate_from_origin(f, first, origin_power, cfg)?;
        let mut a = first;
        while a < upper {
            let b = (4.0 * a).min(upper);
            total += integrate_finite(f, a, b, cfg)?;
            a = b;
        }
        Ok(total)
    }

    fn tail<W: Fn(f64) -> f64>(
        &self,
        w: &W,
        decay: Option<f64>,
        scale: f64,
        cfg: &QuadratureConfig,
    ) -> Result<(f64, f64)> {
        let tm = self.t_max;
        let tail_cfg = cfg.with_tail_split(tm.max(scale));
        match &self.warping {
            Warping::Solved { profile, .. } => {
                let b_tail = profile.moment_beyond(tm);
                if !b_tail.is_finite() {
                    return Err(Error::TailBound {
                        uncertainty: f64::INFINITY,
                        tolerance: self.tail_rel_tol,
                    });
                }
                let mid = integrate_beyond(
                    |t| {
                        let (lo, hi) = self.area_bracket(t);
                        w(t) * 0.5 * (lo + hi)
                    },
                    tm,
                    decay,
                    &tail_cfg,
                )?;
                if b_tail == 0.0 {
                    return Ok((mid, 0.0));
                }
                let half = integrate_beyond(
                    |t| {
                        let (lo, hi) = self.area_bracket(t);
                        w(t).abs() * 0.5 * (hi - lo)
                    },
                    tm,
                    decay,
                    &tail_cfg,
                )?;
                Ok((mid, half))
            }
            Warping::Conical { .. } => {
                let exact =
                    integrate_beyond(|t| w(t) * self.area_unchecked(t), tm, decay, &tail_cfg)?;
                Ok((exact, 0.0))
            }
        }
    }
}

fn positive(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "radial quantities need t > 0, got {t}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn flat() -> ModelManifold {
        ModelManifold::euclidean(4, 10.0, 1e-3).unwrap()
    }

    #[test]
    fn euclidean_is_identity() {
        let e = flat();
        for &t in &[0.1, 1.0, 3.3, 10.0] {
            assert!((e.h(t).unwrap() / t - 1.0).abs() < 1e-10);
        }
        for (t, h) in e.nodes.iter().zip(match e.warping() {
            Warping::Solved { ivp, .. } => &ivp.values,
            _ => unreachable!(),
        }) {
            if *t > 0.0 {
                assert!((h / t - 1.0).abs() < 1e-10);
            }
        }
        assert_eq!(e.b(), 0.0);
        assert!(e.is_euclidean());
        assert!((e.area(1.0).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
        assert!((e.volume(1.0).unwrap() - PI * PI / 2.0).abs() < 1e-12);
        assert_eq!(e.volume(0.0).unwrap(), 0.0);
        assert!((e.volume_ratio(7.77).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(e.radial_ricci(2.0).unwrap(), 0.0);
        assert!((e.laplacian_radial(2.0).unwrap() - 1.5).abs() < 1e-10);
    }

    #[test]
    fn unit_curvature_gives_sinh() {
        let g1 = build_model(
            4,
            CurvatureProfile::constant_cutoff(1.0, f64::INFINITY).unwrap(),
            5.0,
            1e-3,
        )
        .unwrap();
        assert!((g1.h(1.0).unwrap() - 1.0f64.sinh()).abs() < 1e-10);
        assert!((g1.radial_ricci(2.5).unwrap() + 3.0).abs() < 1e-12);
        let t: f64 = 2.0;
        assert!(g1.laplacian_radial(t).unwrap() > 3.0 / t);
        assert!((g1.laplacian_radial(t).unwrap() - 3.0 / t.tanh()).abs() < 1e-9);
        assert!(g1.b().is_infinite());
    }

    #[test]
    fn rational_model_identities() {
        let prof = CurvatureProfile::rational_decay(0.1).unwrap();
        let model = build_model(4, prof.clone(), 20.0, 1e-3).unwrap();
        for &t in &[0.3, 1.0, 7.0, 20.0] {
            let ric = model.radial_ricci(t).unwrap();
            assert!((ric + 3.0 * prof.g(t)).abs() < 1e-15 * (1.0 + ric.abs()));
            let lap = model.laplacian_radial(t).unwrap();
            assert!(lap <= 3.0 * 0.1f64.exp() / t);
            assert!(model.h(t).unwrap() >= t);
        }
        let v: Vec<f64> = model
            .nodes
            .iter()
            .map(|t| model.volume(*t).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn conical_closed_form() {
        let cone = ModelManifold::conical(4, 0.8, 50.0, 1e-2).unwrap();
        assert_eq!(cone.b(), 0.0);
        for &t in &[0.5, 5.0, 40.0] {
            assert!(cone.radial_ricci(t).unwrap() >= 0.0);
            assert!(cone.h(t).unwrap() <= t);
        }
        // A(t) ~ 0.512 omega t^3 at large t.
        let r = cone.area(50.0).unwrap() / cone.euclidean_area(50.0);
        assert!((r - 0.8f64.powi(3)).abs() < 0.02);
        assert!(ModelManifold::conical(4, 1.5, 1.0, 0.1).is_err());
        assert!(ModelManifold::conical(1, 0.5, 1.0, 0.1).is_err());
    }

    #[test]
    fn window_is_enforced() {
        let e = flat();
        assert!(matches!(e.area(10.5), Err(Error::OutOfWindow { .. })));
        assert!(e.volume(-1.0).is_err());
        assert!(e.radial_ricci(0.0).is_err());
    }

    #[test]
    fn whole_model_integral_with_bracketed_tail() {
        // int A(t) (1 + t^2)^-4 dt = omega * 1/12 on R^4, with a tail past t_max.
        let e = ModelManifold::euclidean(4, 5.0, 1e-3).unwrap();
        let cfg = QuadratureConfig::default();
        let w = |t: f64| (1.0 + t * t).powi(-4);
        let v = e
            .integrate_against_area(w, EndpointHints::new(3.0, 5.0), 1.0, &cfg)
            .unwrap();
        assert!((v - 2.0 * PI * PI / 12.0).abs() < 1e-10);

        let strong = build_model(
            4,
            CurvatureProfile::constant_cutoff(1.0, 4.0).unwrap(),
            5.0,
            1e-3,
        )
        .unwrap();
        let slow = |t: f64| (1.0 + t * t).powf(-2.5);
        assert!(matches!(
            strong.integrate_against_area(slow, EndpointHints::new(3.0, 2.0), 1.0, &cfg),
            Err(Error::TailBound { .. })
        ));
        let g1 = build_model(
            4,
            CurvatureProfile::constant_cutoff(1.0, f64::INFINITY).unwrap(),
            5.0,
            1e-3,
        )
        .unwrap();
        assert!(g1
            .integrate_against_area(w, EndpointHints::new(3.0, 5.0), 1.0, &cfg)
            .is_err());
    }
}
