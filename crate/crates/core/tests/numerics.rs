use proptest::prelude::*;
use sharpsob::numerics::{
    gamma, integrate_beyond, integrate_finite, integrate_semi_infinite, solve_h_ivp,
    unit_ball_volume, unit_sphere_area, QuadratureConfig,
};

fn cfg(rel: f64) -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(rel)
}

#[test]
fn gamma_matches_statrs() {
    for i in 1..200 {
        let x = 0.05 * i as f64;
        let ours = gamma(x).unwrap();
        let theirs = statrs::function::gamma::gamma(x);
        assert!(
            ((ours - theirs) / theirs).abs() < 1e-13,
            "x = {x}: {ours} vs {theirs}"
        );
    }
}

#[test]
fn ball_and_sphere_constants() {
    for m in 1..12u32 {
        let md = m as f64;
        let ball =
            std::f64::consts::PI.powf(md / 2.0) / statrs::function::gamma::gamma(md / 2.0 + 1.0);
        assert!((unit_ball_volume(m) / ball - 1.0).abs() < 1e-13);
        assert!((unit_sphere_area(m) / (md * ball) - 1.0).abs() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_recurrence(x in 0.01f64..40.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_split(split in 0.05f64..20.0, lambda in 0.1f64..10.0) {
        let f = |t: f64| t * t / (lambda + t * t).powi(3);
        let c = cfg(1e-10);
        let whole = integrate_semi_infinite(f, &c).unwrap();
        let head = integrate_finite(f, 0.0, split, &c).unwrap();
        let tail = integrate_beyond(f, split, Some(4.0), &c).unwrap();
        // int_0^inf t^2 / (lambda + t^2)^3 = pi / (16 lambda^(3/2))
        let exact = std::f64::consts::PI / (16.0 * lambda.powf(1.5));
        prop_assert!(((head + tail) / whole - 1.0).abs() <= 2e-10);
        prop_assert!((whole / exact - 1.0).abs() <= 2e-10);
    }

    #[test]
    fn halving_tolerance_is_stable(rel in 1e-10f64..1e-5, a in 0.5f64..4.0) {
        let f = |t: f64| (-a * t).exp() * (1.0 + t).ln();
        let loose = integrate_semi_infinite(f, &cfg(rel)).unwrap();
        let tight = integrate_semi_infinite(f, &cfg(rel / 2.0)).unwrap();
        prop_assert!(((loose - tight) / tight).abs() <= rel);
    }

    #[test]
    fn ode_comparison_for_nonnegative_curvature(a in 0.0f64..2.0, c in 0.1f64..5.0) {
        let g = |t: f64| a / (1.0 + c * t * t);
        let sol = solve_h_ivp(g, 5.0, 1e-3).unwrap();
        for i in 1..=50 {
            let t = 0.1 * i as f64;
            prop_assert!(sol.h(t).unwrap() >= t * (1.0 - 1e-12));
            prop_assert!(sol.h_prime(t).unwrap() >= 1.0 - 1e-12);
        }
    }
}

#[test]
fn constant_curvature_is_sinh() {
    let sol = solve_h_ivp(|_| 4.0, 3.0, 1e-3).unwrap();
    for t in [0.25f64, 1.0, 2.5, 3.0] {
        let exact = (2.0 * t).sinh() / 2.0;
        assert!((sol.h(t).unwrap() / exact - 1.0).abs() < 1e-10, "t = {t}");
        assert!((sol.h_prime(t).unwrap() / (2.0 * t).cosh() - 1.0).abs() < 1e-10);
    }
}
