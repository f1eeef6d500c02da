use proptest::prelude::*;
use sharpsob::model::{
    build_model, curvature_moment, verify_volume_chain, CurvatureProfile, ModelManifold,
};
use sharpsob::numerics::QuadratureConfig;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn zero_profile_is_euclidean() {
    for m in [2u32, 3, 4, 7] {
        let model = build_model(m, CurvatureProfile::zero(), 30.0, 1e-3).unwrap();
        assert!(model.is_euclidean());
        assert_eq!(model.b(), 0.0);
        for t in [1e-3, 0.37, 1.0, 4.2, 30.0] {
            assert!(rel(model.h(t).unwrap(), t) <= 1e-10);
            assert!(rel(model.h_prime(t).unwrap(), 1.0) <= 1e-10);
            assert!(rel(model.area(t).unwrap(), model.euclidean_area(t)) <= 1e-10);
            assert!(
                rel(model.volume(t).unwrap(), model.euclidean_volume(t)) <= 1e-10,
                "m={m} t={t} {}",
                rel(model.volume(t).unwrap(), model.euclidean_volume(t))
            );
            assert!(rel(model.laplacian_radial(t).unwrap(), (m - 1) as f64 / t) <= 1e-10);
            assert_eq!(model.radial_ricci(t).unwrap(), 0.0);
        }
    }
}

#[test]
fn table_file_matches_rational_profile() {
    let b0 = 0.2;
    let exact = CurvatureProfile::rational_decay(b0).unwrap();
    let mut text = String::from("# tail_power=4\n");
    for i in 0..=4000 {
        let t = 0.005 * i as f64;
        text.push_str(&format!("{t} {}\n", exact.g(t)));
    }
    let dir = std::env::temp_dir().join(format!("sharpsob-table-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.txt");
    std::fs::write(&path, text).unwrap();
    let table = CurvatureProfile::parse(&format!("table:{}", path.display())).unwrap();
    assert!(rel(table.b(), b0) < 1e-3, "b = {}", table.b());
    let a = build_model(4, table, 20.0, 1e-3).unwrap();
    let b = build_model(4, exact, 20.0, 1e-3).unwrap();
    assert!(rel(a.volume(20.0).unwrap(), b.volume(20.0).unwrap()) < 1e-4);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn profiles() -> impl Strategy<Value = CurvatureProfile> {
    prop_oneof![
        (0.0f64..1.0).prop_map(|b| CurvatureProfile::rational_decay(b).unwrap()),
        (0.0f64..2.0, 0.2f64..3.0)
            .prop_map(|(a, t)| CurvatureProfile::constant_cutoff(a, t).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sturm_comparison(profile in profiles()) {
        let model = build_model(4, profile, 10.0, 1e-3).unwrap();
        for i in 1..=100 {
            let t = 0.1 * i as f64;
            prop_assert!(model.h(t).unwrap() >= t * (1.0 - 1e-12));
            prop_assert!(model.h_prime(t).unwrap() >= 1.0 - 1e-12);
            prop_assert!(model.volume_ratio(t).unwrap() >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn second_differences_match_equation(profile in profiles(), t in 0.1f64..8.0) {
        let model = build_model(3, profile.clone(), 10.0, 1e-3).unwrap();
        let d = 1e-2;
        let h = |s: f64| model.h(s).unwrap();
        let second = (h(t + d) - 2.0 * h(t) + h(t - d)) / (d * d);
        let exact = profile.g(t) * h(t);
        // O(d^2) truncation against the smooth part; the cutoff kink adds O(d).
        prop_assert!((second - exact).abs() <= 1e-3 * (1.0 + h(t)), "{second} vs {exact}");
        prop_assert!((model.h_second(t).unwrap() - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn moment_is_additive(b1 in 0.0f64..1.0, a in 0.0f64..2.0, t_cut in 0.2f64..3.0) {
        let p = CurvatureProfile::rational_decay(b1).unwrap();
        let q = CurvatureProfile::constant_cutoff(a, t_cut).unwrap();
        let cfg = QuadratureConfig::default().with_tail_split(t_cut);
        let sum = curvature_moment(|t| p.g(t) + q.g(t), Some(4.0), &cfg).unwrap();
        prop_assert!((sum - (p.b() + q.b())).abs() <= 1e-8 * (1.0 + sum));
    }

    #[test]
    fn chains_hold_for_finite_moment(profile in profiles()) {
        let model = build_model(4, profile, 20.0, 1e-3).unwrap();
        let cone = ModelManifold::conical(4, 0.5, 20.0, 1e-3).unwrap();
        let report = verify_volume_chain(&model, Some(&cone), &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0]).unwrap();
        prop_assert!(report.all_pass(), "{:?}", report.first_failure());
    }
}
