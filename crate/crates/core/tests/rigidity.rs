use proptest::prelude::*;
use sharpsob::model::{build_model, CurvatureProfile, ModelManifold};
use sharpsob::numerics::QuadratureConfig;
use sharpsob::rigidity::{
    c2, c3, c_hat, verify_theorem, CmSource, Mode, RigidityReport, TheoremInputs,
};
use sharpsob::talenti::{SobolevParams, TalentiFamily};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn family() -> TalentiFamily {
    TalentiFamily::new(SobolevParams::new(4, 2.0).unwrap(), &cfg()).unwrap()
}

fn grid(t_max: f64) -> Vec<f64> {
    (1..=100).map(|i| t_max * i as f64 / 100.0).collect()
}

fn run(model: &ModelManifold, mode: Mode, c_m: f64, gamma: Option<f64>) -> RigidityReport {
    let inputs = TheoremInputs {
        mode,
        c_m,
        c_m_source: CmSource::Value,
        gamma,
    };
    verify_theorem(model, &family(), &inputs, &grid(model.t_max()), &cfg()).unwrap()
}

#[test]
fn c2_oracle() {
    let f = family();
    let v = c2(&f.params, f.beta, 0.1, 1.0).unwrap();
    assert!((v / 3.277_409_907_455_754 - 1.0).abs() < 1e-9, "{v}");
}

#[test]
fn c_hat_slope_fit() {
    // Least-squares slope of |C_hat(b) - (K/C_M)^4| against b through the origin.
    let f = family();
    let c_m = 1.1 * f.k;
    let limit = (f.k / c_m).powi(4);
    let bs: Vec<f64> = (1..=10).map(|i| 1e-3 * i as f64).collect();
    let gaps: Vec<f64> = bs
        .iter()
        .map(|&b| {
            let c3v = c3(&f.params, c_m, f.k, c2(&f.params, f.beta, b, 1.0).unwrap()).unwrap();
            (c_hat(&f.params, c3v, b) - limit).abs()
        })
        .collect();
    let slope = bs.iter().zip(&gaps).map(|(b, g)| b * g).sum::<f64>()
        / bs.iter().map(|b| b * b).sum::<f64>();
    assert!(slope.is_finite() && slope > 0.0);
    for (b, g) in bs.iter().zip(&gaps) {
        assert!(*g <= 1.1 * slope * b, "b = {b}: gap {g}, slope {slope}");
    }
}

#[test]
fn theorem1_with_true_constant_has_nonnegative_v() {
    // A cone of volume ratio c^3 has Sobolev constant K c^(-3/4); flat space is c = 1.
    let f = family();
    for c in [0.3, 0.6, 0.9, 1.0] {
        let cone = ModelManifold::conical(4, c, 40.0, 1e-3).unwrap();
        let r = run(&cone, Mode::Theorem1, f.k * c.powf(-0.75), None);
        assert!(r.v_profile.iter().all(|p| p.v >= -1e-9), "c = {c}");
        let flat_ratio = r
            .ratio_table
            .iter()
            .all(|row| (row.ratio - 1.0).abs() < 1e-10);
        assert_eq!(flat_ratio, c == 1.0, "c = {c}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pipeline_ordering(b0 in prop_oneof![Just(0.0), 1e-4f64..0.5], over in 1.0f64..1.5) {
        let f = family();
        let model = build_model(4, CurvatureProfile::rational_decay(b0).unwrap(), 50.0, 1e-2).unwrap();
        let r = run(&model, Mode::Theorem2, over * f.k, Some(1.0));
        let sharp = (f.k / r.c_m).powi(4);
        prop_assert_eq!(r.c2 == 0.0, b0 == 0.0);
        prop_assert_eq!(rel_eq(r.c_hat, sharp), b0 == 0.0);
    }

    #[test]
    fn sandwich_ordering(b0 in 0.0f64..0.5, over in 1.0f64..1.5, gamma in 0.2f64..1.0) {
        let f = family();
        let model = build_model(4, CurvatureProfile::rational_decay(b0).unwrap(), 50.0, 1e-2).unwrap();
        let r = run(&model, Mode::Theorem2, over * f.k, Some(gamma));
        for row in &r.ratio_table {
            prop_assert!(row.lower <= 1.0 && 1.0 <= row.upper);
            prop_assert!(row.pass);
        }
        prop_assert!(r.is_consistent());
    }
}

fn rel_eq(a: f64, b: f64) -> bool {
    ((a - b) / b).abs() <= 1e-14
}
