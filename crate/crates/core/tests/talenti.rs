use proptest::prelude::*;
use sharpsob::numerics::{integrate_semi_infinite_with, QuadratureConfig};
use sharpsob::talenti::{beta_at, SobolevParams, TalentiFamily};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn grid() -> Vec<f64> {
    (0..200)
        .map(|i| 1e-2 * 1e4f64.powf(i as f64 / 199.0))
        .collect()
}

#[test]
fn yamabe_residual_on_exponent_grid() {
    for m in [3u32, 4, 6] {
        for p in [1.5, 2.0, 3.0f64.min(m as f64 - 0.5)] {
            if p >= m as f64 {
                continue;
            }
            let family = TalentiFamily::new(SobolevParams::new(m, p).unwrap(), &cfg()).unwrap();
            for lambda in [0.5, 1.0, 2.0] {
                let profile = family.profile(lambda).unwrap();
                for t in grid() {
                    let r = profile.yamabe_residual(family.k, t);
                    assert!(r.abs() <= 1e-6, "m={m} p={p} lambda={lambda} t={t}: {r:e}");
                }
            }
        }
    }
}

#[test]
fn k_pow_for_m4_p2() {
    // K^-2 = 4 pi sqrt(6) / 3 for m = 4, p = 2.
    let family = TalentiFamily::new(SobolevParams::new(4, 2.0).unwrap(), &cfg()).unwrap();
    let expected = 4.0 * std::f64::consts::PI * 6f64.sqrt() / 3.0;
    assert!((family.k_pow() / expected - 1.0).abs() < 1e-9);
    let beta = (6.0 / std::f64::consts::PI.powi(2)).powf(0.25);
    assert!((family.beta / beta - 1.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normalization_holds_at_every_scale(ln_lambda in -3.0f64..5.0, pick in 0usize..4) {
        let (m, p) = [(3, 2.0), (4, 2.0), (6, 3.0), (4, 1.5)][pick];
        let params = SobolevParams::new(m, p).unwrap();
        let family = TalentiFamily::new(params, &cfg()).unwrap();
        let lambda = ln_lambda.exp();
        let profile = family.profile(lambda).unwrap();
        prop_assert!((profile.euclidean_mass(&cfg()).unwrap() - 1.0).abs() <= 1e-8);
        let k = profile.euclidean_energy(&cfg()).unwrap().powf(-1.0 / p);
        prop_assert!((k / family.k - 1.0).abs() <= 1e-6);
        prop_assert!((beta_at(&params, lambda, &cfg()).unwrap() / family.beta - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn density_integrates_to_one(ln_lambda in -2.0f64..9.0) {
        let family = TalentiFamily::new(SobolevParams::new(4, 2.0).unwrap(), &cfg()).unwrap();
        let lambda = ln_lambda.exp();
        let profile = family.profile(lambda).unwrap();
        let c = cfg().with_tail_split(lambda.sqrt().max(1.0));
        let total = integrate_semi_infinite_with(|t| profile.density(t), profile.density_hints(), &c).unwrap();
        prop_assert!((total - 1.0).abs() <= 1e-6, "lambda = {lambda}: {total}");
    }
}
