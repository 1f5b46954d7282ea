mod support;

use chrono::NaiveDate;
use proptest::prelude::*;
use specmargin_core::garch::{Forecast, GarchParams};
use specmargin_core::measures::{
    conditional_measure, scale_measure, spectral_weight, std_normal_es, std_normal_measure, std_normal_srm,
    std_normal_var, ConfidenceLevel, RiskAversion, RiskSpec,
};
use specmargin_core::quadrature::{integrate, Method, QuadratureSpec};
use specmargin_core::special::normal_quantile;
use support::oracle;

const LEVELS: [f64; 9] = [0.75, 0.8, 0.85, 0.9, 0.925, 0.95, 0.975, 0.99, 0.995];
const AVERSIONS: [f64; 9] = [1.0, 5.0, 10.0, 15.0, 20.0, 25.0, 50.0, 100.0, 500.0];

fn level(a: f64) -> ConfidenceLevel {
    ConfidenceLevel::new(a).unwrap()
}

fn aversion(k: f64) -> RiskAversion {
    RiskAversion::new(k).unwrap()
}

fn srm(k: f64, quad: QuadratureSpec) -> f64 {
    std_normal_srm(aversion(k), quad).unwrap().value
}

/// Closed-interval composite trapezoid of the weight itself; the weight is
/// finite at both ends, unlike the quantile.
fn weight_mass(k: f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let inner: f64 = (1..n).map(|i| spectral_weight(i as f64 * h, aversion(k))).sum();
    h * (inner + 0.5 * (spectral_weight(0.0, aversion(k)) + spectral_weight(1.0, aversion(k))))
}

#[test]
fn quantile_matches_bisection() {
    let mut worst: f64 = 0.0;
    let mut check = |p: f64| {
        let err = (normal_quantile(p) - oracle::quantile(p)).abs();
        worst = worst.max(err);
    };
    for e in 1..=120 {
        let p = 10f64.powf(-12.0 + 0.1 * (e - 1) as f64);
        check(p);
        check(1.0 - p);
    }
    for i in 1..2000 {
        check(i as f64 / 2000.0);
    }
    assert!(worst < 1e-9, "worst absolute error {worst:e}");
}

#[test]
fn weight_limits() {
    for p in [0.0, 0.1, 0.5, 0.9, 1.0] {
        assert!((spectral_weight(p, aversion(1e-8)) - 1.0).abs() < 1e-6);
    }
    assert!((spectral_weight(0.0, aversion(50.0)) - 50.0).abs() < 1e-12);
}

#[test]
fn weight_integrates_to_one() {
    for k in [1.0, 5.0, 10.0, 25.0, 50.0, 100.0] {
        let err = (weight_mass(k, 30_000) - 1.0).abs();
        assert!(err < 1e-6, "k={k}: {err:e}");
    }
    // the O(h^2 k^3) trapezoid error needs a finer grid at k = 500
    assert!((weight_mass(500.0, 30_000) - 1.0).abs() < 3e-5);
    assert!((weight_mass(500.0, 300_000) - 1.0).abs() < 1e-6);

    let n = 1_000_000;
    let midpoint: f64 = (0..n).map(|i| spectral_weight((i as f64 + 0.5) / n as f64, aversion(50.0))).sum::<f64>() / n as f64;
    assert!((midpoint - 1.0).abs() < 1e-6);
}

#[test]
fn weights_load_the_loss_tail() {
    for k in AVERSIONS.iter().chain(&[0.01, 1000.0]) {
        let w: Vec<f64> = (0..=1000).map(|i| spectral_weight(i as f64 / 1000.0, aversion(*k))).collect();
        assert!(w.windows(2).all(|p| p[1] <= p[0]), "k={k}");
    }
}

#[test]
fn closed_form_examples() {
    let var = |a| std_normal_var(level(a)).value;
    let es = |a| std_normal_es(level(a)).value;
    assert!((var(0.95) - 1.6449).abs() < 5e-5);
    assert!((var(0.99) - 2.3263).abs() < 5e-5);
    assert!(var(0.5).abs() < 1e-15);
    assert!((es(0.95) - 2.0627).abs() < 5e-5);
    assert!((es(0.99) - 2.6652).abs() < 5e-5);
    assert!((es(0.95) / var(0.95) - 1.2540).abs() < 1e-4);
}

#[test]
fn spectral_examples() {
    let quad = QuadratureSpec::default();
    let k50 = srm(50.0, quad);
    assert!((2.237..=2.241).contains(&k50), "{k50}");
    assert!((srm(1.0, quad) - 0.2779).abs() < 1e-3);
    assert!((srm(25.0, quad) - 1.9514).abs() < 2e-3);
}

#[test]
fn truncation_biases_downward() {
    for k in AVERSIONS {
        let truth = oracle::srm(k);
        let grid = srm(k, QuadratureSpec::default());
        assert!(grid < truth, "k={k}");
        // the whole gap is the weight cut off below p = 1/N, to leading order
        let cut = 1.0 - (-k / 30_000.0f64).exp();
        assert!(truth - grid < 2.0 * cut * (-normal_quantile(0.5 / 30_000.0)) + 1e-3, "k={k}");
    }
}

#[test]
fn table_monotonicity() {
    let vars: Vec<f64> = LEVELS.iter().map(|&a| std_normal_var(level(a)).value).collect();
    let ess: Vec<f64> = LEVELS.iter().map(|&a| std_normal_es(level(a)).value).collect();
    let srms: Vec<f64> = AVERSIONS.iter().map(|&k| srm(k, QuadratureSpec::default())).collect();
    for v in [&vars, &ess, &srms] {
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }
    assert!(ess.iter().zip(&vars).all(|(e, v)| e > v));
}

#[test]
fn spectral_can_sit_either_side_of_var() {
    let var95 = std_normal_var(level(0.95)).value;
    assert!(srm(1.0, QuadratureSpec::default()) < var95);
    assert!(srm(500.0, QuadratureSpec::default()) > var95);
}

#[test]
fn trapezoid_and_simpson_agree() {
    let t = srm(50.0, QuadratureSpec::trapezoid(30_000));
    let s = srm(50.0, QuadratureSpec::new(Method::Simpson, 30_000).unwrap());
    assert!((t - s).abs() < 1e-4, "{t} {s}");
}

#[test]
fn integrate_examples() {
    for method in Method::ALL {
        for n in [2usize, 100, 1000, 2000, 30_000] {
            let Ok(spec) = QuadratureSpec::new(method, n).map(|s| s.with_seed(3)) else { continue };
            let v = integrate(|_| 1.0, &spec).unwrap();
            // grid rules cover [1/N, 1 - 1/N]
            assert!((v - 1.0).abs() < 1e-3 || n <= 2000, "{method:?} N={n}: {v}");
            if method.is_grid_rule() {
                assert!((v - spec.covered_measure()).abs() < 1e-9, "{method:?} N={n}: {v}");
            } else {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }
    let v = integrate(|p| p, &QuadratureSpec::trapezoid(10_000)).unwrap();
    assert!((v - 0.5).abs() < 1e-4);
}

#[test]
fn convergence_profile() {
    let k = 50.0;
    let grid: Vec<usize> = (1..=50).map(|i| i * 1000).collect();
    for method in [Method::Trapezoid, Method::Simpson] {
        let est: Vec<f64> = grid.iter().map(|&n| srm(k, QuadratureSpec::new(method, n).unwrap())).collect();
        assert!(est.windows(2).all(|w| w[1] >= w[0]), "{method:?} not increasing");
        assert!(est[0] < est[49] && est[49] < oracle::srm(k));
    }
    for method in [Method::Niederreiter, Method::Weyl] {
        assert!(srm(k, QuadratureSpec::new(method, 50_000).unwrap()) > srm(k, QuadratureSpec::new(method, 100).unwrap()));
    }
    let spread = |n| {
        let xs: Vec<f64> = (0..20).map(|s| srm(k, QuadratureSpec::new(Method::PseudoMc, n).unwrap().with_seed(s))).collect();
        specmargin_core::stats::sample_std(&xs)
    };
    let (wide, narrow) = (spread(1000), spread(20_000));
    assert!(wide > 3.0 * narrow, "{wide} {narrow}");
}

#[test]
fn direct_and_scaled_evaluation_agree() {
    let forecast = |mu, sigma| Forecast {
        date: NaiveDate::from_ymd_opt(2002, 1, 2).unwrap(),
        mu,
        sigma,
        source_params: GarchParams::new(0.0, 0.1, 0.1, 0.8).unwrap(),
    };
    for spec in [RiskSpec::var(0.95).unwrap(), RiskSpec::es(0.99).unwrap()] {
        let m = std_normal_measure(&spec).unwrap();
        for (mu, sigma) in [(0.0, 1.0), (0.3, 2.0), (-1.2, 0.4)] {
            let direct = conditional_measure(&spec, mu, sigma).unwrap();
            assert!((direct - scale_measure(&m, &forecast(mu, sigma))).abs() < 1e-10);
        }
    }
    // with mu = 0 the truncated weight mass drops out of the comparison
    let spec = RiskSpec::spectral(50.0).unwrap();
    let m = std_normal_measure(&spec).unwrap();
    for sigma in [0.5, 1.0, 3.0] {
        let direct = conditional_measure(&spec, 0.0, sigma).unwrap();
        assert!((direct - scale_measure(&m, &forecast(0.0, sigma))).abs() < 1e-10);
    }
    assert!(conditional_measure(&spec, 0.0, 0.0).is_err());
}

#[test]
fn scaling_examples() {
    let var = std_normal_var(level(0.95));
    assert_eq!(var.scale(0.0, 1.0), var.value);
    assert!((var.scale(0.1, 2.0) - 3.1898).abs() < 1e-4);
    let es = std_normal_es(level(0.95));
    for sigma in [0.5, 1.0, 1.7, 4.0] {
        assert!((es.scale(0.0, sigma) / var.scale(0.0, sigma) - 1.254).abs() < 1e-3);
    }
}

fn any_spec() -> impl Strategy<Value = RiskSpec> {
    prop_oneof![
        (0.5f64..0.999).prop_map(|a| RiskSpec::var(a).unwrap()),
        (0.5f64..0.999).prop_map(|a| RiskSpec::es(a).unwrap()),
        (0.5f64..200.0).prop_map(|k| RiskSpec::Spectral { k: aversion(k), quadrature: QuadratureSpec::trapezoid(2000) }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn translation_and_homogeneity(
        spec in any_spec(),
        mu in -5.0f64..5.0,
        sigma in 0.01f64..10.0,
        c in -5.0f64..5.0,
        lambda in 0.01f64..10.0,
    ) {
        let m = std_normal_measure(&spec).unwrap();
        let base = m.scale(mu, sigma);
        let tol = 1e-12 * (base.abs() + mu.abs() + c.abs() + sigma * m.value.abs()).max(1.0);
        prop_assert!((m.scale(mu + c, sigma) - (base - c)).abs() < tol);
        prop_assert!((m.scale(lambda * mu, lambda * sigma) - lambda * base).abs() < tol * lambda.max(1.0));
    }

    #[test]
    fn weight_is_non_increasing(k in 1e-6f64..2000.0, p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        prop_assert!(spectral_weight(lo, aversion(k)) >= spectral_weight(hi, aversion(k)));
    }

    #[test]
    fn es_dominates_var(a in 0.01f64..0.999) {
        prop_assert!(std_normal_es(level(a)).value > std_normal_var(level(a)).value);
    }
}
