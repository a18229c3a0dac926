use proptest::prelude::*;

use levyk::convolution::{classify_f, conv_power, poisson_cutoff, FClass, TruncatedMeasure};
use levyk::density::density_fourier;
use levyk::exponent::ExponentTable;
use levyk::grid::Grid1;
use levyk::profiles::{KappaClass, LevyModel, ProfileSpec};
use levyk::verdict::{GrowthRule, RatioPoint, Toward, Verdict};

fn verdict() -> impl Strategy<Value = Verdict> {
    prop_oneof![Just(Verdict::Pass), Just(Verdict::Fail), Just(Verdict::Inconclusive)]
}

fn model(alpha1: f64, m: f64, beta: f64) -> LevyModel {
    let spec = ProfileSpec {
        kappa: KappaClass::PolyLog { alpha1, alpha2: 0.0 },
        m,
        beta,
        delta: 0.0,
        c: None,
    };
    LevyModel::symmetric(1, spec).unwrap()
}

proptest! {
    #[test]
    fn verdict_and_is_a_lattice_meet(a in verdict(), b in verdict(), c in verdict()) {
        prop_assert_eq!(a.and(b), b.and(a));
        prop_assert_eq!(a.and(b).and(c), a.and(b.and(c)));
        prop_assert_eq!(a.and(a), a);
        prop_assert_eq!(a.and(Verdict::Pass), a);
        prop_assert_eq!(a.and(Verdict::Fail), Verdict::Fail);
    }

    #[test]
    fn growth_rule_ignores_ratio_scale(
        slope in -1.0f64..1.0,
        scale in 1e-6f64..1e6,
        n in 4usize..40,
    ) {
        let pts: Vec<RatioPoint> = (0..n)
            .map(|k| {
                let x = 10f64.powf(k as f64 * 3.0 / n as f64);
                RatioPoint { x, ratio: x.powf(slope) }
            })
            .collect();
        let scaled: Vec<RatioPoint> = pts.iter().map(|p| RatioPoint { x: p.x, ratio: scale * p.ratio }).collect();
        for toward in [Toward::Large, Toward::Small] {
            let rule = GrowthRule::power(toward);
            prop_assert_eq!(rule.judge(&pts).0, rule.judge(&scaled).0);
        }
    }

    #[test]
    fn pure_power_ratios_are_judged_by_slope(slope in 0.0f64..1.0) {
        let pts: Vec<RatioPoint> = (0..30)
            .map(|k| {
                let x = 10f64.powf(k as f64 / 10.0);
                RatioPoint { x, ratio: x.powf(slope) }
            })
            .collect();
        let v = GrowthRule::power(Toward::Large).judge(&pts).0;
        if slope < 0.14 {
            prop_assert_eq!(v, Verdict::Pass);
        }
        if slope > 0.26 {
            prop_assert_eq!(v, Verdict::Fail);
        }
    }

    #[test]
    fn classification_matches_parameter_regions(
        d in 1usize..4,
        m in prop_oneof![Just(0.0), 0.01f64..5.0],
        beta in prop_oneof![Just(1.0), 0.05f64..3.0],
        delta in 0.0f64..6.0,
    ) {
        let c = classify_f(d, m, beta, delta).unwrap();
        let dd = d as f64;
        let holds = if m == 0.0 {
            delta > dd
        } else if beta < 1.0 {
            true
        } else if beta > 1.0 {
            false
        } else {
            delta > (dd + 1.0) / 2.0
        };
        prop_assert_eq!(matches!(c, FClass::Holds(_)), holds);
        prop_assert_eq!(c.verdict(), if holds { Verdict::Pass } else { Verdict::Fail });
    }

    #[test]
    fn poisson_cutoff_leftover_is_within_tolerance(mu in 0.0f64..50.0, e in 2i32..12) {
        let tol = 10f64.powi(-e);
        let (n, left) = poisson_cutoff(mu, tol, 1000).unwrap();
        prop_assert!(left <= tol);
        prop_assert!(left >= 0.0);
        if n > 0 {
            prop_assert!(poisson_cutoff(mu, tol, n - 1).is_err());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn psi_is_nondecreasing_and_dominates_re_phi(
        alpha1 in 0.2f64..1.9,
        m in 0.1f64..3.0,
        beta in 0.3f64..2.0,
    ) {
        let table = ExponentTable::with_range(&model(alpha1, m, beta), 1e-2, 1e4).unwrap();
        let psi = table.psi_values();
        prop_assert!(psi.windows(2).all(|w| w[1] >= w[0]));
        for (p, s) in table.re_phi_values().iter().zip(psi) {
            prop_assert!(*p >= 0.0);
            prop_assert!(*s >= *p * (1.0 - 1e-12));
        }
    }

    #[test]
    fn fourier_density_is_even_nonnegative_and_normalised(
        alpha1 in 0.8f64..1.9,
        t in 0.05f64..1.0,
    ) {
        let lm = model(alpha1, 1.0, 1.0);
        let table = ExponentTable::for_model(&lm).unwrap();
        let h = table.h_of_t(t).unwrap().h;
        let grid = Grid1::covering(h / 8.0, 40.0f64.max(200.0 * h)).unwrap();
        let p = density_fourier(&lm, &table, t, &grid).unwrap();
        let n = p.values.len();
        for j in 0..n {
            prop_assert!(p.values[j] >= 0.0);
            let (a, b) = (p.values[j], p.values[n - 1 - j]);
            prop_assert!((a - b).abs() <= 1e-9 * p.values[grid.half]);
        }
        prop_assert!((p.mass() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn convolution_powers_multiply_mass(
        m in 0.5f64..3.0,
        r in 0.5f64..2.0,
        n in 1usize..4,
    ) {
        let lm = model(1.0, m, 1.0);
        let mu = TruncatedMeasure::new(&lm, r, Grid1::covering(0.02, 60.0).unwrap()).unwrap();
        let c = conv_power(&mu, n).unwrap();
        let expected = mu.mass().powi(n as i32);
        prop_assert!((c.mass() + c.leaked - expected).abs() <= 1e-6 * expected);
        prop_assert!(c.values.iter().all(|v| *v >= 0.0));
    }
}
