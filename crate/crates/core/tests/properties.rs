use proptest::prelude::*;
use rand::Rng;

use censored_gof::estimators::gupta_coefficients;
use censored_gof::harness::critical::upper_quantile;
use censored_gof::process_lab::durbin_covariance;
use censored_gof::rng::stream;
use censored_gof::statistics::{cf_statistic, cvm_statistic};
use censored_gof::transforms::{chen_balakrishnan, ms_transform, os_transform, UniformOrderStats};
use censored_gof::{transformation7, CensoredSample, CfWeight, Family, FamilySpec, TransformKind, ZScores};

fn uniforms(n: usize, r: usize, seed: u64) -> UniformOrderStats {
    let mut rng = stream(seed, "properties", 0);
    let mut u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    u.sort_by(f64::total_cmp);
    u.truncate(r);
    UniformOrderStats::censored(u, n).unwrap()
}

fn sizes() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=100).prop_flat_map(|n| (Just(n), 2..=n))
}

proptest! {
    #[test]
    fn transforms_are_increasing_in_unit_interval((n, r) in sizes(), seed in any::<u64>()) {
        let u = uniforms(n, r, seed);
        for kind in TransformKind::ALL {
            let out = kind.apply(&u).unwrap();
            let v = out.values();
            prop_assert_eq!(v.len(), r);
            prop_assert!(v.iter().all(|x| *x > 0.0 && *x < 1.0), "{} {:?}", kind, v);
            prop_assert!(v.windows(2).all(|w| w[0] < w[1]), "{} not increasing", kind);
        }
    }

    #[test]
    fn ms_and_os_fix_complete_samples(n in 2usize..=100, seed in any::<u64>()) {
        let u = uniforms(n, n, seed);
        for out in [ms_transform(&u).unwrap(), os_transform(&u).unwrap()] {
            for (a, b) in out.values().iter().zip(u.values()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn normal_scores_are_standardized((n, r) in sizes(), seed in any::<u64>()) {
        let (z, _) = chen_balakrishnan(&uniforms(n, r, seed)).unwrap();
        let v = z.values();
        let m = v.iter().sum::<f64>() / r as f64;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (r as f64 - 1.0);
        prop_assert!(m.abs() <= 1e-10);
        prop_assert!((var - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn statistic_bounds_and_symmetry(v in prop::collection::vec(-4.0f64..4.0, 2..40), a in 0.1f64..3.0) {
        prop_assume!(v.iter().any(|x| (x - v[0]).abs() > 1e-6));
        let z = ZScores::standardize(v.clone()).unwrap();
        let neg = ZScores::standardize(v.iter().map(|x| -x).collect()).unwrap();
        let r = v.len() as f64;
        let w = CfWeight::new(a).unwrap();
        prop_assert!(cvm_statistic(&z) >= 1.0 / (12.0 * r) - 1e-15);
        let c = cf_statistic(&z, w);
        prop_assert!(c >= -1e-9);
        prop_assert!((c - cf_statistic(&neg, w)).abs() <= 1e-10 * c.abs().max(1.0));
    }

    #[test]
    fn exponential_pipeline_is_scale_invariant(seed in any::<u64>(), c in 0.01f64..100.0, kind in 0usize..5) {
        let mut rng = stream(seed, "scale", 0);
        let s = FamilySpec::exponential(1.0).unwrap().sample_censored(30, 20, &mut rng).unwrap();
        let kind = TransformKind::ALL[kind];
        let a = transformation7(&s, Family::Exponential, kind).unwrap();
        let b = transformation7(&s.affine(c, 0.0).unwrap(), Family::Exponential, kind).unwrap();
        // last-bit differences in σ̂ are amplified where Φ⁻¹ meets values near 1
        for (x, y) in a.z.values().iter().zip(b.z.values()) {
            prop_assert!((x - y).abs() <= 1e-11, "{} vs {}", x, y);
        }
    }

    #[test]
    fn normal_pipeline_is_affine_invariant(seed in any::<u64>(), c in 0.01f64..100.0, d in -50.0f64..50.0, kind in 0usize..5) {
        let mut rng = stream(seed, "affine", 0);
        let s = FamilySpec::normal(0.0, 1.0).unwrap().sample_censored(40, 25, &mut rng).unwrap();
        let kind = TransformKind::ALL[kind];
        let a = transformation7(&s, Family::Normal, kind).unwrap();
        let b = transformation7(&s.affine(c, d).unwrap(), Family::Normal, kind).unwrap();
        for (x, y) in a.z.values().iter().zip(b.z.values()) {
            prop_assert!((x - y).abs() <= 1e-10, "{} vs {}", x, y);
        }
    }

    #[test]
    fn gupta_weights_sum((n, r) in (2usize..=200).prop_flat_map(|n| (Just(n), 2..=n))) {
        let (b, c) = gupta_coefficients(n, r);
        prop_assert!((b.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(c.iter().sum::<f64>().abs() <= 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf(p in 1e-6f64..(1.0 - 1e-6), which in 0usize..4, a in 0.5f64..5.0) {
        let spec = match which {
            0 => FamilySpec::exponential(a),
            1 => FamilySpec::gamma(a, 2.0),
            2 => FamilySpec::normal(1.0, a),
            _ => FamilySpec::weibull(a, 1.5),
        }
        .unwrap();
        let x = spec.quantile(p).unwrap();
        prop_assert!((spec.cdf(x) - p).abs() <= 1e-9 * p.max(1e-3), "{}: {} -> {}", spec, p, spec.cdf(x));
    }

    #[test]
    fn durbin_is_symmetric_with_nonnegative_diagonal(s in 0.001f64..0.999, t in 0.001f64..0.999) {
        prop_assert_eq!(durbin_covariance(s, t).unwrap(), durbin_covariance(t, s).unwrap());
        prop_assert!(durbin_covariance(t, t).unwrap() >= 0.0);
    }

    #[test]
    fn critical_values_nest(v in prop::collection::vec(0.0f64..10.0, 20..400)) {
        let mut v = v;
        v.sort_by(f64::total_cmp);
        let (c10, c05, c01) = (upper_quantile(&v, 0.1), upper_quantile(&v, 0.05), upper_quantile(&v, 0.01));
        prop_assert!(c10 <= c05 && c05 <= c01);
    }

    #[test]
    fn censoring_keeps_the_smallest(v in prop::collection::vec(-100.0f64..100.0, 2..60), k in 0usize..60) {
        let r = 2 + k % (v.len() - 1);
        let s = CensoredSample::censor(v.clone(), r).unwrap();
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assert_eq!(s.values(), &sorted[..r]);
        prop_assert_eq!(s.n(), v.len());
    }
}
