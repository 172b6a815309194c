//! Randomized invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use poisson_deconv::circular::{synthesize, weighted_inner, weighted_norm_sq, FourierVector, WeightSequence};
use poisson_deconv::estimate::{series_estimator, EmpiricalCoeffs};
use poisson_deconv::models::{make_family, FamilySpec, Role};
use poisson_deconv::select::{
    contrast, contrast_values, exact_full_cap, full_adaptive, oracle_rates, partial_adaptive, proof_indices,
    ConstantsMode,
};
use poisson_deconv::simulate::{merge, split, Dataset, PointPattern};

fn hermitian_vec(max: usize) -> impl Strategy<Value = FourierVector> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..=max + 1).prop_map(|v| {
        let c: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        FourierVector::hermitian(&c)
    })
}

fn pattern() -> impl Strategy<Value = PointPattern> {
    prop::collection::vec(0.0f64..1.0, 0..40).prop_map(|p| PointPattern::new(p).unwrap())
}

fn weights() -> impl Strategy<Value = WeightSequence> {
    prop_oneof![
        Just(WeightSequence::Flat),
        (0.0f64..2.0).prop_map(WeightSequence::pol_growth),
        (0.0f64..1.0).prop_map(WeightSequence::exp_growth),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_vectors_synthesize_real(v in hermitian_vec(12), t in 0.0f64..1.0) {
        prop_assert!(v.is_real());
        prop_assert!(v.hermitian_defect() == 0.0);
        prop_assert!(synthesize(&v, t).is_ok());
    }

    #[test]
    fn weighted_norm_is_the_self_inner_product(v in hermitian_vec(10), w in weights()) {
        let n = weighted_norm_sq(&v, &w);
        let i = weighted_inner(&v, &v, &w);
        prop_assert!(n >= 0.0);
        prop_assert!((n - i.re).abs() <= 1e-9 * n.max(1.0));
        prop_assert!(i.im.abs() <= 1e-9 * n.max(1.0));
    }

    #[test]
    fn coefficient_csv_round_trip(v in hermitian_vec(8)) {
        let mut buf = Vec::new();
        v.write_csv(&mut buf).unwrap();
        let back = FourierVector::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn split_then_merge_restores_the_pattern(p in pattern(), n in 1usize..6, seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let parts = split(&p, n, &mut rng).unwrap();
        prop_assert_eq!(parts.len(), n);
        prop_assert_eq!(merge(&parts), p);
    }

    #[test]
    fn estimator_is_hermitian_and_thresholded(
        procs in prop::collection::vec(pattern(), 1..5),
        errors in prop::collection::vec(0.0f64..1.0, 1..30),
        k in 0usize..6,
    ) {
        let emp = EmpiricalCoeffs::new(&procs, &errors, 6).unwrap();
        prop_assert!(emp.ellhat0() >= 0.0);
        let m = errors.len() as f64;
        for j in 0..=6i64 {
            prop_assert_eq!(emp.flag(j), emp.fhat.coeff(j).norm_sqr() >= 1.0 / m);
            prop_assert_eq!(emp.flag(j), emp.flag(-j));
        }
        let est = series_estimator(&emp, k).unwrap();
        prop_assert!(est.is_real());
        for j in -(k as i64)..=k as i64 {
            if !emp.flag(j) {
                prop_assert_eq!(est.coeff(j), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn contrast_identity_and_selection_bounds(
        n in 1usize..30,
        m in 1usize..30,
        seed in 0u64..1000,
        w in weights(),
    ) {
        let lambda = make_family(Role::Intensity, &FamilySpec::Cosine { tau: Some(6.0), beta: 0.7 }).unwrap();
        let f = make_family(
            Role::ErrorDensity,
            &FamilySpec::PoissonKernel { rate: Some(0.5), decay: None, tau: None },
        ).unwrap();
        let ds = Dataset::simulate(&lambda, &f, n, m, seed, 0, 0).unwrap();
        let window = n.min(m);
        let emp = EmpiricalCoeffs::from_dataset(&ds, window).unwrap();
        let reference = series_estimator(&emp, window).unwrap();
        let values = contrast_values(&emp, &w, window).unwrap();
        for (k, v) in values.iter().enumerate() {
            let t = series_estimator(&emp, k).unwrap();
            prop_assert!((contrast(&t, &reference, &w) - v).abs() < 1e-10 * v.abs().max(1.0));
        }
        for mode in [ConstantsMode::Paper, ConstantsMode::Practical(0.002)] {
            for sel in [
                partial_adaptive(&emp, &w, &WeightSequence::exp_decay(0.5), 1.0, mode).unwrap(),
                full_adaptive(&emp, &w, mode).unwrap(),
            ] {
                prop_assert!(sel.k_selected <= sel.k_cap && sel.k_cap <= n.min(m));
                prop_assert_eq!(sel.contrast.len(), sel.k_cap + 1);
                prop_assert_eq!(sel.penalty.len(), sel.k_cap + 1);
            }
        }
    }

    #[test]
    fn oracle_dimension_ignores_m(n in 1usize..100_000, m1 in 1usize..100_000, m2 in 1usize..100_000) {
        let omega = WeightSequence::Flat;
        let gamma = WeightSequence::pol_growth(1.0);
        let alpha = WeightSequence::pol_decay(1.0);
        let a = oracle_rates(&omega, &gamma, &alpha, n, m1, 100_000).unwrap();
        let b = oracle_rates(&omega, &gamma, &alpha, n, m2, 100_000).unwrap();
        prop_assert_eq!(a.k_star, b.k_star);
        prop_assert_eq!(a.psi, b.psi);
    }

    #[test]
    fn exact_cap_is_nested(n in 1usize..5000, m in 1usize..100_000) {
        let f = make_family(
            Role::ErrorDensity,
            &FamilySpec::PoissonKernel { rate: Some(0.7), decay: None, tau: None },
        ).unwrap();
        let omega = WeightSequence::Flat;
        let p = proof_indices(&omega, &WeightSequence::exp_decay(0.7), 1.0, n, m, Some(&f)).unwrap();
        let cap = exact_full_cap(&omega, &f, n, m);
        prop_assert!(p.k_minus <= cap && cap <= p.k_plus, "{:?} vs {}", p, cap);
    }
}
