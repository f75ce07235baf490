use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vtcp_core::classes::{
    check_pair_class, diag_combination, semi_positive_witness, verify_certificate, violation_functional,
    Certificate, SearchConfig, TensorClass, TensorPair,
};
use vtcp_core::workbench::{generate_pair, registry, GenKind};
use vtcp_core::SymTensor;

fn quick() -> SearchConfig {
    SearchConfig {
        num_starts: 40,
        ..Default::default()
    }
}

fn pairs() -> Vec<TensorPair> {
    let mut out: Vec<TensorPair> = registry::EXAMPLE_IDS.iter().map(|id| registry::pair(id).unwrap()).collect();
    for seed in 0..8 {
        out.push(generate_pair(GenKind::RandomDensePair, 3 + seed as usize % 2, 2, seed, None).unwrap());
    }
    out
}

#[test]
fn vr0_certificates_refute_vp() {
    let cfg = quick();
    for pair in pairs() {
        let v = check_pair_class(&pair, TensorClass::Vr0, &cfg).unwrap();
        if let Some(c) = v.certificate() {
            assert!(verify_certificate(&pair, TensorClass::Vp, c, &cfg).unwrap(), "{c:?}");
        }
    }
}

#[test]
fn sign_constrained_vp_certificates_refute_vp1() {
    let cfg = quick();
    let mut seen = 0;
    for pair in pairs() {
        let v = check_pair_class(&pair, TensorClass::Vp, &cfg).unwrap();
        if let Some(Certificate::Vector { x }) = v.certificate() {
            if x.iter().all(|&t| t >= 0.0) || x.iter().all(|&t| t <= 0.0) {
                let c = Certificate::Vector { x: x.clone() };
                assert!(verify_certificate(&pair, TensorClass::Vp1, &c, &cfg).unwrap(), "{x:?}");
                seen += 1;
            }
        }
    }
    assert!(seen > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antipodal_strong_vp_refutation_gives_vp2_refutation(seed in any::<u64>()) {
        let cfg = SearchConfig::default();
        let pair = generate_pair(GenKind::RandomDensePair, 4, 2, seed, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        let strong = Certificate::VectorPair { x: x.clone(), y };
        if verify_certificate(&pair, TensorClass::StrongVp, &strong, &cfg).unwrap() {
            let z = SymTensor::outer_power(&x, 3).unwrap().scaled(2.0);
            let c = Certificate::Symmetric { z };
            prop_assert!(verify_certificate(&pair, TensorClass::Vp2, &c, &cfg).unwrap());
        }
    }

    #[test]
    fn odd_order_pairs_are_never_strong_vp(seed in any::<u64>(), dim in 1usize..=3) {
        let pair = generate_pair(GenKind::RandomDensePair, 3, dim, seed, None).unwrap();
        let v = check_pair_class(&pair, TensorClass::StrongVp, &quick()).unwrap();
        match v.certificate() {
            Some(Certificate::VectorPair { x, y }) => {
                prop_assert!(x.iter().zip(y).all(|(a, b)| *a == -*b));
                prop_assert!(violation_functional(&pair, TensorClass::StrongVp, v.certificate().unwrap()).unwrap() <= 0.0);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn semi_positive_witness_survives_diagonal_combinations(seed in any::<u64>(), dim in 2usize..=3) {
        let pair = generate_pair(GenKind::ZSemipositivePair, 3, dim, seed, None).unwrap();
        let v = semi_positive_witness(&pair, &quick()).unwrap();
        let w = v.witness().expect("generated pairs are semi-positive").to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let d1: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..=2.0)).collect();
            let d2: Vec<f64> = d1.iter().map(|&a| if a < 0.5 { rng.random_range(0.1..=2.0) } else { rng.random_range(0.0..=2.0) }).collect();
            let c = diag_combination(&d1, &d2, &pair).unwrap();
            prop_assert!(c.power_apply(&w).unwrap().iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn identical_configs_give_identical_verdicts(seed in any::<u64>(), class_ix in 0usize..6) {
        let pair = generate_pair(GenKind::RandomDensePair, 4, 2, seed, None).unwrap();
        let class = TensorClass::PAIR_UNIVERSAL[class_ix];
        let cfg = SearchConfig { seed, num_starts: 20, ..Default::default() };
        prop_assert_eq!(
            check_pair_class(&pair, class, &cfg).unwrap(),
            check_pair_class(&pair, class, &cfg).unwrap()
        );
    }
}

#[test]
fn registered_pairs_report_deterministically() {
    let cfg = quick();
    for pair in pairs().iter().take(9) {
        for class in TensorClass::PAIR_UNIVERSAL {
            assert_eq!(
                check_pair_class(pair, class, &cfg).unwrap(),
                check_pair_class(pair, class, &cfg).unwrap()
            );
        }
    }
}
