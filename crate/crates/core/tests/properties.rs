use std::collections::BTreeMap;

use envlab_core::benefit::{
    exchange_condition, expected_benefit, expected_benefit_continuous, expected_benefit_discrete,
    find_exchange_roots, strategy, Bounds, Decision, Region, RootScan,
};
use envlab_core::density::{catalog_lookup, ContinuousDensity, Density, DensitySpec, DiscreteDensity};
use envlab_core::dyadic::Dyadic;
use envlab_core::host::{allocate, benefit_identity, Allocation, Prime, Process};
use envlab_core::oracle::{enumerate_conditional_benefit, random_dyadic_table};
use envlab_core::rng::host_rng;
use proptest::prelude::*;

fn continuous_catalog() -> Vec<ContinuousDensity> {
    let mut v = vec![
        ContinuousDensity::uniform01(),
        ContinuousDensity::rayleigh_half(),
        ContinuousDensity::broome_continuous(),
        ContinuousDensity::extreme_values(),
        ContinuousDensity::improper_exp(),
    ];
    for n in 1..=4 {
        v.push(ContinuousDensity::power_law(n).unwrap());
    }
    v
}

fn discrete_catalog() -> Vec<DiscreteDensity> {
    vec![DiscreteDensity::broome(), DiscreteDensity::recurrence(64)]
}

fn process() -> impl Strategy<Value = Process> {
    prop::sample::select(Process::ALL.to_vec())
}

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(Prime::BOTH.to_vec())
}

fn allocation() -> impl Strategy<Value = Allocation> {
    prop::sample::select(Allocation::BOTH.to_vec())
}

fn assert_sign_agrees(decision: Decision, expected: f64, numerator: f64) {
    match decision {
        Decision::Switch => assert!(numerator > 0.0),
        Decision::Stay => assert!(numerator < 0.0),
        Decision::Indifferent => assert!(expected.abs() <= 1e-12),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn strategy_sign_matches_exchange_condition_continuous(
        idx in 0usize..9, p in process(), log_y in -4.0f64..7.0,
    ) {
        let d: Density = continuous_catalog()[idx].clone().into();
        let y = log_y.exp();
        let s = strategy(&d, p, &Bounds::none(), y).unwrap();
        prop_assert_eq!(s.region, Region::Formula);
        assert_sign_agrees(s.decision, s.value, exchange_condition(&d, p, y));
    }

    #[test]
    fn strategy_sign_matches_exchange_condition_discrete(
        idx in 0usize..2, p in process(), k in -3i32..40,
    ) {
        let d: Density = discrete_catalog()[idx].clone().into();
        let y = Dyadic::pow2(k).to_f64();
        let s = strategy(&d, p, &Bounds::none(), y).unwrap();
        assert_sign_agrees(s.decision, s.value, exchange_condition(&d, p, y));
    }

    #[test]
    fn benefit_identity_is_exact(x1 in 1e-300f64..1e300, w2 in prime(), w3 in allocation()) {
        let play = allocate(x1, w2, w3).unwrap();
        prop_assert_eq!(play.b, benefit_identity(x1, w2, w3));
        prop_assert_eq!(play.b, play.z - play.y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn scaling_is_invisible(idx in 0usize..9, p in process(), log_y in -3.0f64..6.0, log_c in -5.0f64..5.0) {
        let base = continuous_catalog()[idx].clone();
        let scaled = base.scaled(log_c.exp()).unwrap();
        let y = log_y.exp();
        let a = expected_benefit_continuous(&base, p, y);
        let b = expected_benefit_continuous(&scaled, p, y);
        prop_assert_eq!(a.decision, b.decision);
        prop_assert_eq!(a.attainable, b.attainable);
        for (u, v) in [
            (a.numerator, b.numerator),
            (a.denominator, b.denominator),
            (a.expected_benefit, b.expected_benefit),
        ] {
            prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(v.abs()).max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn allocate_second_criterion_continuous(idx in 0usize..9, log_y in -4.0f64..7.0) {
        let d = continuous_catalog()[idx].clone();
        let y = log_y.exp();
        let r = expected_benefit_continuous(&d, Process::PrimeSecondThenAllocate, y);
        let criterion = 8.0 * d.pdf(2.0 * y) > d.pdf(y / 2.0);
        prop_assert_eq!(r.decision == Decision::Switch, criterion);
    }

    #[test]
    fn allocate_second_criterion_discrete(idx in 0usize..2, k in -3i32..40) {
        let d = discrete_catalog()[idx].clone();
        let y = Dyadic::pow2(k);
        let r = expected_benefit_discrete(&d, Process::PrimeSecondThenAllocate, y);
        let two = num_rational::BigRational::from_integer(2.into());
        let criterion = two * d.mass(&y.double()) > d.mass(&y.half());
        prop_assert_eq!(r.decision == Decision::Switch, criterion);
    }

    #[test]
    fn allocate_first_is_a_quarter(idx in 0usize..9, log_y in -4.0f64..7.0) {
        let d: Density = continuous_catalog()[idx].clone().into();
        let y = log_y.exp();
        prop_assert!((expected_benefit(&d, Process::AllocateFirstThenPrime, y).expected_benefit - y / 4.0).abs() <= 1e-12 * y);
    }

    #[test]
    fn enumeration_matches_closed_forms(seed in any::<u64>(), p in process()) {
        let d = random_dyadic_table(&mut host_rng(seed));
        for (x, _) in d.enumerate(usize::MAX) {
            for y in [x.half(), x, x.double()] {
                let closed = expected_benefit_discrete(&d, p, y);
                let oracle = enumerate_conditional_benefit(&d, p, y);
                prop_assert_eq!(closed.attainable, oracle.attainable);
                prop_assert_eq!(closed.decision, oracle.decision);
                prop_assert!((closed.expected_benefit - oracle.expected_benefit).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn spec_roundtrip_preserves_density(
        idx in 0usize..9, log_c in -3.0f64..3.0, probes in prop::collection::vec(-4.0f64..7.0, 100),
    ) {
        let d: Density = continuous_catalog()[idx].scaled(log_c.exp()).unwrap().into();
        let again = DensitySpec::from_json(&d.to_spec().to_json()).unwrap().build().unwrap();
        for t in probes {
            let x = t.exp();
            prop_assert_eq!(d.weight_at(x), again.weight_at(x));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn roots_are_certified(idx in 0usize..5, p in process(), lo in 0.05f64..0.5, width in 0.5f64..3.0) {
        let d: Density = continuous_catalog()[idx].clone().into();
        let tol = 1e-9;
        let roots = find_exchange_roots(&d, p, lo, lo + width, RootScan::with_tol(tol)).unwrap();
        for r in roots {
            let e = |y| exchange_condition(&d, p, y);
            prop_assert!(e(r.y - tol) * e(r.y + tol) <= 0.0, "root {} not bracketed", r.y);
            prop_assert_eq!(r.residual, e(r.y).abs());
        }
    }
}

#[test]
fn table_spec_roundtrip() {
    let mut rng = host_rng(17);
    for _ in 0..20 {
        let d: Density = random_dyadic_table(&mut rng).into();
        let again = DensitySpec::from_json(&d.to_spec().to_json()).unwrap().build().unwrap();
        for k in -8..12 {
            for m in [1.0, 3.0, 5.0] {
                let x = m * 2f64.powi(k);
                assert_eq!(d.weight_at(x), again.weight_at(x));
            }
        }
    }
}

#[test]
fn catalog_params_reject_unknowns() {
    let mut p = BTreeMap::new();
    p.insert("nope".to_string(), 1.0);
    assert!(catalog_lookup("uniform01", &p).is_err());
}
