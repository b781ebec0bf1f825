use blaschke::sampling::{random_disk_point, random_finite};
use blaschke::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ZERO: C64 = C64::new(0.0, 0.0);

fn product(seed: u64, degree: usize) -> FiniteBlaschke {
    random_finite(&mut ChaCha8Rng::seed_from_u64(seed), degree, 0.8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frostman_shifts_stay_certified(seed in 0u64..1000, degree in 1usize..6, re in -0.7f64..0.7, im in -0.7f64..0.7) {
        let shifted = product(seed, degree).frostman_shift(C64::new(re, im)).unwrap();
        let report = certify_indestructible(&shifted, &default_grid(shifted.value(ZERO)), 1e-7).unwrap();
        prop_assert_eq!(report.verdict, CertificateVerdict::Certified);
    }

    #[test]
    fn case_one_on_random_pairs(seed in 0u64..1000, db in 1usize..5, dc in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_finite(&mut rng, db, 0.8);
        let c = random_finite(&mut rng, dc, 0.8);
        let a = random_disk_point(&mut rng, 0.9);
        let report = preimage_decomposition_check(&b, &c, a).unwrap();
        prop_assert!(report.matching_distance.unwrap() < 1e-7);
        prop_assert!(report.residual < 1e-8);
    }

    #[test]
    fn eq2_is_a_product_of_level_identities(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_finite(&mut rng, 3, 0.8);
        let c = random_finite(&mut rng, 2, 0.8);
        let a = random_disk_point(&mut rng, 0.9);
        let c0 = c.value(ZERO);
        let recomputed: f64 = b
            .preimages(a)
            .unwrap()
            .points
            .iter()
            .map(|xi| ((c0 - xi) / (1.0 - xi.conj() * c0)).norm())
            .product();
        let report = preimage_decomposition_check(&b, &c, a).unwrap();
        prop_assert!((recomputed - report.rhs).abs() < 1e-8);
    }
}

#[test]
fn explicit_sequences_agree_with_finite_products() {
    let b = product(5, 4);
    let rule = ZeroSequenceRule::ExplicitList { points: b.zeros().to_vec() };
    let t = TruncatedBlaschke::new(rule, 4, b.eta()).unwrap();
    for z in [C64::new(0.1, 0.2), C64::new(-0.7, 0.3)] {
        assert!((t.evaluate(z) - b.value(z)).norm() < 1e-14);
    }
    let exact = m2_residual(&b).unwrap();
    let approx = m2_residual(&t).unwrap();
    assert!(exact.exact && !approx.exact);
    assert!((exact.value - approx.value).abs() < 1e-12);
}

#[test]
fn maximal_products_pass_the_case_checks() {
    let f = solve_maximal(&CriticalSet::new(vec![C64::new(0.3, 0.2), C64::new(-0.4, 0.1)]).unwrap(), 1e-8).unwrap();
    let g = solve_maximal(&CriticalSet::new(vec![C64::new(0.0, -0.5)]).unwrap(), 1e-8).unwrap();
    let report = case2b_check(&f, &g).unwrap();
    assert!(report.residual < 1e-8);
    let shifted = g.frostman_shift(C64::new(0.2, 0.2)).unwrap();
    let report = case2a_check(&f, &shifted).unwrap();
    assert!(report.residual < 1e-8);
}

#[test]
fn models_round_trip_through_json() {
    let model = InnerModel::from(product(8, 3))
        .times(AtomicSingular::new(0.7, BoundaryPoint::from_angle(1.0)).unwrap())
        .unwrap()
        .post_composed(&MoebiusMap::frostman(C64::new(0.1, -0.3)).unwrap());
    let text = serde_json::to_string(&model).unwrap();
    let back: InnerModel = serde_json::from_str(&text).unwrap();
    assert_eq!(back, model);
    let z = C64::new(0.4, 0.4);
    assert_eq!(back.value(z, 1e-12).unwrap(), model.value(z, 1e-12).unwrap());
}

#[test]
fn singular_factor_is_destroyed_only_by_its_own_shift() {
    let schedule = [0.5, 0.9, 0.99, 0.999];
    let base = InnerModel::from(product(9, 2))
        .times(AtomicSingular::new(0.5, BoundaryPoint::from_angle(-1.0)).unwrap())
        .unwrap();
    let report = criteria_report(&base, &schedule, 1e-9).unwrap();
    assert_eq!(report.verdict, Verdict::NotBlaschke);
    assert!((report.singular_mass - 0.5).abs() < 1e-2);
    let finite = criteria_report(&InnerModel::from(product(9, 2)), &schedule, 1e-9).unwrap();
    assert_eq!(finite.verdict, Verdict::Blaschke);
}
