use mixed_milnor::family::{build_family, eta_map, normalize_to_sphere, FamilyKind, FamilySpec};
use mixed_milnor::weights::polar_rotate;
use mixed_milnor::Complex64;
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)), n)
}

fn spec() -> impl Strategy<Value = FamilySpec> {
    let kind = prop_oneof![Just(FamilyKind::Brieskorn), Just(FamilyKind::TypeI), Just(FamilyKind::TypeII)];
    (kind, 2usize..=4).prop_flat_map(|(k, n)| {
        (prop::collection::vec(2u32..=6, n), prop::collection::vec(0u32..=2, n))
            .prop_map(move |(a, b)| FamilySpec::new(k, &a, &b))
    })
}

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_member_shares_the_polar_weights(s in spec(), phi in 0.0f64..6.3, seed in point(4)) {
        let fam = build_family(&s).unwrap();
        let z = &seed[..s.n()];
        let moved = polar_rotate(&fam.polar_weights, phi, z);
        let turn = Complex64::from_polar(1.0, phi * fam.polar_degree as f64);
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let fz = fam.value(t, z).unwrap();
            let diff = (fam.value(t, &moved).unwrap() - turn * fz).norm();
            prop_assert!(diff <= 1e-10 * (1.0 + fz.norm()));
        }
    }

    #[test]
    fn eta_is_equivariant(a in prop::collection::vec(2u32..=6, 2..=4), b in prop::collection::vec(0u32..=3, 4), phi in 0.0f64..6.3, seed in point(4)) {
        let n = a.len();
        let s = FamilySpec::new(FamilyKind::Brieskorn, &a, &b[..n]);
        let fam = build_family(&s).unwrap();
        let z = &seed[..n];
        let lhs = eta_map(&s, &polar_rotate(&fam.polar_weights, phi, z)).unwrap();
        let rhs = polar_rotate(&fam.polar_weights, phi, &eta_map(&s, z).unwrap());
        let d: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(p, q)| p - q).collect();
        prop_assert!(norm(&d) <= 1e-10);
        // and it carries mixed values to holomorphic ones
        let (mixed, holo) = (fam.value(0.0, z).unwrap(), fam.value(1.0, &eta_map(&s, z).unwrap()).unwrap());
        prop_assert!((mixed - holo).norm() <= 1e-10 * (1.0 + mixed.norm()));
    }

    #[test]
    fn sphere_normalization_is_idempotent(s in spec(), seed in point(4), radius in 0.2f64..3.0) {
        let fam = build_family(&s).unwrap();
        let z = &seed[..s.n()];
        prop_assume!(norm(z) > 1e-3);
        let once = normalize_to_sphere(&fam.polar_weights, z, radius).unwrap();
        let twice = normalize_to_sphere(&fam.polar_weights, &once, radius).unwrap();
        prop_assert!((norm(&once) - radius).abs() <= 1e-12 * radius);
        let d: Vec<Complex64> = once.iter().zip(&twice).map(|(p, q)| p - q).collect();
        prop_assert!(norm(&d) <= 1e-12 * radius.max(1.0));
    }

    #[test]
    fn t_derivative_is_the_endpoint_difference(s in spec(), t in 0.05f64..0.95, seed in point(4)) {
        let fam = build_family(&s).unwrap();
        let z = &seed[..s.n()];
        let h = 1e-4;
        let fd = (fam.value(t + h, z).unwrap() - fam.value(t - h, z).unwrap()) / (2.0 * h);
        let exact = fam.t_derivative(t, z).unwrap();
        prop_assert!((fd - exact).norm() <= 1e-8 * (1.0 + exact.norm()));
        let oracle = fam.endpoint_holomorphic.evaluate(z).unwrap() - fam.endpoint_mixed.evaluate(z).unwrap();
        prop_assert!((oracle - exact).norm() <= 1e-12 * (1.0 + exact.norm()));
    }
}

#[test]
fn loop_families_wrap_their_last_index() {
    for n in [2usize, 3] {
        let s = FamilySpec::new(FamilyKind::TypeII, &vec![2; n], &vec![1; n]);
        let fam = build_family(&s).unwrap();
        let last = fam.endpoint_mixed.monomials().iter().find(|m| m.nu[n - 1] == 3).unwrap();
        assert_eq!(last.nu[0], 1, "the last loop monomial carries z_1 when n = {n}");
        assert_eq!(s.successor(n - 1), Some(0));
    }
}

#[test]
fn chain_families_end_without_a_trailing_factor() {
    let s = FamilySpec::new(FamilyKind::TypeI, &[2, 3, 2], &[1, 0, 1]);
    let fam = build_family(&s).unwrap();
    for m in fam.endpoint_mixed.monomials() {
        let lead = (0..3).find(|&j| m.mu[j] > 0 || m.nu[j] > 1).unwrap();
        let trailing: u32 = m.nu.iter().enumerate().filter(|&(j, _)| j != lead).map(|(_, &e)| e).sum();
        assert_eq!(trailing, u32::from(lead < 2), "monomial {m:?}");
    }
}
