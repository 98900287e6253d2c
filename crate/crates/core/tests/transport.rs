use mixed_milnor::family::{build_family, DeformationFamily, FamilyKind, FamilySpec, MilnorTubeSpec};
use mixed_milnor::isotopy::{integrate_between, transport_link, FlowKind, IsotopyOptions};
use mixed_milnor::link::{count_components, link_from_points, orbit_period, sample_link};
use mixed_milnor::real::distance;
use mixed_milnor::rng;
use mixed_milnor::transversal::sample_link_point;
use mixed_milnor::weights::polar_rotate;
use mixed_milnor::Complex64;
use proptest::prelude::*;

fn family(a: &[u32], b: &[u32]) -> DeformationFamily {
    build_family(&FamilySpec::new(FamilyKind::Brieskorn, a, b)).unwrap()
}

fn link_points(f: &DeformationFamily, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|k| {
            let mut s = rng::stream(seed, &format!("start:{k}"));
            sample_link_point(f, 0.0, 1.0, &mut s, 20).unwrap()
        })
        .collect()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn min_pairwise(points: &[&[Complex64]]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(distance(points[i], points[j]));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn isotopy_starts_at_identity_and_reverses(a1 in 2u32..=4, a2 in 2u32..=4, b1 in 0u32..=2, b2 in 0u32..=2, seed in any::<u64>()) {
        let f = family(&[a1, a2], &[b1, b2]);
        let tube = MilnorTubeSpec::new(1.0, 0.05).unwrap();
        let opts = IsotopyOptions::default();
        let z0 = link_points(&f, 1, seed).remove(0);
        let fwd = integrate_between(&f, &z0, 0.0, 1.0, 120, &tube, FlowKind::Sphere, &opts).unwrap();
        prop_assert_eq!(&fwd.samples[0].point, &z0);
        prop_assert!(!fwd.failed, "{:?}", fwd.failure);
        let back = integrate_between(&f, fwd.endpoint(), 1.0, 0.0, 120, &tube, FlowKind::Sphere, &opts).unwrap();
        prop_assert!(distance(back.endpoint(), &z0) <= 1e-5);
    }
}

#[test]
fn distinct_starts_never_collide() {
    for (a, b) in [([2, 3], [1, 0]), ([2, 4], [0, 1]), ([2, 2], [1, 1])] {
        let f = family(&a, &b);
        let starts = link_points(&f, 40, 5);
        let tube = MilnorTubeSpec::new(1.0, 0.05).unwrap();
        let moved = transport_link(&f, &starts, 1.0, 100, &tube, &IsotopyOptions::default()).unwrap();
        let s: Vec<&[Complex64]> = starts.iter().map(Vec::as_slice).collect();
        let e: Vec<&[Complex64]> = moved.traces.iter().map(|t| t.endpoint()).collect();
        assert!(min_pairwise(&e) >= 0.5 * min_pairwise(&s), "{a:?}, {b:?}");
    }
}

#[test]
fn sampled_links_lie_on_the_variety_and_close_up() {
    let f = family(&[3, 4], &[1, 1]);
    for t in [0.0, 0.4, 1.0] {
        let sample = sample_link(&f, t, 1.0, 24, 1).unwrap();
        for orbit in &sample.orbits {
            let z = &orbit.representative;
            assert!(f.value(t, z).unwrap().norm() <= 1e-8);
            let size: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((size - 1.0).abs() <= 1e-10);
            let period = orbit_period(&f.polar_weights, z);
            assert!(distance(&polar_rotate(&f.polar_weights, period, z), z) <= 1e-8);
        }
    }
}

#[test]
fn component_count_survives_sampling_and_transport() {
    let tube = MilnorTubeSpec::new(1.0, 0.05).unwrap();
    for (a, b) in [([3, 6], [1, 2]), ([4, 6], [2, 0])] {
        let f = family(&a, &b);
        let at0 = sample_link(&f, 0.0, 1.0, 32, 2).unwrap();
        let at1 = sample_link(&f, 1.0, 1.0, 32, 2).unwrap();
        let n0 = count_components(&at0).unwrap();
        assert_eq!(n0, count_components(&at1).unwrap(), "{a:?}, {b:?}");
        assert_eq!(n0, gcd(a[0], a[1]) as usize);
        let reps: Vec<Vec<Complex64>> = at0.orbits.iter().map(|o| o.representative.clone()).collect();
        let moved = transport_link(&f, &reps, 1.0, 100, &tube, &IsotopyOptions::default()).unwrap();
        let ends: Vec<Vec<Complex64>> = moved.traces.iter().map(|t| t.endpoint().to_vec()).collect();
        assert_eq!(count_components(&link_from_points(&f, 1.0, 1.0, &ends).unwrap()).unwrap(), n0);
    }
}
