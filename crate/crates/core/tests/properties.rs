use proptest::prelude::*;

use sphere_dist::distribution::{estimate_cross, estimate_self, EstimateOptions};
use sphere_dist::fixtures::{self, NAMES};
use sphere_dist::region::{exact_measure, sample_region, DEFAULT_REJECTION_FACTOR};
use sphere_dist::verify::{decomposition_check, dkw_tolerance, VerifyParams};
use sphere_dist::{sample_uniform, Metric, Region, Rotation, SpaceSpec, SpherePoint};

#[test]
fn z_coordinate_of_uniform_points_is_uniform() {
    let n = 1_000_000;
    let mut z: Vec<f64> = sample_uniform(&SpaceSpec::sphere(2), n, 99)
        .iter()
        .map(|p| p.factors()[0].coords()[2])
        .collect();
    z.sort_by(f64::total_cmp);
    let sup = z
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = (v + 1.0) / 2.0;
            (f - i as f64 / n as f64).abs().max((f - (i + 1) as f64 / n as f64).abs())
        })
        .fold(0.0, f64::max);
    assert!(sup <= dkw_tolerance(n, 1e-3), "{sup}");
}

#[test]
fn complements_flip_membership_for_every_fixture() {
    for name in NAMES {
        let p = fixtures::by_name(name).unwrap();
        for x in sample_uniform(&p.space, 100_000, 5) {
            assert_ne!(
                p.a.contains(&p.space, &x).unwrap(),
                p.abar.contains(&p.space, &x).unwrap(),
                "{name}"
            );
        }
    }
}

#[test]
fn decomposition_identity_for_every_fixture() {
    let pairs = 200_000;
    let params = VerifyParams::new(pairs, 0);
    let o = EstimateOptions::default();
    for (k, name) in NAMES.iter().enumerate() {
        let p = fixtures::by_name(name).unwrap();
        let s = 10 * k as u64;
        let d_a = estimate_self(&p.a, &p.space, p.metric, pairs, s, &o).unwrap();
        let d_c = estimate_self(&p.abar, &p.space, p.metric, pairs, s + 1, &o).unwrap();
        let d_x = estimate_cross(&p.a, &p.abar, &p.space, p.metric, pairs, s + 2, &o).unwrap();
        let d_f = estimate_self(&Region::Full, &p.space, p.metric, pairs, s + 3, &o).unwrap();
        let c = decomposition_check(&d_a, &d_c, &d_x, &d_f, &params).unwrap();
        assert!(c.pass, "{name}: {c:?}");
        // masses add up exactly: μ(A)² + μ(Ā)² + 2μ(A)μ(Ā) = μ(space)²
        let total = d_a.mass_scale() + d_c.mass_scale() + d_x.mass_scale();
        assert!((total - d_f.mass_scale()).abs() < 1e-9 * d_f.mass_scale(), "{name}");
    }
}

#[test]
fn estimates_are_rotation_invariant_in_law() {
    // KS between a fixture and its rotated image stays within 2·dkw
    let pairs = 200_000;
    let tol = 2.0 * dkw_tolerance(pairs, 1e-3);
    let o = EstimateOptions::default();
    for name in ["cap-area-pi", "two-caps-area-pi", "four-bands"] {
        let p = fixtures::by_name(name).unwrap();
        let q = p.rotated(&[Rotation::random(2, 17)]).unwrap();
        let da = estimate_self(&p.a, &p.space, p.metric, pairs, 1, &o).unwrap();
        let db = estimate_self(&q.a, &q.space, q.metric, pairs, 2, &o).unwrap();
        let ks = sphere_dist::verify::ks_two_sample(&da, &db).unwrap();
        assert!(ks <= tol, "{name}: {ks}");
        let ma = exact_measure(&p.a, &p.space).unwrap().unwrap().value;
        let mb = exact_measure(&q.a, &q.space).unwrap().unwrap().value;
        assert!((ma - mb).abs() < 1e-12);
    }
}

fn region() -> impl Strategy<Value = Region> {
    let axis = prop::collection::vec(-1.0f64..1.0, 3)
        .prop_filter("nonzero", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-2)
        .prop_map(|v| SpherePoint::normalized(v).unwrap());
    prop_oneof![
        (axis.clone(), 0.3f64..3.0).prop_map(|(a, t)| Region::cap(a, t).unwrap()),
        axis.clone().prop_map(Region::hemisphere),
        (axis.clone(), -1.0f64..-0.2, 0.2f64..1.0).prop_map(|(a, lo, hi)| Region::band(a, lo, hi).unwrap()),
        (axis.clone(), axis).prop_map(|(a, b)| Region::Union(vec![
            Region::cap(a, 0.8).unwrap(),
            Region::hemisphere(b).complement(),
        ])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cdfs_are_nondecreasing(r in region(), seed in any::<u64>(), angular in any::<bool>()) {
        let metric = if angular { Metric::Angular } else { Metric::Euclidean };
        let o = EstimateOptions { measure_samples: 20_000, ..EstimateOptions::default() };
        let d = estimate_self(&r, &SpaceSpec::sphere(2), metric, 2000, seed, &o).unwrap();
        let mut prev = 0.0;
        for i in 0..=200 {
            let c = d.cdf(d.diameter() * i as f64 / 200.0);
            prop_assert!(c >= prev);
            prev = c;
        }
        prop_assert_eq!(prev, d.mass_scale());
    }

    #[test]
    fn sampled_points_belong_to_the_region(r in region(), seed in any::<u64>()) {
        let s2 = SpaceSpec::sphere(2);
        let pts = sample_region(&r, &s2, 3000, seed, DEFAULT_REJECTION_FACTOR).unwrap();
        prop_assert_eq!(pts.len(), 3000);
        for p in &pts {
            prop_assert!(r.contains(&s2, p).unwrap());
        }
    }
}
