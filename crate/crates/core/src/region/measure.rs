use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::logic::{disjoint, subset};
use super::Region;
use crate::error::{Error, Result};
use crate::geometry::{fill_uniform_product, sphere_area, SpaceSpec};
use crate::rng;

/// Surface measure of a region, with a confidence half-width when it was
/// estimated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub half_width: f64,
    pub exact: bool,
}

impl MeasureEstimate {
    pub fn exact(value: f64) -> Self {
        MeasureEstimate {
            value,
            half_width: 0.0,
            exact: true,
        }
    }
}

/// ∫_0^θ sin^k t dt, by the reduction formula.
pub fn sin_power_integral(k: usize, theta: f64) -> f64 {
    match k {
        0 => theta,
        1 => 1.0 - theta.cos(),
        _ => {
            let kf = k as f64;
            -theta.sin().powi(k as i32 - 1) * theta.cos() / kf
                + (kf - 1.0) / kf * sin_power_integral(k - 2, theta)
        }
    }
}

/// Area of a cap of angular radius θ on S^n: μ(S^{n-1}) ∫_0^θ sin^{n-1} t dt.
pub fn cap_area(n: usize, theta: f64) -> f64 {
    if theta >= PI {
        return sphere_area(n);
    }
    sphere_area(n - 1) * sin_power_integral(n - 1, theta)
}

/// Area of {x : x·axis ≥ z} on S^n.
fn upper_area(n: usize, z: f64) -> f64 {
    cap_area(n, z.clamp(-1.0, 1.0).acos())
}

/// Exact measure where the tree structure proves it, `None` otherwise.
///
/// Unions must be provably pairwise disjoint (up to null sets), differences
/// must remove a provable subset or a disjoint set, and intersections must
/// be provably nested or disjoint. Nothing is inferred numerically.
pub fn exact_measure(region: &Region, space: &SpaceSpec) -> Result<Option<MeasureEstimate>> {
    region.validate(space)?;
    Ok(exact_in(region, &space.dims).map(MeasureEstimate::exact))
}

fn exact_in(region: &Region, dims: &[usize]) -> Option<f64> {
    let total = || dims.iter().map(|&n| sphere_area(n)).product::<f64>();
    match region {
        Region::Full => Some(total()),
        Region::Empty => Some(0.0),
        Region::Cap(c) => Some(cap_area(dims[0], c.theta)),
        Region::Hemisphere(_) => Some(sphere_area(dims[0]) / 2.0),
        Region::Band { lo, hi, .. } => Some(upper_area(dims[0], *lo) - upper_area(dims[0], *hi)),
        Region::AngleSum { lo, hi } => Some(total() * (hi - lo) / (2.0 * PI)),
        Region::Complement(r) => exact_in(r, dims).map(|m| total() - m),
        Region::Product(rs) => rs
            .iter()
            .zip(dims)
            .map(|(r, n)| exact_in(r, std::slice::from_ref(n)))
            .product(),
        // Set relations below are only proved on a single sphere.
        _ if dims.len() != 1 => None,
        Region::Union(rs) => {
            for (i, a) in rs.iter().enumerate() {
                if !rs[i + 1..].iter().all(|b| disjoint(a, b)) {
                    return None;
                }
            }
            rs.iter().map(|r| exact_in(r, dims)).sum()
        }
        Region::Intersection(rs) => {
            for (i, a) in rs.iter().enumerate() {
                if rs[i + 1..].iter().any(|b| disjoint(a, b)) {
                    return Some(0.0);
                }
            }
            let smallest = rs
                .iter()
                .find(|a| rs.iter().all(|b| subset(a, b)))?;
            exact_in(smallest, dims)
        }
        Region::Difference(a, b) => {
            let ma = exact_in(a, dims)?;
            if disjoint(a, b) {
                Some(ma)
            } else if subset(b, a) {
                Some(ma - exact_in(b, dims)?)
            } else {
                None
            }
        }
    }
}

/// Hit-or-miss estimate: (hit fraction)·μ(space), with the Hoeffding/DKW
/// half-width √(ln(2/δ)/(2N))·μ(space).
pub fn mc_measure(
    region: &Region,
    space: &SpaceSpec,
    samples: usize,
    seed: u64,
    delta: f64,
) -> Result<MeasureEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("mc_measure needs samples >= 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside (0, 1)")));
    }
    region.validate(space)?;
    let hits: u64 = rng::par_chunks(samples, seed, |rng, len| {
        let mut p = space.scratch_point();
        let mut hits = 0u64;
        for _ in 0..len {
            fill_uniform_product(rng, &mut p);
            hits += region.indicator(p.factors()) as u64;
        }
        vec![hits]
    })
    .into_iter()
    .sum();
    let total = space.measure();
    let n = samples as f64;
    Ok(MeasureEstimate {
        value: hits as f64 / n * total,
        half_width: ((2.0 / delta).ln() / (2.0 * n)).sqrt() * total,
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SpherePoint;

    fn north() -> SpherePoint {
        SpherePoint::north(2)
    }

    fn exact(r: &Region, space: &SpaceSpec) -> Option<f64> {
        exact_measure(r, space).unwrap().map(|m| m.value)
    }

    #[test]
    fn sin_power_integral_matches_quadrature() {
        for k in 0..7 {
            for &theta in &[0.3, 1.0, 2.0, PI] {
                let steps = 200_000;
                let h = theta / steps as f64;
                let simpson: f64 = (0..steps)
                    .map(|i| {
                        let a = i as f64 * h;
                        let f = |t: f64| t.sin().powi(k as i32);
                        h / 6.0 * (f(a) + 4.0 * f(a + h / 2.0) + f(a + h))
                    })
                    .sum();
                assert!((simpson - sin_power_integral(k, theta)).abs() < 1e-10, "k={k}");
            }
        }
    }

    #[test]
    fn leaf_measures() {
        let s2 = SpaceSpec::sphere(2);
        assert!((exact(&Region::Full, &s2).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!((exact(&Region::hemisphere(north()), &s2).unwrap() - 2.0 * PI).abs() < 1e-12);
        let cap = Region::cap(north(), PI / 3.0).unwrap();
        assert!((exact(&cap, &s2).unwrap() - PI).abs() < 1e-12);
        let band = Region::band(north(), -0.5, 0.25).unwrap();
        assert!((exact(&band, &s2).unwrap() - 2.0 * PI * 0.75).abs() < 1e-12);
        // S^1: arc of half-width θ has length 2θ
        let arc = Region::cap(SpherePoint::north(1), 0.4).unwrap();
        assert!((exact(&arc, &SpaceSpec::sphere(1)).unwrap() - 0.8).abs() < 1e-15);
        let torus = SpaceSpec::torus();
        let half = Region::angle_sum(0.0, PI).unwrap();
        assert!((exact(&half, &torus).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn complements_sum_to_the_space() {
        let s3 = SpaceSpec::sphere(3);
        let c = Region::cap(SpherePoint::north(3), 0.9).unwrap();
        let m = exact(&c, &s3).unwrap() + exact(&c.clone().complement(), &s3).unwrap();
        assert!((m - s3.measure()).abs() < 1e-12);
        let prod = SpaceSpec::new(vec![2, 1]).unwrap();
        let h = Region::Product(vec![Region::hemisphere(north()), Region::Full]);
        let m = exact(&h, &prod).unwrap() + exact(&h.complement(), &prod).unwrap();
        assert!((m - prod.measure()).abs() < 1e-12);
    }

    #[test]
    fn structured_combinations() {
        let s2 = SpaceSpec::sphere(2);
        let h = Region::hemisphere(north());
        let c_in = Region::cap(north(), PI / 8.0).unwrap();
        let c_out = Region::cap(north().antipode(), PI / 8.0).unwrap();
        let swapped = Region::Union(vec![h.clone().minus(c_in.clone()), c_out.clone()]);
        assert!((exact(&swapped, &s2).unwrap() - 2.0 * PI).abs() < 1e-12);
        let two = Region::Union(vec![c_in.clone(), c_out.clone()]);
        assert!((exact(&two, &s2).unwrap() - 2.0 * cap_area(2, PI / 8.0)).abs() < 1e-12);
        let overlapping = Region::Union(vec![c_in.clone(), h.clone()]);
        assert_eq!(exact(&overlapping, &s2), None);
        assert_eq!(exact(&Region::Intersection(vec![c_in.clone(), c_out]), &s2), Some(0.0));
        let nested = Region::Intersection(vec![h.clone(), c_in.clone()]);
        assert!((exact(&nested, &s2).unwrap() - cap_area(2, PI / 8.0)).abs() < 1e-15);
        let lune = h.minus(Region::hemisphere(SpherePoint::basis(2, 0)));
        assert_eq!(exact(&lune, &s2), None);
        let bands = Region::Union(vec![
            Region::band(north(), -1.0, -0.5).unwrap(),
            Region::band(north(), 0.0, 0.5).unwrap(),
        ]);
        assert!((exact(&bands, &s2).unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn mc_measure_examples() {
        let s2 = SpaceSpec::sphere(2);
        let e = mc_measure(&Region::Empty, &s2, 1000, 3, 1e-3).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(!e.exact);
        let h = mc_measure(&Region::hemisphere(north()), &s2, 1_000_000, 4, 1e-3).unwrap();
        assert!((h.value - 2.0 * PI).abs() <= h.half_width);
        assert!(mc_measure(&Region::Full, &s2, 0, 1, 0.1).is_err());
        assert!(mc_measure(&Region::Full, &s2, 10, 1, 1.0).is_err());
    }

    #[test]
    fn mc_measure_cap_large_sample() {
        let s2 = SpaceSpec::sphere(2);
        let cap = Region::cap(north(), PI / 3.0).unwrap();
        let m = mc_measure(&cap, &s2, 10_000_000, 77, 1e-3).unwrap();
        assert!((m.value - PI).abs() <= m.half_width, "{m:?}");
    }

    #[test]
    fn mc_measure_covers_exact_values() {
        let s2 = SpaceSpec::sphere(2);
        let fixtures = [
            Region::cap(north(), 1.1).unwrap(),
            Region::band(north(), -0.3, 0.6).unwrap(),
            Region::hemisphere(SpherePoint::basis(2, 1)),
        ];
        for r in &fixtures {
            let truth = exact(r, &s2).unwrap();
            let covered = (0..100)
                .filter(|&s| {
                    let m = mc_measure(r, &s2, 20_000, s, 1e-2).unwrap();
                    (m.value - truth).abs() <= m.half_width
                })
                .count();
            assert!(covered >= 99, "{r}: {covered}/100");
        }
    }
}
