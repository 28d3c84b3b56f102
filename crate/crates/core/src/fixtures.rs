//! Named partitions (A, Ā) used by the verifiers, the CLI and the tests.

use std::f64::consts::PI;

use crate::geometry::{Combiner, Metric, Rotation, SpaceSpec, SpherePoint};
use crate::region::Region;

/// A region together with its complement in a space, and the metric used to
/// compare distances.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub name: String,
    pub space: SpaceSpec,
    pub metric: Metric,
    pub a: Region,
    pub abar: Region,
}

impl Partition {
    pub fn new(name: impl Into<String>, space: SpaceSpec, metric: Metric, a: Region) -> Self {
        let abar = a.clone().complement();
        Partition {
            name: name.into(),
            space,
            metric,
            a,
            abar,
        }
    }

    /// The same partition with A and Ā exchanged.
    pub fn swapped(&self) -> Self {
        Partition {
            name: format!("{}-swapped", self.name),
            space: self.space.clone(),
            metric: self.metric,
            a: self.abar.clone(),
            abar: self.a.clone(),
        }
    }

    /// Image under per-factor orthogonal maps.
    pub fn rotated(&self, rotations: &[Rotation]) -> crate::Result<Self> {
        Ok(Partition {
            name: format!("{}-rotated", self.name),
            space: self.space.clone(),
            metric: self.metric,
            a: self.a.rotated(rotations)?,
            abar: self.abar.rotated(rotations)?,
        })
    }

    pub fn describe(&self) -> String {
        format!("{} on {} [{}]: A = {}", self.name, self.space, self.metric, self.a)
    }
}

fn north() -> SpherePoint {
    SpherePoint::north(2)
}

/// Upper and lower hemispheres of S^2.
pub fn hemispheres() -> Partition {
    Partition::new(
        "hemispheres",
        SpaceSpec::sphere(2),
        Metric::Euclidean,
        Region::hemisphere(north()),
    )
}

/// S^2 cut at z = −0.5, 0, 0.5 into four equal-area bands; A holds the first
/// and third.
pub fn four_bands() -> Partition {
    let a = Region::Union(vec![
        Region::band(north(), -1.0, -0.5).unwrap(),
        Region::band(north(), 0.0, 0.5).unwrap(),
    ]);
    Partition::new("four-bands", SpaceSpec::sphere(2), Metric::Euclidean, a)
}

/// Cap of area π (angular radius π/3) on S^2.
pub fn cap_area_pi() -> Partition {
    Partition::new(
        "cap-area-pi",
        SpaceSpec::sphere(2),
        Metric::Euclidean,
        Region::cap(north(), PI / 3.0).unwrap(),
    )
}

/// Two disjoint caps of area π/2 each (cos θ = 3/4), centered at ±e_x.
pub fn two_caps_area_pi() -> Partition {
    let theta = 0.75f64.acos();
    let a = Region::Union(vec![
        Region::cap(SpherePoint::basis(2, 0), theta).unwrap(),
        Region::cap(SpherePoint::basis(2, 0).antipode(), theta).unwrap(),
    ]);
    Partition::new("two-caps-area-pi", SpaceSpec::sphere(2), Metric::Euclidean, a)
}

/// Cap of angular radius π/2 on S^2 (area 2π); unequal-area control for the
/// area-π fixtures.
pub fn cap_area_two_pi() -> Partition {
    Partition::new(
        "cap-area-2pi",
        SpaceSpec::sphere(2),
        Metric::Euclidean,
        Region::cap(north(), PI / 2.0).unwrap(),
    )
}

/// Cap of angular radius π/4 on S^2.
pub fn small_cap() -> Partition {
    Partition::new(
        "cap-quarter-pi",
        SpaceSpec::sphere(2),
        Metric::Euclidean,
        Region::cap(north(), PI / 4.0).unwrap(),
    )
}

/// Flat torus halves {(θ1, θ2) : (θ1 + θ2) mod 2π ∈ [0, π)}.
pub fn torus_halves() -> Partition {
    Partition::new(
        "torus-halves",
        SpaceSpec::torus(),
        Metric::Product(Combiner::L2OfAngular),
        Region::angle_sum(0.0, PI).unwrap(),
    )
}

/// Upper hemisphere times the whole circle in S^2 × S^1.
pub fn hemisphere_times_circle() -> Partition {
    Partition::new(
        "hemisphere-x-circle",
        SpaceSpec::new(vec![2, 1]).unwrap(),
        Metric::Product(Combiner::L2OfEuclidean),
        Region::Product(vec![Region::hemisphere(north()), Region::Full]),
    )
}

pub const NAMES: [&str; 8] = [
    "hemispheres",
    "four-bands",
    "cap-area-pi",
    "two-caps-area-pi",
    "cap-area-2pi",
    "cap-quarter-pi",
    "torus-halves",
    "hemisphere-x-circle",
];

pub fn by_name(name: &str) -> Option<Partition> {
    Some(match name {
        "hemispheres" => hemispheres(),
        "four-bands" => four_bands(),
        "cap-area-pi" => cap_area_pi(),
        "two-caps-area-pi" => two_caps_area_pi(),
        "cap-area-2pi" => cap_area_two_pi(),
        "cap-quarter-pi" => small_cap(),
        "torus-halves" => torus_halves(),
        "hemisphere-x-circle" => hemisphere_times_circle(),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::exact_measure;

    #[test]
    fn every_fixture_has_exact_complementary_measures() {
        for name in NAMES {
            let p = by_name(name).unwrap();
            let a = exact_measure(&p.a, &p.space).unwrap().expect(name).value;
            let b = exact_measure(&p.abar, &p.space).unwrap().expect(name).value;
            assert!((a + b - p.space.measure()).abs() < 1e-12, "{name}");
        }
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn equal_area_fixtures() {
        for p in [hemispheres(), four_bands(), torus_halves(), hemisphere_times_circle()] {
            let a = exact_measure(&p.a, &p.space).unwrap().unwrap().value;
            assert!((2.0 * a - p.space.measure()).abs() < 1e-12, "{}", p.name);
        }
        for p in [cap_area_pi(), two_caps_area_pi()] {
            let a = exact_measure(&p.a, &p.space).unwrap().unwrap().value;
            assert!((a - PI).abs() < 1e-12, "{}", p.name);
        }
    }
}
