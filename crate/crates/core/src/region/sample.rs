use rand::Rng;
use serde::{Deserialize, Serialize};

use super::logic::ball_fits;
use super::Region;
use crate::error::{Error, Result};
use crate::geometry::{fill_uniform_product, point_at_angle, ProductPoint, SpaceSpec, SpherePoint};
use crate::rng::{self, StreamRng};

/// Rejection attempts allowed per requested point.
pub const DEFAULT_REJECTION_FACTOR: u64 = 1000;

/// Draws ambient uniform points into `buf` until one lands in `region`.
/// Returns false when `attempts_left` runs out first.
#[inline]
pub(crate) fn draw_accepted(
    region: &Region,
    rng: &mut StreamRng,
    buf: &mut ProductPoint,
    attempts_left: &mut u64,
) -> bool {
    while *attempts_left > 0 {
        *attempts_left -= 1;
        fill_uniform_product(rng, buf);
        if region.indicator(buf.factors()) {
            return true;
        }
    }
    false
}

pub(crate) struct ChunkShortfall {
    pub accepted: usize,
    pub attempts: u64,
}

impl ChunkShortfall {
    pub fn into_error(self, total_requested: usize) -> Error {
        Error::SamplingBudget {
            requested: total_requested,
            accepted: self.accepted,
            attempts: self.attempts,
            acceptance_rate: self.accepted as f64 / self.attempts.max(1) as f64,
        }
    }
}

/// I.i.d. uniform points of `region`, by rejection from the ambient uniform
/// law. Each chunk of points gets `max_rejection_factor` draws per point.
pub fn sample_region(
    region: &Region,
    space: &SpaceSpec,
    count: usize,
    seed: u64,
    max_rejection_factor: u64,
) -> Result<Vec<ProductPoint>> {
    region.validate(space)?;
    if max_rejection_factor == 0 {
        return Err(Error::InvalidArgument("max_rejection_factor must be >= 1".into()));
    }
    rng::try_par_chunks(count, seed, |rng, len| {
        let budget = len as u64 * max_rejection_factor;
        let mut left = budget;
        let mut out = Vec::with_capacity(len);
        let mut buf = space.scratch_point();
        while out.len() < len {
            if !draw_accepted(region, rng, &mut buf, &mut left) {
                return Err(ChunkShortfall {
                    accepted: out.len(),
                    attempts: budget,
                });
            }
            out.push(buf.clone());
        }
        Ok(out)
    })
    .map_err(|e: ChunkShortfall| e.into_error(count))
}

/// Probe points of the cap (center, θ): every other probe sits on the
/// boundary circle, the rest are spread through the interior.
pub fn sample_in_cap(center: &SpherePoint, theta: f64, probes: usize, seed: u64) -> Vec<SpherePoint> {
    let n = center.dim() as f64;
    rng::par_chunks(probes, seed, |rng, len| {
        (0..len)
            .map(|i| {
                let t = if i % 2 == 0 {
                    theta
                } else {
                    theta * rng.random::<f64>().powf(1.0 / n)
                };
                point_at_angle(rng, center.coords(), t)
            })
            .collect()
    })
}

/// Sampled containment verdict: all probes of the cap (and its center) lie
/// in the region.
pub fn sampled_ball_fits(
    region: &Region,
    center: &SpherePoint,
    theta: f64,
    probes: usize,
    seed: u64,
) -> bool {
    region.indicator(std::slice::from_ref(center))
        && sample_in_cap(center, theta, probes, seed)
            .iter()
            .all(|p| region.indicator(std::slice::from_ref(p)))
}

/// How a containment verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "fits", rename_all = "lowercase")]
pub enum BallVerdict {
    Exact(bool),
    Sampled(bool),
}

impl BallVerdict {
    pub fn fits(self) -> bool {
        match self {
            BallVerdict::Exact(b) | BallVerdict::Sampled(b) => b,
        }
    }
}

/// Exact verdict when the tree decides it, else a sampled one with `probes`
/// probe points.
pub fn ball_fits_or_sample(
    region: &Region,
    space: &SpaceSpec,
    center: &SpherePoint,
    theta: f64,
    probes: usize,
    seed: u64,
) -> Result<BallVerdict> {
    Ok(match ball_fits(region, space, center, theta)? {
        Some(b) => BallVerdict::Exact(b),
        None => BallVerdict::Sampled(sampled_ball_fits(region, center, theta, probes, seed)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{angle, SpherePoint};

    #[test]
    fn full_sphere_accepts_everything() {
        let s2 = SpaceSpec::sphere(2);
        let pts = sample_region(&Region::Full, &s2, 5000, 1, 1).unwrap();
        assert_eq!(pts.len(), 5000);
    }

    #[test]
    fn hemisphere_points_are_upper() {
        let s2 = SpaceSpec::sphere(2);
        let h = Region::hemisphere(SpherePoint::north(2));
        let pts = sample_region(&h, &s2, 10_000, 2, 10).unwrap();
        assert!(pts.iter().all(|p| p.factors()[0].coords()[2] >= 0.0));
    }

    #[test]
    fn empty_region_exhausts_the_budget() {
        let s2 = SpaceSpec::sphere(2);
        match sample_region(&Region::Empty, &s2, 1, 3, 50) {
            Err(Error::SamplingBudget {
                accepted,
                attempts,
                acceptance_rate,
                ..
            }) => {
                assert_eq!(accepted, 0);
                assert_eq!(attempts, 50);
                assert_eq!(acceptance_rate, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn samples_satisfy_membership() {
        let s2 = SpaceSpec::sphere(2);
        let r = Region::band(SpherePoint::north(2), 0.2, 0.5)
            .unwrap()
            .minus(Region::hemisphere(SpherePoint::basis(2, 0)));
        let pts = sample_region(&r, &s2, 20_000, 4, 100).unwrap();
        assert!(pts.iter().all(|p| r.contains(&s2, p).unwrap()));
    }

    #[test]
    fn deterministic_in_seed() {
        let s2 = SpaceSpec::sphere(2);
        let r = Region::cap(SpherePoint::north(2), 0.5).unwrap();
        let a = sample_region(&r, &s2, 9000, 5, 100).unwrap();
        let b = sample_region(&r, &s2, 9000, 5, 100).unwrap();
        let c = sample_region(&r, &s2, 9000, 6, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn cap_probes_stay_in_the_cap() {
        let c = SpherePoint::normalized(vec![0.3, -0.2, 0.9]).unwrap();
        let probes = sample_in_cap(&c, 0.4, 1000, 9);
        for (i, p) in probes.iter().enumerate() {
            let a = angle(p.coords(), c.coords());
            assert!(a <= 0.4 + 1e-12);
            if i % 2 == 0 {
                assert!((a - 0.4).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn verdict_kinds() {
        let s2 = SpaceSpec::sphere(2);
        let h = Region::hemisphere(SpherePoint::north(2));
        let v = ball_fits_or_sample(&h, &s2, &SpherePoint::north(2), 0.3, 100, 1).unwrap();
        assert_eq!(v, BallVerdict::Exact(true));
        // fits the union of two overlapping caps but neither cap alone
        let pair = Region::Union(vec![
            Region::cap(SpherePoint::north(2), 1.0).unwrap(),
            Region::cap(SpherePoint::basis(2, 0), 1.0).unwrap(),
        ]);
        let center = SpherePoint::normalized(vec![1.0, 0.0, 1.0]).unwrap();
        let v = ball_fits_or_sample(&pair, &s2, &center, 0.3, 4000, 1).unwrap();
        assert_eq!(v, BallVerdict::Sampled(true));
        let v = ball_fits_or_sample(&pair, &s2, &center, 0.9, 4000, 1).unwrap();
        assert_eq!(v, BallVerdict::Sampled(false));
    }
}
