//! Measurable subsets of spheres and of products of spheres, as an
//! immutable expression tree.
//!
//! Leaves are caps, hemispheres, latitude bands, angle-sum strips on tori, the
//! whole space and the empty set. Inner nodes are the boolean operations and
//! the Cartesian product. Caps and bands are closed.

mod logic;
mod measure;
mod sample;

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{angle, dot, ProductPoint, Rotation, SpaceSpec, SpherePoint};

pub use logic::{ball_fits, CapVerdict};
pub use measure::{cap_area, exact_measure, mc_measure, sin_power_integral, MeasureEstimate};
pub use sample::{
    ball_fits_or_sample, sample_in_cap, sample_region, sampled_ball_fits, BallVerdict,
    DEFAULT_REJECTION_FACTOR,
};
pub(crate) use sample::draw_accepted;

/// Closed spherical cap {x : angle(x, center) ≤ theta}.
#[derive(Clone, Debug, PartialEq)]
pub struct Cap {
    center: SpherePoint,
    theta: f64,
    cos_theta: f64,
}

impl Cap {
    pub fn new(center: SpherePoint, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= PI) {
            return Err(Error::InvalidArgument(format!(
                "cap angular radius {theta} outside (0, π]"
            )));
        }
        Ok(Cap {
            center,
            theta,
            cos_theta: theta.cos(),
        })
    }

    /// Cap from the Euclidean radius of the ambient ball whose intersection
    /// with the sphere it is: θ = 2 arcsin(r/2).
    pub fn from_chord_radius(center: SpherePoint, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 2.0) {
            return Err(Error::InvalidArgument(format!(
                "ball radius {r} outside (0, 2]"
            )));
        }
        Cap::new(center, 2.0 * (r / 2.0).asin())
    }

    pub fn center(&self) -> &SpherePoint {
        &self.center
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    fn contains(&self, x: &[f64]) -> bool {
        self.theta >= PI || dot(x, self.center.coords()) >= self.cos_theta
    }
}

/// Region expression. Build leaves through the constructor functions, which
/// validate their parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Full,
    Empty,
    Cap(Cap),
    /// {x : x·normal ≥ 0}
    Hemisphere(SpherePoint),
    /// {x : lo ≤ x·axis ≤ hi}
    Band { axis: SpherePoint, lo: f64, hi: f64 },
    /// Points of (S^1)^r whose angle sum, reduced mod 2π, lies in [lo, hi).
    AngleSum { lo: f64, hi: f64 },
    Union(Vec<Region>),
    Intersection(Vec<Region>),
    Complement(Box<Region>),
    Difference(Box<Region>, Box<Region>),
    /// One sub-region per factor of a product space.
    Product(Vec<Region>),
}

impl Region {
    pub fn cap(center: SpherePoint, theta: f64) -> Result<Self> {
        Cap::new(center, theta).map(Region::Cap)
    }

    pub fn hemisphere(normal: SpherePoint) -> Self {
        Region::Hemisphere(normal)
    }

    pub fn band(axis: SpherePoint, lo: f64, hi: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&lo) || !(-1.0..=1.0).contains(&hi) || lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "band needs -1 <= lo < hi <= 1, got lo={lo}, hi={hi}"
            )));
        }
        Ok(Region::Band { axis, lo, hi })
    }

    pub fn angle_sum(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=2.0 * PI).contains(&lo) || !(0.0..=2.0 * PI).contains(&hi) || lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "angle-sum window needs 0 <= lo < hi <= 2π, got lo={lo}, hi={hi}"
            )));
        }
        Ok(Region::AngleSum { lo, hi })
    }

    pub fn complement(self) -> Self {
        Region::Complement(Box::new(self))
    }

    pub fn minus(self, other: Region) -> Self {
        Region::Difference(Box::new(self), Box::new(other))
    }

    /// Checks the tree against the ambient space: leaf points lie on the
    /// right sphere and products have one child per factor.
    pub fn validate(&self, space: &SpaceSpec) -> Result<()> {
        self.validate_dims(&space.dims)
    }

    fn validate_dims(&self, dims: &[usize]) -> Result<()> {
        let single = |p: &SpherePoint, what: &str| -> Result<()> {
            match dims {
                [n] if *n == p.dim() => Ok(()),
                [n] => Err(Error::SpaceMismatch(format!(
                    "{what} point lies on S^{}, region lives on S^{n}",
                    p.dim()
                ))),
                _ => Err(Error::SpaceMismatch(format!(
                    "{what} needs a single sphere; wrap it in product(...) for a product space"
                ))),
            }
        };
        match self {
            Region::Full | Region::Empty => Ok(()),
            Region::Cap(c) => single(&c.center, "cap"),
            Region::Hemisphere(n) => single(n, "hemisphere"),
            Region::Band { axis, .. } => single(axis, "band"),
            Region::AngleSum { .. } => {
                if dims.iter().all(|&n| n == 1) {
                    Ok(())
                } else {
                    Err(Error::SpaceMismatch(format!(
                        "anglesum needs a product of circles, space dims are {dims:?}"
                    )))
                }
            }
            Region::Union(rs) | Region::Intersection(rs) => {
                rs.iter().try_for_each(|r| r.validate_dims(dims))
            }
            Region::Complement(r) => r.validate_dims(dims),
            Region::Difference(a, b) => {
                a.validate_dims(dims)?;
                b.validate_dims(dims)
            }
            Region::Product(rs) => {
                if rs.len() != dims.len() {
                    return Err(Error::SpaceMismatch(format!(
                        "product has {} factors, space has {}",
                        rs.len(),
                        dims.len()
                    )));
                }
                rs.iter()
                    .zip(dims)
                    .try_for_each(|(r, n)| r.validate_dims(std::slice::from_ref(n)))
            }
        }
    }

    /// Membership test with space checks.
    pub fn contains(&self, space: &SpaceSpec, point: &ProductPoint) -> Result<bool> {
        self.validate(space)?;
        space.check_point(point)?;
        Ok(self.indicator(point.factors()))
    }

    /// Membership test for a point already known to live in the region's
    /// space.
    #[inline]
    pub fn indicator(&self, x: &[SpherePoint]) -> bool {
        match self {
            Region::Full => true,
            Region::Empty => false,
            Region::Cap(c) => c.contains(x[0].coords()),
            Region::Hemisphere(n) => dot(x[0].coords(), n.coords()) >= 0.0,
            Region::Band { axis, lo, hi } => {
                let z = dot(x[0].coords(), axis.coords());
                *lo <= z && z <= *hi
            }
            Region::AngleSum { lo, hi } => {
                let s = x.iter().map(SpherePoint::circle_angle).sum::<f64>() % (2.0 * PI);
                *lo <= s && s < *hi
            }
            Region::Union(rs) => rs.iter().any(|r| r.indicator(x)),
            Region::Intersection(rs) => rs.iter().all(|r| r.indicator(x)),
            Region::Complement(r) => !r.indicator(x),
            Region::Difference(a, b) => a.indicator(x) && !b.indicator(x),
            Region::Product(rs) => rs
                .iter()
                .enumerate()
                .all(|(i, r)| r.indicator(std::slice::from_ref(&x[i]))),
        }
    }

    /// Node count of the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Region::Union(rs) | Region::Intersection(rs) | Region::Product(rs) => {
                rs.iter().map(Region::size).sum()
            }
            Region::Complement(r) => r.size(),
            Region::Difference(a, b) => a.size() + b.size(),
            _ => 0,
        }
    }

    pub fn depth(&self) -> usize {
        1 + match self {
            Region::Union(rs) | Region::Intersection(rs) | Region::Product(rs) => {
                rs.iter().map(Region::depth).max().unwrap_or(0)
            }
            Region::Complement(r) => r.depth(),
            Region::Difference(a, b) => a.depth().max(b.depth()),
            _ => 0,
        }
    }

    /// Image of the region under per-factor orthogonal maps (one per factor
    /// of the space). Angle-sum strips are not mapped.
    pub fn rotated(&self, rotations: &[Rotation]) -> Result<Region> {
        let one = |p: &SpherePoint| -> Result<SpherePoint> {
            match rotations {
                [r] if r.dim() == p.dim() => Ok(r.apply(p)),
                _ => Err(Error::SpaceMismatch(
                    "rotation does not match the region's sphere".into(),
                )),
            }
        };
        Ok(match self {
            Region::Full => Region::Full,
            Region::Empty => Region::Empty,
            Region::Cap(c) => Region::Cap(Cap::new(one(&c.center)?, c.theta)?),
            Region::Hemisphere(n) => Region::Hemisphere(one(n)?),
            Region::Band { axis, lo, hi } => Region::Band {
                axis: one(axis)?,
                lo: *lo,
                hi: *hi,
            },
            Region::AngleSum { .. } => {
                return Err(Error::InvalidArgument(
                    "angle-sum strips are not rotated".into(),
                ))
            }
            Region::Union(rs) => Region::Union(
                rs.iter().map(|r| r.rotated(rotations)).collect::<Result<_>>()?,
            ),
            Region::Intersection(rs) => Region::Intersection(
                rs.iter().map(|r| r.rotated(rotations)).collect::<Result<_>>()?,
            ),
            Region::Complement(r) => r.rotated(rotations)?.complement(),
            Region::Difference(a, b) => a.rotated(rotations)?.minus(b.rotated(rotations)?),
            Region::Product(rs) => {
                if rs.len() != rotations.len() {
                    return Err(Error::SpaceMismatch(
                        "one rotation per product factor is required".into(),
                    ));
                }
                Region::Product(
                    rs.iter()
                        .zip(rotations)
                        .map(|(r, rot)| r.rotated(std::slice::from_ref(rot)))
                        .collect::<Result<_>>()?,
                )
            }
        })
    }
}

/// Angle between a cap-like leaf center and a point, on the same sphere.
pub(crate) fn center_angle(a: &SpherePoint, b: &SpherePoint) -> f64 {
    angle(a.coords(), b.coords())
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, name: &str, rs: &[Region]) -> fmt::Result {
            write!(f, "{name}(")?;
            for (i, r) in rs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{r}")?;
            }
            write!(f, ")")
        }
        match self {
            Region::Full => write!(f, "full()"),
            Region::Empty => write!(f, "empty()"),
            Region::Cap(c) => write!(f, "cap(axis={}, theta={})", c.center, c.theta),
            Region::Hemisphere(n) => write!(f, "hemisphere(normal={n})"),
            Region::Band { axis, lo, hi } => write!(f, "band(axis={axis}, lo={lo}, hi={hi})"),
            Region::AngleSum { lo, hi } => write!(f, "anglesum(lo={lo}, hi={hi})"),
            Region::Union(rs) => list(f, "union", rs),
            Region::Intersection(rs) => list(f, "intersection", rs),
            Region::Complement(r) => write!(f, "complement({r})"),
            Region::Difference(a, b) => write!(f, "difference({a}, {b})"),
            Region::Product(rs) => list(f, "product", rs),
        }
    }
}
