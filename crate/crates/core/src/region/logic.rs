//! Syntactic reasoning about caps against region trees on a single sphere.
//!
//! Every verdict is three-valued: `Some(true)`, `Some(false)` or `None` when
//! the tree's structure does not decide it. A `Some` answer is exact.

use std::f64::consts::PI;

use super::{center_angle, Region};
use crate::error::{Error, Result};
use crate::geometry::{SpaceSpec, SpherePoint};

/// Relation between a closed cap and a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapVerdict {
    /// The cap lies inside the region.
    pub fits: Option<bool>,
    /// The cap and the region are disjoint.
    pub excludes: Option<bool>,
}

impl CapVerdict {
    fn exact(fits: bool, excludes: bool) -> Self {
        CapVerdict {
            fits: Some(fits),
            excludes: Some(excludes),
        }
    }

    const UNKNOWN: CapVerdict = CapVerdict {
        fits: None,
        excludes: None,
    };

    fn flip(self) -> Self {
        CapVerdict {
            fits: self.excludes,
            excludes: self.fits,
        }
    }
}

fn kleene_and(vals: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    let mut all = Some(true);
    for v in vals {
        match v {
            Some(false) => return Some(false),
            None => all = None,
            Some(true) => {}
        }
    }
    all
}

fn meet(children: &[CapVerdict]) -> CapVerdict {
    let fits = kleene_and(children.iter().map(|v| v.fits));
    let excludes = if children.iter().any(|v| v.excludes == Some(true)) {
        Some(true)
    } else if fits == Some(true) {
        Some(false)
    } else {
        None
    };
    CapVerdict { fits, excludes }
}

fn join(children: &[CapVerdict]) -> CapVerdict {
    let excludes = kleene_and(children.iter().map(|v| v.excludes));
    let fits = if children.iter().any(|v| v.fits == Some(true)) {
        Some(true)
    } else if excludes == Some(true) {
        Some(false)
    } else {
        None
    };
    CapVerdict { fits, excludes }
}

/// Range of x·axis over the closed cap (center, θ).
fn projection_range(center: &SpherePoint, theta: f64, axis: &SpherePoint) -> (f64, f64) {
    let d = center_angle(center, axis);
    ((d + theta).min(PI).cos(), (d - theta).max(0.0).cos())
}

fn cap_vs_cap(center: &SpherePoint, theta: f64, c: &SpherePoint, big: f64) -> CapVerdict {
    let d = center_angle(center, c);
    let fits = big >= PI || d + theta <= big;
    let excludes = d > theta + big;
    CapVerdict::exact(fits, excludes)
}

/// Cap (center, θ) against `region`, which must live on the same sphere.
pub(crate) fn cap_verdict(region: &Region, center: &SpherePoint, theta: f64) -> CapVerdict {
    match region {
        Region::Full => CapVerdict::exact(true, false),
        Region::Empty => CapVerdict::exact(false, true),
        Region::Cap(c) => cap_vs_cap(center, theta, &c.center, c.theta),
        Region::Hemisphere(n) => cap_vs_cap(center, theta, n, PI / 2.0),
        Region::Band { axis, lo, hi } => {
            let (zmin, zmax) = projection_range(center, theta, axis);
            CapVerdict::exact(*lo <= zmin && zmax <= *hi, zmax < *lo || zmin > *hi)
        }
        Region::AngleSum { .. } => CapVerdict::UNKNOWN,
        Region::Union(rs) => join(&rs.iter().map(|r| cap_verdict(r, center, theta)).collect::<Vec<_>>()),
        Region::Intersection(rs) => {
            meet(&rs.iter().map(|r| cap_verdict(r, center, theta)).collect::<Vec<_>>())
        }
        Region::Complement(r) => cap_verdict(r, center, theta).flip(),
        Region::Difference(a, b) => meet(&[
            cap_verdict(a, center, theta),
            cap_verdict(b, center, theta).flip(),
        ]),
        Region::Product(rs) if rs.len() == 1 => cap_verdict(&rs[0], center, theta),
        Region::Product(_) => CapVerdict::UNKNOWN,
    }
}

/// Whether the cap (center, θ) lies inside `region`, when decidable from the
/// tree alone.
pub fn ball_fits(
    region: &Region,
    space: &SpaceSpec,
    center: &SpherePoint,
    theta: f64,
) -> Result<Option<bool>> {
    let n = space
        .single_sphere()
        .ok_or_else(|| Error::SpaceMismatch("balls live on a single sphere".into()))?;
    if center.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: center.dim(),
        });
    }
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::InvalidArgument(format!(
            "ball angular radius {theta} outside (0, π]"
        )));
    }
    region.validate(space)?;
    Ok(cap_verdict(region, center, theta).fits)
}

fn as_cap(r: &Region) -> Option<(&SpherePoint, f64)> {
    match r {
        Region::Cap(c) => Some((&c.center, c.theta)),
        Region::Hemisphere(n) => Some((n, PI / 2.0)),
        Region::Product(rs) if rs.len() == 1 => as_cap(&rs[0]),
        _ => None,
    }
}

/// Proves `inner ⊆ outer` up to a null set (single sphere only).
pub(crate) fn subset(inner: &Region, outer: &Region) -> bool {
    if inner == outer {
        return true;
    }
    match (inner, outer) {
        (Region::Empty, _) | (_, Region::Full) => return true,
        (
            Region::Band { axis: a1, lo: l1, hi: h1 },
            Region::Band { axis: a2, lo: l2, hi: h2 },
        ) if a1 == a2 && l2 <= l1 && h1 <= h2 => return true,
        _ => {}
    }
    if let Some((c, t)) = as_cap(inner) {
        if cap_verdict(outer, c, t).fits == Some(true) {
            return true;
        }
    }
    let by_inner = match inner {
        Region::Union(rs) => rs.iter().all(|r| subset(r, outer)),
        Region::Intersection(rs) => rs.iter().any(|r| subset(r, outer)),
        Region::Difference(a, _) => subset(a, outer),
        _ => false,
    };
    by_inner
        || match outer {
            Region::Complement(z) => disjoint(inner, z),
            Region::Union(rs) => rs.iter().any(|r| subset(inner, r)),
            Region::Intersection(rs) => rs.iter().all(|r| subset(inner, r)),
            Region::Difference(a, b) => subset(inner, a) && disjoint(inner, b),
            _ => false,
        }
}

/// Proves `a ∩ b` is a null set (single sphere only).
pub(crate) fn disjoint(a: &Region, b: &Region) -> bool {
    disjoint_one_way(a, b) || disjoint_one_way(b, a)
}

fn disjoint_one_way(a: &Region, b: &Region) -> bool {
    match (a, b) {
        (Region::Empty, _) => return true,
        (
            Region::Band { axis: a1, lo: l1, hi: h1 },
            Region::Band { axis: a2, lo: l2, hi: h2 },
        ) if a1 == a2 && (h1 <= l2 || h2 <= l1) => return true,
        _ => {}
    }
    if let Some((c, t)) = as_cap(b) {
        if cap_verdict(a, c, t).excludes == Some(true) {
            return true;
        }
    }
    match b {
        Region::Union(rs) => rs.iter().all(|r| disjoint(a, r)),
        Region::Intersection(rs) => rs.iter().any(|r| disjoint(a, r)),
        Region::Difference(x, y) => disjoint(a, x) || subset(a, y),
        Region::Complement(z) => subset(a, z),
        _ => false,
    }
}
