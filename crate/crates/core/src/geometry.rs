//! Points on unit spheres and on products of unit spheres, their distances,
//! uniform sampling and the bisector reflection.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Tolerance on `‖coords‖ = 1` accepted by [`SpherePoint::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A point of the unit sphere S^n, stored by its n+1 ambient coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Wraps unit-norm coordinates. Fails on n < 1 or a norm off by more
    /// than [`NORM_TOLERANCE`].
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a point of S^n needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        let norm = norm(&coords);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "coordinates have norm {norm}, expected 1"
            )));
        }
        Ok(SpherePoint { coords })
    }

    /// Projects a nonzero vector onto the sphere.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let n = norm(&coords);
        if coords.len() < 2 || !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero or degenerate vector".into(),
            ));
        }
        coords.iter_mut().for_each(|c| *c /= n);
        Ok(SpherePoint { coords })
    }

    /// The k-th standard basis vector of R^{n+1} (0-based).
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k <= n, "basis vector e_{k} does not exist in R^{}", n + 1);
        let mut coords = vec![0.0; n + 1];
        coords[k] = 1.0;
        SpherePoint { coords }
    }

    /// Last basis vector, the "north pole".
    pub fn north(n: usize) -> Self {
        Self::basis(n, n)
    }

    pub fn south(n: usize) -> Self {
        Self::basis(n, n).antipode()
    }

    /// Point of S^1 at angle `theta`.
    pub fn on_circle(theta: f64) -> Self {
        SpherePoint {
            coords: vec![theta.cos(), theta.sin()],
        }
    }

    pub fn antipode(&self) -> Self {
        SpherePoint {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Sphere dimension n.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        dot(&self.coords, &other.coords)
    }

    /// Angle of a point of S^1, in [0, 2π).
    pub fn circle_angle(&self) -> f64 {
        let a = self.coords[1].atan2(self.coords[0]);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A point of S^{n1} × … × S^{nr}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductPoint {
    factors: Vec<SpherePoint>,
}

impl ProductPoint {
    pub fn new(factors: Vec<SpherePoint>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument(
                "a product point needs at least one factor".into(),
            ));
        }
        Ok(ProductPoint { factors })
    }

    pub fn single(p: SpherePoint) -> Self {
        ProductPoint { factors: vec![p] }
    }

    pub fn factors(&self) -> &[SpherePoint] {
        &self.factors
    }

    pub fn into_factors(self) -> Vec<SpherePoint> {
        self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(SpherePoint::dim).collect()
    }
}

/// Shape of the ambient space: the dimensions (n1, …, nr) of its factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub dims: Vec<usize>,
}

impl SpaceSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "space dimensions must be a non-empty list of integers >= 1, got {dims:?}"
            )));
        }
        Ok(SpaceSpec { dims })
    }

    pub fn sphere(n: usize) -> Self {
        assert!(n >= 1, "S^0 is not supported");
        SpaceSpec { dims: vec![n] }
    }

    /// The flat torus S^1 × S^1.
    pub fn torus() -> Self {
        SpaceSpec { dims: vec![1, 1] }
    }

    pub fn factor_count(&self) -> usize {
        self.dims.len()
    }

    /// `Some(n)` when the space is a single sphere S^n.
    pub fn single_sphere(&self) -> Option<usize> {
        match self.dims.as_slice() {
            [n] => Some(*n),
            _ => None,
        }
    }

    /// Total surface measure μ of the product.
    pub fn measure(&self) -> f64 {
        self.dims.iter().map(|&n| sphere_area(n)).product()
    }

    pub fn check_point(&self, p: &ProductPoint) -> Result<()> {
        let dims = p.dims();
        if dims != self.dims {
            return Err(Error::SpaceMismatch(format!(
                "point lives in {dims:?}, space is {:?}",
                self.dims
            )));
        }
        Ok(())
    }

    /// A point with the right shape; contents are overwritten by samplers.
    pub(crate) fn scratch_point(&self) -> ProductPoint {
        ProductPoint {
            factors: self
                .dims
                .iter()
                .map(|&n| SpherePoint::north(n))
                .collect(),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "S^{n}")?;
        }
        Ok(())
    }
}

/// Accepts `S^2`, `S^2xS^1` (spaces around `x` allowed) and `torus`.
impl std::str::FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "torus" {
            return Ok(SpaceSpec::torus());
        }
        let dims = s
            .split('x')
            .map(|f| {
                f.trim()
                    .strip_prefix("S^")
                    .and_then(|n| n.parse::<usize>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("bad space factor '{}'", f.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        SpaceSpec::new(dims)
    }
}

/// Surface measure of S^n: 2π^{(n+1)/2} / Γ((n+1)/2).
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf((n as f64 + 1.0) / 2.0) / gamma_half(n + 1)
}

/// Γ(k/2) for k ≥ 1, by the recurrence Γ(x+1) = xΓ(x).
pub fn gamma_half(k: usize) -> f64 {
    assert!(k >= 1);
    let (mut value, mut x) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while 2.0 * x < k as f64 {
        value *= x;
        x += 1.0;
    }
    value
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// ‖a − b‖ for equal-length slices.
pub(crate) fn chord(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Angle between unit vectors, 2·atan2(‖a−b‖, ‖a+b‖). Stable at both
/// coincident and antipodal points, and consistent with 2 sin(α/2) = ‖a−b‖.
pub(crate) fn angle(a: &[f64], b: &[f64]) -> f64 {
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

fn same_sphere(p: &SpherePoint, q: &SpherePoint) -> Result<()> {
    if p.coords.len() != q.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(())
}

/// Chord length ‖p − q‖ in the ambient space.
pub fn euclidean_distance(p: &SpherePoint, q: &SpherePoint) -> Result<f64> {
    same_sphere(p, q)?;
    Ok(chord(&p.coords, &q.coords))
}

/// Great-circle angle between p and q, in [0, π].
pub fn angular_distance(p: &SpherePoint, q: &SpherePoint) -> Result<f64> {
    same_sphere(p, q)?;
    Ok(angle(&p.coords, &q.coords))
}

/// d = 2 sin(α/2).
pub fn chord_from_angle(alpha: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "angle {alpha} outside [0, π]"
        )));
    }
    Ok(2.0 * (alpha / 2.0).sin())
}

/// α = 2 arcsin(d/2).
pub fn angle_from_chord(d: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&d) {
        return Err(Error::InvalidArgument(format!(
            "chord {d} outside [0, 2]"
        )));
    }
    Ok(2.0 * (d / 2.0).clamp(-1.0, 1.0).asin())
}

/// Unit normal of the hyperplane through the origin bisecting the angle
/// (P, O, P̄).
pub fn bisector_normal(p: &SpherePoint, pbar: &SpherePoint) -> Result<Vec<f64>> {
    same_sphere(p, pbar)?;
    let u: Vec<f64> = p.coords.iter().zip(&pbar.coords).map(|(a, b)| a - b).collect();
    let len = norm(&u);
    if len <= 1e-15 {
        return Err(Error::DegenerateBisector);
    }
    Ok(u.into_iter().map(|c| c / len).collect())
}

/// Reflects `v` across the hyperplane with unit normal `u`.
pub(crate) fn reflect_across(v: &[f64], u: &[f64]) -> Vec<f64> {
    let k = 2.0 * dot(v, u);
    v.iter().zip(u).map(|(x, n)| x - k * n).collect()
}

/// Image of `q` under the reflection that swaps `p` and `pbar`.
pub fn bisector_reflect(q: &SpherePoint, p: &SpherePoint, pbar: &SpherePoint) -> Result<SpherePoint> {
    same_sphere(q, p)?;
    let u = bisector_normal(p, pbar)?;
    Ok(SpherePoint {
        coords: reflect_across(&q.coords, &u),
    })
}

/// The combiner f of a product metric d = f(d_1, …, d_r).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combiner {
    /// √(Σ d_E²)
    L2OfEuclidean,
    /// √(Σ α²); on S^1 × S^1 this is the flat Clifford torus.
    L2OfAngular,
    /// Σ α
    L1OfAngular,
    /// max α
    MaxOfAngular,
}

impl Combiner {
    pub const ALL: [Combiner; 4] = [
        Combiner::L2OfEuclidean,
        Combiner::L2OfAngular,
        Combiner::L1OfAngular,
        Combiner::MaxOfAngular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Combiner::L2OfEuclidean => "l2-of-euclidean",
            Combiner::L2OfAngular => "l2-of-angular",
            Combiner::L1OfAngular => "l1-of-angular",
            Combiner::MaxOfAngular => "max-of-angular",
        }
    }

    fn uses_angles(self) -> bool {
        !matches!(self, Combiner::L2OfEuclidean)
    }

    fn factor_distance(self, a: &[f64], b: &[f64]) -> f64 {
        if self.uses_angles() {
            angle(a, b)
        } else {
            chord(a, b)
        }
    }

    fn combine(self, ds: impl Iterator<Item = f64>) -> f64 {
        match self {
            Combiner::L2OfEuclidean | Combiner::L2OfAngular => ds.map(|d| d * d).sum::<f64>().sqrt(),
            Combiner::L1OfAngular => ds.sum(),
            Combiner::MaxOfAngular => ds.fold(0.0, f64::max),
        }
    }

    /// Largest distance between two points of a product with `r` factors.
    pub fn diameter(self, r: usize) -> f64 {
        let r = r as f64;
        match self {
            Combiner::L2OfEuclidean => 2.0 * r.sqrt(),
            Combiner::L2OfAngular => PI * r.sqrt(),
            Combiner::L1OfAngular => PI * r,
            Combiner::MaxOfAngular => PI,
        }
    }
}

impl std::str::FromStr for Combiner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Combiner::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown combiner '{s}'")))
    }
}

/// Distance under a product metric.
pub fn product_distance(combiner: Combiner, x: &ProductPoint, y: &ProductPoint) -> Result<f64> {
    if x.dims() != y.dims() {
        return Err(Error::SpaceMismatch(format!(
            "{:?} vs {:?}",
            x.dims(),
            y.dims()
        )));
    }
    Ok(combiner.combine(
        x.factors
            .iter()
            .zip(&y.factors)
            .map(|(a, b)| combiner.factor_distance(&a.coords, &b.coords)),
    ))
}

/// The distance used for a distance distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Chord length on a single sphere.
    Euclidean,
    /// Great-circle angle on a single sphere.
    Angular,
    /// Combined per-factor distances on a product of spheres.
    Product(Combiner),
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Angular => "angular",
            Metric::Product(c) => c.name(),
        }
    }

    pub fn diameter(&self, space: &SpaceSpec) -> f64 {
        match self {
            Metric::Euclidean => 2.0,
            Metric::Angular => PI,
            Metric::Product(c) => c.diameter(space.factor_count()),
        }
    }

    pub fn check_space(&self, space: &SpaceSpec) -> Result<()> {
        match self {
            Metric::Euclidean | Metric::Angular if space.single_sphere().is_none() => {
                Err(Error::SpaceMismatch(format!(
                    "metric '{}' needs a single sphere, space is {space}",
                    self.name()
                )))
            }
            _ => Ok(()),
        }
    }

    /// Distance between two points already known to share the space.
    pub(crate) fn eval(&self, x: &ProductPoint, y: &ProductPoint) -> f64 {
        match self {
            Metric::Euclidean => chord(&x.factors[0].coords, &y.factors[0].coords),
            Metric::Angular => angle(&x.factors[0].coords, &y.factors[0].coords),
            Metric::Product(c) => c.combine(
                x.factors
                    .iter()
                    .zip(&y.factors)
                    .map(|(a, b)| c.factor_distance(&a.coords, &b.coords)),
            ),
        }
    }

    pub fn distance(&self, x: &ProductPoint, y: &ProductPoint) -> Result<f64> {
        if x.dims() != y.dims() {
            return Err(Error::SpaceMismatch(format!(
                "{:?} vs {:?}",
                x.dims(),
                y.dims()
            )));
        }
        if !matches!(self, Metric::Product(_)) && x.factors.len() != 1 {
            return Err(Error::SpaceMismatch(format!(
                "metric '{}' needs a single sphere",
                self.name()
            )));
        }
        Ok(self.eval(x, y))
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "angular" => Ok(Metric::Angular),
            other => other.parse().map(Metric::Product).map_err(|_| {
                Error::InvalidArgument(format!("unknown metric '{other}'"))
            }),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Overwrites `p` with a uniform point of its sphere (normalized Gaussian).
pub(crate) fn fill_uniform<R: Rng + ?Sized>(rng: &mut R, p: &mut SpherePoint) {
    loop {
        for c in p.coords.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let n = norm(&p.coords);
        if n > 1e-300 {
            p.coords.iter_mut().for_each(|c| *c /= n);
            return;
        }
    }
}

pub(crate) fn fill_uniform_product<R: Rng + ?Sized>(rng: &mut R, p: &mut ProductPoint) {
    for f in p.factors.iter_mut() {
        fill_uniform(rng, f);
    }
}

/// `count` i.i.d. uniform points of the space.
pub fn sample_uniform(space: &SpaceSpec, count: usize, seed: u64) -> Vec<ProductPoint> {
    rng::par_chunks(count, seed, |rng, len| {
        (0..len)
            .map(|_| {
                let mut p = space.scratch_point();
                fill_uniform_product(rng, &mut p);
                p
            })
            .collect()
    })
}

/// Uniform point at angle `t` from `center`.
pub(crate) fn point_at_angle<R: Rng + ?Sized>(rng: &mut R, center: &[f64], t: f64) -> SpherePoint {
    let dir = loop {
        let mut v: Vec<f64> = (0..center.len()).map(|_| rng.sample(StandardNormal)).collect();
        let k = dot(&v, center);
        v.iter_mut().zip(center).for_each(|(x, c)| *x -= k * c);
        let n = norm(&v);
        if n > 1e-9 {
            v.iter_mut().for_each(|x| *x /= n);
            break v;
        }
    };
    let (s, c) = t.sin_cos();
    SpherePoint {
        coords: center.iter().zip(&dir).map(|(a, b)| c * a + s * b).collect(),
    }
}

/// An orthogonal transformation of R^{n+1}, acting on S^n.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    size: usize,
    // row-major
    m: Vec<f64>,
}

impl Rotation {
    pub fn identity(n: usize) -> Self {
        let size = n + 1;
        let mut m = vec![0.0; size * size];
        (0..size).for_each(|i| m[i * size + i] = 1.0);
        Rotation { size, m }
    }

    /// Haar-random orthogonal matrix: Gram–Schmidt on Gaussian rows.
    pub fn random(n: usize, seed: u64) -> Self {
        let size = n + 1;
        let mut rng = rng::stream(seed, 0);
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(size);
        while rows.len() < size {
            let mut v: Vec<f64> = (0..size).map(|_| rng.sample(StandardNormal)).collect();
            for _ in 0..2 {
                for r in &rows {
                    let k = dot(&v, r);
                    v.iter_mut().zip(r).for_each(|(x, y)| *x -= k * y);
                }
            }
            let len = norm(&v);
            if len > 1e-6 {
                rows.push(v.into_iter().map(|x| x / len).collect());
            }
        }
        Rotation {
            size,
            m: rows.concat(),
        }
    }

    pub fn dim(&self) -> usize {
        self.size - 1
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        assert_eq!(p.coords.len(), self.size, "rotation dimension mismatch");
        SpherePoint {
            coords: (0..self.size)
                .map(|i| dot(&self.m[i * self.size..(i + 1) * self.size], &p.coords))
                .collect(),
        }
    }
}
