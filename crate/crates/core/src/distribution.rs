//! Cumulative distance measures `St_A(ℓ)` and `St_{A,B}(ℓ)`.
//!
//! Distances come from independent pairs of uniform region points, so the
//! normalized empirical CDF obeys the DKW inequality. The CDF is scaled by
//! the total pair mass: μ(A)² for self pairs and 2·μ(A)·μ(B) for cross pairs,
//! counting both orderings so that `St_S + St_S̄ + St_{S,S̄} = St_space`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sphere_area, Metric, SpaceSpec};
use crate::region::{
    draw_accepted, exact_measure, mc_measure, sin_power_integral, MeasureEstimate, Region,
    DEFAULT_REJECTION_FACTOR,
};
use crate::rng::{self, derive_seed};

const MASS_TAG: u64 = 0x6d61_7373;
const SECOND_REGION_TAG: u64 = 0x6d61_7374;

/// Sampling knobs shared by the estimators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub max_rejection_factor: u64,
    /// Samples for the Monte Carlo measure of regions without an exact one.
    pub measure_samples: usize,
    /// Confidence parameter of Monte Carlo measure half-widths.
    pub delta: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            max_rejection_factor: DEFAULT_REJECTION_FACTOR,
            measure_samples: 1_000_000,
            delta: 1e-3,
        }
    }
}

/// Scaled empirical CDF of i.i.d. pair distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    distances: Vec<f64>,
    mass_scale: f64,
    mass_half_width: f64,
    metric: Metric,
    diameter: f64,
    seed: u64,
}

impl EmpiricalDistribution {
    /// Builds a distribution from raw distances, clamping them to
    /// [0, diameter] and sorting.
    pub fn from_distances(
        mut distances: Vec<f64>,
        mass_scale: f64,
        metric: Metric,
        diameter: f64,
        seed: u64,
    ) -> Result<Self> {
        if distances.is_empty() {
            return Err(Error::InvalidArgument("no distances".into()));
        }
        if !(mass_scale > 0.0) || !(diameter > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mass_scale ({mass_scale}) and diameter ({diameter}) must be positive"
            )));
        }
        if distances.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument("non-finite distance".into()));
        }
        distances.iter_mut().for_each(|d| *d = d.clamp(0.0, diameter));
        distances.par_sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution {
            distances,
            mass_scale,
            mass_half_width: 0.0,
            metric,
            diameter,
            seed,
        })
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn pair_count(&self) -> usize {
        self.distances.len()
    }

    /// Total Stieltjes mass represented by the CDF.
    pub fn mass_scale(&self) -> f64 {
        self.mass_scale
    }

    /// Uncertainty of `mass_scale` when a region measure was estimated.
    pub fn mass_half_width(&self) -> f64 {
        self.mass_half_width
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fraction of pairs at distance ≤ ℓ.
    pub fn probability_cdf(&self, l: f64) -> f64 {
        if l >= self.diameter {
            return 1.0;
        }
        self.distances.partition_point(|&d| d <= l) as f64 / self.distances.len() as f64
    }

    /// St(ℓ): mass of pairs at distance ≤ ℓ.
    pub fn cdf(&self, l: f64) -> f64 {
        if l >= self.diameter {
            return self.mass_scale;
        }
        self.mass_scale * self.probability_cdf(l)
    }

    /// DKW half-width of the scaled CDF at confidence 1 − δ.
    pub fn dkw_band(&self, delta: f64) -> f64 {
        self.mass_scale * crate::verify::dkw_tolerance(self.pair_count(), delta)
    }

    /// Same distances with a different total mass.
    pub fn with_mass(mut self, mass_scale: f64, half_width: f64) -> Self {
        self.mass_scale = mass_scale;
        self.mass_half_width = half_width;
        self
    }
}

/// `points` equally spaced values from 0 to `diameter` inclusive.
pub fn uniform_grid(diameter: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![diameter],
        _ => (0..points)
            .map(|i| diameter * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Exact measure if available, otherwise a Monte Carlo estimate.
pub fn region_measure(
    region: &Region,
    space: &SpaceSpec,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<MeasureEstimate> {
    match exact_measure(region, space)? {
        Some(m) => Ok(m),
        None => mc_measure(region, space, opts.measure_samples, seed, opts.delta),
    }
}

fn sample_pair_distances(
    a: &Region,
    b: &Region,
    space: &SpaceSpec,
    metric: Metric,
    pairs: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<Vec<f64>> {
    metric.check_space(space)?;
    a.validate(space)?;
    b.validate(space)?;
    if pairs == 0 {
        return Err(Error::InvalidArgument("pairs must be >= 1".into()));
    }
    if opts.max_rejection_factor == 0 {
        return Err(Error::InvalidArgument("max_rejection_factor must be >= 1".into()));
    }
    rng::try_par_chunks(pairs, seed, |rng, len| {
        let budget = 2 * len as u64 * opts.max_rejection_factor;
        let mut left = budget;
        let mut x = space.scratch_point();
        let mut y = space.scratch_point();
        let mut out = Vec::with_capacity(len);
        while out.len() < len {
            if !draw_accepted(a, rng, &mut x, &mut left) || !draw_accepted(b, rng, &mut y, &mut left)
            {
                return Err(Error::SamplingBudget {
                    requested: 2 * pairs,
                    accepted: 2 * out.len(),
                    attempts: budget,
                    acceptance_rate: 2.0 * out.len() as f64 / budget as f64,
                });
            }
            out.push(metric.eval(&x, &y));
        }
        Ok(out)
    })
}

/// Empirical `St_A` from `pairs` independent pairs of points of `region`.
pub fn estimate_self(
    region: &Region,
    space: &SpaceSpec,
    metric: Metric,
    pairs: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<EmpiricalDistribution> {
    let m = region_measure(region, space, derive_seed(seed, MASS_TAG), opts)?;
    let d = sample_pair_distances(region, region, space, metric, pairs, seed, opts)?;
    let mass = m.value * m.value;
    let hw = 2.0 * m.value * m.half_width + m.half_width * m.half_width;
    Ok(EmpiricalDistribution::from_distances(d, mass, metric, metric.diameter(space), seed)?
        .with_mass(mass, hw))
}

/// Empirical `St_{A,B}` from independent (a, b) draws, scaled by 2·μ(A)·μ(B).
pub fn estimate_cross(
    region_a: &Region,
    region_b: &Region,
    space: &SpaceSpec,
    metric: Metric,
    pairs: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<EmpiricalDistribution> {
    let ma = region_measure(region_a, space, derive_seed(seed, MASS_TAG), opts)?;
    let mb = region_measure(region_b, space, derive_seed(seed, SECOND_REGION_TAG), opts)?;
    let d = sample_pair_distances(region_a, region_b, space, metric, pairs, seed, opts)?;
    let mass = 2.0 * ma.value * mb.value;
    let hw = 2.0
        * (ma.value * mb.half_width + mb.value * ma.half_width + ma.half_width * mb.half_width);
    Ok(EmpiricalDistribution::from_distances(d, mass, metric, metric.diameter(space), seed)?
        .with_mass(mass, hw))
}

/// Δ(ℓ) = St_1(ℓ) − St_2(ℓ) on the grid.
pub fn signed_difference(
    d1: &EmpiricalDistribution,
    d2: &EmpiricalDistribution,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if d1.metric != d2.metric {
        return Err(Error::MetricMismatch(
            d1.metric.to_string(),
            d2.metric.to_string(),
        ));
    }
    Ok(grid.iter().map(|&l| (l, d1.cdf(l) - d2.cdf(l))).collect())
}

/// Exact `St_{S^n}(ℓ)`: the angle between two uniform points of S^n has
/// density ∝ sin^{n−1}α on [0, π].
pub fn analytic_fullsphere_cdf(n: usize, metric: Metric, l: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("sphere dimension must be >= 1".into()));
    }
    let alpha = match metric {
        Metric::Angular if (0.0..=PI).contains(&l) => l,
        Metric::Euclidean if (0.0..=2.0).contains(&l) => 2.0 * (l / 2.0).asin(),
        Metric::Angular | Metric::Euclidean => {
            return Err(Error::InvalidArgument(format!(
                "distance {l} outside the range of the {metric} metric"
            )))
        }
        Metric::Product(_) => {
            return Err(Error::InvalidArgument(
                "no closed form for product metrics".into(),
            ))
        }
    };
    let area = sphere_area(n);
    Ok(area * area * sin_power_integral(n - 1, alpha) / sin_power_integral(n - 1, PI))
}

/// Binned St increments over equal-width bins of [0, diameter].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityHistogram {
    pub bin_edges: Vec<f64>,
    pub bin_masses: Vec<f64>,
}

impl DensityHistogram {
    /// Mass per unit length in each bin.
    pub fn densities(&self) -> Vec<f64> {
        self.bin_masses
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(m, e)| m / (e[1] - e[0]))
            .collect()
    }
}

pub fn histogram(dist: &EmpiricalDistribution, bins: usize) -> Result<DensityHistogram> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be >= 1".into()));
    }
    let bin_edges = uniform_grid(dist.diameter, bins + 1);
    let mut prev = 0.0;
    let bin_masses = bin_edges[1..]
        .iter()
        .map(|&e| {
            let c = dist.cdf(e);
            let m = c - prev;
            prev = c;
            m
        })
        .collect();
    Ok(DensityHistogram {
        bin_edges,
        bin_masses,
    })
}
