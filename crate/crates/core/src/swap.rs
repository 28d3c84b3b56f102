//! Exchanging equal-radius balls between a region and its complement, and the
//! greedy ball-pair decomposition that turns one equal-measure region into
//! another.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{estimate_self, uniform_grid, region_measure, EstimateOptions};
use crate::error::{Error, Result};
use crate::geometry::{chord, fill_uniform, reflect_across, bisector_normal, Metric, SpaceSpec, SpherePoint};
use crate::region::{
    ball_fits_or_sample, mc_measure, sample_in_cap, sample_region, sampled_ball_fits, BallVerdict,
    Cap, Region,
};
use crate::rng::{self, derive_seed};

/// Probe count for sampled containment verdicts.
pub const DEFAULT_PROBES: usize = 2048;

/// One exchange: the ball around `center_in_a` leaves A, the ball around
/// `center_in_abar` joins it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapRecord {
    pub center_in_a: SpherePoint,
    pub center_in_abar: SpherePoint,
    pub angular_radius: f64,
    pub verdict_in_a: BallVerdict,
    pub verdict_in_abar: BallVerdict,
}

impl SwapRecord {
    fn cap_in_a(&self) -> Result<Region> {
        Region::cap(self.center_in_a.clone(), self.angular_radius)
    }

    fn cap_in_abar(&self) -> Result<Region> {
        Region::cap(self.center_in_abar.clone(), self.angular_radius)
    }

    pub fn is_degenerate(&self) -> bool {
        self.center_in_a == self.center_in_abar
    }

    /// (A \ BB(P, θ)) ∪ BB(P̄, θ)
    pub fn apply(&self, a: &Region) -> Result<Region> {
        Ok(Region::Union(vec![
            a.clone().minus(self.cap_in_a()?),
            self.cap_in_abar()?,
        ]))
    }
}

/// Swaps BB(p, θ) ⊆ A with BB(pbar, θ) ⊆ Ā. When `p == pbar` the swap is
/// the identity and only the first containment is required.
pub fn swap_balls(
    a: &Region,
    space: &SpaceSpec,
    p: &SpherePoint,
    pbar: &SpherePoint,
    theta: f64,
    probes: usize,
    seed: u64,
) -> Result<(Region, SwapRecord)> {
    let verdict_in_a = ball_fits_or_sample(a, space, p, theta, probes, derive_seed(seed, 1))?;
    if !verdict_in_a.fits() {
        return Err(Error::BallDoesNotFit(format!(
            "BB({p}, {theta}) is not inside A ({verdict_in_a:?})"
        )));
    }
    let verdict_in_abar = if p == pbar {
        verdict_in_a
    } else {
        let abar = a.clone().complement();
        let v = ball_fits_or_sample(&abar, space, pbar, theta, probes, derive_seed(seed, 2))?;
        if !v.fits() {
            return Err(Error::BallDoesNotFit(format!(
                "BB({pbar}, {theta}) is not inside the complement of A ({v:?})"
            )));
        }
        v
    };
    let record = SwapRecord {
        center_in_a: p.clone(),
        center_in_abar: pbar.clone(),
        angular_radius: theta,
        verdict_in_a,
        verdict_in_abar,
    };
    Ok((record.apply(a)?, record))
}

/// Outcome of comparing St_A − St_Ā before and after a swap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapInvariance {
    /// sup over the grid of |D_before(ℓ) − D_after(ℓ)|.
    pub drift: f64,
    /// Four summed DKW half-widths plus any mass uncertainty.
    pub tolerance: f64,
    pub pass: bool,
    pub pairs: usize,
    pub seeds: Vec<u64>,
}

/// D(ℓ) = St_A(ℓ) − St_Ā(ℓ) on `grid`, with its tolerance contribution.
#[allow(clippy::too_many_arguments)]
pub(crate) fn difference_profile(
    a: &Region,
    space: &SpaceSpec,
    metric: Metric,
    pairs: usize,
    seeds: (u64, u64),
    grid: &[f64],
    delta: f64,
    opts: &EstimateOptions,
) -> Result<(Vec<f64>, f64)> {
    let abar = a.clone().complement();
    let da = estimate_self(a, space, metric, pairs, seeds.0, opts)?;
    let db = estimate_self(&abar, space, metric, pairs, seeds.1, opts)?;
    let profile = grid.iter().map(|&l| da.cdf(l) - db.cdf(l)).collect();
    let tol = da.dkw_band(delta) + db.dkw_band(delta) + da.mass_half_width() + db.mass_half_width();
    Ok((profile, tol))
}

fn sup_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Estimates St_A − St_Ā before and after the swap and compares them.
#[allow(clippy::too_many_arguments)]
pub fn verify_swap_invariance(
    a: &Region,
    space: &SpaceSpec,
    metric: Metric,
    swap: &SwapRecord,
    pairs: usize,
    seed: u64,
    grid: &[f64],
    delta: f64,
) -> Result<SwapInvariance> {
    let opts = EstimateOptions::default();
    let after = swap.apply(a)?;
    let seeds: Vec<u64> = (0..4).map(|k| derive_seed(seed, k)).collect();
    let (before, tol_b) =
        difference_profile(a, space, metric, pairs, (seeds[0], seeds[1]), grid, delta, &opts)?;
    let (after, tol_a) =
        difference_profile(&after, space, metric, pairs, (seeds[2], seeds[3]), grid, delta, &opts)?;
    let drift = sup_abs_diff(&before, &after);
    let tolerance = tol_b + tol_a;
    Ok(SwapInvariance {
        drift,
        tolerance,
        pass: drift <= tolerance,
        pairs,
        seeds,
    })
}

/// Largest deviation between |P̄′Q| and |P′ r(Q)| over random P̄′ in
/// BB(P̄, θ) and uniform Q, where r is the bisector reflection and
/// P′ = r(P̄′). Also checks that every P′ lands in BB(P, θ).
pub fn reflection_pairing_error(
    p: &SpherePoint,
    pbar: &SpherePoint,
    theta: f64,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    let u = bisector_normal(p, pbar)?;
    let inner = sample_in_cap(pbar, theta, draws, derive_seed(seed, 0));
    let cos_t = theta.cos();
    let errors = rng::par_chunks(draws, derive_seed(seed, 1), |rng, len| {
        let mut q = SpherePoint::north(p.dim());
        (0..len)
            .map(|_| {
                fill_uniform(rng, &mut q);
                q.coords().to_vec()
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .zip(&inner)
    .map(|(q, pbar_prime)| {
        let p_prime = reflect_across(pbar_prime.coords(), &u);
        let rq = reflect_across(&q, &u);
        let in_ball = crate::geometry::dot(&p_prime, p.coords()) >= cos_t - 1e-12;
        let err = (chord(pbar_prime.coords(), &q) - chord(&p_prime, &rq)).abs();
        if in_ball {
            err
        } else {
            f64::INFINITY
        }
    })
    .fold(0.0, f64::max);
    Ok(errors)
}

/// A ball found by [`largest_ball`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoundBall {
    pub center: SpherePoint,
    pub angular_radius: f64,
    /// Width of the final bisection bracket; the true largest fitting
    /// radius at this center is below `angular_radius + radius_tolerance`.
    pub radius_tolerance: f64,
    pub candidates: usize,
}

/// Approximately largest ball inside `region`: uniform candidate centers,
/// each with a bisection on the radius, keeping the best.
pub fn largest_ball(
    region: &Region,
    space: &SpaceSpec,
    candidates: usize,
    seed: u64,
    radius_tolerance: f64,
    probes: usize,
) -> Result<FoundBall> {
    if candidates == 0 {
        return Err(Error::InvalidArgument("candidates must be >= 1".into()));
    }
    if !(radius_tolerance > 0.0) {
        return Err(Error::InvalidArgument("radius_tolerance must be positive".into()));
    }
    space
        .single_sphere()
        .ok_or_else(|| Error::SpaceMismatch("balls live on a single sphere".into()))?;
    let centers = match sample_region(region, space, candidates, derive_seed(seed, 0), 1000) {
        Ok(c) => c,
        Err(Error::SamplingBudget { .. }) => return Err(Error::NoCandidate),
        Err(e) => return Err(e),
    };
    let radii: Vec<f64> = centers
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let c = &c.factors()[0];
            let fits = |theta: f64, step: u64| match crate::region::ball_fits(region, space, c, theta)
                .ok()
                .flatten()
            {
                Some(b) => b,
                None => sampled_ball_fits(
                    region,
                    c,
                    theta,
                    probes,
                    derive_seed(seed, 1 + ((i as u64) << 16) + step),
                ),
            };
            let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
            if fits(hi, 0) {
                return hi;
            }
            let mut step = 1;
            while hi - lo > radius_tolerance {
                let mid = 0.5 * (lo + hi);
                if fits(mid, step) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                step += 1;
            }
            lo
        })
        .collect();
    let (best, radius) = radii
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
    if radius <= 0.0 {
        return Err(Error::NoCandidate);
    }
    Ok(FoundBall {
        center: centers[best].factors()[0].clone(),
        angular_radius: radius,
        radius_tolerance,
        candidates,
    })
}

/// Budget and stopping rules for [`greedy_decomposition`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyParams {
    pub max_swaps: usize,
    pub min_radius: f64,
    pub candidates: usize,
    pub radius_tolerance: f64,
    pub probes: usize,
    /// Samples for each residual measure estimate.
    pub residual_samples: usize,
    /// Pairs per distribution in the per-swap drift check.
    pub drift_pairs: usize,
    pub grid_points: usize,
    pub metric: Metric,
    pub delta: f64,
    /// Largest accepted |μ(A) − μ(B)| when both measures are exact.
    pub measure_tolerance: f64,
}

impl Default for GreedyParams {
    fn default() -> Self {
        GreedyParams {
            max_swaps: 64,
            min_radius: 0.05,
            candidates: 2000,
            radius_tolerance: 1e-3,
            probes: DEFAULT_PROBES,
            residual_samples: 1_000_000,
            drift_pairs: 200_000,
            grid_points: 256,
            metric: Metric::Euclidean,
            delta: 1e-3,
            measure_tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// A and B already coincide.
    Identical,
    MaxSwaps,
    /// The best ball pair was smaller than `min_radius`.
    BelowMinRadius,
    /// No candidate center could be drawn from a residual set.
    NoCandidate,
}

/// Record of a greedy run. `residual_measure[0]` is the initial estimate of
/// μ(A − B); entry k+1 follows swap k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTrace {
    pub swaps: Vec<SwapRecord>,
    pub residual_measure: Vec<f64>,
    pub residual_half_width: f64,
    pub invariant_drift: Vec<f64>,
    pub drift_tolerance: Vec<f64>,
    pub expression_size: Vec<usize>,
    pub expression_depth: usize,
    pub stop_reason: StopReason,
    pub seed: u64,
}

/// A after swapping out `out_balls` and taking in `in_balls`:
/// (A \ ∪ out) ∪ in_1 ∪ in_2 ∪ …
fn swapped_region(a: &Region, out_balls: &[Region], in_balls: &[Region]) -> Region {
    if out_balls.is_empty() {
        return a.clone();
    }
    let mut parts = vec![a.clone().minus(Region::Union(out_balls.to_vec()))];
    parts.extend(in_balls.iter().cloned());
    Region::Union(parts)
}

/// Main-Lemma procedure: repeatedly swap the largest equal-radius ball pair
/// found in A_k − B and B − A_k.
pub fn greedy_decomposition(
    a: &Region,
    b: &Region,
    space: &SpaceSpec,
    params: &GreedyParams,
    seed: u64,
) -> Result<DecompositionTrace> {
    let opts = EstimateOptions {
        delta: params.delta,
        ..EstimateOptions::default()
    };
    let ma = region_measure(a, space, derive_seed(seed, 0xa), &opts)?;
    let mb = region_measure(b, space, derive_seed(seed, 0xb), &opts)?;
    let allowed = if ma.exact && mb.exact {
        params.measure_tolerance
    } else {
        ma.half_width + mb.half_width
    };
    if (ma.value - mb.value).abs() > allowed {
        return Err(Error::MeasureHypothesis(format!(
            "μ(A) = {} and μ(B) = {} differ by more than {allowed}",
            ma.value, mb.value
        )));
    }

    let grid = uniform_grid(params.metric.diameter(space), params.grid_points);
    let residual_seed = derive_seed(seed, 0x7e5);
    let residual = |ak: &Region| -> Result<(f64, f64)> {
        let m = mc_measure(&ak.clone().minus(b.clone()), space, params.residual_samples, residual_seed, params.delta)?;
        Ok((m.value, m.half_width))
    };
    let profile = |ak: &Region, k: u64| {
        difference_profile(
            ak,
            space,
            params.metric,
            params.drift_pairs,
            (derive_seed(seed, 0x1000 + 2 * k), derive_seed(seed, 0x1001 + 2 * k)),
            &grid,
            params.delta,
            &opts,
        )
    };

    let mut trace = DecompositionTrace {
        swaps: vec![],
        residual_measure: vec![],
        residual_half_width: 0.0,
        invariant_drift: vec![],
        drift_tolerance: vec![],
        expression_size: vec![a.size()],
        expression_depth: a.depth(),
        stop_reason: StopReason::MaxSwaps,
        seed,
    };
    let (r0, hw) = residual(a)?;
    trace.residual_measure.push(r0);
    trace.residual_half_width = hw;
    if a == b {
        trace.residual_measure[0] = 0.0;
        trace.stop_reason = StopReason::Identical;
        return Ok(trace);
    }

    let mut out_balls: Vec<Region> = vec![];
    let mut in_balls: Vec<Region> = vec![];
    let mut current = a.clone();
    let (mut prev_profile, mut prev_tol) = profile(&current, 0)?;

    for k in 0..params.max_swaps {
        let step_seed = derive_seed(seed, 0x2000 + k as u64);
        let a_side = current.clone().minus(b.clone());
        let b_side = b.clone().minus(current.clone());
        let found = largest_ball(&a_side, space, params.candidates, derive_seed(step_seed, 1), params.radius_tolerance, params.probes)
            .and_then(|ba| {
                largest_ball(&b_side, space, params.candidates, derive_seed(step_seed, 2), params.radius_tolerance, params.probes)
                    .map(|bb| (ba, bb))
            });
        let (ball_a, ball_b) = match found {
            Ok(pair) => pair,
            Err(Error::NoCandidate) => {
                trace.stop_reason = StopReason::NoCandidate;
                break;
            }
            Err(e) => return Err(e),
        };
        let radius = ball_a.angular_radius.min(ball_b.angular_radius);
        if radius < params.min_radius {
            trace.stop_reason = StopReason::BelowMinRadius;
            break;
        }
        let (_, record) = swap_balls(
            &current,
            space,
            &ball_a.center,
            &ball_b.center,
            radius,
            params.probes,
            derive_seed(step_seed, 3),
        )?;
        out_balls.push(Region::Cap(Cap::new(ball_a.center.clone(), radius)?));
        in_balls.push(Region::Cap(Cap::new(ball_b.center.clone(), radius)?));
        current = swapped_region(a, &out_balls, &in_balls);
        trace.swaps.push(record);

        let (r, _) = residual(&current)?;
        trace.residual_measure.push(r);
        let (next_profile, next_tol) = profile(&current, k as u64 + 1)?;
        trace.invariant_drift.push(sup_abs_diff(&prev_profile, &next_profile));
        trace.drift_tolerance.push(prev_tol + next_tol);
        trace.expression_size.push(current.size());
        trace.expression_depth = trace.expression_depth.max(current.depth());
        prev_profile = next_profile;
        prev_tol = next_tol;
    }
    Ok(trace)
}
