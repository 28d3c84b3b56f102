//! Two-sample machinery and the numerical checks of the swap lemma, the
//! measure-difference lemma and the three equal-distribution theorems.
//!
//! Equality of distance distributions is judged on cumulative measures with
//! DKW tolerances at δ = 1e-3 by default: `dkw(N) = √(ln(2/δ)/(2N))` bounds
//! the sup-distance between an empirical CDF of N i.i.d. draws and its law
//! with probability 1 − δ.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distribution::{
    estimate_cross, estimate_self, uniform_grid, EmpiricalDistribution, EstimateOptions,
};
use crate::error::{Error, Result};
use crate::fixtures::Partition;
use crate::geometry::{Metric, SpherePoint};
use crate::region::{exact_measure, Region};
use crate::rng::derive_seed;
use crate::swap::{difference_profile, reflection_pairing_error, swap_balls, verify_swap_invariance};

/// Largest error accepted for the pointwise reflection identity.
pub const REFLECTION_TOLERANCE: f64 = 1e-12;

/// √(ln(2/δ) / (2·pairs)).
pub fn dkw_tolerance(pairs: usize, delta: f64) -> f64 {
    assert!(pairs >= 1, "dkw_tolerance needs pairs >= 1");
    assert!(delta > 0.0 && delta < 1.0, "dkw_tolerance needs 0 < delta < 1");
    ((2.0 / delta).ln() / (2.0 * pairs as f64)).sqrt()
}

/// Kolmogorov–Smirnov distance between the probability-normalized CDFs.
pub fn ks_two_sample(d1: &EmpiricalDistribution, d2: &EmpiricalDistribution) -> Result<f64> {
    if d1.metric() != d2.metric() {
        return Err(Error::MetricMismatch(
            d1.metric().to_string(),
            d2.metric().to_string(),
        ));
    }
    let (x, y) = (d1.distances(), d2.distances());
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / nx - j as f64 / ny).abs());
    }
    Ok(sup)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Lemma,
    MainLemma,
    Theorem1,
    Theorem2,
    Theorem3,
}

impl std::str::FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lemma" => Claim::Lemma,
            "main_lemma" | "main-lemma" => Claim::MainLemma,
            "theorem1" => Claim::Theorem1,
            "theorem2" => Claim::Theorem2,
            "theorem3" => Claim::Theorem3,
            other => return Err(Error::InvalidArgument(format!("unknown claim '{other}'"))),
        })
    }
}

/// One statistic compared against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, statistic: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            statistic,
            tolerance,
            pass: statistic <= tolerance,
        }
    }
}

/// Verdict of a verifier run. The headline statistic and tolerance are those
/// of the check closest to failing, so `pass == (statistic <= tolerance)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: Claim,
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub pairs: usize,
    pub seeds: Vec<u64>,
    pub fixtures: Vec<String>,
    /// False when the fixture does not satisfy the claim's measure
    /// hypothesis (control runs).
    pub hypothesis_holds: bool,
    /// Theorem 2 only: the premise st_S = st_S′ was rejected by the data, so
    /// no verdict on the implication is given.
    pub premise_violated: bool,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, f64>,
}

impl VerificationReport {
    fn from_checks(
        claim: Claim,
        pairs: usize,
        seeds: Vec<u64>,
        fixtures: Vec<String>,
        hypothesis_holds: bool,
        checks: Vec<Check>,
    ) -> Self {
        let worst = checks
            .iter()
            .max_by(|a, b| {
                (a.statistic / a.tolerance)
                    .total_cmp(&(b.statistic / b.tolerance))
            })
            .expect("at least one check");
        VerificationReport {
            claim,
            statistic: worst.statistic,
            tolerance: worst.tolerance,
            pass: worst.statistic <= worst.tolerance,
            pairs,
            seeds,
            fixtures,
            hypothesis_holds,
            premise_violated: false,
            checks,
            values: BTreeMap::new(),
        }
    }
}

/// Shared parameters of the verifiers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub pairs: usize,
    pub seed: u64,
    pub delta: f64,
    pub grid_points: usize,
    pub estimate: EstimateOptions,
}

impl VerifyParams {
    pub fn new(pairs: usize, seed: u64) -> Self {
        VerifyParams {
            pairs,
            seed,
            delta: 1e-3,
            grid_points: 256,
            estimate: EstimateOptions::default(),
        }
    }

    fn two_sample_tolerance(&self) -> f64 {
        2.0 * dkw_tolerance(self.pairs, self.delta)
    }
}

fn exact_value(region: &Region, p: &Partition) -> Result<f64> {
    exact_measure(region, &p.space)?
        .map(|m| m.value)
        .ok_or_else(|| {
            Error::MeasureHypothesis(format!(
                "fixture '{}' needs exact region measures",
                p.name
            ))
        })
}

fn same_measure(a: f64, b: f64, total: f64) -> bool {
    (a - b).abs() <= 1e-9 * total
}

fn equal_split_check(claim: Claim, p: &Partition, params: &VerifyParams) -> Result<VerificationReport> {
    let ma = exact_value(&p.a, p)?;
    let mb = exact_value(&p.abar, p)?;
    let seeds = vec![derive_seed(params.seed, 1), derive_seed(params.seed, 2)];
    let da = estimate_self(&p.a, &p.space, p.metric, params.pairs, seeds[0], &params.estimate)?;
    let db = estimate_self(&p.abar, &p.space, p.metric, params.pairs, seeds[1], &params.estimate)?;
    let ks = ks_two_sample(&da, &db)?;
    let mut report = VerificationReport::from_checks(
        claim,
        params.pairs,
        seeds,
        vec![p.describe()],
        same_measure(ma, mb, p.space.measure()),
        vec![Check::new("ks(A, complement)", ks, params.two_sample_tolerance())],
    );
    report.values.insert("measure_a".into(), ma);
    report.values.insert("measure_complement".into(), mb);
    Ok(report)
}

/// Equal-area halves have the same distance distribution: probability-
/// normalized KS between St_A and St_Ā against 2·dkw(pairs, δ).
pub fn verify_theorem1(p: &Partition, params: &VerifyParams) -> Result<VerificationReport> {
    equal_split_check(Claim::Theorem1, p, params)
}

/// The equal-split check on a product of spheres under a product metric.
pub fn verify_theorem3(p: &Partition, params: &VerifyParams) -> Result<VerificationReport> {
    if !matches!(p.metric, Metric::Product(_)) {
        return Err(Error::InvalidArgument(format!(
            "fixture '{}' must use a product metric",
            p.name
        )));
    }
    equal_split_check(Claim::Theorem3, p, params)
}

/// St_A − St_Ā = St_B − St_B̄ whenever μ(A) = μ(B), compared mass-scaled on a
/// grid against four summed DKW half-widths.
pub fn verify_main_lemma(
    p: &Partition,
    q: &Partition,
    params: &VerifyParams,
) -> Result<VerificationReport> {
    if p.space != q.space || p.metric != q.metric {
        return Err(Error::InvalidArgument(
            "both partitions must share space and metric".into(),
        ));
    }
    let (ma, mabar) = (exact_value(&p.a, p)?, exact_value(&p.abar, p)?);
    let (mb, mbbar) = (exact_value(&q.a, q)?, exact_value(&q.abar, q)?);
    let seeds: Vec<u64> = (1..=4).map(|k| derive_seed(params.seed, k)).collect();
    let diam = p.metric.diameter(&p.space);
    let grid = uniform_grid(diam, params.grid_points);
    let (dp, tol_p) = difference_profile(
        &p.a, &p.space, p.metric, params.pairs, (seeds[0], seeds[1]), &grid, params.delta, &params.estimate,
    )?;
    let (dq, tol_q) = difference_profile(
        &q.a, &q.space, q.metric, params.pairs, (seeds[2], seeds[3]), &grid, params.delta, &params.estimate,
    )?;
    let gaps: Vec<f64> = dp.iter().zip(&dq).map(|(x, y)| (x - y).abs()).collect();
    let sup = gaps.iter().copied().fold(0.0, f64::max);
    let mut report = VerificationReport::from_checks(
        Claim::MainLemma,
        params.pairs,
        seeds,
        vec![p.describe(), q.describe()],
        same_measure(ma, mb, p.space.measure()),
        vec![Check::new("sup |D_A - D_B|", sup, tol_p + tol_q)],
    );
    report.values.insert("endpoint_gap".into(), *gaps.last().unwrap_or(&0.0));
    report.values.insert(
        "predicted_endpoint_gap".into(),
        (ma * ma - mabar * mabar - mb * mb + mbbar * mbbar).abs(),
    );
    Ok(report)
}

/// If st_S = st_S′ then st_S̄ = st_S̄′ and st_{S,S̄} = st_{S′,S̄′}. The premise
/// is re-checked by KS first; a rejected premise yields a failing report
/// flagged `premise_violated`. The report also checks the decomposition
/// St_S + St_S̄ + St_{S,S̄} = St_space for S.
pub fn verify_theorem2(
    s: &Partition,
    s_prime: &Partition,
    params: &VerifyParams,
) -> Result<VerificationReport> {
    if s.space != s_prime.space || s.metric != s_prime.metric {
        return Err(Error::InvalidArgument(
            "both partitions must share space and metric".into(),
        ));
    }
    let (space, metric) = (&s.space, s.metric);
    let ms = exact_value(&s.a, s)?;
    let msp = exact_value(&s_prime.a, s_prime)?;
    let opts = &params.estimate;
    let seeds: Vec<u64> = (1..=7).map(|k| derive_seed(params.seed, k)).collect();
    let pairs = params.pairs;
    let tol = params.two_sample_tolerance();
    let fixtures = vec![s.describe(), s_prime.describe()];

    let d_s = estimate_self(&s.a, space, metric, pairs, seeds[0], opts)?;
    let d_sp = estimate_self(&s_prime.a, space, metric, pairs, seeds[1], opts)?;
    let premise = Check::new("premise ks(S, S')", ks_two_sample(&d_s, &d_sp)?, tol);
    let hypothesis = same_measure(ms, msp, space.measure());
    if !premise.pass {
        let mut r = VerificationReport::from_checks(
            Claim::Theorem2,
            pairs,
            seeds[..2].to_vec(),
            fixtures,
            hypothesis,
            vec![premise],
        );
        r.premise_violated = true;
        return Ok(r);
    }

    let d_c = estimate_self(&s.abar, space, metric, pairs, seeds[2], opts)?;
    let d_cp = estimate_self(&s_prime.abar, space, metric, pairs, seeds[3], opts)?;
    let complement = Check::new("ks(complement S, complement S')", ks_two_sample(&d_c, &d_cp)?, tol);

    let d_x = estimate_cross(&s.a, &s.abar, space, metric, pairs, seeds[4], opts)?;
    let d_xp = estimate_cross(&s_prime.a, &s_prime.abar, space, metric, pairs, seeds[5], opts)?;
    let cross = Check::new("ks(cross S, cross S')", ks_two_sample(&d_x, &d_xp)?, tol);

    let d_full = estimate_self(&Region::Full, space, metric, pairs, seeds[6], opts)?;
    let decomposition = decomposition_check(&d_s, &d_c, &d_x, &d_full, params)?;

    let mut r = VerificationReport::from_checks(
        Claim::Theorem2,
        pairs,
        seeds,
        fixtures,
        hypothesis,
        vec![premise, complement, cross, decomposition],
    );
    r.values.insert("measure_s".into(), ms);
    r.values.insert("measure_s_prime".into(), msp);
    Ok(r)
}

/// sup over the grid of |St_S + St_S̄ + St_{S,S̄} − St_space| against the sum
/// of the four DKW half-widths.
pub fn decomposition_check(
    d_s: &EmpiricalDistribution,
    d_c: &EmpiricalDistribution,
    d_x: &EmpiricalDistribution,
    d_full: &EmpiricalDistribution,
    params: &VerifyParams,
) -> Result<Check> {
    let grid = uniform_grid(d_full.diameter(), params.grid_points);
    let sup = grid
        .iter()
        .map(|&l| (d_s.cdf(l) + d_c.cdf(l) + d_x.cdf(l) - d_full.cdf(l)).abs())
        .fold(0.0, f64::max);
    let tol = [d_s, d_c, d_x, d_full]
        .iter()
        .map(|d| d.dkw_band(params.delta) + d.mass_half_width())
        .sum();
    Ok(Check::new("decomposition identity", sup, tol))
}

/// Parameters of a single swap for [`verify_lemma`].
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaSwap {
    pub p: SpherePoint,
    pub pbar: SpherePoint,
    pub theta: f64,
    pub reflection_draws: usize,
}

/// Swapping BB(P, θ) ⊆ A with BB(P̄, θ) ⊆ Ā leaves St_A − St_Ā unchanged;
/// also checks the pointwise reflection identity behind it.
pub fn verify_lemma(
    p: &Partition,
    swap: &LemmaSwap,
    params: &VerifyParams,
) -> Result<VerificationReport> {
    let (_, record) = swap_balls(
        &p.a,
        &p.space,
        &swap.p,
        &swap.pbar,
        swap.theta,
        crate::swap::DEFAULT_PROBES,
        derive_seed(params.seed, 9),
    )?;
    let grid = uniform_grid(p.metric.diameter(&p.space), params.grid_points);
    let inv = verify_swap_invariance(
        &p.a,
        &p.space,
        p.metric,
        &record,
        params.pairs,
        params.seed,
        &grid,
        params.delta,
    )?;
    let mut checks = vec![Check::new("swap drift", inv.drift, inv.tolerance)];
    let mut seeds = inv.seeds.clone();
    if swap.p != swap.pbar {
        let rs = derive_seed(params.seed, 10);
        let err = reflection_pairing_error(&swap.p, &swap.pbar, swap.theta, swap.reflection_draws, rs)?;
        checks.push(Check::new("reflection pairing", err, REFLECTION_TOLERANCE));
        seeds.push(rs);
    }
    let mut r = VerificationReport::from_checks(
        Claim::Lemma,
        params.pairs,
        seeds,
        vec![p.describe(), format!(
            "swap BB({}, {}) <-> BB({}, {})",
            swap.p, swap.theta, swap.pbar, swap.theta
        )],
        true,
        checks,
    );
    r.values.insert("angular_radius".into(), swap.theta);
    Ok(r)
}
