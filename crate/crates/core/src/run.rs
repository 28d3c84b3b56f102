//! Run configurations and the commands behind the `sphere-dist` binary.
//!
//! A [`RunConfig`] is assembled from a configuration document (see
//! [`crate::syntax`]) and then from command-line overrides, both through
//! [`RunConfig::set`]. [`execute`] performs the run and returns the artifact
//! text, a one-line summary and the exit code.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::distribution::{
    estimate_cross, estimate_self, histogram, region_measure, uniform_grid, EstimateOptions,
};
use crate::error::{Error, Result};
use crate::fixtures::{self, Partition};
use crate::geometry::{Metric, Rotation, SpaceSpec, SpherePoint};
use crate::io::{self, Artifact};
use crate::region::Region;
use crate::rng::derive_seed;
use crate::swap::{greedy_decomposition, GreedyParams};
use crate::syntax::{parse_binding, parse_document, Document};
use crate::verify::{
    dkw_tolerance, ks_two_sample, verify_lemma, verify_main_lemma, verify_theorem1,
    verify_theorem2, verify_theorem3, Claim, LemmaSwap, VerifyParams,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

const ROTATION_TAG: u64 = 0x726f_7461;

/// Exit status for an error: 3 when a sampling budget ran out, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SamplingBudget { .. } | Error::NoCandidate => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Measure,
    Dist,
    Compare,
    Verify,
    Decompose,
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "measure" => Command::Measure,
            "dist" => Command::Dist,
            "compare" => Command::Compare,
            "verify" => Command::Verify,
            "decompose" => Command::Decompose,
            other => return Err(Error::InvalidArgument(format!("unknown command '{other}'"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub claim: Option<Claim>,
    pub space: Option<SpaceSpec>,
    pub metric: Option<Metric>,
    pub regions: Vec<(String, Region)>,
    /// Region names (or, with `fixture`, unused) for the first and second set.
    pub a: Option<String>,
    pub b: Option<String>,
    pub fixture: Option<String>,
    pub fixture_b: Option<String>,
    pub pairs: usize,
    pub samples: usize,
    pub seed: u64,
    pub delta: f64,
    pub grid: usize,
    pub bins: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub max_swaps: usize,
    pub min_radius: f64,
    pub candidates: usize,
    pub swap_theta: f64,
    pub swap_p: Option<SpherePoint>,
    pub swap_pbar: Option<SpherePoint>,
    pub reflection_draws: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GreedyParams::default();
        RunConfig {
            command: None,
            claim: None,
            space: None,
            metric: None,
            regions: Vec::new(),
            a: None,
            b: None,
            fixture: None,
            fixture_b: None,
            pairs: 1_000_000,
            samples: 1_000_000,
            seed: 0,
            delta: 1e-3,
            grid: 256,
            bins: None,
            format: None,
            out: None,
            threads: None,
            max_swaps: g.max_swaps,
            min_radius: g.min_radius,
            candidates: g.candidates,
            swap_theta: PI / 8.0,
            swap_p: None,
            swap_pbar: None,
            reflection_draws: 100_000,
        }
    }
}

fn count(v: &str) -> Result<usize> {
    let bad = || Error::InvalidArgument(format!("expected a positive integer, got '{v}'"));
    let n = match v.parse::<usize>() {
        Ok(n) => n,
        Err(_) => {
            let x: f64 = v.parse().map_err(|_| bad())?;
            if x.fract() != 0.0 || !(1.0..=9.0e15).contains(&x) {
                return Err(bad());
            }
            x as usize
        }
    };
    if n == 0 {
        return Err(bad());
    }
    Ok(n)
}

fn positive(v: &str) -> Result<f64> {
    match v.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(Error::InvalidArgument(format!("expected a positive number, got '{v}'"))),
    }
}

fn point(v: &str) -> Result<SpherePoint> {
    let inner = v
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::InvalidArgument(format!("expected [x, y, ...], got '{v}'")))?;
    let coords = inner
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad coordinate '{}'", c.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    SpherePoint::normalized(coords)
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "command" => self.command = Some(value.parse()?),
            "claim" => self.claim = Some(value.parse()?),
            "space" => self.space = Some(value.parse()?),
            "metric" => self.metric = Some(value.parse()?),
            "a" => self.a = Some(value.to_string()),
            "b" => self.b = Some(value.to_string()),
            "fixture" | "fixture_b" => {
                if fixtures::by_name(value).is_none() {
                    return Err(Error::InvalidArgument(format!(
                        "unknown fixture '{value}' (known: {})",
                        fixtures::NAMES.join(", ")
                    )));
                }
                let slot = if key == "fixture" { &mut self.fixture } else { &mut self.fixture_b };
                *slot = Some(value.to_string());
            }
            "pairs" => self.pairs = count(value)?,
            "samples" => self.samples = count(value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad seed '{value}'")))?
            }
            "delta" => {
                let d = positive(value)?;
                if d >= 1.0 {
                    return Err(Error::InvalidArgument(format!("delta {d} outside (0, 1)")));
                }
                self.delta = d;
            }
            "grid" => {
                self.grid = count(value)?;
                if self.grid < 2 {
                    return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
                }
            }
            "bins" => self.bins = Some(count(value)?),
            "format" => {
                self.format = Some(match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    other => {
                        return Err(Error::InvalidArgument(format!("unknown format '{other}'")))
                    }
                })
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(count(value)?),
            "max_swaps" => self.max_swaps = count(value)?,
            "min_radius" => self.min_radius = positive(value)?,
            "candidates" => self.candidates = count(value)?,
            "swap_theta" => self.swap_theta = positive(value)?,
            "swap_p" => self.swap_p = Some(point(value)?),
            "swap_pbar" => self.swap_pbar = Some(point(value)?),
            "reflection_draws" => self.reflection_draws = count(value)?,
            other => return Err(Error::InvalidArgument(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }

    /// Adds the region bindings and settings of a document. Errors in a
    /// setting are reported at its position.
    pub fn apply_document(&mut self, doc: &Document) -> Result<()> {
        self.regions.extend(doc.regions.iter().cloned());
        for s in &doc.settings {
            self.set(&s.key, &s.value).map_err(|e| Error::Parse {
                line: s.line,
                column: s.column,
                message: format!("{}: {e}", s.key),
            })?;
        }
        Ok(())
    }

    pub fn from_document(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_document(&parse_document(text)?)?;
        Ok(c)
    }

    /// Adds a `NAME=EXPR` binding given on the command line.
    pub fn bind(&mut self, text: &str) -> Result<()> {
        let b = parse_binding(text, &self.regions)?;
        self.regions.push(b);
        Ok(())
    }

    fn region(&self, name: &str) -> Result<Region> {
        self.regions
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r.clone())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown region '{name}'")))
    }

    fn fixture_partition(&self, name: &str) -> Result<Partition> {
        let mut p = fixtures::by_name(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown fixture '{name}'")))?;
        if let Some(space) = &self.space {
            if *space != p.space {
                return Err(Error::SpaceMismatch(format!(
                    "fixture '{name}' lives on {}, config says {space}",
                    p.space
                )));
            }
        }
        if let Some(m) = self.metric {
            m.check_space(&p.space)?;
            p.metric = m;
        }
        Ok(p)
    }

    fn space(&self) -> Result<SpaceSpec> {
        self.space
            .clone()
            .ok_or_else(|| Error::InvalidArgument("no space given".into()))
    }

    fn metric(&self) -> Metric {
        self.metric.unwrap_or(Metric::Euclidean)
    }

    /// The first set: fixture `fixture`, region `a`, a region named `A`, or
    /// the only bound region.
    fn first(&self) -> Result<Partition> {
        if let Some(f) = &self.fixture {
            return self.fixture_partition(f);
        }
        let name = match &self.a {
            Some(a) => a.clone(),
            None if self.regions.iter().any(|(n, _)| n == "A") => "A".into(),
            None if self.regions.len() == 1 => self.regions[0].0.clone(),
            None => {
                return Err(Error::InvalidArgument(
                    "say which region to use (a = NAME or fixture = NAME)".into(),
                ))
            }
        };
        self.partition(&name)
    }

    /// The second set: fixture `fixture_b`, region `b`, or a region named `B`.
    fn second(&self) -> Result<Option<Partition>> {
        if let Some(f) = &self.fixture_b {
            return self.fixture_partition(f).map(Some);
        }
        let name = match &self.b {
            Some(b) => b.clone(),
            None if self.regions.iter().any(|(n, _)| n == "B") && self.fixture.is_none() => "B".into(),
            None => return Ok(None),
        };
        self.partition(&name).map(Some)
    }

    fn partition(&self, name: &str) -> Result<Partition> {
        let space = self.space()?;
        let metric = self.metric();
        metric.check_space(&space)?;
        let r = self.region(name)?;
        r.validate(&space)?;
        Ok(Partition::new(name, space, metric, r))
    }

    fn require_second(&self, what: &str) -> Result<Partition> {
        self.second()?.ok_or_else(|| {
            Error::InvalidArgument(format!("{what} needs a second set (b = NAME or fixture_b = NAME)"))
        })
    }

    fn estimate_options(&self) -> EstimateOptions {
        EstimateOptions {
            measure_samples: self.samples,
            delta: self.delta,
            ..EstimateOptions::default()
        }
    }

    fn verify_params(&self) -> VerifyParams {
        VerifyParams {
            pairs: self.pairs,
            seed: self.seed,
            delta: self.delta,
            grid_points: self.grid,
            estimate: self.estimate_options(),
        }
    }
}

/// Result of a run: the artifact, a one-line summary and the exit status.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub artifact: String,
    pub summary: String,
    pub code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureOutput {
    pub space: SpaceSpec,
    pub region: String,
    pub value: f64,
    pub half_width: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfOutput {
    pub metric: Metric,
    pub pairs: usize,
    pub mass_scale: f64,
    pub mass_half_width: f64,
    pub l: Vec<f64>,
    pub cdf: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramOutput {
    pub metric: Metric,
    pub pairs: usize,
    pub mass_scale: f64,
    pub bin_edges: Vec<f64>,
    pub bin_masses: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareOutput {
    pub metric: Metric,
    pub a: String,
    pub b: String,
    pub pairs: usize,
    pub seeds: Vec<u64>,
    pub ks: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn json_only(cfg: &RunConfig, what: &str) -> Result<()> {
    match cfg.format {
        Some(Format::Csv) => Err(Error::InvalidArgument(format!("{what} writes JSON only"))),
        _ => Ok(()),
    }
}

/// Runs the configured command.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let command = cfg
        .command
        .ok_or_else(|| Error::InvalidArgument("no command given".into()))?;
    match command {
        Command::Measure => measure(cfg),
        Command::Dist => dist(cfg),
        Command::Compare => compare(cfg),
        Command::Verify => verify(cfg),
        Command::Decompose => decompose(cfg),
    }
}

fn measure(cfg: &RunConfig) -> Result<Outcome> {
    json_only(cfg, "measure")?;
    let p = cfg.first()?;
    let m = region_measure(&p.a, &p.space, cfg.seed, &cfg.estimate_options())?;
    let data = MeasureOutput {
        space: p.space.clone(),
        region: p.a.to_string(),
        value: m.value,
        half_width: m.half_width,
        exact: m.exact,
    };
    Ok(Outcome {
        summary: format!(
            "measure = {} ± {} ({})",
            m.value,
            m.half_width,
            if m.exact { "exact" } else { "monte carlo" }
        ),
        artifact: io::to_json(&Artifact::new("measure", cfg.seed, data)),
        code: EXIT_PASS,
    })
}

fn dist(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.first()?;
    let opts = cfg.estimate_options();
    let d = match cfg.second()? {
        Some(q) => {
            if q.space != p.space {
                return Err(Error::SpaceMismatch(format!("{} vs {}", p.space, q.space)));
            }
            estimate_cross(&p.a, &q.a, &p.space, p.metric, cfg.pairs, cfg.seed, &opts)?
        }
        None => estimate_self(&p.a, &p.space, p.metric, cfg.pairs, cfg.seed, &opts)?,
    };
    let summary = format!(
        "{} pairs, metric {}, mass {} ± {}",
        d.pair_count(),
        d.metric(),
        d.mass_scale(),
        d.mass_half_width()
    );
    let artifact = match (cfg.bins, cfg.format.unwrap_or(Format::Csv)) {
        (Some(bins), Format::Csv) => io::histogram_csv(&d, &histogram(&d, bins)?)?,
        (None, Format::Csv) => io::cdf_csv(&d, &uniform_grid(d.diameter(), cfg.grid))?,
        (Some(bins), Format::Json) => {
            let h = histogram(&d, bins)?;
            io::to_json(&Artifact::new(
                "histogram",
                cfg.seed,
                HistogramOutput {
                    metric: d.metric(),
                    pairs: d.pair_count(),
                    mass_scale: d.mass_scale(),
                    bin_edges: h.bin_edges,
                    bin_masses: h.bin_masses,
                },
            ))
        }
        (None, Format::Json) => {
            let l = uniform_grid(d.diameter(), cfg.grid);
            let cdf = l.iter().map(|&x| d.cdf(x)).collect();
            io::to_json(&Artifact::new(
                "cdf",
                cfg.seed,
                CdfOutput {
                    metric: d.metric(),
                    pairs: d.pair_count(),
                    mass_scale: d.mass_scale(),
                    mass_half_width: d.mass_half_width(),
                    l,
                    cdf,
                },
            ))
        }
    };
    Ok(Outcome {
        artifact,
        summary,
        code: EXIT_PASS,
    })
}

fn compare(cfg: &RunConfig) -> Result<Outcome> {
    json_only(cfg, "compare")?;
    let p = cfg.first()?;
    let q = cfg.require_second("compare")?;
    if p.space != q.space {
        return Err(Error::SpaceMismatch(format!("{} vs {}", p.space, q.space)));
    }
    let opts = cfg.estimate_options();
    let seeds = vec![derive_seed(cfg.seed, 1), derive_seed(cfg.seed, 2)];
    let da = estimate_self(&p.a, &p.space, p.metric, cfg.pairs, seeds[0], &opts)?;
    let db = estimate_self(&q.a, &q.space, q.metric, cfg.pairs, seeds[1], &opts)?;
    let ks = ks_two_sample(&da, &db)?;
    let tolerance = 2.0 * dkw_tolerance(cfg.pairs, cfg.delta);
    let data = CompareOutput {
        metric: p.metric,
        a: p.a.to_string(),
        b: q.a.to_string(),
        pairs: cfg.pairs,
        seeds,
        ks,
        tolerance,
        pass: ks <= tolerance,
    };
    Ok(Outcome {
        summary: format!("ks = {ks} (tolerance {tolerance})"),
        artifact: io::to_json(&Artifact::new("comparison", cfg.seed, data)),
        code: EXIT_PASS,
    })
}

fn rotations_for(space: &SpaceSpec, seed: u64) -> Vec<Rotation> {
    space
        .dims
        .iter()
        .enumerate()
        .map(|(i, &n)| Rotation::random(n, derive_seed(seed, i as u64)))
        .collect()
}

fn verify(cfg: &RunConfig) -> Result<Outcome> {
    json_only(cfg, "verify")?;
    let claim = cfg
        .claim
        .ok_or_else(|| Error::InvalidArgument("verify needs a claim".into()))?;
    let params = cfg.verify_params();
    let p = cfg.first()?;
    let report = match claim {
        Claim::Theorem1 => verify_theorem1(&p, &params)?,
        Claim::Theorem3 => verify_theorem3(&p, &params)?,
        Claim::MainLemma => verify_main_lemma(&p, &cfg.require_second("main_lemma")?, &params)?,
        Claim::Theorem2 => {
            let q = match cfg.second()? {
                Some(q) => q,
                None => p.rotated(&rotations_for(&p.space, derive_seed(cfg.seed, ROTATION_TAG)))?,
            };
            verify_theorem2(&p, &q, &params)?
        }
        Claim::Lemma => {
            let n = match p.space.single_sphere() {
                Some(n) => n,
                None => {
                    return Err(Error::InvalidArgument(
                        "the swap lemma is checked on a single sphere".into(),
                    ))
                }
            };
            let center = cfg.swap_p.clone().unwrap_or_else(|| SpherePoint::north(n));
            let swap = LemmaSwap {
                pbar: cfg.swap_pbar.clone().unwrap_or_else(|| center.antipode()),
                p: center,
                theta: cfg.swap_theta,
                reflection_draws: cfg.reflection_draws,
            };
            verify_lemma(&p, &swap, &params)?
        }
    };
    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    let summary = format!(
        "{:?}: {} (statistic {} vs tolerance {}{})",
        claim,
        if report.pass { "pass" } else { "fail" },
        report.statistic,
        report.tolerance,
        if report.premise_violated { ", premise violated" } else { "" }
    );
    Ok(Outcome {
        artifact: io::to_json(&Artifact::new("verification", cfg.seed, report)),
        summary,
        code,
    })
}

fn decompose(cfg: &RunConfig) -> Result<Outcome> {
    json_only(cfg, "decompose")?;
    let p = cfg.first()?;
    let q = cfg.require_second("decompose")?;
    if p.space != q.space {
        return Err(Error::SpaceMismatch(format!("{} vs {}", p.space, q.space)));
    }
    let params = GreedyParams {
        max_swaps: cfg.max_swaps,
        min_radius: cfg.min_radius,
        candidates: cfg.candidates,
        residual_samples: cfg.samples,
        metric: p.metric,
        delta: cfg.delta,
        grid_points: cfg.grid,
        ..GreedyParams::default()
    };
    let trace = greedy_decomposition(&p.a, &q.a, &p.space, &params, cfg.seed)?;
    let drift_ok = trace
        .invariant_drift
        .iter()
        .zip(&trace.drift_tolerance)
        .all(|(d, t)| d <= t);
    let first = trace.residual_measure[0];
    let last = *trace.residual_measure.last().unwrap_or(&first);
    let summary = format!(
        "{} swaps, residual {} -> {}, stop: {:?}, drift {}",
        trace.swaps.len(),
        first,
        last,
        trace.stop_reason,
        if drift_ok { "within tolerance" } else { "EXCEEDS tolerance" }
    );
    Ok(Outcome {
        artifact: io::to_json(&Artifact::new("decomposition", cfg.seed, trace)),
        summary,
        code: if drift_ok { EXIT_PASS } else { EXIT_FAIL },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::VerificationReport;

    #[test]
    fn settings_parse_and_validate() {
        let mut c = RunConfig::default();
        c.set("pairs", "1e6").unwrap();
        assert_eq!(c.pairs, 1_000_000);
        assert!(c.set("pairs", "0").is_err());
        assert!(c.set("pairs", "2.5").is_err());
        assert!(c.set("delta", "1.5").is_err());
        assert!(c.set("colour", "red").is_err());
        assert!(c.set("fixture", "nope").is_err());
        c.set("space", "S^2 x S^1").unwrap();
        assert_eq!(c.space, Some(SpaceSpec::new(vec![2, 1]).unwrap()));
        c.set("swap_p", "[0, 0, 2]").unwrap();
        assert_eq!(c.swap_p, Some(SpherePoint::north(2)));
    }

    #[test]
    fn setting_errors_cite_their_line() {
        let err = RunConfig::from_document("space = S^2\n\npairs = lots\n").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 9)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn measure_full_sphere() {
        let c = RunConfig::from_document(
            "command = measure\nspace = S^2\nregion A = full()\n",
        )
        .unwrap();
        let out = execute(&c).unwrap();
        assert_eq!(out.code, 0);
        let a: Artifact<MeasureOutput> = io::from_json(&out.artifact).unwrap();
        assert!((a.data.value - 4.0 * PI).abs() < 1e-12);
        assert!(a.data.exact);
    }

    #[test]
    fn measure_overlapping_union_is_estimated() {
        let c = RunConfig::from_document(
            "command = measure\nspace = S^2\nsamples = 200000\n\
             region A = union(cap(axis=[0,0,1], theta=1), cap(axis=[1,0,0], theta=1))\n",
        )
        .unwrap();
        let a: Artifact<MeasureOutput> = io::from_json(&execute(&c).unwrap().artifact).unwrap();
        assert!(!a.data.exact);
        assert!(a.data.half_width > 0.0);
    }

    #[test]
    fn verify_exit_codes() {
        let mut c = RunConfig::default();
        for (k, v) in [("command", "verify"), ("claim", "theorem1"), ("pairs", "100000")] {
            c.set(k, v).unwrap();
        }
        c.set("fixture", "hemispheres").unwrap();
        let ok = execute(&c).unwrap();
        assert_eq!(ok.code, EXIT_PASS);
        let r: Artifact<VerificationReport> = io::from_json(&ok.artifact).unwrap();
        assert!(r.data.pass);
        c.set("fixture", "cap-area-pi").unwrap();
        assert_eq!(execute(&c).unwrap().code, EXIT_FAIL);
    }

    #[test]
    fn missing_pieces_are_usage_errors() {
        let c = RunConfig::from_document("command = verify\nfixture = hemispheres\n").unwrap();
        assert_eq!(exit_code(&execute(&c).unwrap_err()), EXIT_USAGE);
        let c = RunConfig::from_document("command = compare\nfixture = hemispheres\n").unwrap();
        assert!(execute(&c).is_err());
        let c = RunConfig::from_document("space = S^2\nregion A = full()\n").unwrap();
        assert!(execute(&c).is_err());
        let c = RunConfig::from_document(
            "command = measure\nspace = S^1\nregion A = cap(axis=[0,0,1], theta=1)\n",
        )
        .unwrap();
        assert_eq!(exit_code(&execute(&c).unwrap_err()), EXIT_USAGE);
    }

    #[test]
    fn empty_region_exhausts_the_budget() {
        let c = RunConfig::from_document(
            "command = dist\nspace = S^2\npairs = 10\nregion A = empty()\n",
        )
        .unwrap();
        assert_eq!(exit_code(&execute(&c).unwrap_err()), EXIT_BUDGET);
    }

    #[test]
    fn dist_artifacts_parse() {
        let mut c = RunConfig::from_document(
            "command = dist\nspace = S^2\npairs = 20000\ngrid = 11\nseed = 5\nregion A = hemisphere(normal=[0,0,1])\n",
        )
        .unwrap();
        let t = io::parse_cdf_csv(&execute(&c).unwrap().artifact).unwrap();
        assert_eq!(t.rows.len(), 11);
        assert_eq!(t.header.seed, 5);
        c.set("bins", "8").unwrap();
        let h = io::parse_histogram_csv(&execute(&c).unwrap().artifact).unwrap();
        assert_eq!(h.rows.len(), 8);
        c.set("format", "json").unwrap();
        let j: Artifact<HistogramOutput> = io::from_json(&execute(&c).unwrap().artifact).unwrap();
        assert_eq!(j.data.bin_masses.len(), 8);
    }
}
