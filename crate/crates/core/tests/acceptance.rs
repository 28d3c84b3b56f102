//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runtime budgets are part of each verdict.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use sphere_dist::distribution::{analytic_fullsphere_cdf, estimate_self, uniform_grid, EstimateOptions};
use sphere_dist::fixtures;
use sphere_dist::geometry::{product_distance, Combiner, ProductPoint};
use sphere_dist::swap::{greedy_decomposition, GreedyParams};
use sphere_dist::verify::{
    dkw_tolerance, verify_lemma, verify_main_lemma, verify_theorem1, verify_theorem2,
    verify_theorem3, LemmaSwap, VerificationReport, VerifyParams,
};
use sphere_dist::{
    angular_distance, euclidean_distance, sample_uniform, Metric, Region, Rotation, SpaceSpec,
    SpherePoint,
};

const PAIRS: usize = 1_000_000;
const DELTA: f64 = 1e-3;
const SEED: u64 = 20240611;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn params(seed: u64) -> VerifyParams {
    VerifyParams::new(PAIRS, seed)
}

fn summary(r: &VerificationReport) -> String {
    format!("{:.3e} <= {:.3e}: {}", r.statistic, r.tolerance, r.pass)
}

fn chord_angle() -> Verdict {
    let s2 = SpaceSpec::sphere(2);
    let x = sample_uniform(&s2, PAIRS, SEED);
    let y = sample_uniform(&s2, PAIRS, SEED + 1);
    let worst = x
        .iter()
        .zip(&y)
        .map(|(p, q)| {
            let (p, q) = (&p.factors()[0], &q.factors()[0]);
            let a = angular_distance(p, q).unwrap();
            (2.0 * (a / 2.0).sin() - euclidean_distance(p, q).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    verdict(worst < 1e-12, format!("max |2 sin(a/2) - d_E| = {worst:.2e} over 1e6 pairs"))
}

fn full_sphere_oracle() -> Verdict {
    let tol = dkw_tolerance(PAIRS, DELTA);
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let space = SpaceSpec::sphere(n);
        for metric in [Metric::Euclidean, Metric::Angular] {
            let d = estimate_self(&Region::Full, &space, metric, PAIRS, SEED + n as u64, &EstimateOptions::default())
                .unwrap();
            let mass = d.mass_scale();
            let sup = uniform_grid(d.diameter(), 256)
                .iter()
                .map(|&l| ((d.cdf(l) - analytic_fullsphere_cdf(n, metric, l).unwrap()) / mass).abs())
                .fold(0.0, f64::max);
            pass &= sup <= tol;
            parts.push(format!("S^{n}/{metric} {sup:.2e}"));
        }
    }
    verdict(pass, format!("{} (tolerance {tol:.3e})", parts.join(", ")))
}

fn lemma() -> Verdict {
    let swap = LemmaSwap {
        p: SpherePoint::north(2),
        pbar: SpherePoint::south(2),
        theta: PI / 8.0,
        reflection_draws: 100_000,
    };
    let r = verify_lemma(&fixtures::hemispheres(), &swap, &params(SEED)).unwrap();
    let parts: Vec<String> = r
        .checks
        .iter()
        .map(|c| format!("{} {:.3e} <= {:.3e}", c.name, c.statistic, c.tolerance))
        .collect();
    verdict(r.pass && r.checks.len() == 2, parts.join(", "))
}

fn main_lemma() -> Verdict {
    let cap = fixtures::cap_area_pi();
    let equal = verify_main_lemma(&cap, &fixtures::two_caps_area_pi(), &params(SEED)).unwrap();
    let control = verify_main_lemma(&cap, &fixtures::cap_area_two_pi(), &params(SEED + 1)).unwrap();
    let gap = control.values["endpoint_gap"];
    let predicted = control.values["predicted_endpoint_gap"];
    let endpoint_ok = (gap - predicted).abs() <= control.tolerance;
    verdict(
        equal.pass && equal.hypothesis_holds && !control.pass && endpoint_ok,
        format!(
            "equal-area {}; control fails {:.3e} > {:.3e} with endpoint gap {gap:.6} vs predicted {predicted:.6}",
            summary(&equal),
            control.statistic,
            control.tolerance
        ),
    )
}

fn theorem1() -> Verdict {
    let bands = verify_theorem1(&fixtures::four_bands(), &params(SEED)).unwrap();
    let hemi = verify_theorem1(&fixtures::hemispheres(), &params(SEED + 1)).unwrap();
    let control = verify_theorem1(&fixtures::cap_area_pi(), &params(SEED + 2)).unwrap();
    let tol_ok = (bands.tolerance - 2.0 * dkw_tolerance(PAIRS, DELTA)).abs() < 1e-15;
    verdict(
        bands.pass && hemi.pass && !control.pass && tol_ok,
        format!(
            "four-bands {}; hemispheres {}; control {:.3e} > {:.3e}",
            summary(&bands),
            summary(&hemi),
            control.statistic,
            control.tolerance
        ),
    )
}

fn theorem2() -> Verdict {
    let s = fixtures::small_cap();
    let rotated = s.rotated(&[Rotation::random(2, SEED)]).unwrap();
    let caps = verify_theorem2(&s, &rotated, &params(SEED)).unwrap();
    // S = bands, S' = rotated complement (equal distributions by the equal-split theorem)
    let bands = fixtures::four_bands();
    let flipped = bands.swapped().rotated(&[Rotation::random(2, SEED + 1)]).unwrap();
    let flip = verify_theorem2(&bands, &flipped, &params(SEED + 1)).unwrap();
    let describe = |r: &VerificationReport| {
        r.checks
            .iter()
            .map(|c| format!("{} {:.2e}/{:.2e}", c.name, c.statistic, c.tolerance))
            .collect::<Vec<_>>()
            .join(", ")
    };
    verdict(
        caps.pass && flip.pass && caps.checks.len() == 4 && flip.checks.len() == 4,
        format!("rotated cap [{}]; bands vs rotated complement [{}]", describe(&caps), describe(&flip)),
    )
}

fn theorem3() -> Verdict {
    let torus = verify_theorem3(&fixtures::torus_halves(), &params(SEED)).unwrap();
    let prod = verify_theorem3(&fixtures::hemisphere_times_circle(), &params(SEED + 1)).unwrap();
    let a = SpherePoint::on_circle(0.1);
    let b = SpherePoint::on_circle(2.0 * PI - 0.1);
    let wrap = (angular_distance(&a, &b).unwrap() - 0.2).abs();
    let x = ProductPoint::new(vec![a.clone(), SpherePoint::on_circle(0.0)]).unwrap();
    let y = ProductPoint::new(vec![b, SpherePoint::on_circle(0.0)]).unwrap();
    let torus_wrap = (product_distance(Combiner::L2OfAngular, &x, &y).unwrap() - 0.2).abs();
    verdict(
        torus.pass && prod.pass && wrap < 1e-15 && torus_wrap < 1e-15,
        format!(
            "torus {}; hemisphere x circle {}; wraparound error {wrap:.1e}/{torus_wrap:.1e}",
            summary(&torus),
            summary(&prod)
        ),
    )
}

fn greedy() -> Verdict {
    let a = Region::hemisphere(SpherePoint::north(2));
    let b = Region::hemisphere(SpherePoint::basis(2, 0));
    let params = GreedyParams::default();
    let t = greedy_decomposition(&a, &b, &SpaceSpec::sphere(2), &params, SEED).unwrap();
    let first = t.residual_measure[0];
    let last = *t.residual_measure.last().unwrap();
    let drift_ok = t.invariant_drift.iter().zip(&t.drift_tolerance).all(|(d, e)| d <= e);
    let worst = t
        .invariant_drift
        .iter()
        .zip(&t.drift_tolerance)
        .map(|(d, e)| d / e)
        .fold(0.0, f64::max);
    verdict(
        last <= 0.5 * first && drift_ok && t.swaps.len() <= params.max_swaps,
        format!(
            "{} swaps, residual {first:.4} -> {last:.4} ({:.1}% left), worst drift/tolerance {worst:.2}, stop {:?}",
            t.swaps.len(),
            100.0 * last / first,
            t.stop_reason
        ),
    )
}

fn run_cli(args: &[&str], out: &PathBuf, threads: usize) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_sphere-dist"))
        .args(args)
        .arg("--threads")
        .arg(threads.to_string())
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    assert!(status.status.code().is_some(), "cli killed");
    std::fs::read(out).expect("artifact written")
}

fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("sphere-dist-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let runs: [(&str, Vec<&str>); 4] = [
        ("dist", vec!["dist", "--space", "S^2", "--region", "A=full()", "--pairs", "1e6", "--seed", "7"]),
        ("theorem1", vec!["verify", "theorem1", "--fixture", "four-bands", "--pairs", "1e6", "--seed", "7"]),
        (
            "measure",
            vec![
                "measure",
                "--space",
                "S^2",
                "--region",
                "A=union(cap(axis=[0,0,1], theta=1), cap(axis=[1,0,0], theta=1))",
                "--samples",
                "1e6",
            ],
        ),
        (
            "decompose",
            vec![
                "decompose",
                "--space",
                "S^2",
                "--region",
                "A=hemisphere(normal=[0,0,1])",
                "--region",
                "B=hemisphere(normal=[1,0,0])",
                "--max-swaps",
                "3",
                "--seed",
                "7",
            ],
        ),
    ];
    let mut same = Vec::new();
    let mut pass = true;
    for (name, args) in &runs {
        let one = run_cli(args, &dir.join(format!("{name}-1")), 1);
        let two = run_cli(args, &dir.join(format!("{name}-2")), 2);
        let eq = !one.is_empty() && one == two;
        pass &= eq;
        same.push(format!("{name} {}", if eq { "identical" } else { "DIFFERENT" }));
    }
    let _ = std::fs::remove_dir_all(&dir);
    verdict(pass, format!("--threads 1 vs 2: {}", same.join(", ")))
}

fn main() {
    type Criterion = (u32, &'static str, u64, fn() -> Verdict);
    let criteria: [Criterion; 9] = [
        (1, "chord-angle identity", 5, chord_angle),
        (2, "full-sphere oracle", 30, full_sphere_oracle),
        (3, "swap lemma", 60, lemma),
        (4, "main lemma", 90, main_lemma),
        (5, "theorem 1", 60, theorem1),
        (6, "theorem 2", 90, theorem2),
        (7, "theorem 3", 60, theorem3),
        (8, "greedy decomposition", 300, greedy),
        (9, "determinism", 600, determinism),
    ];
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let pass = v.pass && in_time;
        failed += !pass as u32;
        println!(
            "criterion {id} [{name}]: {} | {} | {:.1}s of {budget}s",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
