use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sphere_dist::fixtures;
use sphere_dist::run::{execute, exit_code, Outcome, RunConfig, EXIT_USAGE};
use sphere_dist::syntax::parse_document;
use sphere_dist::Error;

/// Distance distributions of regions of spheres and products of spheres.
///
/// Settings come from an optional config file and are then overridden by
/// flags. Exit status: 0 pass, 1 verification failed, 2 usage or parse
/// error, 3 sampling budget exhausted.
#[derive(Parser, Debug)]
#[command(name = "sphere-dist", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,

    /// Config document (settings and `region NAME = EXPR` bindings).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    pairs: Option<String>,
    /// Monte Carlo samples for region measures.
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// For example S^2, S^2xS^1 or torus.
    #[arg(long, global = true)]
    space: Option<String>,
    /// euclidean, angular, l2-of-euclidean, l2-of-angular, l1-of-angular or
    /// max-of-angular.
    #[arg(long, global = true)]
    metric: Option<String>,
    /// Region binding NAME=EXPR; may be repeated.
    #[arg(long = "region", global = true, value_name = "NAME=EXPR")]
    regions: Vec<String>,
    /// Name of the first region.
    #[arg(long, global = true)]
    a: Option<String>,
    /// Name of the second region.
    #[arg(long, global = true)]
    b: Option<String>,
    /// Named partition to use as the first set (see `fixtures`).
    #[arg(long, global = true)]
    fixture: Option<String>,
    /// Named partition to use as the second set.
    #[arg(long = "fixture-b", global = true)]
    fixture_b: Option<String>,
    /// Grid points for CDF output and profile checks.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Write a histogram with this many bins instead of a CDF.
    #[arg(long, global = true)]
    bins: Option<String>,
    #[arg(long = "max-swaps", global = true)]
    max_swaps: Option<String>,
    #[arg(long = "min-radius", global = true)]
    min_radius: Option<String>,
    #[arg(long, global = true)]
    candidates: Option<String>,
    /// Any other setting, as KEY=VALUE; may be repeated.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact or Monte Carlo measure of a region.
    Measure,
    /// Cumulative distance distribution (CSV or JSON).
    Dist,
    /// Two-sample KS distance between two regions' distributions.
    Compare,
    /// Check one of: lemma, main_lemma, theorem1, theorem2, theorem3.
    Verify { claim: String },
    /// Greedy ball-swap decomposition between two equal-measure regions.
    Decompose,
    /// List the built-in partitions.
    Fixtures,
}

fn configure(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)?;
        let doc = parse_document(&text).map_err(|e| located(path, e))?;
        cfg.apply_document(&doc).map_err(|e| located(path, e))?;
    }
    let mut flags: Vec<(&str, String)> = Vec::new();
    match &cli.command {
        Some(Cmd::Measure) => flags.push(("command", "measure".into())),
        Some(Cmd::Dist) => flags.push(("command", "dist".into())),
        Some(Cmd::Compare) => flags.push(("command", "compare".into())),
        Some(Cmd::Decompose) => flags.push(("command", "decompose".into())),
        Some(Cmd::Verify { claim }) => {
            flags.push(("command", "verify".into()));
            flags.push(("claim", claim.clone()));
        }
        Some(Cmd::Fixtures) | None => {}
    }
    let opt = |k: &'static str, v: &Option<String>, flags: &mut Vec<(&str, String)>| {
        if let Some(v) = v {
            flags.push((k, v.clone()));
        }
    };
    opt("seed", &cli.seed.map(|s| s.to_string()), &mut flags);
    opt("pairs", &cli.pairs, &mut flags);
    opt("samples", &cli.samples, &mut flags);
    opt("delta", &cli.delta, &mut flags);
    opt("out", &cli.out.as_ref().map(|p| p.display().to_string()), &mut flags);
    opt("format", &cli.format, &mut flags);
    opt("threads", &cli.threads.map(|t| t.to_string()), &mut flags);
    opt("space", &cli.space, &mut flags);
    opt("metric", &cli.metric, &mut flags);
    opt("a", &cli.a, &mut flags);
    opt("b", &cli.b, &mut flags);
    opt("fixture", &cli.fixture, &mut flags);
    opt("fixture_b", &cli.fixture_b, &mut flags);
    opt("grid", &cli.grid, &mut flags);
    opt("bins", &cli.bins, &mut flags);
    opt("max_swaps", &cli.max_swaps, &mut flags);
    opt("min_radius", &cli.min_radius, &mut flags);
    opt("candidates", &cli.candidates, &mut flags);
    for (k, v) in flags {
        cfg.set(k, &v).map_err(|e| Error::InvalidArgument(format!("--{k}: {e}")))?;
    }
    for s in &cli.sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("--set expects KEY=VALUE, got '{s}'")))?;
        cfg.set(k.trim(), v)?;
    }
    for r in &cli.regions {
        cfg.bind(r).map_err(|e| match e {
            Error::Parse { column, message, .. } => {
                Error::InvalidArgument(format!("--region {r}: column {column}: {message}"))
            }
            e => e,
        })?;
    }
    Ok(cfg)
}

fn located(path: &std::path::Path, e: Error) -> Error {
    match e {
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column,
            message: format!("{message} (in {})", path.display()),
        },
        e => e,
    }
}

fn emit(cfg: &RunConfig, outcome: &Outcome) -> Result<(), Error> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &outcome.artifact)?;
            println!("{}", outcome.summary);
        }
        None => {
            print!("{}", outcome.artifact);
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(Cmd::Fixtures) = cli.command {
        for name in fixtures::NAMES {
            println!("{}", fixtures::by_name(name).expect("listed").describe());
        }
        return ExitCode::SUCCESS;
    }
    let cfg = match configure(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    let code = match execute(&cfg).and_then(|o| emit(&cfg, &o).map(|_| o.code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
