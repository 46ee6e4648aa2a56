//! Command-line front end for the halflight engine.
//!
//! `analyze` runs the residual suites and the classifier on a fixture
//! or a JSON config and prints a report; `verify` additionally checks a
//! fixture's analytic expectations and sets the exit code accordingly;
//! `fixtures` lists the registry; `export` prints a fixture's immersion
//! spec as a reusable config file.
//!
//! Exit codes: 0 success, 1 expectation or residual violation, 2 input
//! error, 3 geometric degeneracy at a sample point.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use halflight::error::FrameError;
use halflight::fixtures;
use halflight::framing::ImmersionSpec;
use halflight::report::{render_text, run_report, Report, Suite};
use halflight::sampling::{grid_points, halton_points, random_points};
use halflight::tolerances::Tolerances;

#[derive(Parser)]
#[command(
    name = "halflight",
    version,
    about = "Frame construction, residual verification, and classification for half-lightlike immersions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run residual suites and the classifier; print a report.
    Analyze(RunArgs),
    /// Check a fixture's analytic expectations; exit 1 on any violation.
    Verify(RunArgs),
    /// List the registered fixtures.
    Fixtures,
    /// Print a fixture's immersion spec as a JSON config.
    Export(ExportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file (immersion spec plus run options).
    #[arg(long, conflicts_with = "fixture")]
    config: Option<PathBuf>,
    /// Name of a registered fixture.
    #[arg(long)]
    fixture: Option<String>,
    /// Number of sample points (low-discrepancy unless --seed is given).
    #[arg(long)]
    points: Option<usize>,
    /// Seed for uniform random sampling; implies the random strategy.
    #[arg(long)]
    seed: Option<u64>,
    /// Uniform tolerance override for every residual tier.
    #[arg(long)]
    tol: Option<f64>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Residual suite to run (repeatable). Default: all.
    #[arg(long = "suite", value_name = "SUITE")]
    suites: Vec<String>,
}

#[derive(Args)]
struct ExportArgs {
    /// Name of a registered fixture.
    #[arg(long)]
    fixture: String,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

/// Config-file mirror of the run options. The immersion spec can be
/// inline (the fields of `ImmersionSpec`) or referenced by file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default)]
    spec: Option<serde_json::Value>,
    #[serde(default)]
    spec_file: Option<String>,
    #[serde(default)]
    sample: Option<SampleConfig>,
    #[serde(default)]
    tolerances: Option<ToleranceConfig>,
    #[serde(default)]
    k: Option<f64>,
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    suites: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleConfig {
    strategy: String,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceConfig {
    #[serde(default)]
    algebraic: Option<f64>,
    #[serde(default)]
    one_fd: Option<f64>,
    #[serde(default)]
    two_fd: Option<f64>,
}

/// Everything a run needs after input digestion.
struct RunPlan {
    spec: ImmersionSpec,
    points: Vec<Vec<f64>>,
    suites: Vec<Suite>,
    tols: Tolerances,
    format: FormatArg,
    /// Set when the spec came from the registry, enabling expectation
    /// checks in `verify`.
    fixture_name: Option<String>,
}

/// An error that already knows its exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> CliError {
        let code = match &e {
            FrameError::InvalidSpec(_) => 2,
            _ => 3,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_suites(names: &[String]) -> Result<Vec<Suite>, CliError> {
    if names.is_empty() || names.iter().any(|n| n == "all") {
        return Ok(Suite::all());
    }
    let mut suites = Vec::new();
    for name in names {
        let suite = Suite::parse(name).ok_or_else(|| {
            CliError::input(format!(
                "unknown suite `{name}`; expected frames, induced, curvature, cartan, classify, or all"
            ))
        })?;
        if !suites.contains(&suite) {
            suites.push(suite);
        }
    }
    Ok(suites)
}

fn env_tolerance() -> Result<Option<f64>, CliError> {
    match std::env::var("HALFLIGHT_TOL") {
        Ok(text) => {
            let tol: f64 = text
                .parse()
                .map_err(|_| CliError::input(format!("HALFLIGHT_TOL is not a number: `{text}`")))?;
            Ok(Some(tol))
        }
        Err(_) => Ok(None),
    }
}

/// Sample points for a spec per explicit strategy flags, falling back
/// to the fixture's curated points or an 8-point low-discrepancy set.
fn sample_points(
    spec: &ImmersionSpec,
    args: &RunArgs,
    config_sample: Option<&SampleConfig>,
    fixture_points: Option<&[Vec<f64>]>,
) -> Result<Vec<Vec<f64>>, CliError> {
    if let Some(seed) = args.seed {
        let count = args.points.unwrap_or(8);
        return Ok(random_points(&spec.domain, count, seed));
    }
    if let Some(count) = args.points {
        return Ok(halton_points(&spec.domain, count, 0));
    }
    if let Some(sample) = config_sample {
        let count = sample.count.unwrap_or(8);
        return match sample.strategy.as_str() {
            "grid" => {
                let per_axis = count.max(1);
                Ok(grid_points(&spec.domain, per_axis))
            }
            "random" => Ok(random_points(
                &spec.domain,
                count,
                sample.seed.unwrap_or(0),
            )),
            "halton" => Ok(halton_points(&spec.domain, count, 0)),
            other => Err(CliError::input(format!(
                "unknown sample strategy `{other}`; expected grid, random, or halton"
            ))),
        };
    }
    if let Some(points) = fixture_points {
        return Ok(points.to_vec());
    }
    Ok(halton_points(&spec.domain, 8, 0))
}

fn load_plan(args: &RunArgs) -> Result<RunPlan, CliError> {
    let mut tols = Tolerances::default();
    let mut format = None;
    let mut config_suites: Option<Vec<String>> = None;
    let mut config_sample: Option<SampleConfig> = None;

    let (spec, fixture_points, fixture_name) = match (&args.config, &args.fixture) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
            let config: RunConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::input(format!("bad config JSON: {e}")))?;
            let spec_text = match (&config.spec, &config.spec_file) {
                (Some(inline), None) => inline.to_string(),
                (None, Some(file)) => fs::read_to_string(file)
                    .map_err(|e| CliError::input(format!("cannot read spec file {file}: {e}")))?,
                (Some(_), Some(_)) => {
                    return Err(CliError::input("config has both spec and spec_file"))
                }
                (None, None) => {
                    return Err(CliError::input("config needs either spec or spec_file"))
                }
            };
            let mut spec = ImmersionSpec::from_json(&spec_text)?;
            if let Some(k) = config.k {
                spec.k = k;
            }
            if let Some(t) = &config.tolerances {
                if let Some(x) = t.algebraic {
                    tols.algebraic = x;
                }
                if let Some(x) = t.one_fd {
                    tols.one_fd = x;
                }
                if let Some(x) = t.two_fd {
                    tols.two_fd = x;
                }
            }
            if let Some(f) = &config.format {
                format = Some(match f.as_str() {
                    "json" => FormatArg::Json,
                    "text" => FormatArg::Text,
                    other => {
                        return Err(CliError::input(format!(
                            "unknown format `{other}`; expected json or text"
                        )))
                    }
                });
            }
            config_suites = config.suites;
            config_sample = config.sample;
            (spec, None, None)
        }
        (None, Some(name)) => {
            let fixture = fixtures::get(name).ok_or_else(|| {
                CliError::input(format!(
                    "unknown fixture `{name}`; available: {}",
                    fixtures::names().join(", ")
                ))
            })?;
            (
                fixture.spec,
                Some(fixture.points),
                Some(name.clone()),
            )
        }
        (None, None) => {
            return Err(CliError::input("pass --fixture NAME or --config PATH"));
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    if spec.k != 0.0 {
        return Err(CliError::input(format!(
            "k = {} is not supported for geometric sampling: the pipeline computes immersions \
             in the flat ambient (k = 0); nonzero ambient curvature enters only the arithmetic \
             identity evaluators in the curvature module",
            spec.k
        )));
    }

    let points = sample_points(&spec, args, config_sample.as_ref(), fixture_points.as_deref())?;
    if points.is_empty() {
        return Err(CliError::input("no sample points requested"));
    }

    // Priority for the uniform tolerance: --tol flag, then HALFLIGHT_TOL.
    if let Some(tol) = args.tol {
        tols = Tolerances::uniform(tol);
    } else if let Some(tol) = env_tolerance()? {
        tols = Tolerances::uniform(tol);
    }

    let suites = match (&args.suites.is_empty(), &config_suites) {
        (false, _) => parse_suites(&args.suites)?,
        (true, Some(names)) => parse_suites(names)?,
        (true, None) => Suite::all(),
    };

    let format = args.format.or(format).unwrap_or(FormatArg::Text);

    Ok(RunPlan {
        spec,
        points,
        suites,
        tols,
        format,
        fixture_name,
    })
}

fn emit_report(report: &Report, format: FormatArg) {
    match format {
        FormatArg::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(report).expect("report serialization cannot fail")
            );
        }
        FormatArg::Text => print!("{}", render_text(report)),
    }
}

fn cmd_analyze(args: &RunArgs) -> Result<u8, CliError> {
    let plan = load_plan(args)?;
    let report = run_report(&plan.spec, &plan.points, &plan.suites, &plan.tols)?;
    emit_report(&report, plan.format);
    // Analysis reports findings; it only fails on input or geometry.
    Ok(0)
}

fn cmd_verify(args: &RunArgs) -> Result<u8, CliError> {
    let mut plan = load_plan(args)?;
    let name = plan
        .fixture_name
        .take()
        .ok_or_else(|| {
            CliError::input("verify compares against fixture expectations; pass --fixture NAME")
        })?;
    let name = name.as_str();
    let fixture = fixtures::get(name).expect("fixture resolved during planning");
    // Expectations always need the sampled classification.
    if !plan.suites.contains(&Suite::Classify) {
        plan.suites.push(Suite::Classify);
    }
    let report = run_report(&plan.spec, &plan.points, &plan.suites, &plan.tols)?;
    let classification = report
        .classification
        .as_ref()
        .expect("verify always runs the classify suite");
    let expectations = fixture.expect.check(classification);

    let mut all_pass = report.pass;
    if plan.format == FormatArg::Text {
        print!("{}", render_text(&report));
        println!("expectations for {name}");
    }
    let mut lines = Vec::new();
    for result in &expectations {
        all_pass &= result.pass;
        let mark = if result.pass { "pass" } else { "FAIL" };
        lines.push(format!("  {mark}  {:<32} {}", result.name, result.detail));
    }
    match plan.format {
        FormatArg::Text => {
            for line in &lines {
                println!("{line}");
            }
            println!(
                "verify {name}: {}",
                if all_pass { "PASS" } else { "FAIL" }
            );
        }
        FormatArg::Json => {
            let doc = serde_json::json!({
                "fixture": name,
                "report": report,
                "expectations": expectations
                    .iter()
                    .map(|r| serde_json::json!({
                        "name": r.name,
                        "pass": r.pass,
                        "detail": r.detail,
                    }))
                    .collect::<Vec<_>>(),
                "pass": all_pass,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_fixtures() -> Result<u8, CliError> {
    for name in fixtures::names() {
        let fixture = fixtures::get(name).expect("registered name");
        println!(
            "{name}  (chart dim {}, ambient dim {}, {} sample points)",
            fixture.spec.chart_dim,
            fixture.spec.ambient_dim(),
            fixture.points.len()
        );
    }
    Ok(0)
}

fn cmd_export(args: &ExportArgs) -> Result<u8, CliError> {
    let fixture = fixtures::get(&args.fixture).ok_or_else(|| {
        CliError::input(format!(
            "unknown fixture `{}`; available: {}",
            args.fixture,
            fixtures::names().join(", ")
        ))
    })?;
    let doc = serde_json::json!({
        "spec": serde_json::from_str::<serde_json::Value>(&fixture.spec.to_json()).unwrap(),
        "sample": { "strategy": "halton", "count": fixture.points.len() },
    });
    let text = serde_json::to_string_pretty(&doc).unwrap();
    match &args.out {
        Some(path) => fs::write(path, text.as_bytes())
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Fixtures => cmd_fixtures(),
        Command::Export(args) => cmd_export(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
