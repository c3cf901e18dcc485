//! Command-line front end: fit a spec's fractal function, render its IFS
//! attractor, or run the verification suites. Outputs are CSV for bulk
//! samples and JSON for reports; identical inputs and seeds produce
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use posifract::config::{FixedPointRecord, FunctionRecord, GraphIfsRecord, SpecConfig};
use posifract::ifs_attractor::{graph_of, hausdorff, GraphIfs, PointSet};
use posifract::rb_core::{fixed_point, interpolation_check, validate_spec, RbForm};
use posifract::semi_spaces::SampledPositiveFunction;
use posifract::verify;
use posifract::Error as LibError;

#[derive(Parser)]
#[command(
    name = "posifract",
    version,
    about = "Positivity-preserving fractal interpolation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the fixed-point problem of a spec and write the fractal
    /// function with its convergence report.
    Fit(FitArgs),
    /// Render the attractor of the spec's graph IFS and compare it with the
    /// fixed point's graph.
    Attractor(AttractorArgs),
    /// Run one of the verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON spec config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if absent); POSIFRACT_OUT overrides.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config's grid size.
    #[arg(long)]
    grid: Option<usize>,
    /// Override the config's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the config's iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct AttractorArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Random-orbit rendering instead of the deterministic iteration
    /// (rendering speed only; excluded from verification).
    #[arg(long)]
    chaos_game: bool,
    /// Seed for the chaos game.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: metrics, contraction, sandwich, semilinearity, series.
    #[arg(long)]
    suite: String,
    /// Seed for the suite's random draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Batch sequence config; with --suite series, runs the user's sequence
    /// instead of the built-in one and writes its distance profile.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if absent); POSIFRACT_OUT overrides.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

// Exit-code contract: 0 success, 2 validation failure, 3 non-convergence,
// 4 usage error (1 for anything unexpected).
const EXIT_VALIDATION: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_USAGE: u8 = 4;

struct Failure {
    code: u8,
    payload: serde_json::Value,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            payload: json!({"error": {"kind": "usage", "message": message.into()}}),
        }
    }

    fn from_lib(err: LibError) -> Self {
        let (code, kind) = match &err {
            LibError::NonConvergence { .. } => (EXIT_NONCONVERGENCE, "non_convergence"),
            LibError::SpecInvalid(_) => (EXIT_VALIDATION, "spec_invalid"),
            LibError::PositivityViolation { .. } => (EXIT_VALIDATION, "positivity_violation"),
            LibError::NotContractive { .. } => (EXIT_VALIDATION, "not_contractive"),
            LibError::Parameter(_) | LibError::Domain(_) => (EXIT_VALIDATION, "parameter"),
            LibError::Dimension(_) | LibError::ExponentMismatch { .. } => {
                (EXIT_VALIDATION, "dimension")
            }
            LibError::Configuration(_) => (EXIT_VALIDATION, "configuration"),
        };
        let mut payload = json!({"error": {"kind": kind, "message": err.to_string()}});
        if let LibError::SpecInvalid(report) = &err {
            payload["error"]["checks"] = serde_json::to_value(&report.checks).unwrap();
        }
        Self { code, payload }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Attractor(args) => cmd_attractor(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", serde_json::to_string(&failure.payload).unwrap());
            ExitCode::from(failure.code)
        }
    }
}

fn out_dir(requested: &Path) -> Result<PathBuf, Failure> {
    let dir = match std::env::var_os("POSIFRACT_OUT") {
        Some(v) => PathBuf::from(v),
        None => requested.to_path_buf(),
    };
    fs::create_dir_all(&dir)
        .map_err(|e| Failure::usage(format!("cannot create output directory {dir:?}: {e}")))?;
    Ok(dir)
}

fn load_config(args: &CommonArgs) -> Result<SpecConfig, Failure> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::usage(format!("cannot read config {:?}: {e}", args.config)))?;
    let mut config = SpecConfig::from_json(&text)
        .map_err(|e| Failure::usage(format!("config {:?}: {e}", args.config)))?;
    if let Some(grid) = args.grid {
        config.grid = grid;
    }
    if let Some(tol) = args.tol {
        config.tol = tol;
    }
    if let Some(max_iter) = args.max_iter {
        config.max_iter = max_iter;
    }
    Ok(config)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::usage(format!("serialization failed: {e}")))?;
    fs::write(path, text + "\n").map_err(|e| Failure::usage(format!("cannot write {path:?}: {e}")))
}

#[derive(Serialize)]
struct FitReport {
    contraction_factor: f64,
    iterations: usize,
    residual: f64,
    grid: usize,
    tol: f64,
    knot_errors: Option<Vec<f64>>,
    max_knot_error: Option<f64>,
    history: Vec<f64>,
}

fn solve(config: &SpecConfig) -> Result<(posifract::RbSpec, posifract::FixedPointResult), Failure> {
    let spec = config.build().map_err(Failure::from_lib)?;
    let g0 = match spec.form() {
        RbForm::C { germ, .. } => germ.clone(),
        RbForm::Lp { .. } => {
            SampledPositiveFunction::zero(spec.domain(), spec.grid_size(), spec.continuity())
                .map_err(Failure::from_lib)?
        }
    };
    let result = fixed_point(&spec, &g0, config.tol, config.max_iter).map_err(Failure::from_lib)?;
    Ok((spec, result))
}

fn cmd_fit(args: FitArgs) -> Result<(), Failure> {
    let config = load_config(&args.common)?;
    let dir = out_dir(&args.common.out)?;

    let spec = config.build().map_err(Failure::from_lib)?;
    let validation = validate_spec(&spec);

    // compute everything before writing anything: no partial artifacts
    let (spec, result) = solve(&config)?;

    let knot_errors = match spec.form() {
        RbForm::C { germ, .. } => {
            let errors: Vec<f64> = spec
                .family()
                .knots()
                .knots()
                .iter()
                .map(|xj| (result.fstar.eval(*xj) - germ.eval(*xj)).abs())
                .collect();
            Some(errors)
        }
        RbForm::Lp { .. } => None,
    };
    let max_knot_error = match spec.form() {
        RbForm::C { .. } => {
            Some(interpolation_check(&spec, &result.fstar).map_err(Failure::from_lib)?)
        }
        RbForm::Lp { .. } => None,
    };

    write_json(&dir.join("validation.json"), &validation)?;
    fs::write(dir.join("fstar.csv"), result.fstar.to_csv())
        .map_err(|e| Failure::usage(format!("cannot write fstar.csv: {e}")))?;
    let report = FitReport {
        contraction_factor: result.contraction_factor,
        iterations: result.iterations,
        residual: result.residual,
        grid: config.grid,
        tol: config.tol,
        knot_errors,
        max_knot_error,
        history: result.history.clone(),
    };
    write_json(&dir.join("report.json"), &report)?;
    write_json(
        &dir.join("result.json"),
        &FixedPointRecord::from_result(&result),
    )?;
    println!("fstar.csv, report.json, result.json, validation.json written to {dir:?}");
    Ok(())
}

#[derive(Serialize)]
struct EquivalenceReport {
    hausdorff_distance: f64,
    bound: f64,
    within_bound: bool,
    grid_spacing: f64,
    resolution: f64,
    iterations: usize,
    attractor_points: usize,
    theta: f64,
    chaos_game: bool,
}

fn cmd_attractor(args: AttractorArgs) -> Result<(), Failure> {
    let config = load_config(&args.common)?;
    let dir = out_dir(&args.common.out)?;
    let attractor_cfg = config
        .attractor
        .clone()
        .ok_or_else(|| Failure::usage("config has no \"attractor\" section"))?;
    if attractor_cfg.k == 0 {
        return Err(Failure::from_lib(LibError::Parameter(
            "iteration count k must be >= 1".into(),
        )));
    }

    let (spec, result) = solve(&config)?;
    let ifs = GraphIfs::from_spec(&spec).map_err(Failure::from_lib)?;
    let (x0, xn) = spec.domain();
    let a0 = PointSet::new(vec![
        [x0, result.fstar.samples()[0]],
        [xn, *result.fstar.samples().last().unwrap()],
    ])
    .map_err(Failure::from_lib)?;
    let resolution = attractor_cfg
        .resolution
        .unwrap_or_else(|| ifs.default_resolution(&a0));

    let attractor = if args.chaos_game {
        ifs.chaos_game(200_000, args.seed)
            .map_err(Failure::from_lib)?
    } else {
        ifs.attractor_with_resolution(&a0, attractor_cfg.k, resolution)
            .map_err(Failure::from_lib)?
    };

    let d = hausdorff(&attractor, &graph_of(&result.fstar)).map_err(Failure::from_lib)?;
    let h = (xn - x0) / (spec.grid_size() - 1) as f64;
    let bound = 5.0 * (h + resolution);

    fs::write(dir.join("attractor.csv"), attractor.to_csv())
        .map_err(|e| Failure::usage(format!("cannot write attractor.csv: {e}")))?;
    write_json(
        &dir.join("equivalence.json"),
        &EquivalenceReport {
            hausdorff_distance: d,
            bound,
            within_bound: d <= bound,
            grid_spacing: h,
            resolution,
            iterations: attractor_cfg.k,
            attractor_points: attractor.len(),
            theta: ifs.theta(),
            chaos_game: args.chaos_game,
        },
    )?;
    write_json(&dir.join("ifs.json"), &GraphIfsRecord::from_ifs(&ifs))?;
    write_json(
        &dir.join("fstar.json"),
        &FunctionRecord::from_function(&result.fstar),
    )?;
    println!("attractor.csv, equivalence.json, ifs.json, fstar.json written to {dir:?}");
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    if !verify::SUITES.contains(&args.suite.as_str()) {
        return Err(Failure::usage(format!(
            "unknown suite '{}'; expected one of {:?}",
            args.suite,
            verify::SUITES
        )));
    }
    let dir = out_dir(&args.out)?;

    if let Some(config_path) = &args.config {
        if args.suite != "series" {
            return Err(Failure::usage("--config applies to the series suite only"));
        }
        return run_user_sequence(config_path, &dir);
    }

    let report = verify::run_suite(&args.suite, args.seed).map_err(Failure::from_lib)?;
    write_json(&dir.join(format!("verify_{}.json", args.suite)), &report)?;
    if args.suite == "sandwich" {
        // raw operator-norm reports alongside the pass/fail summary
        for (label, sandwich) in verify::sandwich_reports(args.seed).map_err(Failure::from_lib)? {
            write_json(&dir.join(format!("norms_{label}.json")), &sandwich)?;
        }
    }
    for p in &report.properties {
        println!(
            "{} {} (measured {:e}, threshold {:e})",
            if p.pass { "PASS" } else { "FAIL" },
            p.name,
            p.measured,
            p.threshold
        );
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VALIDATION,
            payload: json!({"error": {"kind": "verification_failed",
                "message": format!("suite {} has failing properties", args.suite)}}),
        })
    }
}

#[derive(Serialize)]
struct SequenceRunReport {
    members: usize,
    distances: Vec<f64>,
    bounds: Vec<f64>,
    within_bound: Vec<bool>,
    limit_factor: f64,
    pass: bool,
}

fn run_user_sequence(config_path: &Path, dir: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| Failure::usage(format!("cannot read config {config_path:?}: {e}")))?;
    let config = posifract::config::SequenceConfig::from_json(&text)
        .map_err(|e| Failure::usage(format!("config {config_path:?}: {e}")))?;
    let ps = config.build().map_err(Failure::from_lib)?;
    let m = ps.members.len();
    let (_, _, report) = posifract::series::fractal_sequence(&ps, m, config.tol, config.max_iter)
        .map_err(Failure::from_lib)?;
    let run = SequenceRunReport {
        members: m,
        distances: report.distances.clone(),
        bounds: report.bounds.clone(),
        within_bound: report.within_bound.clone(),
        limit_factor: report.limit_factor,
        pass: report.pass,
    };
    write_json(&dir.join("sequence.json"), &run)?;
    for (i, (d, ok)) in report
        .distances
        .iter()
        .zip(&report.within_bound)
        .enumerate()
    {
        println!(
            "{} member {} d(f_m, f) = {d:e}",
            if *ok { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VALIDATION,
            payload: json!({"error": {"kind": "verification_failed",
                "message": "sequence stability bound violated"}}),
        })
    }
}
