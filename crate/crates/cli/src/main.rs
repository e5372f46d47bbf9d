//! `qgb`: divergences, Hoeffding checks, generalization bounds, tail
//! bounds, and the worked-example reproduction behind one binary.
//!
//! Exit codes: 0 success, 1 vacuous bound or certificate warnings,
//! 2 configuration error, 3 numerical failure.

mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qgb_core::bounds::{
    bound_caro_old, bound_iid_individual, bound_kl, bound_l1, bound_renyi, classical_bounds,
    BoundKind, BoundReport,
};
use qgb_core::divergence::{
    classical_kl, classical_renyi, measured_renyi, modified_sandwiched, petz_renyi,
    quantum_relative_entropy, reverse_sandwiched, sandwiched_renyi, smooth_max_divergence,
    ClassicalDist, DivergenceValue, MeasuredOptConfig,
};
use qgb_core::experiment::{fmt_f64, reproduce_fig2, Fig2Config, Table};
use qgb_core::learning::{audit_certificates, induce, instance_from_json, resolved_cert};
use qgb_core::operator::{DensityOperator, HermitianObservable, OperatorWire};
use qgb_core::subgaussian::{check_quantum_hoeffding, lambda_grid};
use qgb_core::tail::{verify_coverage, TailKind, TailParams};
use qgb_core::Error;

#[derive(Parser)]
#[command(name = "qgb", version, about = "Quantum Renyi divergences and generalization-error bounds")]
struct Cli {
    /// Seed for every stochastic component.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads (QGB_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Comma-separated optimizer overrides: nm-restarts=N, nm-max-iters=N,
    /// nm-tol=X.
    #[arg(long, global = true)]
    tolerance_overrides: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one divergence between two states (or diagonal
    /// distributions for the classical kinds).
    Divergence(DivergenceArgs),
    /// Check the operator Hoeffding bound on a lambda grid.
    Hoeffding(HoeffdingArgs),
    /// Evaluate an expected generalization-error bound on an instance.
    Bound(BoundArgs),
    /// Evaluate a single-draw tail bound and its Monte-Carlo coverage.
    Tail(TailArgs),
    /// Run the worked-example sweeps and emit CSV + SVG.
    ReproduceFig2(Fig2Args),
    /// Run the built-in property suite and report pass/fail counts.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DivergenceKindArg {
    Classical,
    Kl,
    SmoothMax,
    Petz,
    Sandwiched,
    ReverseSandwiched,
    ModifiedSandwiched,
    Measured,
    RelativeEntropy,
}

#[derive(Args)]
struct DivergenceArgs {
    #[arg(long, value_enum)]
    kind: DivergenceKindArg,
    /// Renyi order (unused for kl / relative-entropy / smooth-max).
    #[arg(long)]
    alpha: Option<f64>,
    /// Path to the first state JSON ({"space": [...], "rows": ..., ...}).
    #[arg(long)]
    rho: PathBuf,
    /// Path to the second state JSON.
    #[arg(long)]
    sigma: PathBuf,
    /// Smoothing parameter of the smooth-max divergence.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Restart count for the measured-divergence optimizer.
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args)]
struct HoeffdingArgs {
    /// Path to the observable JSON.
    #[arg(long)]
    observable: PathBuf,
    /// Path to the state JSON.
    #[arg(long)]
    state: PathBuf,
    #[arg(long, default_value_t = -10.0)]
    lambda_min: f64,
    #[arg(long, default_value_t = 10.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = 101)]
    lambda_steps: usize,
    /// Lower operator bound a (defaults to the smallest eigenvalue).
    #[arg(long)]
    lower: Option<f64>,
    /// Upper operator bound b (defaults to the largest eigenvalue).
    #[arg(long)]
    upper: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundKindArg {
    L1,
    Lp,
    Kl,
    RenyiMod,
    RenyiPetz,
    CaroOld,
    Iid,
    Classical,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    kind: BoundKindArg,
    /// Grid spec: "lo:hi:count", "log:lo:hi:count", or a comma list.
    #[arg(long)]
    alpha_grid: Option<String>,
    #[arg(long)]
    gamma_grid: Option<String>,
    /// Norm order for --kind lp.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Write the grid as CSV here in addition to the JSON on stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TailKindArg {
    ClassicalRenyi,
    ClassicalSmoothMax,
    QuantumRenyi,
    QuantumSmoothMax,
}

#[derive(Args)]
struct TailArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    kind: TailKindArg,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    draws: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Fig2Args {
    /// Run only one sweep: "p" or "alpha" (default: both).
    #[arg(long)]
    which: Option<String>,
    #[arg(long, default_value = "fig2-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SelftestArgs {
    /// Directory holding the documented example JSON files.
    #[arg(long, default_value = "docs")]
    docs_dir: PathBuf,
    /// Shrink the sweep sizes for a fast smoke run.
    #[arg(long, default_value_t = false)]
    quick: bool,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Domain(_) | Error::Io(_) => 2,
        Error::Range(_) | Error::Numerical(_) => 3,
    }
}

fn read_density(path: &PathBuf) -> Result<DensityOperator, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
    let wire: OperatorWire = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
    wire.into_density()
}

fn read_observable(path: &PathBuf) -> Result<HermitianObservable, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
    let wire: OperatorWire = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
    wire.into_observable()
}

/// Diagonal of a density operator as a classical distribution; rejects
/// non-diagonal input so the classical kinds stay honest.
fn diagonal_dist(rho: &DensityOperator) -> Result<ClassicalDist, Error> {
    let m = rho.matrix();
    let d = m.rows;
    for i in 0..d {
        for j in 0..d {
            if i != j && m[(i, j)].norm() > 1e-12 {
                return Err(Error::Config(
                    "classical divergence kinds need diagonal density matrices".into(),
                ));
            }
        }
    }
    let probs: Vec<f64> = (0..d).map(|i| m[(i, i)].re.max(0.0)).collect();
    ClassicalDist::from_weights((0..d).map(|i| i.to_string()).collect(), probs)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = |s: &str| Error::Config(format!("bad grid spec '{}'", s));
    if let Some(rest) = spec.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(spec));
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad(spec))?;
        let hi: f64 = parts[1].parse().map_err(|_| bad(spec))?;
        let count: usize = parts[2].parse().map_err(|_| bad(spec))?;
        return Ok(qgb_core::bounds::log_spaced(lo, hi, count));
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(spec));
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad(spec))?;
        let hi: f64 = parts[1].parse().map_err(|_| bad(spec))?;
        let count: usize = parts[2].parse().map_err(|_| bad(spec))?;
        if count < 1 {
            return Err(bad(spec));
        }
        if count == 1 {
            return Ok(vec![lo]);
        }
        return Ok((0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect());
    }
    spec.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| bad(spec)))
        .collect()
}

pub(crate) struct OptOverrides {
    restarts: Option<usize>,
    max_iterations: Option<usize>,
    tol: Option<f64>,
}

fn parse_overrides(spec: Option<&str>) -> Result<OptOverrides, Error> {
    let mut out = OptOverrides {
        restarts: None,
        max_iterations: None,
        tol: None,
    };
    let Some(spec) = spec else { return Ok(out) };
    for item in spec.split(',') {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("bad override '{}'", item)))?;
        match key.trim() {
            "nm-restarts" => {
                out.restarts = Some(
                    value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad override value '{}'", value)))?,
                )
            }
            "nm-max-iters" => {
                out.max_iterations = Some(
                    value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad override value '{}'", value)))?,
                )
            }
            "nm-tol" => {
                out.tol = Some(
                    value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad override value '{}'", value)))?,
                )
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown tolerance override '{}'",
                    other
                )))
            }
        }
    }
    Ok(out)
}

fn measured_config(
    seed: u64,
    overrides: &OptOverrides,
    restarts_flag: Option<usize>,
) -> MeasuredOptConfig {
    let mut cfg = MeasuredOptConfig {
        seed,
        ..Default::default()
    };
    if let Some(r) = overrides.restarts {
        cfg.restarts = r;
    }
    if let Some(r) = restarts_flag {
        cfg.restarts = r;
    }
    if let Some(i) = overrides.max_iterations {
        cfg.max_iterations = i;
    }
    if let Some(t) = overrides.tol {
        cfg.diameter_tol = t;
    }
    cfg
}

fn run_divergence(args: &DivergenceArgs, seed: u64, overrides: &OptOverrides) -> Result<u8, Error> {
    let rho = read_density(&args.rho)?;
    let sigma = read_density(&args.sigma)?;
    let need_alpha = || {
        args.alpha
            .ok_or_else(|| Error::Config("--alpha is required for this kind".into()))
    };
    let value: DivergenceValue = match args.kind {
        DivergenceKindArg::Classical => {
            classical_renyi(&diagonal_dist(&rho)?, &diagonal_dist(&sigma)?, need_alpha()?)?
        }
        DivergenceKindArg::Kl => classical_kl(&diagonal_dist(&rho)?, &diagonal_dist(&sigma)?)?,
        DivergenceKindArg::SmoothMax => {
            let eps = args
                .epsilon
                .ok_or_else(|| Error::Config("--epsilon is required for smooth-max".into()))?;
            smooth_max_divergence(&diagonal_dist(&rho)?, &diagonal_dist(&sigma)?, eps)?
        }
        DivergenceKindArg::Petz => petz_renyi(&rho, &sigma, need_alpha()?)?,
        DivergenceKindArg::Sandwiched => sandwiched_renyi(&rho, &sigma, need_alpha()?)?,
        DivergenceKindArg::ReverseSandwiched => reverse_sandwiched(&rho, &sigma, need_alpha()?)?,
        DivergenceKindArg::ModifiedSandwiched => modified_sandwiched(&rho, &sigma, need_alpha()?)?,
        DivergenceKindArg::Measured => {
            let cfg = measured_config(seed, overrides, args.restarts);
            measured_renyi(&rho, &sigma, need_alpha()?, &cfg)?
        }
        DivergenceKindArg::RelativeEntropy => quantum_relative_entropy(&rho, &sigma)?,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&value).map_err(|e| Error::Config(e.to_string()))?
    );
    Ok(if value.is_infinite() { 1 } else { 0 })
}

fn run_hoeffding(args: &HoeffdingArgs) -> Result<u8, Error> {
    let observable = read_observable(&args.observable)?;
    let state = read_density(&args.state)?;
    let eig = observable.eig()?;
    let a = args
        .lower
        .unwrap_or_else(|| eig.eigenvalues.last().copied().unwrap_or(0.0));
    let b = args
        .upper
        .unwrap_or_else(|| eig.eigenvalues.first().copied().unwrap_or(0.0));
    let lambdas = lambda_grid(args.lambda_min, args.lambda_max, args.lambda_steps);
    let check = check_quantum_hoeffding(&observable, &state, a, b, &lambdas)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&check).map_err(|e| Error::Config(e.to_string()))?
    );
    Ok(if check.holds { 0 } else { 1 })
}

fn bound_csv(report: &BoundReport) -> Table {
    let mut table = Table::new(&["kind", "param", "value", "optimum", "realized_abs_gen", "sound"]);
    let optimum = report
        .optimum_value
        .map(fmt_f64)
        .unwrap_or_else(|| "inf".into());
    for gp in &report.grid {
        table.push_row(vec![
            report.bound_kind.as_str().to_string(),
            fmt_f64(gp.param),
            gp.value.map(fmt_f64).unwrap_or_else(|| "inf".into()),
            optimum.clone(),
            fmt_f64(report.realized_abs_gen),
            report.sound.to_string(),
        ]);
    }
    table
}

fn run_bound(args: &BoundArgs) -> Result<u8, Error> {
    let text = std::fs::read_to_string(&args.instance)
        .map_err(|e| Error::Config(format!("{}: {}", args.instance.display(), e)))?;
    let instance = instance_from_json(&text)?;
    let joint = induce(&instance)?;

    let alpha_grid = match &args.alpha_grid {
        Some(spec) => parse_grid(spec)?,
        None => {
            let mut g = qgb_core::bounds::default_alpha_grid_below();
            g.extend(qgb_core::bounds::default_alpha_grid_above());
            g
        }
    };
    let gamma_grid = match &args.gamma_grid {
        Some(spec) => parse_grid(spec)?,
        None => alpha_grid.clone(),
    };

    // Audit user-supplied certificates; violations demote the exit code.
    let cert = resolved_cert(&joint, &instance)?;
    let warnings = if instance.cert.is_some() {
        audit_certificates(&joint, &instance, &cert, &lambda_grid(-10.0, 10.0, 21))?
    } else {
        Vec::new()
    };
    for w in &warnings {
        eprintln!("warning: {}", w);
    }

    if args.kind == BoundKindArg::Classical {
        let gammas: Vec<f64> = gamma_grid.iter().copied().filter(|g| *g != 1.0).collect();
        let report = classical_bounds(&joint, &instance, &gammas)?;
        let payload = serde_json::json!({
            "xu_raginsky": report.xu_raginsky,
            "bu": report.bu,
            "modak": report.modak,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&payload).map_err(|e| Error::Config(e.to_string()))?
        );
        return Ok(if warnings.is_empty() { 0 } else { 1 });
    }

    let report = match args.kind {
        BoundKindArg::L1 => bound_l1(&joint, &instance, 1.0, None)?,
        BoundKindArg::Lp => bound_l1(&joint, &instance, args.p, None)?,
        BoundKindArg::Kl => bound_kl(&joint, &instance)?,
        BoundKindArg::RenyiMod => {
            bound_renyi(&joint, &instance, &alpha_grid, &gamma_grid, BoundKind::RenyiMod)?
        }
        BoundKindArg::RenyiPetz => {
            bound_renyi(&joint, &instance, &alpha_grid, &gamma_grid, BoundKind::RenyiPetz)?
        }
        BoundKindArg::CaroOld => bound_caro_old(&joint, &instance, &alpha_grid, &gamma_grid)?,
        BoundKindArg::Iid => {
            bound_iid_individual(&joint, &instance, &alpha_grid, &gamma_grid, BoundKind::IidMod)?
        }
        BoundKindArg::Classical => unreachable!(),
    };
    if let Some(path) = &args.out {
        qgb_core::experiment::write_csv(&bound_csv(&report), path)?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?
    );
    Ok(if report.vacuous || !warnings.is_empty() {
        1
    } else {
        0
    })
}

fn run_tail(args: &TailArgs, seed: u64) -> Result<u8, Error> {
    let text = std::fs::read_to_string(&args.instance)
        .map_err(|e| Error::Config(format!("{}: {}", args.instance.display(), e)))?;
    let instance = instance_from_json(&text)?;
    let joint = induce(&instance)?;
    let kind = match args.kind {
        TailKindArg::ClassicalRenyi => TailKind::ClassicalRenyi,
        TailKindArg::ClassicalSmoothMax => TailKind::ClassicalSmoothMax,
        TailKindArg::QuantumRenyi => TailKind::QuantumRenyi,
        TailKindArg::QuantumSmoothMax => TailKind::QuantumSmoothMax,
    };
    let params = TailParams {
        delta: args.delta,
        nu: args.nu,
        gamma: args.gamma,
        alpha_grid: qgb_core::bounds::log_spaced(0.2, 0.95, 9),
    };
    let report = verify_coverage(&joint, &instance, kind, &params, args.draws, seed)?;
    if let Some(path) = &args.out {
        let mut table = Table::new(&[
            "kind",
            "delta",
            "epsilon",
            "nu",
            "gamma",
            "alpha",
            "empirical_coverage",
            "draws",
        ]);
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_else(|| "".into());
        table.push_row(vec![
            report.kind.as_str().to_string(),
            fmt_f64(report.delta),
            report.epsilon.map(fmt_f64).unwrap_or_else(|| "inf".into()),
            opt(report.nu),
            opt(report.gamma),
            opt(report.alpha),
            fmt_f64(report.empirical_coverage),
            report.draws.to_string(),
        ]);
        qgb_core::experiment::write_csv(&table, path)?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?
    );
    Ok(if report.epsilon.is_none() { 1 } else { 0 })
}

fn run_fig2(args: &Fig2Args) -> Result<u8, Error> {
    if let Some(which) = &args.which {
        if which != "p" && which != "alpha" {
            return Err(Error::Config(format!(
                "--which must be 'p' or 'alpha', got '{}'",
                which
            )));
        }
    }
    let cfg = Fig2Config::default();
    let written = reproduce_fig2(&cfg, &args.out_dir, args.which.as_deref())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&written).map_err(|e| Error::Config(e.to_string()))?
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = std::env::var("QGB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(cli.threads);
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }

    let overrides = match parse_overrides(cli.tolerance_overrides.as_deref()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };

    let outcome = match &cli.command {
        Command::Divergence(args) => run_divergence(args, cli.seed, &overrides),
        Command::Hoeffding(args) => run_hoeffding(args),
        Command::Bound(args) => run_bound(args),
        Command::Tail(args) => run_tail(args, cli.seed),
        Command::ReproduceFig2(args) => run_fig2(args),
        Command::Selftest(args) => selftest::run(args.quick, &args.docs_dir, cli.seed),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}
