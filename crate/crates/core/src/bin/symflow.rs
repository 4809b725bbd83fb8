#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use symflow::decomposition::{adapted_polar, adapted_svd, polar, reduce_to_diagonal, svd_canonical_with, Side};
use symflow::error::{Error, Result};
use symflow::flow::{flow_closed_form_trace, flow_numeric, write_traces_csv, FlowTrace};
use symflow::harness::fdcheck::finite_difference_check;
use symflow::harness::io::{load_sigma, load_space, read_matrix, SigmaFile};
use symflow::harness::oracle::{oracle_critical_set, OracleConfig};
use symflow::harness::suite::run_paper_suite;
use symflow::height::HeightProblem;
use symflow::matrix::MatrixK;
use symflow::random::{random_matrix, rng};
use symflow::space::{measure_automorphism, Mode, SymmetricSpaceSpec};
use symflow::tolerance::Tolerances;

#[derive(Parser)]
#[command(
    name = "symflow",
    version,
    about = "Height functions and gradient flows on compact symmetric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the automorphism axioms and the analytic gradient of a space.
    Verify {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Multistart search for the critical points of h_X.
    Critical {
        #[arg(long)]
        space: String,
        #[arg(long = "X")]
        x: String,
        #[arg(long)]
        mode: Mode,
        /// Relative critical-residual threshold.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample a gradient flow line as CSV.
    Flow {
        #[arg(long)]
        space: String,
        #[arg(long = "X")]
        x: String,
        #[arg(long)]
        alpha0: String,
        #[arg(long)]
        center: String,
        #[arg(long)]
        t0: f64,
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum)]
        method: FlowMethod,
    },
    /// Reduce h_X on a Cartan model to a diagonal generator.
    Reduce {
        #[arg(long)]
        space: String,
        #[arg(long = "X")]
        x: String,
    },
    /// Polar and singular value decompositions, plain or adapted to sigma.
    Decompose {
        #[arg(long)]
        sigma: String,
        #[arg(long = "Y")]
        y: String,
        #[arg(long, value_enum)]
        kind: DecompositionKind,
    },
    /// Replicate the worked examples of the catalog spaces.
    PaperSuite {
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FlowMethod {
    Closed,
    Rk4,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecompositionKind {
    Polar,
    Svd,
    AdaptedPolar,
    AdaptedSvd,
}

const RK4_STEP: f64 = 1e-3;

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn space_for(name: &str, x: &MatrixK) -> Result<SymmetricSpaceSpec> {
    let spec = load_space(name, Some((x.field(), x.n())))?;
    if spec.n != x.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            found: x.n(),
        });
    }
    Ok(spec)
}

fn verify(space: &str, samples: usize, seed: u64) -> Result<bool> {
    let spec = load_space(space, None)?;
    let tols = Tolerances::from_env()?;
    let mut ok = true;
    let mut report = serde_json::Map::new();
    report.insert("space".into(), json!(spec.name));
    if let Some(sigma) = &spec.sigma {
        let rep = measure_automorphism(sigma, samples, seed);
        let tol = tols.membership.max(1e-9);
        let passed = rep.max_residual() <= tol * 10.0;
        ok &= passed;
        report.insert("automorphism".into(), json!({ "report": rep, "passed": passed }));
    }
    let mut r = rng(seed);
    let x = random_matrix(spec.field, spec.n, &mut r);
    let mut gradients = Vec::new();
    for mode in [Mode::Group, Mode::Model] {
        let Ok(manifold) = spec.manifold(mode) else { continue };
        let problem = HeightProblem::new(manifold, x.clone())?;
        let err = finite_difference_check(&problem, samples, seed);
        let passed = err < 1e-5;
        ok &= passed;
        gradients.push(json!({ "mode": mode, "max_relative_error": err, "passed": passed }));
    }
    report.insert("gradient".into(), json!(gradients));
    report.insert("passed".into(), json!(ok));
    print_json(&report)?;
    Ok(ok)
}

fn critical(space: &str, x: &str, mode: Mode, tol: Option<f64>, restarts: usize, seed: u64) -> Result<()> {
    let x = read_matrix(x)?;
    let spec = space_for(space, &x)?;
    let mut tols = Tolerances::from_env()?;
    if let Some(t) = tol {
        tols.critical = t;
    }
    let problem = HeightProblem::new(spec.manifold(mode)?, x)?;
    let cfg = OracleConfig {
        restarts,
        seed,
        ..Default::default()
    };
    let set = oracle_critical_set(&problem, &cfg, &tols)?;
    log::info!(
        "{} of {} restarts converged; {} clusters in {} components",
        set.converged,
        set.restarts,
        set.records.len(),
        set.components.len()
    );
    print_json(&set.records)
}

#[allow(clippy::too_many_arguments)]
fn flow(
    space: &str,
    x: &str,
    alpha0: &str,
    center: &str,
    t0: f64,
    t1: f64,
    steps: usize,
    method: FlowMethod,
) -> Result<()> {
    let x = read_matrix(x)?;
    let alpha0 = read_matrix(alpha0)?;
    let center = read_matrix(center)?;
    let spec = space_for(space, &x)?;
    let mode = if spec.sigma.is_some() { Mode::Model } else { Mode::Group };
    let problem = HeightProblem::new(spec.manifold(mode)?, x)?;
    let tols = Tolerances::from_env()?;
    if steps == 0 || !(t1 >= t0) {
        return Err(Error::Invalid("need --steps >= 1 and --t1 >= --t0".into()));
    }
    let times: Vec<f64> = (0..=steps).map(|k| t0 + (t1 - t0) * k as f64 / steps as f64).collect();
    let closed = || flow_closed_form_trace(&problem, &center, &alpha0, &times, &tols);
    let numeric = || -> Result<FlowTrace> {
        // integrate from the closed-form point at t0 so both methods share a start
        let start = if t0 == 0.0 {
            alpha0.clone()
        } else {
            symflow::flow::flow_closed_form(&problem, &center, &alpha0, t0, &tols)?
        };
        flow_numeric(&problem, &start, &times, RK4_STEP)
    };
    let out = io::stdout().lock();
    match method {
        FlowMethod::Closed => closed()?.write_csv(out),
        FlowMethod::Rk4 => numeric()?.write_csv(out),
        FlowMethod::Both => {
            let (c, n) = (closed()?, numeric()?);
            write_traces_csv(out, &[(Some("closed"), &c), (Some("rk4"), &n)])
        }
    }
}

fn reduce(space: &str, x: &str) -> Result<()> {
    let x = read_matrix(x)?;
    let spec = space_for(space, &x)?;
    let tols = Tolerances::from_env()?;
    let red = reduce_to_diagonal(&spec, &x, &tols)?;
    print_json(&json!({
        "sigma_prime": SigmaFile::from(&red.sigma_prime),
        "D": red.d,
        "U": red.u,
        "V": red.v,
        "Theta": red.theta,
        "block_sizes": red.svd.block_sizes,
        "values": red.svd.values,
    }))
}

fn decompose(sigma: &str, y: &str, kind: DecompositionKind) -> Result<()> {
    let sigma = load_sigma(sigma)?;
    let y = read_matrix(y)?;
    let tols = Tolerances::from_env()?;
    let out = match kind {
        DecompositionKind::Polar => {
            let p = polar(&y, Side::Left)?;
            json!({
                "U": null, "D": null, "V": null,
                "S": p.s, "Omega": p.omega, "Theta": null,
                "block_sizes": null, "values": null,
                "residuals": { "reconstruction": p.reconstruct().dist(&y) },
            })
        }
        DecompositionKind::Svd => {
            let c = svd_canonical_with(&y, tols.cluster_gap)?;
            json!({
                "U": c.u, "D": c.d, "V": c.v,
                "S": null, "Omega": null, "Theta": null,
                "block_sizes": c.block_sizes, "values": c.values,
                "residuals": { "reconstruction": c.reconstruct().dist(&y) },
            })
        }
        DecompositionKind::AdaptedPolar => {
            let a = adapted_polar(&sigma, &y, Side::Left, &tols)?;
            json!({
                "U": null, "D": null, "V": null,
                "S": a.polar.s, "Omega": a.polar.omega, "Theta": null,
                "block_sizes": null, "values": null,
                "residuals": a.residuals,
            })
        }
        DecompositionKind::AdaptedSvd => {
            let a = adapted_svd(&sigma, &y, &tols)?;
            let mut residuals = serde_json::to_value(&a.polar.residuals)?;
            residuals["theta"] = json!(a.theta_residual);
            residuals["svd_reconstruction"] = json!(a.svd.reconstruct().dist(&y));
            json!({
                "U": a.svd.u, "D": a.svd.d, "V": a.svd.v,
                "S": a.polar.polar.s, "Omega": a.polar.polar.omega, "Theta": a.theta,
                "block_sizes": a.svd.block_sizes, "values": a.svd.values,
                "residuals": residuals,
            })
        }
    };
    print_json(&out)
}

fn paper_suite(filter: Option<&str>) -> Result<bool> {
    let tols = Tolerances::from_env()?;
    let report = run_paper_suite(filter, &tols)?;
    let mut out = io::stdout().lock();
    for c in &report.checks {
        writeln!(out, "{c}")?;
    }
    let failed = report.failures().count();
    let limited = report.tolerance_limited().count();
    writeln!(
        out,
        "{} checks, {} failed, {} tolerance-limited",
        report.checks.len(),
        failed,
        limited
    )?;
    Ok(failed == 0)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { space, samples, seed } => verify(&space, samples, seed),
        Command::Critical {
            space,
            x,
            mode,
            tol,
            restarts,
            seed,
        } => critical(&space, &x, mode, tol, restarts, seed).map(|_| true),
        Command::Flow {
            space,
            x,
            alpha0,
            center,
            t0,
            t1,
            steps,
            method,
        } => flow(&space, &x, &alpha0, &center, t0, t1, steps, method).map(|_| true),
        Command::Reduce { space, x } => reduce(&space, &x).map(|_| true),
        Command::Decompose { sigma, y, kind } => decompose(&sigma, &y, kind).map(|_| true),
        Command::PaperSuite { filter } => paper_suite(filter.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
