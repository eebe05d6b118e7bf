use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use genproj::convex_sets::SetDescriptor;
use genproj::harness::generators::{
    generate_feasibility_instance, generate_monotone_vi_instance, generate_start,
    stability_sweep,
};
use genproj::harness::report::{
    emit_trace, render_stability, render_sweep, stability_summary, write_output,
    ExperimentConfig, OutputFormat,
};
use genproj::harness::rng::{rng_from, stream_seed, uniform_vec};
use genproj::harness::sweep::run_inequality_sweep;
use genproj::solvers::{
    alternating_generalized_projections, subgradient_minimize,
    unconstrained_duality_iteration, vi_iterate_generalized, vi_iterate_metric, IterTrace,
    ScheduleKind, SquaredDistance, SubgradientScheme, VIProblem,
};
use genproj::{Error, GeometryConstants, Result};

#[derive(Parser)]
#[command(name = "genproj", version, about = "Projections and projection methods in l^p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Schedule {
    Constant,
    Harmonic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Generalized,
    Metric,
    Unconstrained,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Normres,
    Normsub,
    Polyak,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Alternating generalized projections onto random halfspaces.
    Altproj {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        sets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        max_sweeps: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Projection iterations for a random monotone variational inequality.
    Vi {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "constant")]
        schedule: Schedule,
        #[arg(long, value_enum, default_value = "generalized")]
        method: Method,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Use the operator `x + b`.
        #[arg(long)]
        identity_shift: bool,
    },
    /// Subgradient minimization of `||x - z||²₂` over `[-2, 2]^dim` with `z` in `[-1, 1]^dim`.
    Minimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "polyak")]
        scheme: Scheme,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Defaults to constant for polyak and harmonic otherwise.
        #[arg(long, value_enum)]
        schedule: Option<Schedule>,
    },
    /// Sampled inequality checks.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        checks: Vec<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Generalized projections onto a halfspace and its parallel shifts.
    Stability {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        sigma_sweep: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn config(common: &Common, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        p: common.p,
        dim: common.dim,
        seed,
        output_format: match common.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
        output_path: common.output.clone().unwrap_or_default(),
        ..Default::default()
    }
}

fn schedule_kind(s: Schedule) -> ScheduleKind {
    match s {
        Schedule::Constant => ScheduleKind::Constant,
        Schedule::Harmonic => ScheduleKind::Harmonic,
    }
}

fn options(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Writes the trace and maps its outcome to an exit code.
fn finish_trace(trace: &IterTrace, cfg: &ExperimentConfig) -> Result<u8> {
    emit_trace(trace, cfg)?;
    Ok(if trace.divergence.is_some() {
        3
    } else if trace.converged {
        0
    } else {
        1
    })
}

fn altproj(cfg: ExperimentConfig, m: usize) -> Result<u8> {
    cfg.validate()?;
    let s = cfg.space()?;
    let inst = generate_feasibility_instance(cfg.seed, m, cfg.dim, &s)?;
    let x0 = generate_start(cfg.seed, cfg.dim);
    let trace = alternating_generalized_projections(
        &inst.sets,
        &x0,
        Some(&inst.witness),
        &s,
        &GeometryConstants::default(),
        &cfg.solver_options(),
    )?;
    finish_trace(&trace, &cfg)
}

fn vi(cfg: ExperimentConfig, method: Method, identity_shift: bool) -> Result<u8> {
    cfg.validate()?;
    let s = cfg.space()?;
    let c = GeometryConstants::default();
    let (prob, reference) = generate_monotone_vi_instance(cfg.seed, cfg.dim, &s, identity_shift)?;
    let x0 = generate_start(cfg.seed, cfg.dim);
    let sched = cfg.schedule()?;
    let opts = cfg.solver_options();
    let trace = match method {
        Method::Generalized => {
            vi_iterate_generalized(&prob, &x0, &sched, reference.as_ref(), &s, &c, &opts)?
        }
        Method::Metric => vi_iterate_metric(&prob, &x0, &sched, reference.as_ref(), &s, &c, &opts)?,
        Method::Unconstrained => {
            let free = VIProblem::new(prob.operator, prob.target, None)?;
            unconstrained_duality_iteration(&free, &x0, &sched, None, &s, &opts)?
        }
    };
    finish_trace(&trace, &cfg)
}

fn minimize(cfg: ExperimentConfig, scheme: Scheme) -> Result<u8> {
    cfg.validate()?;
    let s = cfg.space()?;
    let mut rng = rng_from(stream_seed(cfg.seed, "minimize"));
    let center = uniform_vec(&mut rng, cfg.dim, -1.0, 1.0);
    let omega = SetDescriptor::boxed(vec![-2.0; cfg.dim], vec![2.0; cfg.dim])?;
    let scheme = match scheme {
        Scheme::Normres => SubgradientScheme::NormalizedResidual,
        Scheme::Normsub => SubgradientScheme::NormalizedSubgradient,
        Scheme::Polyak => SubgradientScheme::Polyak,
    };
    let trace = subgradient_minimize(
        &SquaredDistance { center },
        Some(0.0),
        scheme,
        &omega,
        &generate_start(cfg.seed, cfg.dim),
        &cfg.schedule()?,
        &s,
        &GeometryConstants::default(),
        &cfg.solver_options(),
    )?;
    finish_trace(&trace, &cfg)
}

fn verify(cfg: ExperimentConfig, checks: &[String]) -> Result<u8> {
    let labels: Vec<&str> = checks.iter().map(|c| c.trim()).collect();
    let records = run_inequality_sweep(&cfg, &labels)?;
    write_output(&cfg, &render_sweep(&records, &cfg)?)?;
    Ok(if records.iter().all(|r| r.passed) { 0 } else { 1 })
}

fn stability(cfg: ExperimentConfig, sigmas: &[f64]) -> Result<u8> {
    let s = cfg.space()?;
    let reports = stability_sweep(cfg.seed, sigmas, &s, &GeometryConstants::default())?;
    write_output(&cfg, &render_stability(&reports, &cfg)?)?;
    let summary = stability_summary(&reports);
    Ok(if summary.passed && summary.monotone { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Altproj {
            common,
            sets,
            seed,
            max_sweeps,
            tol,
        } => {
            let cfg = ExperimentConfig {
                max_iter: max_sweeps,
                tol,
                options: options(&[("sets", sets.to_string())]),
                ..config(&common, seed)
            };
            altproj(cfg, sets)
        }
        Command::Vi {
            common,
            seed,
            alpha,
            schedule,
            method,
            max_iter,
            tol,
            identity_shift,
        } => {
            let name = match method {
                Method::Generalized => "generalized",
                Method::Metric => "metric",
                Method::Unconstrained => "unconstrained",
            };
            let cfg = ExperimentConfig {
                max_iter,
                tol,
                alpha0: alpha,
                schedule_kind: schedule_kind(schedule),
                options: options(&[
                    ("method", name.to_string()),
                    ("identity_shift", identity_shift.to_string()),
                ]),
                ..config(&common, seed)
            };
            vi(cfg, method, identity_shift)
        }
        Command::Minimize {
            common,
            seed,
            scheme,
            alpha,
            max_iter,
            tol,
            schedule,
        } => {
            let default = match scheme {
                Scheme::Polyak => Schedule::Constant,
                _ => Schedule::Harmonic,
            };
            let name = match scheme {
                Scheme::Normres => "normres",
                Scheme::Normsub => "normsub",
                Scheme::Polyak => "polyak",
            };
            let cfg = ExperimentConfig {
                max_iter,
                tol,
                alpha0: alpha,
                schedule_kind: schedule_kind(schedule.unwrap_or(default)),
                options: options(&[("scheme", name.to_string())]),
                ..config(&common, seed)
            };
            minimize(cfg, scheme)
        }
        Command::Verify {
            common,
            seed,
            samples,
            checks,
            tol,
        } => {
            let cfg = ExperimentConfig {
                num_samples: samples,
                tol,
                options: options(&[("checks", checks.join(","))]),
                ..config(&common, seed)
            };
            verify(cfg, &checks)
        }
        Command::Stability {
            common,
            sigma_sweep,
            seed,
        } => {
            let list: Vec<String> = sigma_sweep.iter().map(|v| format!("{v:e}")).collect();
            let cfg = ExperimentConfig {
                options: options(&[("sigma_sweep", list.join(","))]),
                ..config(&common, seed)
            };
            stability(cfg, &sigma_sweep)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Divergence { .. } => 3,
                Error::InfeasibleInstance { .. } => 1,
                _ => 2,
            })
        }
    }
}
