//! `stcp` command-line interface.
//!
//! Every subcommand resolves its arguments into a [`Job`] that carries the
//! problem itself and every option with defaults filled in. The job is
//! echoed in the report's `config`, and `stcp replay` runs it again.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use stcp::io::{self, claim_verdict, ProblemFile, RunReport};
use stcp::probe::{self, DirectionGridSpec};
use stcp::structure::{self, CheckOptions};
use stcp::{Error, NcpKind, ResidualConfig, SampleSpace, SolverOptions};

#[derive(Parser)]
#[command(
    name = "stcp",
    version,
    about = "Expected residual minimization and R0 checks for stochastic tensor complementarity problems"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Seed for random starts, directions and perturbations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Main tolerance: checker zero tolerance, solver gradient tolerance,
    /// or degenerate-set violation tolerance for `xi` and `prop42`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Simplex grid resolution (checkers and coercivity scans).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Random starts (checkers), multistarts (solve) or random directions (scan).
    #[arg(long, global = true)]
    starts: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Add wall-clock time to the report (breaks byte-identical replays).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Clone)]
struct ProblemArg {
    /// Problem file path, or `builtin:<name>` for a built-in example.
    problem: String,
}

#[derive(Args, Clone)]
struct TargetArg {
    /// Check realization `k` (default 0).
    #[arg(long, conflicts_with = "mean")]
    realization: Option<usize>,
    /// Check the mean tensor.
    #[arg(long)]
    mean: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Erm,
    Ev,
}

#[derive(Clone, Copy, ValueEnum)]
enum NcpArg {
    Min,
    Fb,
}

impl From<NcpArg> for NcpKind {
    fn from(n: NcpArg) -> Self {
        match n {
            NcpArg::Min => NcpKind::Min,
            NcpArg::Fb => NcpKind::Fb,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether one realization (or the mean tensor) is R0.
    CheckR0 {
        #[command(flatten)]
        problem: ProblemArg,
        #[command(flatten)]
        target: TargetArg,
    },
    /// Decide whether the random tensor is stochastic R0.
    CheckSr0 {
        #[command(flatten)]
        problem: ProblemArg,
    },
    /// List degenerate directions of one realization (or the mean tensor).
    Xi {
        #[command(flatten)]
        problem: ProblemArg,
        #[command(flatten)]
        target: TargetArg,
    },
    /// Minimize the expected residual (or the EV merit) over x >= 0.
    Solve {
        #[command(flatten)]
        problem: ProblemArg,
        #[arg(long, value_enum, default_value = "erm")]
        method: Method,
        #[arg(long, value_enum, default_value = "fb")]
        ncp: NcpArg,
        /// Smoothing parameter for a single MIN stage (empty schedule).
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        max_iterations: Option<usize>,
    },
    /// Evaluate G along one ray.
    RayProbe {
        #[command(flatten)]
        problem: ProblemArg,
        /// Comma-separated nonnegative direction.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        direction: Vec<f64>,
        #[arg(long, value_enum, default_value = "min")]
        ncp: NcpArg,
        /// Comma-separated increasing lambdas (default 10^(k/2), k = 0..8).
        #[arg(long, value_delimiter = ',')]
        lambdas: Vec<f64>,
    },
    /// Probe rays over a simplex grid of directions plus random ones.
    CoercivityScan {
        #[command(flatten)]
        problem: ProblemArg,
        #[arg(long, value_enum, default_value = "min")]
        ncp: NcpArg,
        #[arg(long, value_delimiter = ',')]
        lambdas: Vec<f64>,
        /// Omit the per-direction reports from the payload.
        #[arg(long)]
        summary_only: bool,
    },
    /// Compare G(0) with the large-lambda behaviour along a witness ray.
    BoundednessProbe {
        #[command(flatten)]
        problem: ProblemArg,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        witness: Vec<f64>,
        #[arg(long, value_enum, default_value = "min")]
        ncp: NcpArg,
        #[arg(long, value_delimiter = ',')]
        lambdas: Vec<f64>,
    },
    /// Check the mean tensor and the stochastic-R0 property together.
    Prop41 {
        #[command(flatten)]
        problem: ProblemArg,
    },
    /// Check whether a mean-zero perturbation rules out the degenerate
    /// directions of a base tensor.
    Prop42 {
        /// Base problem; realization 0 is the base tensor.
        #[command(flatten)]
        problem: ProblemArg,
        /// Perturbation problem (centered before use if requested).
        #[arg(long)]
        perturbation: String,
        /// Subtract the sample mean from the perturbation first.
        #[arg(long)]
        center: bool,
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1")]
        b_grid: Vec<f64>,
    },
    /// Fraction of random perturbations under which an R0 tensor stays R0.
    Stability {
        #[command(flatten)]
        problem: ProblemArg,
        #[command(flatten)]
        target: TargetArg,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long, default_value_t = 20)]
        draws: usize,
    },
    /// Print a built-in problem file.
    Example {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(io::BUILTIN_NAMES))]
        name: String,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    /// Re-run the configuration echoed in a report.
    Replay {
        report: PathBuf,
        /// Exit with status 3 unless the new report is byte-identical.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Target {
    Realization { index: usize },
    Mean,
}

impl Target {
    fn from_arg(t: &TargetArg) -> Self {
        if t.mean {
            Target::Mean
        } else {
            Target::Realization {
                index: t.realization.unwrap_or(0),
            }
        }
    }

    fn tensor(&self, space: &SampleSpace) -> stcp::Result<stcp::Tensor> {
        match *self {
            Target::Mean => Ok(space.expectation_tensor()),
            Target::Realization { index } => Ok(space.realization_space(index)?.realizations()[0].tensor.clone()),
        }
    }
}

/// A fully resolved run.
// Built once per invocation, so variant size does not matter.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Job {
    CheckR0 {
        problem: ProblemFile,
        target: Target,
        options: CheckOptions,
    },
    CheckSr0 {
        problem: ProblemFile,
        options: CheckOptions,
    },
    Xi {
        problem: ProblemFile,
        target: Target,
        options: CheckOptions,
        violation_tolerance: f64,
    },
    Solve {
        problem: ProblemFile,
        method: Method,
        config: ResidualConfig,
        options: SolverOptions,
    },
    RayProbe {
        problem: ProblemFile,
        config: ResidualConfig,
        direction: Vec<f64>,
        lambdas: Vec<f64>,
    },
    CoercivityScan {
        problem: ProblemFile,
        config: ResidualConfig,
        spec: DirectionGridSpec,
        summary_only: bool,
    },
    BoundednessProbe {
        problem: ProblemFile,
        config: ResidualConfig,
        witness: Vec<f64>,
        lambdas: Vec<f64>,
    },
    Prop41 {
        problem: ProblemFile,
        options: CheckOptions,
    },
    Prop42 {
        problem: ProblemFile,
        perturbation: ProblemFile,
        center: bool,
        b_grid: Vec<f64>,
        violation_tolerance: f64,
        options: CheckOptions,
    },
    Stability {
        problem: ProblemFile,
        target: Target,
        radius: f64,
        draws: usize,
        seed: u64,
        options: CheckOptions,
    },
}

impl Job {
    fn name(&self) -> &'static str {
        match self {
            Job::CheckR0 { .. } => "check-r0",
            Job::CheckSr0 { .. } => "check-sr0",
            Job::Xi { .. } => "xi",
            Job::Solve { .. } => "solve",
            Job::RayProbe { .. } => "ray-probe",
            Job::CoercivityScan { .. } => "coercivity-scan",
            Job::BoundednessProbe { .. } => "boundedness-probe",
            Job::Prop41 { .. } => "prop41",
            Job::Prop42 { .. } => "prop42",
            Job::Stability { .. } => "stability",
        }
    }

    fn seed(&self) -> u64 {
        match self {
            Job::CheckR0 { options, .. }
            | Job::CheckSr0 { options, .. }
            | Job::Xi { options, .. }
            | Job::Prop41 { options, .. }
            | Job::Prop42 { options, .. } => options.seed,
            Job::Solve { options, .. } => options.seed,
            Job::CoercivityScan { spec, .. } => spec.seed,
            Job::Stability { seed, .. } => *seed,
            Job::RayProbe { .. } | Job::BoundednessProbe { .. } => 0,
        }
    }
}

fn load_problem(arg: &str) -> stcp::Result<ProblemFile> {
    let file = match arg.strip_prefix("builtin:") {
        Some(name) => io::builtin_example(name, 3, 3)?,
        None => io::parse_problem_path(std::path::Path::new(arg))?.file,
    };
    file.to_space()?;
    Ok(file)
}

fn check_options(g: &Global) -> CheckOptions {
    let d = CheckOptions::default();
    CheckOptions {
        grid_resolution: g.grid.or(d.grid_resolution),
        random_starts: g.starts.unwrap_or(d.random_starts),
        seed: g.seed,
        zero_tolerance: g.tol.unwrap_or(d.zero_tolerance),
        ..d
    }
}

fn residual(ncp: NcpArg, mu: Option<f64>) -> stcp::Result<ResidualConfig> {
    ResidualConfig::new(ncp.into(), mu.unwrap_or(0.0))
}

fn resolve(cmd: Cmd, g: &Global) -> stcp::Result<Job> {
    let lambdas = |l: Vec<f64>| if l.is_empty() { probe::default_lambda_grid() } else { l };
    Ok(match cmd {
        Cmd::CheckR0 { problem, target } => Job::CheckR0 {
            problem: load_problem(&problem.problem)?,
            target: Target::from_arg(&target),
            options: check_options(g),
        },
        Cmd::CheckSr0 { problem } => Job::CheckSr0 {
            problem: load_problem(&problem.problem)?,
            options: check_options(g),
        },
        Cmd::Xi { problem, target } => Job::Xi {
            problem: load_problem(&problem.problem)?,
            target: Target::from_arg(&target),
            options: CheckOptions {
                zero_tolerance: CheckOptions::default().zero_tolerance,
                ..check_options(g)
            },
            violation_tolerance: g.tol.unwrap_or(1e-8),
        },
        Cmd::Solve {
            problem,
            method,
            ncp,
            mu,
            max_iterations,
        } => {
            let d = SolverOptions::default();
            let mut options = SolverOptions {
                max_iterations: max_iterations.unwrap_or(d.max_iterations),
                gradient_tolerance: g.tol.unwrap_or(d.gradient_tolerance),
                multistart_count: g.starts.unwrap_or(d.multistart_count),
                seed: g.seed,
                ..d
            };
            if mu.is_some() {
                options.mu_schedule.clear();
            }
            Job::Solve {
                problem: load_problem(&problem.problem)?,
                method,
                config: residual(ncp, mu)?,
                options,
            }
        }
        Cmd::RayProbe {
            problem,
            direction,
            ncp,
            lambdas: l,
        } => Job::RayProbe {
            problem: load_problem(&problem.problem)?,
            config: residual(ncp, None)?,
            direction,
            lambdas: lambdas(l),
        },
        Cmd::CoercivityScan {
            problem,
            ncp,
            lambdas: l,
            summary_only,
        } => {
            let d = DirectionGridSpec::default();
            Job::CoercivityScan {
                problem: load_problem(&problem.problem)?,
                config: residual(ncp, None)?,
                spec: DirectionGridSpec {
                    resolution: g.grid,
                    random_directions: g.starts.unwrap_or(d.random_directions),
                    seed: g.seed,
                    lambdas: lambdas(l),
                },
                summary_only,
            }
        }
        Cmd::BoundednessProbe {
            problem,
            witness,
            ncp,
            lambdas: l,
        } => Job::BoundednessProbe {
            problem: load_problem(&problem.problem)?,
            config: residual(ncp, None)?,
            witness,
            lambdas: lambdas(l),
        },
        Cmd::Prop41 { problem } => Job::Prop41 {
            problem: load_problem(&problem.problem)?,
            options: check_options(g),
        },
        Cmd::Prop42 {
            problem,
            perturbation,
            center,
            b_grid,
        } => Job::Prop42 {
            problem: load_problem(&problem.problem)?,
            perturbation: load_problem(&perturbation)?,
            center,
            b_grid,
            violation_tolerance: g.tol.unwrap_or(1e-8),
            options: CheckOptions {
                zero_tolerance: CheckOptions::default().zero_tolerance,
                ..check_options(g)
            },
        },
        Cmd::Stability {
            problem,
            target,
            radius,
            draws,
        } => Job::Stability {
            problem: load_problem(&problem.problem)?,
            target: Target::from_arg(&target),
            radius,
            draws,
            seed: g.seed,
            options: check_options(g),
        },
        Cmd::Example { .. } | Cmd::Replay { .. } => unreachable!("handled before resolution"),
    })
}

fn claim_note(report: &mut structure::CheckReport, claim: Option<bool>) {
    if let Some(c) = claim {
        report.compare_claim(claim_verdict(c));
    }
}

fn to_value<T: Serialize>(v: &T) -> stcp::Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Numerical(format!("serialization failed: {e}")))
}

/// Runs a job, returning the payload and a one-line summary.
fn run(job: &Job) -> stcp::Result<(Value, String)> {
    match job {
        Job::CheckR0 {
            problem,
            target,
            options,
        } => {
            let space = problem.to_space()?;
            let mut r = structure::check_r0(&target.tensor(&space)?, options);
            if space.len() == 1 {
                claim_note(&mut r, problem.metadata.as_ref().and_then(|m| m.claims.r0));
            }
            let s = format!(
                "{}: witness {}, merit {:e}",
                r.verdict,
                point(&r.witness),
                r.certificate_residual
            );
            Ok((to_value(&r)?, s))
        }
        Job::CheckSr0 { problem, options } => {
            let space = problem.to_space()?;
            let mut r = structure::check_stochastic_r0(&space, options);
            claim_note(&mut r, problem.metadata.as_ref().and_then(|m| m.claims.stochastic_r0));
            let mut s = format!(
                "{}: witness {}, merit {:e}",
                r.verdict,
                point(&r.witness),
                r.certificate_residual
            );
            if r.claim.as_ref().is_some_and(|c| !c.agrees) {
                s.push_str(" (disagrees with the stated claim)");
            }
            Ok((to_value(&r)?, s))
        }
        Job::Xi {
            problem,
            target,
            options,
            violation_tolerance,
        } => {
            let space = problem.to_space()?;
            let pts = structure::find_xi_points(&target.tensor(&space)?, options, *violation_tolerance);
            let s = format!("{} degenerate directions found", pts.len());
            Ok((json!({ "points": to_value(&pts)?, "count": pts.len() }), s))
        }
        Job::Solve {
            problem,
            method,
            config,
            options,
        } => {
            let space = problem.to_space()?;
            let r = match method {
                Method::Erm => stcp::solve_erm(&space, config, options)?,
                Method::Ev => stcp::solve_ev(&space, config, options)?,
            };
            if !r.objective.is_finite() || r.x_star.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical("solver produced a non-finite iterate".into()));
            }
            let s = format!(
                "x* = {:?}, objective {:e}, converged {}",
                r.x_star, r.objective, r.converged
            );
            Ok((to_value(&r)?, s))
        }
        Job::RayProbe {
            problem,
            config,
            direction,
            lambdas,
        } => {
            let r = probe::ray_probe(&problem.to_space()?, direction, lambdas, config)?;
            let s = format!("{}, bound estimate {:e}", r.verdict, r.bound_estimate);
            Ok((to_value(&r)?, s))
        }
        Job::CoercivityScan {
            problem,
            config,
            spec,
            summary_only,
        } => {
            let mut r = probe::coercivity_scan(&problem.to_space()?, config, spec)?;
            let s = format!(
                "{} over {} directions, witness {}",
                r.aggregate,
                r.probes.len(),
                point(&r.witness)
            );
            if *summary_only {
                r.probes.clear();
            }
            Ok((to_value(&r)?, s))
        }
        Job::BoundednessProbe {
            problem,
            config,
            witness,
            lambdas,
        } => {
            let r = probe::boundedness_probe(&problem.to_space()?, config, witness, lambdas)?;
            let s = format!(
                "G(0) = {:e}, plateau {:e} (predicted {:e}), {:?}",
                r.g_zero, r.plateau_estimate, r.predicted_plateau, r.regime
            );
            Ok((to_value(&r)?, s))
        }
        Job::Prop41 { problem, options } => {
            let mut r = structure::check_prop41(&problem.to_space()?, options);
            claim_note(
                &mut r.stochastic,
                problem.metadata.as_ref().and_then(|m| m.claims.stochastic_r0),
            );
            let s = format!("mean {}, stochastic {}", r.mean_report.verdict, r.stochastic.verdict);
            Ok((to_value(&r)?, s))
        }
        Job::Prop42 {
            problem,
            perturbation,
            center,
            b_grid,
            violation_tolerance,
            options,
        } => {
            let base = problem.to_space()?.realizations()[0].tensor.clone();
            let mut pert = perturbation.to_space()?;
            if *center {
                pert = pert.centered();
            }
            let xi = structure::find_xi_points(&base, options, *violation_tolerance);
            let r = structure::check_prop42_conditions(&base, &pert, &xi, b_grid)?;
            let covered = r.points.iter().filter(|p| p.cond1 || p.cond2).count();
            let s = format!("{covered} of {} degenerate directions ruled out", r.points.len());
            Ok((to_value(&r)?, s))
        }
        Job::Stability {
            problem,
            target,
            radius,
            draws,
            seed,
            options,
        } => {
            let space = problem.to_space()?;
            let r = structure::perturbation_stability_test(&target.tensor(&space)?, *radius, *draws, *seed, options)?;
            let s = format!("{} of {} perturbed tensors remain R0", r.survivors, r.draws);
            Ok((to_value(&r)?, s))
        }
    }
}

fn report_for(job: &Job, timing: bool) -> stcp::Result<(RunReport, String)> {
    let start = Instant::now();
    let (payload, summary) = run(job)?;
    let wall_clock_seconds = timing.then(|| start.elapsed().as_secs_f64());
    Ok((
        RunReport {
            command: job.name().to_string(),
            config: to_value(job)?,
            payload,
            seed: job.seed(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds,
        },
        summary,
    ))
}

fn write_output(text: &str, output: &Option<PathBuf>) -> stcp::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> stcp::Result<()> {
    let g = cli.global;
    match cli.command {
        Cmd::Example { name, order, dim } => {
            let file = io::builtin_example(&name, order, dim)?;
            write_output(&io::to_canonical_json(&file)?, &g.output)
        }
        Cmd::Replay { report, verify } => {
            let original = std::fs::read_to_string(&report)
                .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", report.display())))?;
            let old = io::parse_report(&original)?;
            let job: Job = serde_json::from_value(old.config.clone()).map_err(|e| Error::Schema {
                field: "config".into(),
                message: e.to_string(),
            })?;
            let (new, summary) = report_for(&job, old.wall_clock_seconds.is_some())?;
            let text = io::emit_report(&new)?;
            eprintln!("{}: {summary}", job.name());
            if verify {
                if text == original {
                    eprintln!("replay: identical");
                } else {
                    write_output(&text, &g.output)?;
                    return Err(Error::Numerical("replayed report differs from the original".into()));
                }
            }
            write_output(&text, &g.output)
        }
        cmd => {
            let job = resolve(cmd, &g)?;
            let (report, summary) = report_for(&job, g.timing)?;
            eprintln!("{}: {summary}", job.name());
            write_output(&io::emit_report(&report)?, &g.output)
        }
    }
}

fn point(x: &Option<Vec<f64>>) -> String {
    x.as_ref().map_or_else(|| "none".into(), |v| format!("{v:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
