//! Argument parsing and dispatch for the `stiefelbench` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::thread;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, OptimizerKind, ProblemKind, RetractionKind, ScalarKind};
use crate::csvout;
use crate::exit::{usage, ExitStatus, Failure};
use crate::{gradcheck, optimize, retraction, speed, unitary};

#[derive(Debug, Parser)]
#[command(name = "stiefelbench", version, about = "Experiments for Cayley optimizers on the Stiefel manifold")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check Y(0) = X, the initial velocity, contraction and order of the
    /// fixed-point iteration on random (X, W).
    RetractionCheck(RetractionArgs),
    /// Mean unitarity error of complex Cayley SGD for s = 0..4 sweeps and the
    /// closed form.
    UnitaryCheck(UnitaryArgs),
    /// Run one optimizer on one problem and log every step as CSV.
    Optimize(OptimizeArgs),
    /// Time one fixed-point update against one closed-form update.
    Speed(SpeedArgs),
    /// Finite-difference check of every problem's gradient.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct RetractionArgs {
    /// Comma-separated NxP sizes.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "16x4,64x16,116x116")]
    pub sizes: Vec<(usize, usize)>,
    /// Random (X, W) cases, spread over the sizes.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 20)]
    pub order_cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ScalarKind::Real)]
    pub scalar: ScalarKind,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Use a step length beyond the contraction range and expect divergence.
    #[arg(long)]
    pub no_guard: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UnitaryArgs {
    /// Comma-separated row counts.
    #[arg(long, value_delimiter = ',', default_value = "116,512")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    pub p: usize,
    #[arg(long, default_value_t = 200)]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Largest sweep count compared.
    #[arg(long, default_value_t = 4)]
    pub max_s: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemKind,
    #[arg(long, value_enum, default_value_t = OptimizerKind::CayleySgd)]
    pub optimizer: OptimizerKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Rate of the constrained layer (toynet only).
    #[arg(long)]
    pub lr_stiefel: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Fixed-point sweeps per Cayley step.
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, value_enum)]
    pub retraction: Option<RetractionKind>,
    #[arg(long, value_enum)]
    pub scalar: Option<ScalarKind>,
    /// Largest tolerated ‖XᴴX − I‖_F for Cayley optimizers.
    #[arg(long)]
    pub ortho_tol: Option<f64>,
    #[arg(long)]
    pub log_every: Option<u64>,
    /// Independent runs with seeds seed, seed+1, …; needs --out.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpeedArgs {
    /// Comma-separated NxP sizes.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "8x2,64x16,128x128,512x512")]
    pub sizes: Vec<(usize, usize)>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 3)]
    pub warmup: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub s: usize,
    #[arg(long, value_enum, default_value_t = ScalarKind::Real)]
    pub scalar: ScalarKind,
    /// Sizes with fewer rows are reported but not asserted.
    #[arg(long, default_value_t = speed::ASSERT_MIN_N)]
    pub assert_min_n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Random directions per point.
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Check only one field; both by default.
    #[arg(long, value_enum)]
    pub scalar: Option<ScalarKind>,
    /// Double every analytic gradient; the check must then fail.
    #[arg(long)]
    pub corrupt_gradient: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (n, p) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxP, got `{s}`"))?;
    let n = n.trim().parse().map_err(|e| format!("`{n}`: {e}"))?;
    let p = p.trim().parse().map_err(|e| format!("`{p}`: {e}"))?;
    Ok((n, p))
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::Usage.code() } else { ExitStatus::Pass.code() };
        }
    };
    match dispatch(cli.command) {
        Ok(status) => status.code(),
        Err(f) => {
            eprintln!("stiefelbench: {f}");
            f.status().code()
        }
    }
}

fn dispatch(command: Command) -> Result<ExitStatus, Failure> {
    match command {
        Command::RetractionCheck(a) => retraction_check(a),
        Command::UnitaryCheck(a) => unitary_check(a),
        Command::Optimize(a) => optimize(a),
        Command::Speed(a) => speed(a),
        Command::Gradcheck(a) => gradcheck(a),
    }
}

fn status_of(pass: bool) -> ExitStatus {
    if pass {
        ExitStatus::Pass
    } else {
        ExitStatus::PropertyFailure
    }
}

fn retraction_check(a: RetractionArgs) -> Result<ExitStatus, Failure> {
    let defaults = retraction::RetractionConfig::default();
    let cfg = retraction::RetractionConfig {
        sizes: a.sizes,
        cases: a.trials,
        order_cases: a.order_cases,
        seed: a.seed,
        scalar: a.scalar,
        q: a.q.unwrap_or(defaults.q),
        eps: a.eps.unwrap_or(defaults.eps),
        no_guard: a.no_guard,
    };
    cfg.validate()?;
    let reports = retraction::run(&cfg)?;
    if let Some(path) = &a.out {
        let mut w = csvout::open(Some(path))?;
        w.write_record(retraction::CSV_HEADER)?;
        for r in &reports {
            w.write_record(r.csv_fields(cfg.no_guard))?;
        }
        w.flush()?;
    }
    for r in &reports {
        println!("{}", r.verdict(cfg.no_guard));
    }
    Ok(status_of(reports.iter().all(|r| r.passes(cfg.no_guard))))
}

fn unitary_check(a: UnitaryArgs) -> Result<ExitStatus, Failure> {
    let defaults = unitary::UnitaryConfig::default();
    let cfg = unitary::UnitaryConfig {
        sizes: a.sizes,
        p: a.p,
        steps: a.steps,
        seed: a.seed,
        lr: a.lr.unwrap_or(defaults.lr),
        beta: a.beta.unwrap_or(defaults.beta),
        q: a.q.unwrap_or(defaults.q),
        eps: a.eps.unwrap_or(defaults.eps),
        max_s: a.max_s,
    };
    cfg.validate()?;
    let report = unitary::run(&cfg)?;
    let mut w = csvout::open(a.out.as_deref())?;
    w.write_record(unitary::CSV_HEADER)?;
    for d in &report {
        for row in &d.rows {
            w.write_record(row.csv_fields())?;
        }
    }
    w.flush()?;
    drop(w);
    for d in &report {
        if a.out.is_some() {
            println!("{}", d.verdict());
        } else {
            eprintln!("{}", d.verdict());
        }
    }
    Ok(status_of(report.iter().all(|d| d.passes())))
}

pub fn experiment_config(a: &OptimizeArgs) -> ExperimentConfig {
    let d = ExperimentConfig::new(a.problem, a.optimizer);
    ExperimentConfig {
        n: a.n.unwrap_or(d.n),
        p: a.p.unwrap_or(if a.problem == ProblemKind::Procrustes { a.n.unwrap_or(d.p) } else { d.p }),
        steps: a.steps.unwrap_or(d.steps),
        seed: a.seed,
        lr: a.lr.unwrap_or(d.lr),
        lr_stiefel: a.lr_stiefel.unwrap_or(d.lr_stiefel),
        beta: a.beta.unwrap_or(d.beta),
        beta1: a.beta1.unwrap_or(d.beta1),
        beta2: a.beta2.unwrap_or(d.beta2),
        q: a.q.unwrap_or(d.q),
        eps: a.eps.unwrap_or(d.eps),
        s: a.s.unwrap_or(d.s),
        retraction: a.retraction.unwrap_or(d.retraction),
        scalar: a.scalar.unwrap_or(d.scalar),
        log_every: a.log_every.unwrap_or(d.log_every),
        ortho_tol: a.ortho_tol.unwrap_or(d.ortho_tol),
        ..d
    }
}

fn optimize(a: OptimizeArgs) -> Result<ExitStatus, Failure> {
    let cfg = experiment_config(&a);
    cfg.validate()?;
    if a.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    if a.jobs > 1 && a.out.is_none() {
        return Err(usage("--jobs above 1 needs --out; each run writes its own file"));
    }
    if a.jobs == 1 {
        let mut sink = csvout::open(a.out.as_deref())?;
        let summary = optimize::run_to_csv(&cfg, &mut sink)?;
        drop(sink);
        let line = summary.line(&cfg);
        if a.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
        return Ok(ExitStatus::Pass);
    }
    let base = a.out.clone().expect("checked above");
    let results: Vec<Result<String, Failure>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..a.jobs as u64)
            .map(|i| {
                let cfg = ExperimentConfig { seed: cfg.seed + i, ..cfg.clone() };
                let path = csvout::with_seed_suffix(&base, cfg.seed);
                scope.spawn(move || -> Result<String, Failure> {
                    let mut sink = csvout::open(Some(&path))?;
                    let summary = optimize::run_to_csv(&cfg, &mut sink)?;
                    Ok(summary.line(&cfg))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut worst = ExitStatus::Pass;
    let mut stdout = std::io::stdout().lock();
    for r in results {
        match r {
            Ok(line) => writeln!(stdout, "{line}")?,
            Err(f) => {
                eprintln!("stiefelbench: {f}");
                if f.status().code() > worst.code() {
                    worst = f.status();
                }
            }
        }
    }
    Ok(worst)
}

fn speed(a: SpeedArgs) -> Result<ExitStatus, Failure> {
    let cfg = speed::SpeedConfig {
        sizes: a.sizes,
        reps: a.reps,
        warmup: a.warmup,
        seed: a.seed,
        s: a.s,
        scalar: a.scalar,
        assert_min_n: a.assert_min_n,
    };
    cfg.validate()?;
    let timings = speed::run(&cfg)?;
    let mut w = csvout::open(a.out.as_deref())?;
    w.write_record(speed::CSV_HEADER)?;
    for t in &timings {
        w.write_record(t.csv_fields())?;
    }
    w.flush()?;
    drop(w);
    for t in &timings {
        if a.out.is_some() {
            println!("{}", t.verdict(cfg.assert_min_n));
        } else {
            eprintln!("{}", t.verdict(cfg.assert_min_n));
        }
    }
    Ok(status_of(timings.iter().all(|t| t.passes(cfg.assert_min_n))))
}

fn gradcheck(a: GradcheckArgs) -> Result<ExitStatus, Failure> {
    let cfg = gradcheck::GradcheckConfig {
        points: a.points,
        trials: a.trials,
        seed: a.seed,
        scalar: a.scalar,
        corrupt: a.corrupt_gradient,
    };
    cfg.validate()?;
    let checks = gradcheck::run(&cfg)?;
    if let Some(path) = &a.out {
        let mut w = csvout::open(Some(path))?;
        w.write_record(gradcheck::CSV_HEADER)?;
        for c in &checks {
            w.write_record(c.csv_fields())?;
        }
        w.flush()?;
    }
    for c in &checks {
        println!("{}", c.verdict());
    }
    Ok(status_of(checks.iter().all(|c| c.passes())))
}
